#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_support.hpp"

using namespace vardet;
using test_support::approx;
using test_support::brute_force_expectation;
using test_support::max_abs_diff;

TEST_CASE("DimensionSpec validates its entries") {
  CHECK(DimensionSpec({2, 3}).total() == 6);
  CHECK(DimensionSpec({2, 2, 2, 2}).total() == 16);
  CHECK_THROWS_AS(DimensionSpec(std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(DimensionSpec({2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(DimensionSpec({0}), std::invalid_argument);
  auto [l, r] = DimensionSpec({2, 3, 2}).split(2);
  CHECK(l.total() == 6);
  CHECK(r.total() == 2);
  CHECK_THROWS_AS(DimensionSpec({2, 2}).split(2), std::invalid_argument);
}

TEST_CASE("type invariants reject malformed inputs") {
  DimensionSpec d2{2, 2};
  Vector unnormalized = Vector::Ones(4);
  CHECK_THROWS_AS(Ket(unnormalized, d2), std::invalid_argument);
  CHECK_NOTHROW(Ket::normalized(unnormalized, d2));
  CHECK_THROWS_AS(Ket::normalized(Vector::Zero(4), d2), std::invalid_argument);

  Matrix not_hermitian(2, 2);
  not_hermitian << 0, 1, 0, 0;
  CHECK_THROWS_AS(Observable(not_hermitian, DimensionSpec{2}), std::invalid_argument);

  Matrix wrong_trace = Matrix::Identity(4, 4);
  CHECK_THROWS_AS(DensityMatrix(wrong_trace, d2), std::invalid_argument);

  Matrix negative = Matrix::Zero(4, 4);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(negative, d2), std::invalid_argument);

  CHECK_THROWS_AS(MixtureDecomposition({0.6, 0.6}, {DensityMatrix::maximally_mixed(d2),
                                                    DensityMatrix::maximally_mixed(d2)}),
                  std::invalid_argument);
}

TEST_CASE("tensor products") {
  DimensionSpec q{2};
  Observable id2(identity_matrix(2), q);
  Observable prod = tensor({id2, id2});
  CHECK(max_abs_diff(prod.matrix(), identity_matrix(4)) == 0.0);

  Ket k0 = basis_ket(q, {0});
  Ket k1 = basis_ket(q, {1});
  Ket k01 = tensor({k0, k1});
  CHECK(k01.amplitudes()(1) == Complex(1, 0));
  CHECK(k01.amplitudes().cwiseAbs().sum() == 1.0);

  // sign bookkeeping: sz (x) sz |01> = -|01>
  Matrix zz = kron(pauli_z(), pauli_z());
  Vector v = zz * k01.amplitudes();
  CHECK((v + k01.amplitudes()).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(tensor(std::vector<Ket>{}), std::invalid_argument);
  CHECK_THROWS_AS(tensor(std::vector<Observable>{}), std::invalid_argument);
}

TEST_CASE("expectation values") {
  DimensionSpec q{2};
  DensityMatrix zero = DensityMatrix::pure(basis_ket(q, {0}));
  CHECK(approx(expectation(zero, Observable(pauli_z(), q)), 1.0, 1e-14));
  CHECK(approx(expectation(DensityMatrix::maximally_mixed(q), Observable(pauli_x(), q)), 0.0,
               1e-14));

  DensityMatrix ghz = DensityMatrix::pure(ghz_ket(3));
  Matrix xxx = kron(kron(pauli_x(), pauli_x()), pauli_x());
  Observable oxxx(xxx, DimensionSpec{2, 2, 2});
  double direct = expectation(ghz, oxxx);
  CHECK(approx(direct, 1.0, 1e-12));
  CHECK(approx(direct, brute_force_expectation(ghz.matrix(), xxx), 1e-12));

  CHECK_THROWS_AS(expectation(zero, oxxx), std::invalid_argument);
}

TEST_CASE("variance basics and eigenstate property") {
  DimensionSpec q{2};
  Observable sz(pauli_z(), q);
  CHECK(variance(DensityMatrix::pure(basis_ket(q, {0})), sz) == 0.0);
  CHECK(approx(variance(DensityMatrix::maximally_mixed(q), sz), 1.0, 1e-14));

  // zero variance on a pure state exactly when it is an eigenstate
  Rng rng(101);
  DimensionSpec d{2, 2};
  for (int i = 0; i < 20; ++i) {
    Observable m = random_observable(d, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
    for (int k = 0; k < 4; ++k) {
      Ket eig = Ket::normalized(es.eigenvectors().col(k), d);
      CHECK(variance(DensityMatrix::pure(eig), m) <= 1e-10);
    }
  }
  for (int i = 0; i < 100; ++i) {
    Observable m = random_observable(d, rng);
    Ket psi = random_ket(d, rng);
    DensityMatrix rho = DensityMatrix::pure(psi);
    double var = variance(rho, m);
    if (var < 1e-10) {
      double mean = expectation(rho, m);
      CHECK((m.matrix() * psi.amplitudes() - mean * psi.amplitudes()).norm() < 1e-4);
    }
  }
}

TEST_CASE("variance is non-negative on 1000 random states") {
  Rng rng(7);
  DimensionSpec d{2, 3};
  for (int i = 0; i < 1000; ++i) {
    DensityMatrix rho = random_density_matrix(d, rng);
    Observable m = random_observable(d, rng);
    CHECK(variance(rho, m) >= -1e-12);
  }
}

TEST_CASE("mixture identity and mixing concavity") {
  Rng rng(13);
  DimensionSpec d{2, 2};
  for (int i = 0; i < 300; ++i) {
    MixtureDecomposition mix = random_mixture(d, 2 + static_cast<int>(i % 3), rng);
    DensityMatrix rho = mix.mixed();
    Observable m = random_observable(d, rng);
    double total = variance(rho, m);
    double rho_mean = expectation(rho, m);
    double decomposed = 0.0;
    double concave_sum = 0.0;
    for (std::size_t k = 0; k < mix.size(); ++k) {
      double mk = expectation(mix.components()[k], m);
      double vk = variance(mix.components()[k], m);
      decomposed += mix.weights()[k] * (vk + (mk - rho_mean) * (mk - rho_mean));
      concave_sum += mix.weights()[k] * vk;
    }
    CHECK(approx(total, decomposed, 1e-10));
    CHECK(total >= concave_sum - 1e-12);
  }
  // concavity alone on a larger sample
  for (int i = 0; i < 700; ++i) {
    MixtureDecomposition mix = random_mixture(d, 3, rng);
    DensityMatrix rho = mix.mixed();
    Observable m = random_observable(d, rng);
    double concave_sum = 0.0;
    for (std::size_t k = 0; k < mix.size(); ++k) {
      concave_sum += mix.weights()[k] * variance(mix.components()[k], m);
    }
    CHECK(variance(rho, m) >= concave_sum - 1e-12);
  }
}

TEST_CASE("schmidt decomposition") {
  DimensionSpec d{2, 2};
  SchmidtDecomposition product = schmidt_decompose(basis_ket(d, {0, 0}));
  CHECK(approx(product.coefficients(0), 1.0, 1e-14));
  CHECK(approx(product.coefficients(1), 0.0, 1e-14));

  SchmidtDecomposition bell = schmidt_decompose(singlet_ket());
  CHECK(approx(bell.coefficients(0), 1.0 / std::sqrt(2.0), 1e-12));
  CHECK(approx(bell.coefficients(1), 1.0 / std::sqrt(2.0), 1e-12));

  double a = std::sqrt(0.8), b = std::sqrt(0.2);
  SchmidtDecomposition skew = schmidt_decompose(schmidt_pair_ket(a, b));
  CHECK(approx(skew.coefficients(0), a, 1e-12));
  CHECK(approx(skew.coefficients(1), b, 1e-12));

  // coefficients are a distribution and the decomposition reconstructs psi
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    Ket psi = random_ket(DimensionSpec{2, 3}, rng);
    SchmidtDecomposition sd = schmidt_decompose(psi);
    CHECK(approx(sd.coefficients.squaredNorm(), 1.0, 1e-10));
    Vector rebuilt = Vector::Zero(6);
    for (int s = 0; s < sd.coefficients.size(); ++s) {
      rebuilt += sd.coefficients(s) * kron(Vector(sd.left_vectors.col(s)),
                                           Vector(sd.right_vectors.col(s)));
    }
    CHECK((rebuilt - psi.amplitudes()).norm() < 1e-10);
    CHECK(approx(max_product_overlap_bipartite(psi), sd.coefficients(0), 1e-14));
  }
}

TEST_CASE("partial transpose and the Peres oracle") {
  DimensionSpec d{2, 2};
  CHECK(approx(ppt_min_eigenvalue(DensityMatrix::pure(basis_ket(d, {0, 1})), 1), 0.0, 1e-12));
  CHECK(approx(ppt_min_eigenvalue(DensityMatrix::pure(singlet_ket()), 1), -0.5, 1e-12));
  CHECK(approx(ppt_min_eigenvalue(isotropic_mixture(singlet_ket(), 1.0 / 3.0), 1), 0.0, 1e-12));

  // double partial transpose restores the matrix bit-exactly
  Rng rng(31);
  for (std::size_t sub : {0u, 1u}) {
    DensityMatrix rho = random_density_matrix(DimensionSpec{2, 3}, rng);
    Matrix once = partial_transpose(rho, sub);
    Matrix twice = partial_transpose(once, rho.dims(), sub);
    CHECK((twice.array() == rho.matrix().array()).all());
  }
  CHECK_THROWS_AS(partial_transpose(DensityMatrix::maximally_mixed(d), 2), std::invalid_argument);
}

TEST_CASE("hermitian matrix functions") {
  Matrix zero = Matrix::Zero(3, 3);
  CHECK(max_abs_diff(hermitian_exp(zero), identity_matrix(3)) < 1e-14);

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 1;
  diag(1, 1) = 2;
  Matrix ediag = hermitian_exp(diag);
  CHECK(approx(ediag(0, 0).real(), std::exp(1.0), 1e-12));
  CHECK(approx(ediag(1, 1).real(), std::exp(2.0), 1e-12));

  CHECK(max_abs_diff(hermitian_log(hermitian_exp(pauli_x())), pauli_x()) < 1e-10);
  CHECK_THROWS_AS(hermitian_log(diag - Matrix::Identity(2, 2)), std::domain_error);
  Matrix not_herm(2, 2);
  not_herm << 0, 1, 0, 0;
  CHECK_THROWS_AS(hermitian_exp(not_herm), std::invalid_argument);
}

TEST_CASE("subsystem permutation") {
  DimensionSpec d{2, 3};
  Matrix zx = kron(pauli_z(), identity_matrix(3));
  Matrix swapped = permute_subsystems(zx, d, {1, 0});
  CHECK(max_abs_diff(swapped, kron(identity_matrix(3), pauli_z())) == 0.0);

  Rng rng(17);
  DimensionSpec d3{2, 3, 2};
  Ket psi = random_ket(d3, rng);
  Vector forth = permute_subsystems(psi.amplitudes(), d3, {2, 0, 1});
  // inverse of the cycle (2,0,1) is (1,2,0)
  Vector back = permute_subsystems(forth, permute_dims(d3, {2, 0, 1}), {1, 2, 0});
  CHECK((back.array() == psi.amplitudes().array()).all());
  CHECK_THROWS_AS(permute_subsystems(psi.amplitudes(), d3, {0, 0, 1}), std::invalid_argument);

  // expectation values are invariant under consistent reordering of state
  // and observable
  for (int trial = 0; trial < 20; ++trial) {
    Observable m = random_observable(d3, rng);
    std::vector<Ket> locals = {random_ket(DimensionSpec{2}, rng), random_ket(DimensionSpec{3}, rng),
                               random_ket(DimensionSpec{2}, rng)};
    std::vector<int> order = {2, 0, 1};
    Observable permuted(permute_subsystems(m.matrix(), d3, order), permute_dims(d3, order));
    Ket reordered = tensor({locals[2], locals[0], locals[1]});
    double original = expectation(DensityMatrix::pure(tensor(locals)), m);
    double moved = expectation(DensityMatrix::pure(reordered), permuted);
    CHECK(std::abs(original - moved) < 1e-12);
  }
}
