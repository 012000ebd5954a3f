#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "vardet/linalg.hpp"
#include "vardet/state.hpp"

namespace vardet {

using Rng = std::mt19937_64;

/// Splitmix-style stream derivation so (seed, index) pairs give independent,
/// order-insensitive streams.
inline std::uint64_t derived_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Vector random_unit_vector(int d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(g(rng), g(rng));
  double n = v.norm();
  if (n < 1e-12) return random_unit_vector(d, rng);
  return v / n;
}

inline Ket random_ket(const DimensionSpec& dims, Rng& rng) {
  return Ket(random_unit_vector(dims.total(), rng), dims);
}

inline Ket random_product_ket(const DimensionSpec& dims, Rng& rng) {
  std::vector<Ket> locals;
  for (std::size_t k = 0; k < dims.count(); ++k) {
    locals.emplace_back(random_unit_vector(dims.dim(k), rng), DimensionSpec{dims.dim(k)});
  }
  return tensor(locals);
}

inline Observable random_observable(const DimensionSpec& dims, Rng& rng,
                                    bool unit_spectral_norm = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  int d = dims.total();
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  Matrix h = (a + a.adjoint()) / 2.0;
  if (unit_spectral_norm) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    if (norm > 0) h /= norm;
  }
  return Observable(std::move(h), dims);
}

/// Ginibre construction: G G^dag / Tr, full rank unless requested otherwise.
inline DensityMatrix random_density_matrix(const DimensionSpec& dims, Rng& rng, int rank = -1) {
  std::normal_distribution<double> g(0.0, 1.0);
  int d = dims.total();
  if (rank <= 0 || rank > d) rank = d;
  Matrix gm(d, rank);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < rank; ++j) gm(i, j) = Complex(g(rng), g(rng));
  }
  Matrix rho = gm * gm.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho), dims);
}

inline std::vector<double> random_weights(int k, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(k);
  double sum = 0.0;
  for (double& x : w) {
    x = u(rng) + 1e-6;
    sum += x;
  }
  double acc = 0.0;
  for (double& x : w) {
    x /= sum;
    acc += x;
  }
  w.back() += 1.0 - acc;  // absorb rounding so the sum is exactly 1
  return w;
}

/// Random convex mixture of random pure product states.
inline DensityMatrix random_separable_state(const DimensionSpec& dims, int terms, Rng& rng) {
  std::vector<double> w = random_weights(terms, rng);
  Matrix m = Matrix::Zero(dims.total(), dims.total());
  for (int k = 0; k < terms; ++k) {
    Ket p = random_product_ket(dims, rng);
    m += w[k] * (p.amplitudes() * p.amplitudes().adjoint()).eval();
  }
  return DensityMatrix(std::move(m), dims);
}

inline MixtureDecomposition random_mixture(const DimensionSpec& dims, int terms, Rng& rng) {
  std::vector<double> w = random_weights(terms, rng);
  std::vector<DensityMatrix> comps;
  for (int k = 0; k < terms; ++k) comps.push_back(random_density_matrix(dims, rng));
  return MixtureDecomposition(std::move(w), std::move(comps));
}

}  // namespace vardet
