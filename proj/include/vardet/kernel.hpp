#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vardet/criteria.hpp"
#include "vardet/linalg.hpp"
#include "vardet/random.hpp"
#include "vardet/state.hpp"

namespace vardet {

/// A linear subspace given by basis columns (unit-norm kets).
class Subspace {
 public:
  Subspace(Matrix basis, DimensionSpec dims, bool orthonormal = true)
      : basis_(std::move(basis)), dims_(std::move(dims)), orthonormal_(orthonormal) {
    detail::require(basis_.rows() == dims_.total(), "Subspace: basis rows do not match dimensions");
    detail::require(basis_.cols() >= 1, "Subspace: empty basis");
    for (int c = 0; c < basis_.cols(); ++c) {
      detail::require(std::abs(basis_.col(c).norm() - 1.0) <= kAlgebraicTol,
                      "Subspace: basis vectors must be normalized");
    }
    Eigen::JacobiSVD<Matrix> svd(basis_);
    detail::require(svd.singularValues().minCoeff() > kIndependenceTol,
                    "Subspace: basis vectors are not linearly independent");
    if (orthonormal_) {
      Matrix gram = basis_.adjoint() * basis_;
      detail::require((gram - Matrix::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff()
                          <= kAlgebraicTol,
                      "Subspace: basis flagged orthonormal but Gram matrix is not identity");
    }
  }

  static Subspace from_kets(const std::vector<Ket>& kets, bool orthonormal = true) {
    detail::require(!kets.empty(), "Subspace: empty ket list");
    Matrix b(kets.front().size(), kets.size());
    for (std::size_t c = 0; c < kets.size(); ++c) {
      detail::require(kets[c].dims() == kets.front().dims(), "Subspace: mixed dimensions");
      b.col(static_cast<int>(c)) = kets[c].amplitudes();
    }
    return Subspace(std::move(b), kets.front().dims(), orthonormal);
  }

  const Matrix& basis() const { return basis_; }
  const DimensionSpec& dims() const { return dims_; }
  bool orthonormal() const { return orthonormal_; }
  int rank() const { return static_cast<int>(basis_.cols()); }

  /// Orthogonal projector onto the span.
  Matrix projector() const {
    if (orthonormal_) return basis_ * basis_.adjoint();
    Eigen::HouseholderQR<Matrix> qr(basis_);
    Matrix q = qr.householderQ();
    Matrix qr_cols = q.leftCols(basis_.cols());
    return qr_cols * qr_cols.adjoint();
  }

 private:
  Matrix basis_;
  DimensionSpec dims_;
  bool orthonormal_;
};

/// Orthonormal basis of the complement of a single ket.
inline Subspace orthogonal_complement(const Ket& psi) {
  int n = psi.size();
  detail::require(n >= 2, "orthogonal_complement: space too small");
  Matrix col(n, 1);
  col.col(0) = psi.amplitudes();
  Eigen::HouseholderQR<Matrix> qr(col);
  Matrix q = qr.householderQ();
  return Subspace(q.rightCols(n - 1), psi.dims(), true);
}

/// Draws random combinations in the span until one is clearly entangled
/// across the bipartite cut, keeping the best of up to `max_attempts`.
inline Ket find_entangled_vector(const Subspace& subspace, std::uint64_t seed,
                                 int max_attempts = 1000) {
  detail::require(subspace.dims().count() == 2, "find_entangled_vector: bipartite systems only");
  Rng rng(seed);
  double best_coeff = -1.0;
  Vector best;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Vector c = random_unit_vector(subspace.rank(), rng);
    Vector v = subspace.basis() * c;
    double n = v.norm();
    if (n < 1e-12) continue;
    v /= n;
    double coeff = second_schmidt_coefficient(Ket(v, subspace.dims()));
    if (coeff > best_coeff) {
      best_coeff = coeff;
      best = v;
    }
  }
  if (best_coeff <= 1e-4) {
    throw std::runtime_error(
        "find_entangled_vector: all candidates product-like; the subspace may contain only "
        "product vectors");
  }
  return Ket(best, subspace.dims());
}

/// A (generally non-orthogonal) basis of the span in which every element is
/// entangled.  A basis that is already all-entangled is returned unchanged.
/// Otherwise a seeded random orthonormal basis of the span is drawn (its
/// elements are generically entangled already); any product-like leftovers
/// are nudged towards an entangled member of the span, independence is
/// re-verified, and the nudge grows on failure.
inline std::vector<Ket> entangled_basis(const Subspace& subspace, double epsilon,
                                        std::uint64_t seed) {
  detail::require(epsilon > 0.0, "entangled_basis: epsilon must be positive");
  constexpr double kEntangledFloor = 1e-6;
  const DimensionSpec& dims = subspace.dims();

  bool input_entangled = true;
  for (int c = 0; c < subspace.rank(); ++c) {
    if (second_schmidt_coefficient(Ket(subspace.basis().col(c), dims)) <= kEntangledFloor) {
      input_entangled = false;
      break;
    }
  }
  if (input_entangled) {
    std::vector<Ket> out;
    for (int c = 0; c < subspace.rank(); ++c) out.emplace_back(subspace.basis().col(c), dims);
    return out;
  }

  Matrix base = subspace.basis();
  if (!subspace.orthonormal()) {
    Eigen::HouseholderQR<Matrix> qr(base);
    Matrix q = qr.householderQ();
    base = q.leftCols(base.cols());
  }

  double eps = epsilon;
  for (int retry = 0; retry < 50; ++retry) {
    // Random in-span rotation of the orthonormal basis.
    Rng rng(derived_seed(seed, 1000 + retry));
    int r = subspace.rank();
    Matrix mix(r, r);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) mix(i, j) = Complex(g(rng), g(rng));
    }
    Eigen::HouseholderQR<Matrix> mix_qr(mix);
    Matrix unitary = mix_qr.householderQ();
    Matrix rotated = base * unitary;

    Ket psi_e = find_entangled_vector(subspace, derived_seed(seed, retry));
    Matrix candidate(rotated.rows(), rotated.cols());
    bool all_entangled = true;
    for (int c = 0; c < rotated.cols(); ++c) {
      Vector v = rotated.col(c);
      if (second_schmidt_coefficient(Ket(v, dims)) <= kEntangledFloor) {
        v = (v + eps * psi_e.amplitudes()).normalized();
      }
      if (second_schmidt_coefficient(Ket(v, dims)) <= kEntangledFloor) {
        all_entangled = false;
        break;
      }
      candidate.col(c) = v;
    }
    if (all_entangled) {
      Eigen::JacobiSVD<Matrix> svd(candidate);
      if (svd.singularValues().minCoeff() > kIndependenceTol) {
        std::vector<Ket> out;
        for (int c = 0; c < candidate.cols(); ++c) out.emplace_back(candidate.col(c), dims);
        return out;
      }
    }
    eps = std::min(2.0 * eps, 0.5);
  }
  throw std::runtime_error("entangled_basis: could not reach an independent entangled basis");
}

/// Projector set adapted to an entangled pure state: the state itself plus an
/// entangled basis of its orthogonal complement.  The variance sum vanishes on
/// the state while staying strictly positive on every product state.
inline ObservableSet entangled_kernel_projectors(const Ket& psi, std::uint64_t seed,
                                                 double epsilon = 0.1) {
  detail::require(psi.dims().count() == 2, "entangled_kernel_projectors: bipartite systems only");
  if (second_schmidt_coefficient(psi) <= 1e-7) {
    throw std::invalid_argument("entangled_kernel_projectors: target state is a product state");
  }
  std::vector<Observable> ms;
  ms.push_back(projector(psi));
  for (const Ket& k : entangled_basis(orthogonal_complement(psi), epsilon, seed)) {
    ms.push_back(projector(k));
  }
  return ObservableSet(std::move(ms));
}

}  // namespace vardet
