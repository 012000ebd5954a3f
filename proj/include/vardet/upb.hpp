#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vardet/kernel.hpp"
#include "vardet/optimizer.hpp"
#include "vardet/state.hpp"

namespace vardet {

/// Pairwise-orthogonal bipartite product vectors not spanning the space.
/// Unextendibility (no product vector in the orthocomplement) is a numerical
/// certificate, checked on demand via extendibility_value(): the type itself
/// must admit extendible candidate sets so that the certificate has something
/// to reject.
class UPB {
 public:
  UPB(std::vector<Ket> vectors, DimensionSpec dims)
      : vectors_(std::move(vectors)), dims_(std::move(dims)) {
    detail::require(dims_.count() == 2, "UPB: bipartite systems only");
    detail::require(!vectors_.empty(), "UPB: empty vector list");
    detail::require(static_cast<int>(vectors_.size()) < dims_.total(),
                    "UPB: vectors must not span the whole space");
    for (const Ket& v : vectors_) {
      detail::require(v.dims() == dims_, "UPB: vector dimensions mismatch");
      detail::require(second_schmidt_coefficient(v) < kAlgebraicTol,
                      "UPB: vectors must be product states");
    }
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      for (std::size_t j = i + 1; j < vectors_.size(); ++j) {
        detail::require(std::abs(vectors_[i].amplitudes().dot(vectors_[j].amplitudes()))
                            <= kAlgebraicTol,
                        "UPB: vectors are not pairwise orthogonal");
      }
    }
  }

  const std::vector<Ket>& vectors() const { return vectors_; }
  const DimensionSpec& dims() const { return dims_; }
  int size() const { return static_cast<int>(vectors_.size()); }

  Matrix span_projector() const {
    Matrix p = Matrix::Zero(dims_.total(), dims_.total());
    for (const Ket& v : vectors_) p += v.amplitudes() * v.amplitudes().adjoint();
    return p;
  }

  /// Minimum of sum_i |<phi_i|a,b>|^2 over product states; strictly positive
  /// for a genuine UPB, zero when the set extends to a product basis.
  double extendibility_value(const OptimizerConfig& config = {}) const {
    return min_total_projection_product(vectors_, config).value;
  }

  bool is_unextendible(const OptimizerConfig& config = {}) const {
    return extendibility_value(config) > 1e-3;
  }

 private:
  std::vector<Ket> vectors_;
  DimensionSpec dims_;
};

inline double upb_extendibility_value(const UPB& upb, const OptimizerConfig& config = {}) {
  return upb.extendibility_value(config);
}

/// The five-state 3x3 tiles construction.
inline UPB tiles_upb() {
  DimensionSpec d3{3};
  auto q = [&](Complex c0, Complex c1, Complex c2) {
    Vector v(3);
    v << c0, c1, c2;
    return Ket::normalized(std::move(v), d3);
  };
  Ket e0 = q(1, 0, 0), e1 = q(0, 1, 0), e2 = q(0, 0, 1);
  Ket m01 = q(1, -1, 0), m12 = q(0, 1, -1), sum = q(1, 1, 1);
  std::vector<Ket> vectors = {
      tensor({e0, m01}), tensor({e2, m12}), tensor({m01, e2}), tensor({m12, e0}),
      tensor({sum, sum}),
  };
  return UPB(std::move(vectors), DimensionSpec{3, 3});
}

/// Normalized projector onto the orthocomplement of the UPB span; PPT yet
/// entangled when the UPB is genuine.
inline DensityMatrix upb_state(const UPB& upb) {
  int d = upb.dims().total();
  int rank = d - upb.size();
  Matrix complement = Matrix::Identity(d, d) - upb.span_projector();
  return DensityMatrix(complement / static_cast<double>(rank), upb.dims());
}

/// Projectors onto an entangled basis of the UPB span plus the complement
/// projector; the variance sum vanishes on the UPB state.
inline ObservableSet upb_projector_set(const UPB& upb, std::uint64_t seed, double epsilon = 0.1) {
  Subspace span = Subspace::from_kets(upb.vectors(), true);
  std::vector<Observable> ms;
  for (const Ket& k : entangled_basis(span, epsilon, seed)) ms.push_back(projector(k));
  int d = upb.dims().total();
  ms.emplace_back(Matrix::Identity(d, d) - upb.span_projector(), upb.dims());
  return ObservableSet(std::move(ms));
}

}  // namespace vardet
