#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vardet/linalg.hpp"
#include "vardet/state.hpp"

namespace vardet {

enum class Verdict { inconclusive, entangled, ghz_class };
enum class BoundProvenance { analytic, optimizer };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::entangled: return "entangled";
    case Verdict::ghz_class: return "ghz_class";
    default: return "inconclusive";
  }
}

inline std::string_view to_string(BoundProvenance p) {
  return p == BoundProvenance::analytic ? "analytic" : "optimizer";
}

/// Outcome of one criterion evaluation.  `bound_support` is the number of
/// optimizer restarts agreeing with an optimizer-derived bound (-1 when the
/// bound is analytic).
struct DetectionReport {
  std::string criterion;
  double value = 0.0;
  double bound = 0.0;
  Verdict verdict = Verdict::inconclusive;
  BoundProvenance bound_provenance = BoundProvenance::analytic;
  int bound_support = -1;
};

/// Builds a report for value-undercuts-bound criteria.  An optimizer-derived
/// bound with fewer than kMinAgreeingRestarts agreeing restarts never yields
/// an "entangled" verdict.
inline DetectionReport make_undercut_report(std::string name, double value, double bound,
                                            BoundProvenance provenance, int bound_support = -1) {
  DetectionReport r;
  r.criterion = std::move(name);
  r.value = value;
  r.bound = bound;
  r.bound_provenance = provenance;
  r.bound_support = bound_support;
  bool trusted = provenance == BoundProvenance::analytic || bound_support >= kMinAgreeingRestarts;
  r.verdict = (trusted && value < bound - kDetectionMargin) ? Verdict::entangled
                                                            : Verdict::inconclusive;
  return r;
}

/// A variance-sum test: entangled when the sum undercuts the separable bound.
struct VarianceCriterion {
  VarianceCriterion(ObservableSet observables_, double separable_bound_,
                    BoundProvenance bound_provenance_, int bound_support_ = -1)
      : observables(std::move(observables_)),
        separable_bound(separable_bound_),
        bound_provenance(bound_provenance_),
        bound_support(bound_support_) {
    detail::require(separable_bound >= 0.0, "VarianceCriterion: negative separable bound");
  }

  ObservableSet observables;
  double separable_bound;
  BoundProvenance bound_provenance;
  int bound_support;
};

inline double variance_sum(const DensityMatrix& rho, const ObservableSet& ms) {
  detail::require(rho.dims() == ms.dims(), "variance_sum: dimension mismatch");
  double sum = 0.0;
  for (const Observable& m : ms) sum += variance(rho, m);
  return sum;
}

inline DetectionReport check_variance_criterion(const DensityMatrix& rho,
                                                const VarianceCriterion& criterion,
                                                std::string name = "variance-sum") {
  double value = variance_sum(rho, criterion.observables);
  return make_undercut_report(std::move(name), value, criterion.separable_bound,
                              criterion.bound_provenance, criterion.bound_support);
}

// --- local uncertainty relations -----------------------------------------------

/// M_i = A_i (x) 1 + 1 (x) B_i over the joint space.
inline ObservableSet joint_local_observables(const ObservableSet& as, const ObservableSet& bs) {
  detail::require(as.size() == bs.size(), "joint_local_observables: length mismatch");
  int da = as.dims().total();
  int db = bs.dims().total();
  std::vector<int> dims = as.dims().dims();
  dims.insert(dims.end(), bs.dims().dims().begin(), bs.dims().dims().end());
  DimensionSpec joint(dims);
  std::vector<Observable> ms;
  for (std::size_t i = 0; i < as.size(); ++i) {
    Matrix m = kron(as[i].matrix(), identity_matrix(db)) + kron(identity_matrix(da), bs[i].matrix());
    ms.emplace_back(std::move(m), joint);
  }
  return ObservableSet(std::move(ms));
}

/// Local uncertainty relation: separable states obey
/// sum_i d^2(A_i (x) 1 + 1 (x) B_i) >= c_a + c_b.
inline DetectionReport lur_evaluate(const DensityMatrix& rho, const ObservableSet& as,
                                    const ObservableSet& bs, double c_a, double c_b) {
  detail::require(c_a >= 0.0 && c_b >= 0.0, "lur_evaluate: negative local bound");
  ObservableSet ms = joint_local_observables(as, bs);
  double value = variance_sum(rho, ms);
  return make_undercut_report("lur", value, c_a + c_b, BoundProvenance::analytic);
}

inline ObservableSet pauli_observables() {
  DimensionSpec q{2};
  return ObservableSet({Observable(pauli_x(), q), Observable(pauli_y(), q),
                        Observable(pauli_z(), q)});
}

// --- two-qubit construction around a target a|00> + b|11> ----------------------

namespace detail {

inline void require_schmidt_pair(double a, double b) {
  require(a >= b && b >= 0.0, "schmidt basis: require a >= b >= 0");
  require(std::abs(a * a + b * b - 1.0) <= kAlgebraicTol,
          "schmidt basis: (a, b) is not normalized");
}

}  // namespace detail

/// The four orthonormal two-qubit states adapted to a|00> + b|11>:
/// a|00>+b|11>, a|01>+b|10>, b|01>-a|10>, b|00>-a|11>.
inline std::vector<Ket> schmidt_basis_kets(double a, double b) {
  detail::require_schmidt_pair(a, b);
  DimensionSpec d2{2, 2};
  auto make = [&](Complex c0, Complex c1, Complex c2, Complex c3) {
    Vector v(4);
    v << c0, c1, c2, c3;
    return Ket(std::move(v), d2);
  };
  return {make(a, 0, 0, b), make(0, a, b, 0), make(0, b, -a, 0), make(b, 0, 0, -a)};
}

/// Projectors onto the adapted basis; the variance sum vanishes on the target
/// state and is bounded below on separable states.
inline ObservableSet schmidt_basis_projectors(double a, double b) {
  std::vector<Observable> ms;
  for (const Ket& k : schmidt_basis_kets(a, b)) ms.push_back(projector(k));
  return ObservableSet(std::move(ms));
}

/// Separable floor of the adapted projector set: 2 a^2 b^2.
inline double schmidt_basis_bound(double a, double b) {
  detail::require_schmidt_pair(a, b);
  return 2.0 * a * a * b * b;
}

/// Smallest p at which p|psi><psi| + (1-p) 1/4 violates the adapted criterion.
inline double schmidt_basis_werner_threshold(double a, double b) {
  detail::require_schmidt_pair(a, b);
  return std::sqrt(1.0 - 8.0 * a * a * b * b / 3.0);
}

inline VarianceCriterion schmidt_basis_criterion(double a, double b) {
  return VarianceCriterion(schmidt_basis_projectors(a, b), schmidt_basis_bound(a, b),
                           BoundProvenance::analytic);
}

}  // namespace vardet
