#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vardet/criteria.hpp"
#include "vardet/linalg.hpp"
#include "vardet/state.hpp"

namespace vardet {

// Verdict thresholds for the three-qubit GHZ-basis uncertainty value: below
// 1/2 the state is genuinely tripartite entangled, below 3/8 it is in the
// GHZ class.  The four-qubit 16-projector sum uses the same biseparable 1/2.
inline constexpr double kTripartiteEntangledThreshold = 0.5;
inline constexpr double kGhzClassThreshold = 3.0 / 8.0;
inline constexpr double kFourQubitBiseparableBound = 0.5;
inline constexpr double kGhzWitnessEntangledThreshold = 0.0;
inline constexpr double kGhzWitnessGhzClassThreshold = -0.25;

namespace detail {

inline Ket two_term_ket(int qubits, int idx_a, int idx_b, double sign) {
  int d = 1 << qubits;
  Vector v = Vector::Zero(d);
  v(idx_a) = 1.0 / std::sqrt(2.0);
  v(idx_b) = sign / std::sqrt(2.0);
  return Ket(std::move(v), DimensionSpec(std::vector<int>(qubits, 2)));
}

}  // namespace detail

/// The eight three-qubit GHZ-type states (|x> +- |x-bar>)/sqrt(2), plus signs
/// first, with the leading kets ordered 000, 100, 010, 001.
inline std::vector<Ket> ghz_basis_3() {
  const std::array<int, 4> leading = {0b000, 0b100, 0b010, 0b001};
  std::vector<Ket> basis;
  for (double sign : {1.0, -1.0}) {
    for (int x : leading) basis.push_back(detail::two_term_ket(3, x, 7 - x, sign));
  }
  return basis;
}

/// The sixteen four-qubit GHZ-type states, plus signs first, pairs ordered
/// lexicographically by the lower bit string.
inline std::vector<Ket> ghz_basis_4() {
  std::vector<Ket> basis;
  for (double sign : {1.0, -1.0}) {
    for (int x = 0; x < 8; ++x) basis.push_back(detail::two_term_ket(4, x, 15 - x, sign));
  }
  return basis;
}

namespace detail {

inline const ObservableSet& ghz3_projectors() {
  static const ObservableSet set = [] {
    std::vector<Observable> ms;
    for (const Ket& k : ghz_basis_3()) ms.push_back(projector(k));
    return ObservableSet(std::move(ms));
  }();
  return set;
}

inline const ObservableSet& ghz4_projectors() {
  static const ObservableSet set = [] {
    std::vector<Observable> ms;
    for (const Ket& k : ghz_basis_4()) ms.push_back(projector(k));
    return ObservableSet(std::move(ms));
  }();
  return set;
}

inline void require_qubits(const DensityMatrix& rho, std::size_t n, const char* who) {
  bool ok = rho.dims().count() == n;
  for (std::size_t k = 0; ok && k < n; ++k) ok = rho.dims().dim(k) == 2;
  if (!ok) throw std::invalid_argument(std::string(who) + ": expected a " + std::to_string(n) +
                                       "-qubit state");
}

}  // namespace detail

/// Sum of variances over the eight GHZ-basis projectors.
inline double ghz_uncertainty(const DensityMatrix& rho) {
  detail::require_qubits(rho, 3, "ghz_uncertainty");
  return variance_sum(rho, detail::ghz3_projectors());
}

/// The eight correlation means that decompose the GHZ-basis uncertainty into
/// local measurements: <111>, <1zz>, <z1z>, <zz1>, <xxx>, <xyy>, <yyx>, <yxy>.
inline std::array<double, 8> ghz_pauli_means(const DensityMatrix& rho) {
  detail::require_qubits(rho, 3, "ghz_pauli_means");
  const Matrix& id = identity_matrix(2);
  const Matrix& x = pauli_x();
  const Matrix& y = pauli_y();
  const Matrix& z = pauli_z();
  const std::array<std::array<const Matrix*, 3>, 8> ops = {{
      {&id, &id, &id}, {&id, &z, &z}, {&z, &id, &z}, {&z, &z, &id},
      {&x, &x, &x}, {&x, &y, &y}, {&y, &y, &x}, {&y, &x, &y},
  }};
  std::array<double, 8> means{};
  for (std::size_t i = 0; i < ops.size(); ++i) {
    Matrix m = kron(kron(*ops[i][0], *ops[i][1]), *ops[i][2]);
    means[i] = (rho.matrix() * m).trace().real();
  }
  return means;
}

/// Same value as ghz_uncertainty, rebuilt from the eight correlation means:
/// 1 - (1/8) * sum of squared means.
inline double ghz_uncertainty_from_means(const std::array<double, 8>& means) {
  double sq = 0.0;
  for (double m : means) {
    if (std::abs(m) > 1.0 + kPsdTol) {
      throw std::invalid_argument("ghz_uncertainty_from_means: mean outside [-1, 1]");
    }
    sq += m * m;
  }
  return 1.0 - sq / 8.0;
}

enum class TripartiteClass { inconclusive, genuinely_tripartite_entangled, ghz_class };

inline std::string_view to_string(TripartiteClass c) {
  switch (c) {
    case TripartiteClass::genuinely_tripartite_entangled: return "genuinely_tripartite_entangled";
    case TripartiteClass::ghz_class: return "ghz_class";
    default: return "inconclusive";
  }
}

struct TripartiteVerdict {
  double value = 0.0;
  TripartiteClass cls = TripartiteClass::inconclusive;
};

inline TripartiteVerdict classify_tripartite(double e_value) {
  detail::require(e_value >= -kPsdTol && e_value <= 1.0 + kPsdTol,
                  "classify_tripartite: value outside [0, 1]");
  TripartiteVerdict v;
  v.value = e_value;
  if (e_value < kGhzClassThreshold - kDetectionMargin) {
    v.cls = TripartiteClass::ghz_class;
  } else if (e_value < kTripartiteEntangledThreshold - kDetectionMargin) {
    v.cls = TripartiteClass::genuinely_tripartite_entangled;
  }
  return v;
}

struct GhzWitnessResult {
  double value = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

/// Mean of the projector witness 1/2 - |GHZ><GHZ|: negative values certify
/// genuine tripartite entanglement, below -1/4 the GHZ class.
inline GhzWitnessResult ghz_witness(const DensityMatrix& rho) {
  detail::require_qubits(rho, 3, "ghz_witness");
  Ket ghz = ghz_ket(3);
  double overlap = (ghz.amplitudes().adjoint() * rho.matrix() * ghz.amplitudes())(0).real();
  GhzWitnessResult r;
  r.value = 0.5 - overlap;
  if (r.value < kGhzWitnessGhzClassThreshold - kDetectionMargin) {
    r.verdict = Verdict::ghz_class;
  } else if (r.value < kGhzWitnessEntangledThreshold - kDetectionMargin) {
    r.verdict = Verdict::entangled;
  }
  return r;
}

/// Variance sum over the sixteen four-qubit GHZ projectors versus the
/// biseparable floor 1/2; undercutting it certifies genuine four-party
/// entanglement.
inline DetectionReport four_qubit_ghz_check(const DensityMatrix& rho) {
  detail::require_qubits(rho, 4, "four_qubit_ghz_check");
  double value = variance_sum(rho, detail::ghz4_projectors());
  return make_undercut_report("ghz-e", value, kFourQubitBiseparableBound,
                              BoundProvenance::analytic);
}

/// Three-qubit GHZ-basis uncertainty as a DetectionReport (ghz_class verdict
/// when the stricter threshold is undercut).
inline DetectionReport ghz_uncertainty_check(const DensityMatrix& rho) {
  double value = ghz_uncertainty(rho);
  DetectionReport r;
  r.criterion = "ghz-e";
  r.value = value;
  r.bound_provenance = BoundProvenance::analytic;
  TripartiteVerdict v = classify_tripartite(value);
  switch (v.cls) {
    case TripartiteClass::ghz_class:
      r.verdict = Verdict::ghz_class;
      r.bound = kGhzClassThreshold;
      break;
    case TripartiteClass::genuinely_tripartite_entangled:
      r.verdict = Verdict::entangled;
      r.bound = kTripartiteEntangledThreshold;
      break;
    default:
      r.verdict = Verdict::inconclusive;
      r.bound = kTripartiteEntangledThreshold;
      break;
  }
  return r;
}

// --- noise families -------------------------------------------------------------

/// p |psi><psi| + (1-p) 1/d.
inline DensityMatrix isotropic_mixture(const Ket& psi, double p) {
  detail::require(p >= 0.0 && p <= 1.0, "isotropic_mixture: p outside [0, 1]");
  int d = psi.size();
  Matrix m = p * (psi.amplitudes() * psi.amplitudes().adjoint()) +
             (1.0 - p) / d * Matrix::Identity(d, d);
  return DensityMatrix(std::move(m), psi.dims());
}

inline DensityMatrix singlet_werner_state(double p) { return isotropic_mixture(singlet_ket(), p); }
inline DensityMatrix ghz3_isotropic_state(double p) { return isotropic_mixture(ghz_ket(3), p); }
inline DensityMatrix ghz4_isotropic_state(double p) { return isotropic_mixture(ghz_ket(4), p); }

/// Smallest p in [0, 1] at which a monotone detector fires, bisected to 1e-9.
inline double noise_threshold(const std::function<bool(double)>& detects_at, double tol = 1e-9,
                              int max_iterations = 60) {
  detail::require(tol > 0.0, "noise_threshold: tolerance must be positive");
  if (detects_at(0.0)) return 0.0;
  if (!detects_at(1.0)) {
    throw std::runtime_error("noise_threshold: criterion never fires on [0, 1]");
  }
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < max_iterations && hi - lo > tol; ++i) {
    double mid = (lo + hi) / 2.0;
    (detects_at(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace vardet
