#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vardet/criteria.hpp"
#include "vardet/linalg.hpp"
#include "vardet/state.hpp"

namespace vardet {

/// Symmetrized second moments minus products of means, gamma_kl =
/// (<M_k M_l> + <M_l M_k>)/2 - <M_k><M_l>; equals the Hessian at zero of the
/// cumulant generating functional ln<exp(sum x_i M_i)>.
class CovarianceMatrix {
 public:
  CovarianceMatrix(RealMatrix entries, ObservableSet observables,
                   std::optional<std::pair<int, int>> block = std::nullopt)
      : entries_(std::move(entries)),
        observables_(std::move(observables)),
        block_(block) {
    int n = static_cast<int>(observables_.size());
    detail::require(entries_.rows() == n && entries_.cols() == n,
                    "CovarianceMatrix: size does not match observable count");
    detail::require((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() <= kAlgebraicTol,
                    "CovarianceMatrix: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(entries_, Eigen::EigenvaluesOnly);
    detail::require(es.eigenvalues().minCoeff() >= -kPsdTol,
                    "CovarianceMatrix: matrix is not positive semidefinite");
    if (block_) {
      detail::require(block_->first > 0 && block_->second > 0 &&
                          block_->first + block_->second == n,
                      "CovarianceMatrix: block partition does not add up");
    }
  }

  const RealMatrix& entries() const { return entries_; }
  const ObservableSet& observables() const { return observables_; }
  const std::optional<std::pair<int, int>>& block() const { return block_; }
  int size() const { return static_cast<int>(entries_.rows()); }

  RealMatrix block_a() const { return entries_.topLeftCorner(block_ref().first, block_ref().first); }
  RealMatrix block_b() const {
    return entries_.bottomRightCorner(block_ref().second, block_ref().second);
  }
  RealMatrix block_c() const {
    return entries_.topRightCorner(block_ref().first, block_ref().second);
  }

 private:
  const std::pair<int, int>& block_ref() const {
    if (!block_) throw std::logic_error("CovarianceMatrix: no block partition set");
    return *block_;
  }

  RealMatrix entries_;
  ObservableSet observables_;
  std::optional<std::pair<int, int>> block_;
};

inline CovarianceMatrix covariance_matrix(const DensityMatrix& rho, const ObservableSet& ms,
                                          std::optional<std::pair<int, int>> block = std::nullopt) {
  detail::require(rho.dims() == ms.dims(), "covariance_matrix: dimension mismatch");
  int n = static_cast<int>(ms.size());
  std::vector<double> means(n);
  std::vector<Matrix> mr(n);
  for (int k = 0; k < n; ++k) {
    mr[k] = ms[k].matrix() * rho.matrix();
    means[k] = mr[k].trace().real();
  }
  RealMatrix gamma(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = k; l < n; ++l) {
      double sym = ((ms[k].matrix() * ms[l].matrix() + ms[l].matrix() * ms[k].matrix()) *
                    rho.matrix())
                       .trace()
                       .real() /
                   2.0;
      gamma(k, l) = gamma(l, k) = sym - means[k] * means[l];
    }
  }
  return CovarianceMatrix(std::move(gamma), ms, block);
}

/// Central second differences of the cumulant generating functional
/// W[X] = ln Tr(rho exp(sum x_i M_i)) at X = 0; agrees with the closed form
/// to O(h^2).
inline RealMatrix covariance_matrix_fd(const DensityMatrix& rho, const ObservableSet& ms,
                                       double h) {
  detail::require(rho.dims() == ms.dims(), "covariance_matrix_fd: dimension mismatch");
  detail::require(h >= 1e-5 && h <= 1e-2, "covariance_matrix_fd: h outside [1e-5, 1e-2]");
  int n = static_cast<int>(ms.size());
  auto w = [&](const RealVector& x) {
    Matrix sum = Matrix::Zero(rho.side(), rho.side());
    for (int i = 0; i < n; ++i) sum += x(i) * ms[i].matrix();
    double z = (rho.matrix() * hermitian_exp(sum)).trace().real();
    if (z <= 0.0) {
      throw std::runtime_error("covariance_matrix_fd: non-positive moment functional");
    }
    return std::log(z);
  };
  RealMatrix gamma(n, n);
  double w0 = w(RealVector::Zero(n));
  for (int k = 0; k < n; ++k) {
    RealVector x = RealVector::Zero(n);
    x(k) = h;
    double wp = w(x);
    x(k) = -h;
    double wm = w(x);
    gamma(k, k) = (wp - 2.0 * w0 + wm) / (h * h);
    for (int l = k + 1; l < n; ++l) {
      RealVector y = RealVector::Zero(n);
      y(k) = h;
      y(l) = h;
      double wpp = w(y);
      y(l) = -h;
      double wpm = w(y);
      y(k) = -h;
      double wmm = w(y);
      y(l) = h;
      double wmp = w(y);
      gamma(k, l) = gamma(l, k) = (wpp - wpm - wmp + wmm) / (4.0 * h * h);
    }
  }
  return gamma;
}

/// x^T gamma x; equals the variance of sum_i x_i M_i.
inline double quadratic_form(const CovarianceMatrix& gamma, const RealVector& x) {
  detail::require(x.size() == gamma.size(), "quadratic_form: length mismatch");
  return x.dot(gamma.entries() * x);
}

/// Moore-Penrose pseudoinverse of a symmetric matrix with a relative
/// eigenvalue cutoff.
inline RealMatrix pseudo_inverse(const RealMatrix& m, double relative_cutoff = kRankCutoff) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m);
  RealVector lambda = es.eigenvalues();
  double cutoff = relative_cutoff * std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);
  RealVector inv(lambda.size());
  for (int i = 0; i < lambda.size(); ++i) {
    inv(i) = std::abs(lambda(i)) > cutoff ? 1.0 / lambda(i) : 0.0;
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// Schur complements A - C B^+ C^T and B - C^T A^+ C of a blocked symmetric
/// matrix, with kernel-condition checks ker(B) <= ker(C), ker(A) <= ker(C^T).
inline std::pair<RealMatrix, RealMatrix> block_schur_complements(const RealMatrix& gamma, int na,
                                                                 int nb) {
  detail::require(gamma.rows() == gamma.cols() && gamma.rows() == na + nb,
                  "block_schur_complements: block sizes do not match");
  RealMatrix a = gamma.topLeftCorner(na, na);
  RealMatrix b = gamma.bottomRightCorner(nb, nb);
  RealMatrix c = gamma.topRightCorner(na, nb);

  auto check_kernel = [](const RealMatrix& diag, const RealMatrix& off, const char* side) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(diag);
    double cutoff = kRankCutoff * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      if (std::abs(es.eigenvalues()(i)) <= cutoff) {
        if ((off * es.eigenvectors().col(i)).cwiseAbs().maxCoeff() > 1e-8) {
          throw std::runtime_error(std::string("block_schur_complements: kernel condition "
                                               "violated on block ") +
                                   side + " (inconsistent covariance matrix)");
        }
      }
    }
  };
  check_kernel(b, c, "B");
  check_kernel(a, c.transpose(), "A");

  RealMatrix s_a = a - c * pseudo_inverse(b) * c.transpose();
  RealMatrix s_b = b - c.transpose() * pseudo_inverse(a) * c;
  return {s_a, s_b};
}

inline std::pair<RealMatrix, RealMatrix> schur_complements(const CovarianceMatrix& gamma) {
  detail::require(gamma.block().has_value(), "schur_complements: no block partition set");
  return block_schur_complements(gamma.entries(), gamma.block()->first, gamma.block()->second);
}

/// The six two-qubit Bloch observables in canonical block order:
/// (sx(x)1, sy(x)1, sz(x)1, 1(x)sx, 1(x)sy, 1(x)sz).
inline ObservableSet pauli_pair_observables() {
  DimensionSpec d2{2, 2};
  Matrix id = identity_matrix(2);
  std::vector<Observable> ms;
  for (const Matrix* s : {&pauli_x(), &pauli_y(), &pauli_z()}) {
    ms.emplace_back(kron(*s, id), d2);
  }
  for (const Matrix* s : {&pauli_x(), &pauli_y(), &pauli_z()}) {
    ms.emplace_back(kron(id, *s), d2);
  }
  return ObservableSet(std::move(ms));
}

// A single-qubit state has Bloch-vector variance sum >= 2, so any separable
// two-qubit state admits kappa_A below the Schur complement with trace >= 2.
inline constexpr double kPauliKappaTraceBound = 2.0;

/// Covariance-matrix check with the six Bloch observables: entangled when
/// Tr(A - C B^+ C^T) < 2.
inline DetectionReport pauli_cm_check(const DensityMatrix& rho) {
  detail::require(rho.dims() == DimensionSpec{2, 2}, "pauli_cm_check: two-qubit states only");
  CovarianceMatrix gamma = covariance_matrix(rho, pauli_pair_observables(), std::make_pair(3, 3));
  auto [s_a, s_b] = schur_complements(gamma);
  (void)s_b;
  return make_undercut_report("cm-pauli", s_a.trace(), kPauliKappaTraceBound,
                              BoundProvenance::analytic);
}

/// Candidate local covariance block with the trace bound its observables obey.
struct CandidateKappa {
  CandidateKappa(RealMatrix matrix_, double trace_bound_)
      : matrix(std::move(matrix_)), trace_bound(trace_bound_) {
    detail::require(matrix.rows() == matrix.cols(), "CandidateKappa: matrix must be square");
    detail::require((matrix - matrix.transpose()).cwiseAbs().maxCoeff() <= kAlgebraicTol,
                    "CandidateKappa: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(matrix, Eigen::EigenvaluesOnly);
    detail::require(es.eigenvalues().minCoeff() >= -kPsdTol,
                    "CandidateKappa: matrix is not positive semidefinite");
    detail::require(trace_bound >= 0.0, "CandidateKappa: negative trace bound");
    detail::require(matrix.trace() >= -kPsdTol, "CandidateKappa: negative trace");
  }

  RealMatrix matrix;
  double trace_bound;
};

/// True iff gamma - (kappa_A (+) kappa_B) is PSD.  False falsifies this one
/// candidate; entanglement follows only when no admissible candidate exists.
inline bool admits_block_bound(const CovarianceMatrix& gamma, const CandidateKappa& kappa_a,
                               const CandidateKappa& kappa_b) {
  detail::require(gamma.block().has_value(), "admits_block_bound: no block partition set");
  detail::require(kappa_a.matrix.rows() == gamma.block()->first &&
                      kappa_b.matrix.rows() == gamma.block()->second,
                  "admits_block_bound: kappa blocks do not match the partition");
  RealMatrix diff = gamma.entries();
  diff.topLeftCorner(kappa_a.matrix.rows(), kappa_a.matrix.rows()) -= kappa_a.matrix;
  diff.bottomRightCorner(kappa_b.matrix.rows(), kappa_b.matrix.rows()) -= kappa_b.matrix;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -kPsdTol;
}

/// Converts a separating-hyperplane matrix on covariance space into the
/// observables N_l = sqrt(lambda_l) sum_i a^l_i M_i whose variance sum equals
/// Tr(W gamma) on every state.
inline ObservableSet witness_to_observables(const RealMatrix& w, const ObservableSet& ms) {
  int n = static_cast<int>(ms.size());
  detail::require(w.rows() == n && w.cols() == n,
                  "witness_to_observables: size does not match observable count");
  detail::require((w - w.transpose()).cwiseAbs().maxCoeff() <= kAlgebraicTol,
                  "witness_to_observables: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(w);
  detail::require(es.eigenvalues().minCoeff() >= -kAlgebraicTol,
                  "witness_to_observables: matrix is not positive semidefinite");
  std::vector<Observable> out;
  int side = ms.dims().total();
  for (int l = 0; l < n; ++l) {
    double lambda = es.eigenvalues()(l);
    if (lambda <= 1e-12) continue;
    Matrix combo = Matrix::Zero(side, side);
    for (int i = 0; i < n; ++i) combo += es.eigenvectors()(i, l) * ms[i].matrix();
    out.emplace_back(std::sqrt(lambda) * combo, ms.dims());
  }
  detail::require(!out.empty(), "witness_to_observables: witness has no positive eigenvalues");
  return ObservableSet(std::move(out));
}

}  // namespace vardet
