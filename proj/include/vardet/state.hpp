#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vardet/tolerances.hpp"

namespace vardet {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Ordered list of local Hilbert-space dimensions, left to right.
class DimensionSpec {
 public:
  explicit DimensionSpec(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
      throw std::invalid_argument("DimensionSpec: empty dimension list");
    }
    total_ = 1;
    for (int d : dims_) {
      if (d < 2) {
        throw std::invalid_argument("DimensionSpec: every local dimension must be >= 2");
      }
      total_ *= d;
    }
  }
  DimensionSpec(std::initializer_list<int> dims) : DimensionSpec(std::vector<int>(dims)) {}

  int total() const { return total_; }
  std::size_t count() const { return dims_.size(); }
  int dim(std::size_t k) const { return dims_.at(k); }
  const std::vector<int>& dims() const { return dims_; }

  /// Dimensions of the first `cut` subsystems and of the rest.
  std::pair<DimensionSpec, DimensionSpec> split(std::size_t cut) const {
    if (cut == 0 || cut >= dims_.size()) {
      throw std::invalid_argument("DimensionSpec: cut must split into two non-empty groups");
    }
    return {DimensionSpec(std::vector<int>(dims_.begin(), dims_.begin() + cut)),
            DimensionSpec(std::vector<int>(dims_.begin() + cut, dims_.end()))};
  }
  int left_total(std::size_t cut) const { return split(cut).first.total(); }
  int right_total(std::size_t cut) const { return split(cut).second.total(); }

  bool operator==(const DimensionSpec& other) const { return dims_ == other.dims_; }
  bool operator!=(const DimensionSpec& other) const { return !(*this == other); }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (i) s += 'x';
      s += std::to_string(dims_[i]);
    }
    return s;
  }

 private:
  std::vector<int> dims_;
  int total_ = 1;
};

namespace detail {

inline double hermiticity_error(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace detail

/// Normalized pure state over a tensor-product space.
class Ket {
 public:
  Ket(Vector amplitudes, DimensionSpec dims)
      : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    detail::require(amplitudes_.size() == dims_.total(),
                    "Ket: amplitude length does not match dimensions");
    detail::require(std::abs(amplitudes_.norm() - 1.0) <= kAlgebraicTol,
                    "Ket: state is not normalized");
  }

  /// Normalizes a raw amplitude vector; rejects (near-)zero input.
  static Ket normalized(Vector raw, DimensionSpec dims) {
    double n = raw.norm();
    if (n < 1e-14) throw std::invalid_argument("Ket: cannot normalize a zero vector");
    return Ket(raw / n, std::move(dims));
  }

  const Vector& amplitudes() const { return amplitudes_; }
  const DimensionSpec& dims() const { return dims_; }
  int size() const { return static_cast<int>(amplitudes_.size()); }

 private:
  Vector amplitudes_;
  DimensionSpec dims_;
};

/// Hermitian operator over a tensor-product space.
class Observable {
 public:
  Observable(Matrix entries, DimensionSpec dims)
      : entries_(std::move(entries)), dims_(std::move(dims)) {
    detail::require(entries_.rows() == entries_.cols(), "Observable: matrix must be square");
    detail::require(entries_.rows() == dims_.total(),
                    "Observable: matrix side does not match dimensions");
    detail::require(detail::hermiticity_error(entries_) <= kAlgebraicTol,
                    "Observable: matrix is not Hermitian");
  }

  const Matrix& matrix() const { return entries_; }
  const DimensionSpec& dims() const { return dims_; }
  int side() const { return static_cast<int>(entries_.rows()); }

 private:
  Matrix entries_;
  DimensionSpec dims_;
};

/// Ordered list of observables over one common dimension spec.
class ObservableSet {
 public:
  explicit ObservableSet(std::vector<Observable> observables)
      : observables_(std::move(observables)) {
    detail::require(!observables_.empty(), "ObservableSet: empty list");
    for (const Observable& m : observables_) {
      detail::require(m.dims() == observables_.front().dims(),
                      "ObservableSet: observables live on different spaces");
    }
  }

  const DimensionSpec& dims() const { return observables_.front().dims(); }
  std::size_t size() const { return observables_.size(); }
  const Observable& operator[](std::size_t i) const { return observables_.at(i); }
  auto begin() const { return observables_.begin(); }
  auto end() const { return observables_.end(); }

 private:
  std::vector<Observable> observables_;
};

/// Trace-one positive-semidefinite Hermitian matrix with tensor structure.
class DensityMatrix {
 public:
  DensityMatrix(Matrix entries, DimensionSpec dims)
      : entries_(std::move(entries)), dims_(std::move(dims)) {
    detail::require(entries_.rows() == entries_.cols(), "DensityMatrix: matrix must be square");
    detail::require(entries_.rows() == dims_.total(),
                    "DensityMatrix: matrix side does not match dimensions");
    detail::require(detail::hermiticity_error(entries_) <= kAlgebraicTol,
                    "DensityMatrix: matrix is not Hermitian");
    detail::require(std::abs(entries_.trace().real() - 1.0) <= kAlgebraicTol &&
                        std::abs(entries_.trace().imag()) <= kAlgebraicTol,
                    "DensityMatrix: trace is not 1");
    detail::require(detail::min_eigenvalue(entries_) >= -kPsdTol,
                    "DensityMatrix: matrix is not positive semidefinite");
  }

  static DensityMatrix pure(const Ket& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.dims());
  }

  static DensityMatrix maximally_mixed(DimensionSpec dims) {
    int d = dims.total();
    return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d), std::move(dims));
  }

  const Matrix& matrix() const { return entries_; }
  const DimensionSpec& dims() const { return dims_; }
  int side() const { return static_cast<int>(entries_.rows()); }

 private:
  Matrix entries_;
  DimensionSpec dims_;
};

/// Convex decomposition: weights p_k >= 0 summing to 1 and component states.
class MixtureDecomposition {
 public:
  MixtureDecomposition(std::vector<double> weights, std::vector<DensityMatrix> components)
      : weights_(std::move(weights)), components_(std::move(components)) {
    detail::require(!weights_.empty() && weights_.size() == components_.size(),
                    "MixtureDecomposition: weight/component count mismatch");
    double sum = 0.0;
    for (double w : weights_) {
      detail::require(w >= 0.0, "MixtureDecomposition: negative weight");
      sum += w;
    }
    detail::require(std::abs(sum - 1.0) <= kAlgebraicTol,
                    "MixtureDecomposition: weights do not sum to 1");
    for (const DensityMatrix& c : components_) {
      detail::require(c.dims() == components_.front().dims(),
                      "MixtureDecomposition: components live on different spaces");
    }
  }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<DensityMatrix>& components() const { return components_; }
  std::size_t size() const { return weights_.size(); }

  DensityMatrix mixed() const {
    Matrix m = Matrix::Zero(components_.front().side(), components_.front().side());
    for (std::size_t k = 0; k < weights_.size(); ++k) {
      m += weights_[k] * components_[k].matrix();
    }
    return DensityMatrix(m, components_.front().dims());
  }

 private:
  std::vector<double> weights_;
  std::vector<DensityMatrix> components_;
};

// --- moments -----------------------------------------------------------------

inline double expectation(const DensityMatrix& rho, const Observable& m) {
  detail::require(rho.dims() == m.dims(), "expectation: dimension mismatch");
  Complex tr = (rho.matrix() * m.matrix()).trace();
  if (std::abs(tr.imag()) >= kAlgebraicTol) {
    throw std::runtime_error("expectation: trace has a non-negligible imaginary part");
  }
  return tr.real();
}

/// <M^2> - <M>^2, clamped to zero inside the rounding window.
inline double variance(const DensityMatrix& rho, const Observable& m) {
  detail::require(rho.dims() == m.dims(), "variance: dimension mismatch");
  const Matrix& r = rho.matrix();
  const Matrix& mm = m.matrix();
  Matrix mr = mm * r;
  double mean = mr.trace().real();
  double second = (mm * mr).trace().real();
  double var = second - mean * mean;
  if (var < 0.0) {
    if (var < -kVarianceClamp) {
      throw std::logic_error("variance: negative beyond clamp window (internal error)");
    }
    var = 0.0;
  }
  return var;
}

// --- constants and standard states -------------------------------------------

inline const Matrix& pauli_x() {
  static const Matrix m = [] {
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
  }();
  return m;
}

inline const Matrix& pauli_y() {
  static const Matrix m = [] {
    Matrix y(2, 2);
    y << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return y;
  }();
  return m;
}

inline const Matrix& pauli_z() {
  static const Matrix m = [] {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    return z;
  }();
  return m;
}

inline Matrix identity_matrix(int d) { return Matrix::Identity(d, d); }

/// Computational-basis ket |i1 i2 ...> for the given local indices.
inline Ket basis_ket(const DimensionSpec& dims, const std::vector<int>& indices) {
  detail::require(indices.size() == dims.count(), "basis_ket: index count mismatch");
  int idx = 0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    detail::require(indices[k] >= 0 && indices[k] < dims.dim(k), "basis_ket: index out of range");
    idx = idx * dims.dim(k) + indices[k];
  }
  Vector v = Vector::Zero(dims.total());
  v(idx) = 1.0;
  return Ket(std::move(v), dims);
}

/// a|00> + b|11> on two qubits.
inline Ket schmidt_pair_ket(double a, double b) {
  Vector v = Vector::Zero(4);
  v(0) = a;
  v(3) = b;
  return Ket::normalized(std::move(v), DimensionSpec{2, 2});
}

inline Ket bell_phi_plus() { return schmidt_pair_ket(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)); }

inline Ket singlet_ket() {
  Vector v = Vector::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return Ket(std::move(v), DimensionSpec{2, 2});
}

/// (|0...0> + |1...1>)/sqrt(2) on `qubits` qubits.
inline Ket ghz_ket(int qubits) {
  detail::require(qubits >= 2, "ghz_ket: need at least two qubits");
  int d = 1 << qubits;
  Vector v = Vector::Zero(d);
  v(0) = v(d - 1) = 1.0 / std::sqrt(2.0);
  return Ket(std::move(v), DimensionSpec(std::vector<int>(qubits, 2)));
}

inline Observable projector(const Ket& psi) {
  return Observable(psi.amplitudes() * psi.amplitudes().adjoint(), psi.dims());
}

}  // namespace vardet
