#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "vardet/state.hpp"

namespace vardet {

namespace detail {

/// Row-major strides: global index = sum_k i_k * stride[k].
inline std::vector<int> strides(const DimensionSpec& dims) {
  std::vector<int> s(dims.count());
  int acc = 1;
  for (std::size_t k = dims.count(); k-- > 0;) {
    s[k] = acc;
    acc *= dims.dim(k);
  }
  return s;
}

inline void decompose_index(int idx, const DimensionSpec& dims, std::vector<int>& out) {
  out.resize(dims.count());
  for (std::size_t k = dims.count(); k-- > 0;) {
    out[k] = idx % dims.dim(k);
    idx /= dims.dim(k);
  }
}

}  // namespace detail

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (int i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

inline Matrix tensor_matrices(const std::vector<Matrix>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor: empty factor list");
  Matrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

inline Vector tensor_vectors(const std::vector<Vector>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor: empty factor list");
  Vector out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

/// Kronecker product of kets, subsystem order left to right.
inline Ket tensor(const std::vector<Ket>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor: empty factor list");
  std::vector<Vector> amps;
  std::vector<int> dims;
  for (const Ket& k : factors) {
    amps.push_back(k.amplitudes());
    dims.insert(dims.end(), k.dims().dims().begin(), k.dims().dims().end());
  }
  return Ket(tensor_vectors(amps), DimensionSpec(std::move(dims)));
}

/// Kronecker product of observables, subsystem order left to right.
inline Observable tensor(const std::vector<Observable>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor: empty factor list");
  std::vector<Matrix> mats;
  std::vector<int> dims;
  for (const Observable& m : factors) {
    mats.push_back(m.matrix());
    dims.insert(dims.end(), m.dims().dims().begin(), m.dims().dims().end());
  }
  return Observable(tensor_matrices(mats), DimensionSpec(std::move(dims)));
}

namespace detail {

inline std::vector<int> permuted_index_map(const DimensionSpec& dims,
                                           const std::vector<int>& order) {
  require(order.size() == dims.count(), "permute_subsystems: order length mismatch");
  std::vector<bool> seen(dims.count(), false);
  for (int o : order) {
    require(o >= 0 && o < static_cast<int>(dims.count()) && !seen[o],
            "permute_subsystems: not a permutation");
    seen[o] = true;
  }
  std::vector<int> new_dims(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) new_dims[j] = dims.dim(order[j]);
  DimensionSpec out_dims{new_dims};
  std::vector<int> in_strides = strides(dims);
  // map[new_index] = old_index
  std::vector<int> map(dims.total());
  std::vector<int> digits;
  for (int idx = 0; idx < dims.total(); ++idx) {
    decompose_index(idx, out_dims, digits);
    int old_idx = 0;
    for (std::size_t j = 0; j < order.size(); ++j) old_idx += digits[j] * in_strides[order[j]];
    map[idx] = old_idx;
  }
  return map;
}

}  // namespace detail

/// Reorders subsystems: position j of the output holds original subsystem order[j].
inline Vector permute_subsystems(const Vector& amplitudes, const DimensionSpec& dims,
                                 const std::vector<int>& order) {
  detail::require(amplitudes.size() == dims.total(), "permute_subsystems: size mismatch");
  std::vector<int> map = detail::permuted_index_map(dims, order);
  Vector out(amplitudes.size());
  for (int i = 0; i < amplitudes.size(); ++i) out(i) = amplitudes(map[i]);
  return out;
}

inline Matrix permute_subsystems(const Matrix& m, const DimensionSpec& dims,
                                 const std::vector<int>& order) {
  detail::require(m.rows() == dims.total() && m.cols() == dims.total(),
                  "permute_subsystems: size mismatch");
  std::vector<int> map = detail::permuted_index_map(dims, order);
  Matrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(map[i], map[j]);
  }
  return out;
}

inline DimensionSpec permute_dims(const DimensionSpec& dims, const std::vector<int>& order) {
  std::vector<int> nd(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) nd[j] = dims.dim(order.at(j));
  return DimensionSpec(std::move(nd));
}

/// f applied to the spectrum of a Hermitian matrix, in its eigenbasis.
inline Matrix hermitian_matrix_function(const Matrix& m, const std::function<double(double)>& f) {
  detail::require(detail::hermiticity_error(m) <= kAlgebraicTol,
                  "hermitian_matrix_function: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  RealVector lambda = es.eigenvalues();
  Vector flambda(lambda.size());
  for (int i = 0; i < lambda.size(); ++i) {
    double v = f(lambda(i));
    if (!std::isfinite(v)) {
      throw std::domain_error("hermitian_matrix_function: function undefined on eigenvalue " +
                              std::to_string(lambda(i)));
    }
    flambda(i) = v;
  }
  return es.eigenvectors() * flambda.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix hermitian_exp(const Matrix& m) {
  return hermitian_matrix_function(m, [](double x) { return std::exp(x); });
}

inline Matrix hermitian_log(const Matrix& m) {
  return hermitian_matrix_function(m, [](double x) { return x > 0.0 ? std::log(x) : std::nan(""); });
}

/// Transposes the indices of one subsystem.
inline Matrix partial_transpose(const Matrix& m, const DimensionSpec& dims, std::size_t subsystem) {
  detail::require(subsystem < dims.count(), "partial_transpose: invalid subsystem index");
  detail::require(m.rows() == dims.total() && m.cols() == dims.total(),
                  "partial_transpose: size mismatch");
  std::vector<int> s = detail::strides(dims);
  int stride = s[subsystem];
  Matrix out(m.rows(), m.cols());
  std::vector<int> rd, cd;
  for (int r = 0; r < m.rows(); ++r) {
    detail::decompose_index(r, dims, rd);
    for (int c = 0; c < m.cols(); ++c) {
      detail::decompose_index(c, dims, cd);
      int rs = r + (cd[subsystem] - rd[subsystem]) * stride;
      int cs = c + (rd[subsystem] - cd[subsystem]) * stride;
      out(rs, cs) = m(r, c);
    }
  }
  return out;
}

inline Matrix partial_transpose(const DensityMatrix& rho, std::size_t subsystem) {
  return partial_transpose(rho.matrix(), rho.dims(), subsystem);
}

/// Minimum eigenvalue of the partial transpose; < 0 certifies entanglement,
/// and for 2x2 / 2x3 systems negativity is equivalent to it.
inline double ppt_min_eigenvalue(const DensityMatrix& rho, std::size_t subsystem) {
  return detail::min_eigenvalue(partial_transpose(rho, subsystem));
}

// --- Schmidt decomposition ----------------------------------------------------

struct SchmidtDecomposition {
  RealVector coefficients;   // descending, squared sum 1
  Matrix left_vectors;       // columns: left Schmidt basis
  Matrix right_vectors;      // columns: right Schmidt basis
  DimensionSpec left_dims;
  DimensionSpec right_dims;
};

/// Singular-value form of a pure state across the cut after `cut` subsystems.
inline SchmidtDecomposition schmidt_decompose(const Ket& psi, std::size_t cut = 1) {
  auto [ld, rd] = psi.dims().split(cut);
  int dl = ld.total(), dr = rd.total();
  Matrix c(dl, dr);
  for (int i = 0; i < dl; ++i) {
    for (int j = 0; j < dr; ++j) c(i, j) = psi.amplitudes()(i * dr + j);
  }
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // psi = sum_s sigma_s u_s (x) conj(v_s)
  return SchmidtDecomposition{svd.singularValues(), svd.matrixU(), svd.matrixV().conjugate(),
                              ld, rd};
}

/// Largest Schmidt coefficient = max over product states of |<a,b|psi>|.
inline double max_product_overlap_bipartite(const Ket& psi, std::size_t cut = 1) {
  return schmidt_decompose(psi, cut).coefficients(0);
}

/// Second Schmidt coefficient; zero means the state is a product across the cut.
inline double second_schmidt_coefficient(const Ket& psi, std::size_t cut = 1) {
  const RealVector& sv = schmidt_decompose(psi, cut).coefficients;
  return sv.size() > 1 ? sv(1) : 0.0;
}

}  // namespace vardet
