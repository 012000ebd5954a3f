#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vardet/linalg.hpp"
#include "vardet/random.hpp"
#include "vardet/state.hpp"

namespace vardet {

struct OptimizerConfig {
  int restarts = 50;
  int max_iterations = 500;
  double convergence_tol = 1e-10;
  std::uint64_t seed = 42;

  void validate() const {
    detail::require(restarts > 0 && max_iterations > 0 && convergence_tol > 0.0,
                    "OptimizerConfig: all parameters must be positive");
  }
};

struct Optimum {
  double value = 0.0;
  std::vector<Ket> argument;  // local factors of the best point found
  bool converged = false;
  int restarts_agreeing = 0;  // restarts within kOptimizerTol of the best value
};

namespace detail {

/// Contracts `w` with the conjugates of all factors except `j`, leaving a
/// vector on subsystem j.  With w = M psi this gives the Wirtinger gradient
/// of <psi|M|psi> with respect to conj(factor_j).
inline Vector contract_except(const Vector& w, const std::vector<Vector>& factors,
                              const DimensionSpec& dims, std::size_t j) {
  Vector env = Vector::Zero(dims.dim(j));
  std::vector<int> digits;
  for (int idx = 0; idx < dims.total(); ++idx) {
    decompose_index(idx, dims, digits);
    Complex coeff = w(idx);
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (k != j) coeff *= std::conj(factors[k](digits[k]));
    }
    env(digits[j]) += coeff;
  }
  return env;
}

struct VarianceSumObjective {
  std::vector<Matrix> ms;
  DimensionSpec dims;

  VarianceSumObjective(const ObservableSet& set, const DimensionSpec& d) : dims(d) {
    for (const Observable& m : set) ms.push_back(m.matrix());
  }

  double value(const Vector& psi) const {
    double f = 0.0;
    for (const Matrix& m : ms) {
      Vector v = m * psi;
      double mean = psi.dot(v).real();
      f += v.squaredNorm() - mean * mean;
    }
    return f;
  }

  double value_at(const std::vector<Vector>& factors) const {
    return value(tensor_vectors(factors));
  }

  /// Per-factor Wirtinger gradients, projected onto the unit-sphere tangent.
  std::vector<Vector> gradient(const std::vector<Vector>& factors) const {
    Vector psi = tensor_vectors(factors);
    Vector g = Vector::Zero(psi.size());
    for (const Matrix& m : ms) {
      Vector v = m * psi;
      double mean = psi.dot(v).real();
      g += m * v - 2.0 * mean * v;
    }
    std::vector<Vector> grads(factors.size());
    for (std::size_t j = 0; j < factors.size(); ++j) {
      Vector gj = contract_except(g, factors, dims, j);
      gj -= factors[j].dot(gj) * factors[j];
      grads[j] = std::move(gj);
    }
    return grads;
  }
};

/// Projected gradient descent on the product-state manifold with Armijo
/// backtracking (initial step 0.1, halving, slope constant 1e-4).
inline std::pair<double, bool> descend_product(const VarianceSumObjective& obj,
                                               std::vector<Vector>& factors,
                                               const OptimizerConfig& config) {
  constexpr double kInitialStep = 0.1;
  constexpr double kArmijo = 1e-4;
  double f = obj.value_at(factors);
  bool converged = false;
  int stalled = 0;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    std::vector<Vector> grads = obj.gradient(factors);
    double gnorm2 = 0.0;
    for (const Vector& g : grads) gnorm2 += g.squaredNorm();
    if (gnorm2 <= config.convergence_tol) {
      converged = true;
      break;
    }
    double t = kInitialStep;
    bool stepped = false;
    while (t > 1e-14) {
      std::vector<Vector> trial(factors.size());
      for (std::size_t j = 0; j < factors.size(); ++j) {
        trial[j] = (factors[j] - t * grads[j]).normalized();
      }
      double ft = obj.value_at(trial);
      if (ft <= f - kArmijo * t * gnorm2) {
        double gain = f - ft;
        factors = std::move(trial);
        f = ft;
        stepped = true;
        stalled = gain <= 1e-15 * std::max(1.0, std::abs(f)) ? stalled + 1 : 0;
        break;
      }
      t /= 2.0;
    }
    if (!stepped || stalled >= 3) {
      // Progress exhausted at line-search resolution: accept as stationary
      // when the gradient is small on an absolute scale.
      converged = gnorm2 <= 1e-8;
      break;
    }
  }
  return {f, converged};
}

inline std::vector<Vector> random_factors(const DimensionSpec& dims, Rng& rng) {
  std::vector<Vector> f;
  for (std::size_t k = 0; k < dims.count(); ++k) f.push_back(random_unit_vector(dims.dim(k), rng));
  return f;
}

inline Optimum finish_optimum(double best, std::vector<Vector> best_factors,
                              const DimensionSpec& dims, bool best_converged,
                              const std::vector<double>& restart_values) {
  Optimum out;
  out.value = best;
  out.converged = best_converged;
  for (std::size_t k = 0; k < dims.count(); ++k) {
    out.argument.emplace_back(best_factors[k], DimensionSpec{dims.dim(k)});
  }
  for (double v : restart_values) {
    if (std::abs(v - best) <= kOptimizerTol) ++out.restarts_agreeing;
  }
  return out;
}

}  // namespace detail

/// Estimated minimum of sum_i d^2(M_i) over pure fully-product states.
inline Optimum min_variance_sum_product(const ObservableSet& ms, const DimensionSpec& dims,
                                        const OptimizerConfig& config = {}) {
  config.validate();
  detail::require(ms.dims() == dims, "min_variance_sum_product: dimension mismatch");
  detail::VarianceSumObjective obj(ms, dims);
  double best = std::numeric_limits<double>::infinity();
  std::vector<Vector> best_factors;
  bool best_converged = false, any_converged = false;
  std::vector<double> values;
  for (int r = 0; r < config.restarts; ++r) {
    Rng rng(derived_seed(config.seed, static_cast<std::uint64_t>(r)));
    std::vector<Vector> factors = detail::random_factors(dims, rng);
    auto [f, conv] = detail::descend_product(obj, factors, config);
    values.push_back(f);
    any_converged = any_converged || conv;
    if (f < best) {
      best = f;
      best_factors = std::move(factors);
      best_converged = conv;
    }
  }
  if (!any_converged) {
    throw std::runtime_error("min_variance_sum_product: no restart converged");
  }
  return detail::finish_optimum(best, std::move(best_factors), dims, best_converged, values);
}

/// Proper bipartitions of n subsystems, each given as the sorted index list of
/// the group containing subsystem 0.
inline std::vector<std::vector<int>> bipartition_groups(int n) {
  detail::require(n >= 2, "bipartition_groups: need at least two subsystems");
  std::vector<std::vector<int>> groups;
  for (int mask = 1; mask < (1 << n) - 1; ++mask) {
    if (!(mask & 1)) continue;  // fix subsystem 0 on the left to avoid duplicates
    std::vector<int> g;
    for (int k = 0; k < n; ++k) {
      if (mask & (1 << k)) g.push_back(k);
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

/// Minimum of the variance sum over pure states that are product across at
/// least one bipartition (each side otherwise unrestricted).
inline Optimum min_variance_sum_biseparable(const ObservableSet& ms, const DimensionSpec& dims,
                                            const OptimizerConfig& config = {}) {
  config.validate();
  detail::require(ms.dims() == dims, "min_variance_sum_biseparable: dimension mismatch");
  detail::require(dims.count() >= 3, "min_variance_sum_biseparable: need at least three parties");
  Optimum best;
  best.value = std::numeric_limits<double>::infinity();
  int n = static_cast<int>(dims.count());
  for (const std::vector<int>& group : bipartition_groups(n)) {
    std::vector<int> order = group;
    for (int k = 0; k < n; ++k) {
      if (std::find(group.begin(), group.end(), k) == group.end()) order.push_back(k);
    }
    DimensionSpec permuted = permute_dims(dims, order);
    int da = 1;
    for (std::size_t i = 0; i < group.size(); ++i) da *= permuted.dim(i);
    DimensionSpec grouped{da, permuted.total() / da};
    std::vector<Observable> perm_ms;
    for (const Observable& m : ms) {
      perm_ms.emplace_back(permute_subsystems(m.matrix(), dims, order), grouped);
    }
    Optimum cut = min_variance_sum_product(ObservableSet(std::move(perm_ms)), grouped, config);
    if (cut.value < best.value) best = std::move(cut);
  }
  return best;
}

/// Minimum of the variance sum over pure states of a single system; by the
/// mixing inequality this bounds all states, so it supplies LUR constants.
inline double min_variance_sum_single_system(const ObservableSet& as, int dim,
                                             const OptimizerConfig& config = {}) {
  detail::require(as.dims().total() == dim && as.dims().count() == 1,
                  "min_variance_sum_single_system: expected single-system observables");
  return min_variance_sum_product(as, DimensionSpec{dim}, config).value;
}

/// Maximum of |<a1,...,am|psi>| over fully-product states, by alternating
/// closed-form updates of one local factor at a time.  Each sweep is monotone
/// non-decreasing; for bipartite inputs this reproduces the largest Schmidt
/// coefficient.
inline Optimum max_overlap_product_multipartite(const Ket& psi,
                                                const OptimizerConfig& config = {}) {
  config.validate();
  const DimensionSpec& dims = psi.dims();
  double best = -1.0;
  std::vector<Vector> best_factors;
  bool any_converged = false, best_converged = false;
  std::vector<double> values;
  for (int r = 0; r < config.restarts; ++r) {
    Rng rng(derived_seed(config.seed, static_cast<std::uint64_t>(r)));
    std::vector<Vector> factors = detail::random_factors(dims, rng);
    double overlap = 0.0;
    bool conv = false;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
      double previous = overlap;
      for (std::size_t j = 0; j < factors.size(); ++j) {
        Vector h = detail::contract_except(psi.amplitudes(), factors, dims, j);
        double hn = h.norm();
        if (hn < 1e-14) {
          factors[j] = random_unit_vector(dims.dim(j), rng);
          continue;
        }
        factors[j] = h / hn;
        overlap = hn;
      }
      if (overlap < previous - 1e-12) {
        throw std::logic_error("max_overlap_product_multipartite: sweep decreased the overlap");
      }
      if (overlap - previous < config.convergence_tol) {
        conv = true;
        break;
      }
    }
    values.push_back(overlap);
    any_converged = any_converged || conv;
    if (overlap > best) {
      best = overlap;
      best_factors = factors;
      best_converged = conv;
    }
  }
  if (!any_converged) {
    throw std::runtime_error("max_overlap_product_multipartite: no restart converged");
  }
  Optimum out;
  out.value = best;
  out.converged = best_converged;
  for (std::size_t k = 0; k < dims.count(); ++k) {
    out.argument.emplace_back(best_factors[k], DimensionSpec{dims.dim(k)});
  }
  for (double v : values) {
    if (std::abs(v - best) <= kOptimizerTol) ++out.restarts_agreeing;
  }
  return out;
}

/// Minimum over bipartite product states of sum_i |<phi_i|a,b>|^2, by
/// alternating smallest-eigenvector updates.  A strictly positive value
/// certifies that no product state is orthogonal to all phi_i.
inline Optimum min_total_projection_product(const std::vector<Ket>& vectors,
                                            const OptimizerConfig& config = {}) {
  config.validate();
  detail::require(!vectors.empty(), "min_total_projection_product: empty vector list");
  const DimensionSpec& dims = vectors.front().dims();
  detail::require(dims.count() == 2, "min_total_projection_product: bipartite systems only");
  for (const Ket& v : vectors) {
    detail::require(v.dims() == dims, "min_total_projection_product: mixed dimensions");
  }
  int da = dims.dim(0), db = dims.dim(1);
  Matrix p = Matrix::Zero(dims.total(), dims.total());
  for (const Ket& v : vectors) p += v.amplitudes() * v.amplitudes().adjoint();

  auto reduce_a = [&](const Vector& b) {
    Matrix r = Matrix::Zero(da, da);
    for (int i = 0; i < da; ++i) {
      for (int k = 0; k < da; ++k) {
        Complex acc = 0.0;
        for (int j = 0; j < db; ++j) {
          for (int l = 0; l < db; ++l) acc += std::conj(b(j)) * p(i * db + j, k * db + l) * b(l);
        }
        r(i, k) = acc;
      }
    }
    return r;
  };
  auto reduce_b = [&](const Vector& a) {
    Matrix r = Matrix::Zero(db, db);
    for (int j = 0; j < db; ++j) {
      for (int l = 0; l < db; ++l) {
        Complex acc = 0.0;
        for (int i = 0; i < da; ++i) {
          for (int k = 0; k < da; ++k) acc += std::conj(a(i)) * p(i * db + j, k * db + l) * a(k);
        }
        r(j, l) = acc;
      }
    }
    return r;
  };
  auto min_eigpair = [](const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    return std::make_pair(es.eigenvalues()(0), Vector(es.eigenvectors().col(0)));
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<Vector> best_factors;
  bool any_converged = false, best_converged = false;
  std::vector<double> values;
  for (int r = 0; r < config.restarts; ++r) {
    Rng rng(derived_seed(config.seed, static_cast<std::uint64_t>(r)));
    Vector a = random_unit_vector(da, rng);
    Vector b = random_unit_vector(db, rng);
    double val = std::numeric_limits<double>::infinity();
    bool conv = false;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
      auto [la, ea] = min_eigpair(reduce_a(b));
      a = ea;
      auto [lb, eb] = min_eigpair(reduce_b(a));
      b = eb;
      double next = std::max(lb, 0.0);
      if (val - next < config.convergence_tol) {
        val = std::min(val, next);
        conv = true;
        break;
      }
      val = next;
    }
    values.push_back(val);
    any_converged = any_converged || conv;
    if (val < best) {
      best = val;
      best_factors = {a, b};
      best_converged = conv;
    }
  }
  if (!any_converged) {
    throw std::runtime_error("min_total_projection_product: no restart converged");
  }
  Optimum out;
  out.value = best;
  out.converged = best_converged;
  out.argument = {Ket(best_factors[0], DimensionSpec{da}), Ket(best_factors[1], DimensionSpec{db})};
  for (double v : values) {
    if (std::abs(v - best) <= kOptimizerTol) ++out.restarts_agreeing;
  }
  return out;
}

}  // namespace vardet
