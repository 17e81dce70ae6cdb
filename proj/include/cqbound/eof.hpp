#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cqbound/bounds.hpp"
#include "cqbound/entropy.hpp"
#include "cqbound/errors.hpp"
#include "cqbound/matcore.hpp"
#include "cqbound/states.hpp"
#include "cqbound/tolerances.hpp"

namespace cqbound {

/// Desk-scale limit for the convex-roof optimizer.
inline constexpr std::size_t kEofDimCap = 16;

struct PureDecomposition {
  std::size_t size = 0;
  ProbabilityDistribution weights;
  std::vector<std::vector<Complex>> pure_states;  // unit vectors on A (x) B
};

struct EofConfig {
  int starts = 32;
  int max_iters = 10000;
  int stall_window = 50;
  double tol = 1e-9;
  std::size_t max_terms = 0;  // 0: decomposition size cap (d_A d_B)^2
  std::uint64_t seed = 0;
};

struct EofResult {
  double value = 0.0;
  PureDecomposition witness;
  bool converged = true;
};

/// Entanglement of a pure bipartite state: entropy of the reduced state.
inline double eof_pure(const std::vector<Complex>& psi, std::size_t dim_a, std::size_t dim_b,
                       const Tolerances& tol = default_tolerances()) {
  if (psi.size() != dim_a * dim_b)
    throw DimensionMismatch("eof_pure: vector length " + std::to_string(psi.size()) + " != " +
                            std::to_string(dim_a) + "*" + std::to_string(dim_b));
  double norm2 = 0.0;
  for (const Complex& z : psi) norm2 += std::norm(z);
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10)
    throw OutOfRange("eof_pure: vector norm " + std::to_string(std::sqrt(norm2)) + " != 1");
  ComplexMatrix reduced(dim_a, dim_a);
  for (std::size_t i = 0; i < dim_a; ++i)
    for (std::size_t k = 0; k < dim_a; ++k) {
      Complex s = 0.0;
      for (std::size_t j = 0; j < dim_b; ++j) s += psi[i * dim_b + j] * std::conj(psi[k * dim_b + j]);
      reduced(i, k) = s;
    }
  return von_neumann(DensityOperator{dim_a, std::move(reduced)}, tol);
}

/// Average pure-state entanglement of a decomposition: an upper bound on
/// E_F of the state it reconstructs.
inline double decomposition_value(const PureDecomposition& dec, std::size_t dim_a,
                                  std::size_t dim_b, const Tolerances& tol = default_tolerances()) {
  double value = 0.0;
  for (std::size_t x = 0; x < dec.size; ++x) {
    const double p = dec.weights.weights[x];
    if (p <= 1e-15) continue;
    value += p * eof_pure(dec.pure_states[x], dim_a, dim_b, tol);
  }
  return value;
}

/// Max-entry deviation of sum_x p(x)|phi^x><phi^x| from the target.
inline double reconstruction_defect(const PureDecomposition& dec, const DensityOperator& rho) {
  ComplexMatrix acc(rho.dim, rho.dim);
  for (std::size_t x = 0; x < dec.size; ++x) {
    const double p = dec.weights.weights[x];
    const auto& phi = dec.pure_states[x];
    for (std::size_t i = 0; i < rho.dim; ++i)
      for (std::size_t j = 0; j < rho.dim; ++j) acc(i, j) += p * phi[i] * std::conj(phi[j]);
  }
  acc -= rho.matrix;
  return acc.max_abs();
}

namespace detail {

/// Contribution of one unnormalized ensemble vector:
/// p H(Tr_B |phi><phi| / p) with p = |phi_tilde|^2, computed without
/// normalizing the vector.
inline double ensemble_term(const std::vector<Complex>& phit, std::size_t dim_a, std::size_t dim_b,
                            const Tolerances& tol) {
  double p = 0.0;
  for (const Complex& z : phit) p += std::norm(z);
  if (p < 1e-15) return 0.0;
  ComplexMatrix reduced(dim_a, dim_a);
  for (std::size_t i = 0; i < dim_a; ++i)
    for (std::size_t k = i; k < dim_a; ++k) {
      Complex s = 0.0;
      for (std::size_t j = 0; j < dim_b; ++j)
        s += phit[i * dim_b + j] * std::conj(phit[k * dim_b + j]);
      reduced(i, k) = (i == k) ? Complex(s.real()) : s;
      if (i != k) reduced(k, i) = std::conj(s);
    }
  const auto sys = hermitian_eig(reduced, tol);
  double h = 0.0;
  for (double nu : sys.eigenvalues)
    if (nu > 0.0) h -= nu * std::log2(nu / p);
  return std::max(h, 0.0);
}

struct EnsembleStart {
  std::vector<std::vector<Complex>> vectors;  // unnormalized, sum of outer products = rho
  std::vector<double> terms;
  double value = 0.0;
  bool converged = true;
};

/// Givens-rotation descent over the Schroedinger-HJW manifold. The m
/// ensemble vectors are mixed pairwise by 2x2 unitaries, which preserves
/// the reconstruction identity exactly; only the two touched contributions
/// are recomputed per proposal.
inline void descend(EnsembleStart& st, std::size_t dim_a, std::size_t dim_b, const EofConfig& cfg,
                    Rng& rng, const Tolerances& tol) {
  const std::size_t m = st.vectors.size();
  if (m < 2) {
    st.converged = true;
    return;
  }
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  const std::size_t window = static_cast<std::size_t>(cfg.stall_window);
  std::vector<double> best_history;
  best_history.reserve(window + 1);
  double best = st.value;
  double step = 0.78539816339744831;  // pi/4
  int rejection_streak = 0;
  st.converged = false;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    std::size_t x1 = pick(rng);
    std::size_t x2 = pick(rng);
    if (x1 == x2) continue;
    const double theta = coin(rng) ? step : -step;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Complex mix = coin(rng) ? Complex(0.0, -s) : Complex(s, 0.0);
    // [[c, -mix*], [mix, c]] is unitary for mix in {s, -is}.
    const std::size_t dim = st.vectors[x1].size();
    std::vector<Complex> v1(dim), v2(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      v1[i] = c * st.vectors[x1][i] - std::conj(mix) * st.vectors[x2][i];
      v2[i] = mix * st.vectors[x1][i] + c * st.vectors[x2][i];
    }
    const double t1 = ensemble_term(v1, dim_a, dim_b, tol);
    const double t2 = ensemble_term(v2, dim_a, dim_b, tol);
    const double delta = (t1 + t2) - (st.terms[x1] + st.terms[x2]);
    if (delta < -1e-15) {
      st.vectors[x1] = std::move(v1);
      st.vectors[x2] = std::move(v2);
      st.terms[x1] = t1;
      st.terms[x2] = t2;
      st.value += delta;
      best = std::min(best, st.value);
      rejection_streak = 0;
    } else {
      if (++rejection_streak >= 8) {
        step = std::max(step * 0.5, 1e-7);
        rejection_streak = 0;
      }
    }
    best_history.push_back(best);
    if (best_history.size() > window) {
      const double before = best_history[best_history.size() - 1 - window];
      if (before - best < cfg.tol) {
        st.converged = true;
        break;
      }
    }
  }
}

inline EnsembleStart make_start(int index, const std::vector<std::vector<Complex>>& scaled,
                                std::size_t m, std::size_t dim_a, std::size_t dim_b,
                                const EofConfig& cfg, const Tolerances& tol) {
  const std::size_t r = scaled.size();
  const std::size_t dim = dim_a * dim_b;
  EnsembleStart st;
  st.vectors.assign(m, std::vector<Complex>(dim, Complex(0.0)));
  if (index == 0) {
    // Identity isometry: the eigendecomposition itself. Keeping this as
    // start 0 pins the estimate at or below the eigendecomposition value.
    for (std::size_t i = 0; i < r; ++i) st.vectors[i] = scaled[i];
  } else {
    Rng rng(mix_seed(cfg.seed, 0x5747u + static_cast<std::uint64_t>(index)));
    ComplexMatrix g = ginibre(m, r, rng);
    // Gram-Schmidt on columns makes V an isometry, so the rows mix the
    // scaled eigenvectors without changing their outer-product sum.
    for (std::size_t col = 0; col < r; ++col) {
      for (std::size_t prev = 0; prev < col; ++prev) {
        Complex ip = 0.0;
        for (std::size_t row = 0; row < m; ++row) ip += std::conj(g(row, prev)) * g(row, col);
        for (std::size_t row = 0; row < m; ++row) g(row, col) -= ip * g(row, prev);
      }
      double norm2 = 0.0;
      for (std::size_t row = 0; row < m; ++row) norm2 += std::norm(g(row, col));
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t row = 0; row < m; ++row) g(row, col) *= inv;
    }
    for (std::size_t row = 0; row < m; ++row)
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < dim; ++k) st.vectors[row][k] += g(row, i) * scaled[i][k];
  }
  st.terms.resize(m);
  st.value = 0.0;
  for (std::size_t x = 0; x < m; ++x) {
    st.terms[x] = ensemble_term(st.vectors[x], dim_a, dim_b, tol);
    st.value += st.terms[x];
  }
  Rng rng(mix_seed(cfg.seed, 0xDE5Cu + static_cast<std::uint64_t>(index)));
  descend(st, dim_a, dim_b, cfg, rng, tol);
  return st;
}

}  // namespace detail

/// Convex-roof estimate of E_F by multi-start descent over pure-state
/// decompositions. The returned value is always an upper bound on E_F; the
/// witness reconstructs rho within TOL_DECOMP. converged=false means the
/// winning start ran out of iterations instead of stalling out.
inline EofResult eof_estimate(const DensityOperator& rho, std::size_t dim_a, std::size_t dim_b,
                              const EofConfig& cfg = EofConfig{},
                              const Tolerances& tol = default_tolerances()) {
  const std::size_t dim = dim_a * dim_b;
  if (dim > kEofDimCap)
    throw DimensionOverflow("eof_estimate: dim_a*dim_b = " + std::to_string(dim) +
                            " exceeds desk-scale cap " + std::to_string(kEofDimCap));
  if (rho.dim != dim)
    throw DimensionMismatch("eof_estimate: state dim " + std::to_string(rho.dim) + " != " +
                            std::to_string(dim_a) + "*" + std::to_string(dim_b));
  const auto sys = hermitian_eig(rho.matrix, tol);
  std::vector<std::vector<Complex>> scaled;
  for (std::size_t i = 0; i < dim; ++i) {
    if (sys.eigenvalues[i] <= 1e-12) continue;
    const double root = std::sqrt(sys.eigenvalues[i]);
    std::vector<Complex> w(dim);
    for (std::size_t k = 0; k < dim; ++k) w[k] = root * sys.eigenvectors[i][k];
    scaled.push_back(std::move(w));
  }
  const std::size_t rank = scaled.size();
  const std::size_t m = std::max(cfg.max_terms != 0 ? cfg.max_terms : dim * dim, rank);
  const int starts = std::max(cfg.starts, 1);

  std::vector<detail::EnsembleStart> outcomes(starts);
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), starts);
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (int idx = static_cast<int>(w); idx < starts; idx += static_cast<int>(workers))
        outcomes[idx] = detail::make_start(idx, scaled, m, dim_a, dim_b, cfg, tol);
    }));
  }
  for (auto& f : futures) f.get();

  std::size_t winner = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i)
    if (outcomes[i].value < outcomes[winner].value) winner = i;
  const detail::EnsembleStart& best = outcomes[winner];

  PureDecomposition witness;
  for (std::size_t x = 0; x < best.vectors.size(); ++x) {
    double p = 0.0;
    for (const Complex& z : best.vectors[x]) p += std::norm(z);
    if (p < 1e-12) continue;
    const double inv = 1.0 / std::sqrt(p);
    std::vector<Complex> unit(best.vectors[x].size());
    for (std::size_t k = 0; k < unit.size(); ++k) unit[k] = inv * best.vectors[x][k];
    witness.weights.weights.push_back(p);
    witness.pure_states.push_back(std::move(unit));
  }
  witness.size = witness.pure_states.size();
  witness.weights.alphabet_size = witness.size;
  return EofResult{best.value, std::move(witness), best.converged};
}

struct EofCorollaryReport {
  BoundReport report;
  bool heuristic = true;  // estimator values are upper bounds on true E_F
  EofResult rho_estimate;
  EofResult sigma_estimate;
};

namespace detail {
inline std::size_t numerical_rank(const DensityOperator& rho, const Tolerances& tol) {
  const auto sys = hermitian_eig(rho.matrix, tol);
  std::size_t rank = 0;
  for (double lam : sys.eigenvalues)
    if (lam > 1e-9) ++rank;
  return rank;
}
}  // namespace detail

/// Checks |E_F(rho) - E_F(sigma)| against the continuity bound at the
/// states' actual trace distance. Mixed inputs keep the heuristic flag set,
/// since the lhs is then a difference of estimates, not of exact values;
/// pure inputs clear it.
inline EofCorollaryReport certify_eof_corollary(const DensityOperator& rho,
                                                const DensityOperator& sigma, std::size_t dim_a,
                                                std::size_t dim_b,
                                                const EofConfig& cfg = EofConfig{},
                                                const Tolerances& tol = default_tolerances()) {
  if (rho.dim != sigma.dim)
    throw DimensionMismatch("certify_eof_corollary: state dims differ");
  const double eps = trace_distance(rho, sigma, tol);
  const std::size_t d = std::min(dim_a, dim_b);
  const double dd = static_cast<double>(d);
  const double limit = d >= 2 ? 1.0 - std::sqrt(2.0 * dd - 1.0) / dd : 0.0;
  if (eps > limit + kEndpointSlack)
    throw EpsilonOutOfRange("certify_eof_corollary: trace distance " + std::to_string(eps) +
                            " outside (0, " + std::to_string(limit) + "]");
  EofResult er = eof_estimate(rho, dim_a, dim_b, cfg, tol);
  EofResult es = eof_estimate(sigma, dim_a, dim_b, cfg, tol);
  const double lhs = std::abs(er.value - es.value);
  const double rhs = eps > 0.0 ? eof_bound(eps, dim_a, dim_b) : 0.0;
  const double margin = rhs - lhs;
  BoundReport report{lhs,  rhs, eps, eps > 0.0, d, margin >= -tol.bound_margin,
                     margin};
  const bool heuristic =
      detail::numerical_rank(rho, tol) > 1 || detail::numerical_rank(sigma, tol) > 1;
  return EofCorollaryReport{report, heuristic, std::move(er), std::move(es)};
}

}  // namespace cqbound
