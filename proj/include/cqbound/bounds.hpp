#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cqbound/channels.hpp"
#include "cqbound/entropy.hpp"
#include "cqbound/errors.hpp"
#include "cqbound/states.hpp"
#include "cqbound/tolerances.hpp"

namespace cqbound {

/// Interval-boundary slack: 1 - 1/d computed in floating point must count
/// as inside (0, 1 - 1/d].
inline constexpr double kEndpointSlack = 1e-12;

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double epsilon = 0.0;
  bool epsilon_valid = false;
  std::size_t dim = 0;
  bool satisfied = false;
  double margin = 0.0;
};

/// eps * log2(d - 1) + h2(eps) on eps in (0, 1 - 1/d]. d = 1 returns 0:
/// a one-dimensional B forces both conditional entropies to 0, so the only
/// sensible bound is the trivial one.
inline double as_bound(double eps, std::size_t d) {
  if (d < 1) throw OutOfRange("as_bound: d must be >= 1");
  if (d == 1) return 0.0;
  const double limit = 1.0 - 1.0 / static_cast<double>(d);
  if (!(eps > 0.0) || eps > limit + kEndpointSlack)
    throw EpsilonOutOfRange("as_bound: epsilon " + std::to_string(eps) + " outside (0, " +
                            std::to_string(limit) + "]");
  return eps * std::log2(static_cast<double>(d - 1)) + binary_entropy(std::min(eps, 1.0));
}

/// Right-hand side used when epsilon falls outside (0, 1 - 1/d]: the bound
/// at the clamp point, which equals log2 d, dominates every possible lhs.
inline double as_bound_clamped(std::size_t d) {
  if (d <= 1) return 0.0;
  return as_bound(1.0 - 1.0 / static_cast<double>(d), d);
}

/// Certifies |H(B|X)_rho - H(B|X)_sigma| <= as_bound(eps, d_B) at
/// eps = trace distance of the embeddings. Out-of-range eps (including
/// rho = sigma, eps = 0) clamps the rhs and clears epsilon_valid instead of
/// failing: the certifier always returns a verdict.
inline BoundReport certify_prop1(const CQState& rho, const CQState& sigma,
                                 const Tolerances& tol = default_tolerances()) {
  if (rho.alphabet_size != sigma.alphabet_size || rho.dim_b != sigma.dim_b)
    throw DimensionMismatch("certify_prop1: state shapes differ");
  const std::size_t d = rho.dim_b;
  const double eps = trace_distance_cq(rho, sigma, tol);
  const double lhs = std::abs(conditional_entropy_cq(rho, tol) - conditional_entropy_cq(sigma, tol));
  const double limit = (d >= 2) ? 1.0 - 1.0 / static_cast<double>(d) : 0.0;
  const bool valid = eps > 0.0 && eps <= limit + kEndpointSlack;
  const double rhs = valid ? as_bound(eps, d) : as_bound_clamped(d);
  const double margin = rhs - lhs;
  return BoundReport{lhs, rhs, eps, valid, d, margin >= -tol.bound_margin, margin};
}

/// The saturating family realized as single-letter cq states:
/// rho_B = |1><1|, sigma_B = diag(1 - eps, eps/(d-1), ..., eps/(d-1)).
/// Trace distance is eps exactly and the entropy gap equals the bound.
inline std::pair<CQState, CQState> saturating_pair(std::size_t dim_b, double eps) {
  if (dim_b < 2) throw OutOfRange("saturating_pair: d_B must be >= 2");
  const double limit = 1.0 - 1.0 / static_cast<double>(dim_b);
  if (!(eps > 0.0) || eps > limit + kEndpointSlack)
    throw EpsilonOutOfRange("saturating_pair: epsilon " + std::to_string(eps) + " outside (0, " +
                            std::to_string(limit) + "]");
  ComplexMatrix pure(dim_b, dim_b);
  pure(0, 0) = 1.0;
  ComplexMatrix spread(dim_b, dim_b);
  spread(0, 0) = 1.0 - eps;
  for (std::size_t i = 1; i < dim_b; ++i) spread(i, i) = eps / static_cast<double>(dim_b - 1);
  CQState rho{1, dim_b, ProbabilityDistribution{1, {1.0}}, {std::move(pure)}};
  CQState sigma{1, dim_b, ProbabilityDistribution{1, {1.0}}, {std::move(spread)}};
  return {std::move(rho), std::move(sigma)};
}

/// delta(eps) = sqrt(eps (2 - eps)); the trace-distance inflation picked up
/// when passing from purifications to the formation ensemble.
inline double eof_delta(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw OutOfRange("eof_delta: epsilon " + std::to_string(eps) + " outside [0,1]");
  return std::sqrt(eps * (2.0 - eps));
}

/// Entanglement-of-formation continuity bound delta log2(d-1) + h2(delta)
/// with d = min(d_A, d_B), on eps in (0, 1 - sqrt(2d-1)/d]. At the right
/// endpoint delta equals 1 - 1/d, so the bound tops out at log2 d.
inline double eof_bound(double eps, std::size_t dim_a, std::size_t dim_b) {
  const std::size_t d = std::min(dim_a, dim_b);
  if (d < 1) throw OutOfRange("eof_bound: dimensions must be >= 1");
  if (d == 1) return 0.0;
  const double dd = static_cast<double>(d);
  const double limit = 1.0 - std::sqrt(2.0 * dd - 1.0) / dd;
  if (!(eps > 0.0) || eps > limit + kEndpointSlack)
    throw EpsilonOutOfRange("eof_bound: epsilon " + std::to_string(eps) + " outside (0, " +
                            std::to_string(limit) + "]");
  const double delta = std::min(eof_delta(eps), 1.0);
  return delta * std::log2(dd - 1.0) + binary_entropy(delta);
}

struct TruncationStep {
  std::size_t level = 0;
  BoundReport report;
  double entropy_gap = 0.0;  // |H(B|X) of truncated rho - H(B|X) of rho|
};

/// Runs the finite-alphabet proxy of the countable-alphabet argument: for
/// each level k, push both states through the projection channel, re-extract
/// and certify. Data processing forces the truncated distance below the
/// original, and the rho-side entropy gap records the convergence.
inline std::vector<TruncationStep> certify_countable(const CQState& rho, const CQState& sigma,
                                                     const std::vector<std::size_t>& levels,
                                                     const Tolerances& tol = default_tolerances()) {
  if (rho.alphabet_size != sigma.alphabet_size || rho.dim_b != sigma.dim_b)
    throw DimensionMismatch("certify_countable: state shapes differ");
  const std::size_t n = rho.alphabet_size;
  const std::size_t d = rho.dim_b;
  const DensityOperator rho_full = embed_cq(rho);
  const DensityOperator sigma_full = embed_cq(sigma);
  const double h_full = conditional_entropy_cq(rho, tol);
  std::vector<TruncationStep> steps;
  steps.reserve(levels.size());
  for (std::size_t k : levels) {
    const CQState rho_k = extract_cq(apply_projection_channel(k, rho_full, n, d), n, d, tol);
    const CQState sigma_k = extract_cq(apply_projection_channel(k, sigma_full, n, d), n, d, tol);
    BoundReport report = certify_prop1(rho_k, sigma_k, tol);
    const double gap = std::abs(conditional_entropy_cq(rho_k, tol) - h_full);
    steps.push_back(TruncationStep{k, report, gap});
  }
  return steps;
}

}  // namespace cqbound
