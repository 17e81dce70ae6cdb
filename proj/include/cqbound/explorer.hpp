#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "cqbound/bounds.hpp"
#include "cqbound/entropy.hpp"
#include "cqbound/errors.hpp"
#include "cqbound/states.hpp"
#include "cqbound/tolerances.hpp"

namespace cqbound {

/// The two conjectured inequalities left open in the source material. This
/// module gathers numerical evidence only; its vocabulary is "no violation
/// found" or "violation candidate", never a truth claim.
enum class Conjecture { qc, fq };

inline const char* conjecture_name(Conjecture c) { return c == Conjecture::qc ? "qc" : "fq"; }

struct GapResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double epsilon = 0.0;
  bool epsilon_valid = false;
};

/// Conjectured qc bound: |H(X|B)_rho - H(X|B)_sigma| <= eps log2(d_X - 1) + h2(eps).
/// H(X|B) is evaluated on the embeddings with the conditioning flipped to B
/// by a subsystem swap. Out-of-range eps clamps the rhs with the flag
/// cleared, mirroring certify_prop1.
inline GapResult qc_gap(const CQState& rho, const CQState& sigma,
                        const Tolerances& tol = default_tolerances()) {
  if (rho.alphabet_size != sigma.alphabet_size || rho.dim_b != sigma.dim_b)
    throw DimensionMismatch("qc_gap: state shapes differ");
  const std::size_t n = rho.alphabet_size;
  const std::size_t d = rho.dim_b;
  const auto flipped_ce = [&](const CQState& s) {
    const DensityOperator full = embed_cq(s);
    const DensityOperator swapped{full.dim, swap_subsystems(full.matrix, n, d)};
    return conditional_entropy_bipartite(swapped, d, n, tol);
  };
  const double lhs = std::abs(flipped_ce(rho) - flipped_ce(sigma));
  const double eps = trace_distance_cq(rho, sigma, tol);
  const double limit = (n >= 2) ? 1.0 - 1.0 / static_cast<double>(n) : 0.0;
  const bool valid = eps > 0.0 && eps <= limit + kEndpointSlack;
  const double rhs = valid ? as_bound(eps, n) : as_bound_clamped(n);
  return GapResult{lhs, rhs, rhs - lhs, eps, valid};
}

/// Conjectured fully quantum bound: |H(A|B)_rho - H(A|B)_sigma| <=
/// eps log2(d_A^2 - 1) + h2(eps) on eps in (0, 1 - 1/d_A^2].
inline GapResult fq_gap(const DensityOperator& rho, const DensityOperator& sigma,
                        std::size_t dim_a, std::size_t dim_b,
                        const Tolerances& tol = default_tolerances()) {
  if (rho.dim != sigma.dim)
    throw DimensionMismatch("fq_gap: state dims differ");
  if (rho.dim != dim_a * dim_b)
    throw DimensionMismatch("fq_gap: dim " + std::to_string(rho.dim) + " != " +
                            std::to_string(dim_a) + "*" + std::to_string(dim_b));
  const auto cond_on_b = [&](const DensityOperator& s) {
    const DensityOperator swapped{s.dim, swap_subsystems(s.matrix, dim_a, dim_b)};
    return conditional_entropy_bipartite(swapped, dim_b, dim_a, tol);
  };
  const double lhs = std::abs(cond_on_b(rho) - cond_on_b(sigma));
  const double eps = trace_distance(rho, sigma, tol);
  const std::size_t da2 = dim_a * dim_a;
  const double limit = 1.0 - 1.0 / static_cast<double>(da2);
  const bool valid = eps > 0.0 && eps <= limit + kEndpointSlack;
  const double rhs = valid ? as_bound(eps, da2) : as_bound_clamped(da2);
  return GapResult{lhs, rhs, rhs - lhs, eps, valid};
}

struct CqPair {
  CQState rho;
  CQState sigma;
};

struct DmPair {
  DensityOperator rho;
  DensityOperator sigma;
};

struct SearchConfig {
  Conjecture conjecture = Conjecture::qc;
  std::size_t dim1 = 2;  // d_X for qc, d_A for fq
  std::size_t dim2 = 2;  // d_B
  std::vector<double> epsilon_grid;
  int trials_per_cell = 100;
  std::uint64_t seed = 0;
  int local_refine_steps = 64;
  // Optional starting witnesses (matching the conjecture): evaluated in every
  // cell before the random trials, so best_margin never exceeds their margin.
  std::vector<CqPair> seed_cq;
  std::vector<DmPair> seed_dm;
};

struct CellRecord {
  double epsilon = 0.0;       // grid target
  double best_margin = std::numeric_limits<double>::infinity();
  double best_epsilon = 0.0;  // witness's actual trace distance
  int trials = 0;             // trials evaluated (unreachable targets skipped)
  std::uint64_t seed = 0;
  bool violation_candidate = false;
  std::variant<CqPair, DmPair> witness;
};

struct SearchRecord {
  SearchConfig config;
  std::vector<CellRecord> cells;
};

inline constexpr double kViolationThreshold = -1e-6;
inline constexpr int kRefineStreak = 8;

/// Independent recomputation of a cell's margin from its stored witness.
inline GapResult verify_cell(const SearchConfig& config, const CellRecord& cell,
                             const Tolerances& tol = default_tolerances()) {
  if (config.conjecture == Conjecture::qc) {
    const auto& pair = std::get<CqPair>(cell.witness);
    return qc_gap(pair.rho, pair.sigma, tol);
  }
  const auto& pair = std::get<DmPair>(cell.witness);
  return fq_gap(pair.rho, pair.sigma, config.dim1, config.dim2, tol);
}

namespace detail {

inline CellRecord run_qc_cell(const SearchConfig& config, std::size_t cell_index, double eps,
                              const Tolerances& tol) {
  CellRecord cell;
  cell.epsilon = eps;
  cell.seed = config.seed;
  const std::uint64_t cell_seed = mix_seed(config.seed, cell_index);
  for (const CqPair& pair : config.seed_cq) {
    if (pair.rho.alphabet_size != config.dim1 || pair.rho.dim_b != config.dim2)
      throw DimensionMismatch("search: qc seed pair shape does not match config dims");
    const GapResult gap = qc_gap(pair.rho, pair.sigma, tol);
    ++cell.trials;
    if (gap.margin < cell.best_margin) {
      cell.best_margin = gap.margin;
      cell.best_epsilon = gap.epsilon;
      cell.witness = pair;
    }
  }
  for (int trial = 0; trial < config.trials_per_cell; ++trial) {
    const std::uint64_t trial_seed = mix_seed(cell_seed, trial);
    const CQState rho = sample_cq(config.dim1, config.dim2, mix_seed(trial_seed, 0));
    CQState sigma;
    try {
      sigma = pair_at_distance_cq(rho, eps, mix_seed(trial_seed, 1), tol);
    } catch (const Unreachable&) {
      continue;
    }
    const GapResult gap = qc_gap(rho, sigma, tol);
    ++cell.trials;
    if (gap.margin < cell.best_margin) {
      cell.best_margin = gap.margin;
      cell.best_epsilon = gap.epsilon;
      cell.witness = CqPair{rho, sigma};
    }
  }
  if (cell.trials == 0) return cell;
  // Local refinement: nudge the sigma side inside the eps-ball, re-bisect to
  // the exact distance, keep strict margin decreases.
  auto& best = std::get<CqPair>(cell.witness);
  double eta = 0.5;
  int streak = 0;
  for (int step = 0; step < config.local_refine_steps; ++step) {
    const std::uint64_t step_seed = mix_seed(cell_seed, 0xBEEFull + step);
    const CQState direction = sample_cq(config.dim1, config.dim2, step_seed);
    const CQState nudged = mix_cq(best.sigma, direction, eta);
    bool accepted = false;
    if (trace_distance_cq(best.rho, nudged, tol) >= eps) {
      const CQState candidate = interpolate_at_distance_cq(best.rho, nudged, eps, tol);
      const GapResult gap = qc_gap(best.rho, candidate, tol);
      if (gap.margin < cell.best_margin) {
        cell.best_margin = gap.margin;
        cell.best_epsilon = gap.epsilon;
        best.sigma = candidate;
        accepted = true;
      }
    }
    if (accepted) {
      streak = 0;
    } else if (++streak >= kRefineStreak) {
      eta = std::max(eta * 0.5, 1e-6);
      streak = 0;
    }
  }
  cell.violation_candidate = cell.best_margin < kViolationThreshold;
  return cell;
}

inline CellRecord run_fq_cell(const SearchConfig& config, std::size_t cell_index, double eps,
                              const Tolerances& tol) {
  CellRecord cell;
  cell.epsilon = eps;
  cell.seed = config.seed;
  const std::size_t dim = config.dim1 * config.dim2;
  const std::uint64_t cell_seed = mix_seed(config.seed, cell_index);
  for (const DmPair& pair : config.seed_dm) {
    const GapResult gap = fq_gap(pair.rho, pair.sigma, config.dim1, config.dim2, tol);
    ++cell.trials;
    if (gap.margin < cell.best_margin) {
      cell.best_margin = gap.margin;
      cell.best_epsilon = gap.epsilon;
      cell.witness = pair;
    }
  }
  for (int trial = 0; trial < config.trials_per_cell; ++trial) {
    const std::uint64_t trial_seed = mix_seed(cell_seed, trial);
    // Extremal behavior tends to sit at low rank, so ranks 1..dim all occur.
    const std::size_t rank = 1 + static_cast<std::size_t>(mix_seed(trial_seed, 2) % dim);
    const DensityOperator rho = sample_density_rank(dim, rank, mix_seed(trial_seed, 0));
    DensityOperator sigma;
    try {
      sigma = pair_at_distance(rho, eps, mix_seed(trial_seed, 1), tol);
    } catch (const Unreachable&) {
      continue;
    }
    const GapResult gap = fq_gap(rho, sigma, config.dim1, config.dim2, tol);
    ++cell.trials;
    if (gap.margin < cell.best_margin) {
      cell.best_margin = gap.margin;
      cell.best_epsilon = gap.epsilon;
      cell.witness = DmPair{rho, sigma};
    }
  }
  if (cell.trials == 0) return cell;
  auto& best = std::get<DmPair>(cell.witness);
  double eta = 0.5;
  int streak = 0;
  for (int step = 0; step < config.local_refine_steps; ++step) {
    const std::uint64_t step_seed = mix_seed(cell_seed, 0xBEEFull + step);
    const DensityOperator direction = sample_density(dim, step_seed);
    const DensityOperator nudged = interpolate(best.sigma, direction, eta);
    bool accepted = false;
    if (trace_distance(best.rho, nudged, tol) >= eps) {
      const DensityOperator candidate = interpolate_at_distance(best.rho, nudged, eps, tol);
      const GapResult gap = fq_gap(best.rho, candidate, config.dim1, config.dim2, tol);
      if (gap.margin < cell.best_margin) {
        cell.best_margin = gap.margin;
        cell.best_epsilon = gap.epsilon;
        best.sigma = candidate;
        accepted = true;
      }
    }
    if (accepted) {
      streak = 0;
    } else if (++streak >= kRefineStreak) {
      eta = std::max(eta * 0.5, 1e-6);
      streak = 0;
    }
  }
  cell.violation_candidate = cell.best_margin < kViolationThreshold;
  return cell;
}

}  // namespace detail

/// Stochastic probe of one conjecture over an epsilon grid: random pairs at
/// controlled distance per cell, minimum margin kept, then local refinement
/// around the worst witness. Deterministic per config; cells run in
/// parallel on independent seed streams.
inline SearchRecord search(const SearchConfig& config,
                           const Tolerances& tol = default_tolerances()) {
  if (config.dim1 < 2 || config.dim2 < 2)
    throw OutOfRange("search: dimensions must be >= 2");
  if (config.trials_per_cell < 1) throw OutOfRange("search: trials_per_cell must be >= 1");
  if (config.conjecture == Conjecture::qc ? !config.seed_dm.empty() : !config.seed_cq.empty())
    throw OutOfRange("search: seed pairs do not match the conjecture");
  SearchRecord record;
  record.config = config;
  record.cells.resize(config.epsilon_grid.size());
  const std::size_t cells = config.epsilon_grid.size();
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), std::max<std::size_t>(cells, 1)));
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t ci = w; ci < cells; ci += workers) {
        const double eps = config.epsilon_grid[ci];
        record.cells[ci] = config.conjecture == Conjecture::qc
                               ? detail::run_qc_cell(config, ci, eps, tol)
                               : detail::run_fq_cell(config, ci, eps, tol);
      }
    }));
  }
  for (auto& f : futures) f.get();
  return record;
}

}  // namespace cqbound
