#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cqbound/errors.hpp"
#include "cqbound/matcore.hpp"
#include "cqbound/tolerances.hpp"

namespace cqbound {

using Rng = std::mt19937_64;

/// Derives an independent 64-bit stream from (seed, stream) so that parallel
/// workers and per-trial generators never share state. SplitMix64 finalizer.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct DensityOperator {
  std::size_t dim = 0;
  ComplexMatrix matrix;
};

struct ProbabilityDistribution {
  std::size_t alphabet_size = 0;
  std::vector<double> weights;
};

struct CQState {
  std::size_t alphabet_size = 0;
  std::size_t dim_b = 0;
  ProbabilityDistribution weights;
  std::vector<ComplexMatrix> conditionals;
};

/// Joint distribution p(x,y), stored row-major: probabilities[x * size_y + y].
struct JointDistribution {
  std::size_t size_x = 0;
  std::size_t size_y = 0;
  std::vector<double> probabilities;
};

/// Validation gate for density operators. Internal code that constructs
/// operators guaranteed valid by algebra may brace-initialize instead.
inline DensityOperator make_density(const ComplexMatrix& m,
                                    const Tolerances& tol = default_tolerances()) {
  if (!m.square()) throw NotHermitian("make_density: matrix is not square");
  const double defect = hermiticity_defect(m);
  if (defect > tol.hermitian)
    throw NotHermitian("make_density: hermiticity defect " + std::to_string(defect));
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0)) > tol.unit_trace)
    throw TraceNotOne("make_density: trace " + std::to_string(tr.real()) + "+" +
                      std::to_string(tr.imag()) + "i");
  const auto sys = hermitian_eig(m, tol);
  for (double lam : sys.eigenvalues)
    if (lam < -tol.psd)
      throw NotPSD("make_density: negative eigenvalue " + std::to_string(lam));
  return DensityOperator{m.rows(), m};
}

inline ProbabilityDistribution make_distribution(std::vector<double> weights,
                                                 const Tolerances& tol = default_tolerances()) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0))
      throw OutOfRange("make_distribution: negative weight " + std::to_string(w));
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol.distribution_sum)
    throw OutOfRange("make_distribution: weights sum to " + std::to_string(sum));
  const std::size_t n = weights.size();
  return ProbabilityDistribution{n, std::move(weights)};
}

inline CQState make_cq(std::vector<double> weights, std::vector<ComplexMatrix> conditionals,
                       const Tolerances& tol = default_tolerances()) {
  if (weights.size() != conditionals.size())
    throw DimensionMismatch("make_cq: " + std::to_string(weights.size()) + " weights vs " +
                            std::to_string(conditionals.size()) + " conditionals");
  if (conditionals.empty()) throw DimensionMismatch("make_cq: empty alphabet");
  const std::size_t d = conditionals.front().rows();
  for (const auto& c : conditionals) {
    if (!c.square() || c.rows() != d)
      throw DimensionMismatch("make_cq: conditionals have mixed dimensions");
    make_density(c, tol);
  }
  auto dist = make_distribution(std::move(weights), tol);
  return CQState{dist.alphabet_size, d, std::move(dist), std::move(conditionals)};
}

inline JointDistribution make_joint(std::size_t size_x, std::size_t size_y,
                                    std::vector<double> probabilities,
                                    const Tolerances& tol = default_tolerances()) {
  if (probabilities.size() != size_x * size_y)
    throw DimensionMismatch("make_joint: expected " + std::to_string(size_x * size_y) +
                            " entries, got " + std::to_string(probabilities.size()));
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw OutOfRange("make_joint: negative probability " + std::to_string(p));
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol.distribution_sum)
    throw OutOfRange("make_joint: probabilities sum to " + std::to_string(sum));
  return JointDistribution{size_x, size_y, std::move(probabilities)};
}

/// Block-diagonal embedding sum_x r(x) |x><x| (x) rho_B^x on X (x) B.
inline DensityOperator embed_cq(const CQState& s) {
  const std::size_t n = s.alphabet_size;
  const std::size_t d = s.dim_b;
  if (n * d > kDimensionCap)
    throw DimensionOverflow("embed_cq: embedding dimension " + std::to_string(n * d) +
                            " exceeds cap " + std::to_string(kDimensionCap));
  ComplexMatrix out(n * d, n * d);
  for (std::size_t x = 0; x < n; ++x) {
    const double r = s.weights.weights[x];
    const ComplexMatrix& c = s.conditionals[x];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out(x * d + i, x * d + j) = r * c(i, j);
  }
  return DensityOperator{n * d, std::move(out)};
}

/// Inverse of embed_cq. Letters with weight below 1e-12 get conditional
/// I/d_B; those terms carry no entropy, so the choice is unobservable.
inline CQState extract_cq(const DensityOperator& rho, std::size_t alphabet_size, std::size_t dim_b,
                          const Tolerances& tol = default_tolerances()) {
  const std::size_t n = alphabet_size;
  const std::size_t d = dim_b;
  if (rho.dim != n * d)
    throw DimensionMismatch("extract_cq: dim " + std::to_string(rho.dim) + " != " +
                            std::to_string(n) + "*" + std::to_string(d));
  double off = 0.0;
  for (std::size_t i = 0; i < rho.dim; ++i)
    for (std::size_t j = 0; j < rho.dim; ++j)
      if (i / d != j / d) off = std::max(off, std::abs(rho.matrix(i, j)));
  if (off > tol.off_block)
    throw NotBlockDiagonal("extract_cq: off-block mass " + std::to_string(off));

  std::vector<double> weights(n);
  std::vector<ComplexMatrix> conditionals(n);
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    Complex tr = 0.0;
    for (std::size_t i = 0; i < d; ++i) tr += rho.matrix(x * d + i, x * d + i);
    weights[x] = std::max(tr.real(), 0.0);
    total += weights[x];
  }
  for (std::size_t x = 0; x < n; ++x) {
    ComplexMatrix c(d, d);
    if (weights[x] < 1e-12) {
      for (std::size_t i = 0; i < d; ++i) c(i, i) = 1.0 / static_cast<double>(d);
      weights[x] = 0.0;
    } else {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          c(i, j) = rho.matrix(x * d + i, x * d + j) / weights[x];
    }
    conditionals[x] = std::move(c);
  }
  if (total > 0.0)
    for (double& w : weights) w /= total;
  auto dist = ProbabilityDistribution{n, std::move(weights)};
  return CQState{n, d, std::move(dist), std::move(conditionals)};
}

inline double trace_distance(const DensityOperator& rho, const DensityOperator& sigma,
                             const Tolerances& tol = default_tolerances()) {
  if (rho.dim != sigma.dim)
    throw DimensionMismatch("trace_distance: dims " + std::to_string(rho.dim) + " vs " +
                            std::to_string(sigma.dim));
  const ComplexMatrix diff = rho.matrix - sigma.matrix;
  const auto sys = hermitian_eig(diff, tol);
  double sum = 0.0;
  for (double lam : sys.eigenvalues) sum += std::abs(lam);
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

/// Trace distance between cq states with a common classical basis. The
/// difference is block diagonal, so the trace norm splits into per-letter
/// d_B x d_B problems; this is what keeps large-alphabet sweeps cheap.
inline double trace_distance_cq(const CQState& a, const CQState& b,
                                const Tolerances& tol = default_tolerances()) {
  if (a.alphabet_size != b.alphabet_size || a.dim_b != b.dim_b)
    throw DimensionMismatch("trace_distance_cq: shape mismatch");
  const std::size_t d = a.dim_b;
  double sum = 0.0;
  for (std::size_t x = 0; x < a.alphabet_size; ++x) {
    ComplexMatrix block(d, d);
    const double r = a.weights.weights[x];
    const double s = b.weights.weights[x];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        block(i, j) = r * a.conditionals[x](i, j) - s * b.conditionals[x](i, j);
    const auto sys = hermitian_eig(block, tol);
    for (double lam : sys.eigenvalues) sum += std::abs(lam);
  }
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

inline double total_variation(const JointDistribution& p, const JointDistribution& q) {
  if (p.size_x != q.size_x || p.size_y != q.size_y)
    throw DimensionMismatch("total_variation: shape mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < p.probabilities.size(); ++k)
    sum += std::abs(p.probabilities[k] - q.probabilities[k]);
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

inline double total_variation(const ProbabilityDistribution& p, const ProbabilityDistribution& q) {
  if (p.alphabet_size != q.alphabet_size)
    throw DimensionMismatch("total_variation: alphabet mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < p.weights.size(); ++k) sum += std::abs(p.weights[k] - q.weights[k]);
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

namespace detail {

/// d x r matrix of standard complex Gaussians.
inline ComplexMatrix ginibre(std::size_t d, std::size_t r, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(d, r);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < r; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  return g;
}

/// GG^dagger / Tr(GG^dagger), assembled exactly Hermitian.
inline ComplexMatrix ginibre_density(std::size_t d, std::size_t rank, Rng& rng) {
  const ComplexMatrix g = ginibre(d, rank, rng);
  ComplexMatrix m(d, d);
  double tr = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double diag = 0.0;
    for (std::size_t k = 0; k < rank; ++k) diag += std::norm(g(i, k));
    m(i, i) = diag;
    tr += diag;
    for (std::size_t j = i + 1; j < d; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < rank; ++k) s += g(i, k) * std::conj(g(j, k));
      m(i, j) = s;
      m(j, i) = std::conj(s);
    }
  }
  m *= Complex(1.0 / tr);
  return m;
}

inline std::vector<double> flat_simplex(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& x : w) {
    x = expo(rng);
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace detail

/// Hilbert-Schmidt random density operator; full rank with probability 1.
inline DensityOperator sample_density(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return DensityOperator{d, detail::ginibre_density(d, d, rng)};
}

/// Random rank-constrained density operator (rank = min(d, rank) a.s.).
inline DensityOperator sample_density_rank(std::size_t d, std::size_t rank, std::uint64_t seed) {
  Rng rng(seed);
  return DensityOperator{d, detail::ginibre_density(d, std::min(d, rank), rng)};
}

/// Random cq state: flat-simplex weights, independent HS conditionals.
inline CQState sample_cq(std::size_t alphabet_size, std::size_t dim_b, std::uint64_t seed) {
  Rng rng(seed);
  auto weights = detail::flat_simplex(alphabet_size, rng);
  std::vector<ComplexMatrix> conditionals;
  conditionals.reserve(alphabet_size);
  for (std::size_t x = 0; x < alphabet_size; ++x)
    conditionals.push_back(detail::ginibre_density(dim_b, dim_b, rng));
  auto dist = ProbabilityDistribution{alphabet_size, std::move(weights)};
  return CQState{alphabet_size, dim_b, std::move(dist), std::move(conditionals)};
}

inline DensityOperator interpolate(const DensityOperator& rho, const DensityOperator& tau,
                                   double t) {
  ComplexMatrix m = rho.matrix;
  m *= Complex(1.0 - t);
  ComplexMatrix add = tau.matrix;
  add *= Complex(t);
  m += add;
  return DensityOperator{rho.dim, std::move(m)};
}

/// Convex combination of cq states over the same alphabet, kept in cq form.
inline CQState mix_cq(const CQState& a, const CQState& b, double t) {
  const std::size_t n = a.alphabet_size;
  const std::size_t d = a.dim_b;
  std::vector<double> weights(n);
  std::vector<ComplexMatrix> conditionals(n);
  for (std::size_t x = 0; x < n; ++x) {
    const double w = (1.0 - t) * a.weights.weights[x] + t * b.weights.weights[x];
    weights[x] = w;
    ComplexMatrix c(d, d);
    if (w < 1e-300) {
      for (std::size_t i = 0; i < d; ++i) c(i, i) = 1.0 / static_cast<double>(d);
    } else {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          c(i, j) = ((1.0 - t) * a.weights.weights[x] * a.conditionals[x](i, j) +
                     t * b.weights.weights[x] * b.conditionals[x](i, j)) /
                    w;
    }
    conditionals[x] = std::move(c);
  }
  auto dist = ProbabilityDistribution{n, std::move(weights)};
  return CQState{n, d, std::move(dist), std::move(conditionals)};
}

inline constexpr int kMaxResample = 32;
inline constexpr int kBisectionIters = 60;

/// Bisects t in (1-t) rho + t tau until the combination sits at trace
/// distance eps from rho. Trace distance is convex and monotone in t on the
/// segment, so bisection converges; 60 halvings land far below the 1e-8
/// acceptance window. The target must already be at least eps away.
inline DensityOperator interpolate_at_distance(const DensityOperator& rho,
                                               const DensityOperator& tau, double eps,
                                               const Tolerances& tol = default_tolerances()) {
  if (trace_distance(rho, tau, tol) < eps)
    throw Unreachable("interpolate_at_distance: target closer than " + std::to_string(eps));
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < kBisectionIters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (trace_distance(rho, interpolate(rho, tau, mid), tol) < eps)
      lo = mid;
    else
      hi = mid;
  }
  return interpolate(rho, tau, hi);
}

inline CQState interpolate_at_distance_cq(const CQState& rho, const CQState& tau, double eps,
                                          const Tolerances& tol = default_tolerances()) {
  if (trace_distance_cq(rho, tau, tol) < eps)
    throw Unreachable("interpolate_at_distance_cq: target closer than " + std::to_string(eps));
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < kBisectionIters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (trace_distance_cq(rho, mix_cq(rho, tau, mid), tol) < eps)
      lo = mid;
    else
      hi = mid;
  }
  return mix_cq(rho, tau, hi);
}

/// Constructs sigma with trace_distance(rho, sigma) = eps by sampling a
/// random target and bisecting along the segment toward it.
inline DensityOperator pair_at_distance(const DensityOperator& rho, double eps,
                                        std::uint64_t seed,
                                        const Tolerances& tol = default_tolerances()) {
  if (eps < 0.0) throw OutOfRange("pair_at_distance: negative epsilon");
  if (eps == 0.0) return rho;
  for (int attempt = 0; attempt < kMaxResample; ++attempt) {
    const DensityOperator tau = sample_density(rho.dim, mix_seed(seed, attempt));
    if (trace_distance(rho, tau, tol) < eps) continue;
    return interpolate_at_distance(rho, tau, eps, tol);
  }
  throw Unreachable("pair_at_distance: no sampled target at distance >= " + std::to_string(eps) +
                    " after " + std::to_string(kMaxResample) + " attempts");
}

/// CQ-shaped variant: the partner stays classical on the same alphabet, and
/// distances run blockwise.
inline CQState pair_at_distance_cq(const CQState& rho, double eps, std::uint64_t seed,
                                   const Tolerances& tol = default_tolerances()) {
  if (eps < 0.0) throw OutOfRange("pair_at_distance_cq: negative epsilon");
  if (eps == 0.0) return rho;
  for (int attempt = 0; attempt < kMaxResample; ++attempt) {
    const CQState tau = sample_cq(rho.alphabet_size, rho.dim_b, mix_seed(seed, attempt));
    if (trace_distance_cq(rho, tau, tol) < eps) continue;
    return interpolate_at_distance_cq(rho, tau, eps, tol);
  }
  throw Unreachable("pair_at_distance_cq: no sampled target at distance >= " +
                    std::to_string(eps) + " after " + std::to_string(kMaxResample) + " attempts");
}

/// Samples rho fresh, then pairs it at the requested distance.
inline std::pair<DensityOperator, DensityOperator> pair_at_distance(
    std::size_t d, double eps, std::uint64_t seed, const Tolerances& tol = default_tolerances()) {
  DensityOperator rho = sample_density(d, mix_seed(seed, 0x7A17));
  DensityOperator sigma = pair_at_distance(rho, eps, mix_seed(seed, 0x7A18), tol);
  return {std::move(rho), std::move(sigma)};
}

inline std::pair<CQState, CQState> pair_at_distance_cq(
    std::size_t alphabet_size, std::size_t dim_b, double eps, std::uint64_t seed,
    const Tolerances& tol = default_tolerances()) {
  CQState rho = sample_cq(alphabet_size, dim_b, mix_seed(seed, 0x7A17));
  CQState sigma = pair_at_distance_cq(rho, eps, mix_seed(seed, 0x7A18), tol);
  return {std::move(rho), std::move(sigma)};
}

}  // namespace cqbound
