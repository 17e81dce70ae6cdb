#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cqbound/errors.hpp"
#include "cqbound/matcore.hpp"
#include "cqbound/states.hpp"
#include "cqbound/tolerances.hpp"

namespace cqbound {

/// h2(eps) in bits, with the 0 log 0 := 0 convention at both endpoints.
inline double binary_entropy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw OutOfRange("binary_entropy: argument " + std::to_string(eps) + " outside [0,1]");
  double h = 0.0;
  if (eps > 0.0) h -= eps * std::log2(eps);
  if (eps < 1.0) h -= (1.0 - eps) * std::log2(1.0 - eps);
  return std::max(h, 0.0);
}

/// H(Y|X) = -sum_{x,y} p(x,y) log2(p(x,y)/p_X(x)), zero-probability rows
/// and cells skipped.
inline double shannon_conditional(const JointDistribution& p) {
  double h = 0.0;
  for (std::size_t x = 0; x < p.size_x; ++x) {
    double px = 0.0;
    for (std::size_t y = 0; y < p.size_y; ++y) px += p.probabilities[x * p.size_y + y];
    if (px <= 0.0) continue;
    for (std::size_t y = 0; y < p.size_y; ++y) {
      const double pxy = p.probabilities[x * p.size_y + y];
      if (pxy > 0.0) h -= pxy * std::log2(pxy / px);
    }
  }
  return std::max(h, 0.0);
}

/// Von Neumann entropy in bits over the clamped spectrum. No
/// renormalization: a trace drift large enough to matter should have been
/// caught by validation, not silently papered over here.
inline double von_neumann(const DensityOperator& rho,
                          const Tolerances& tol = default_tolerances()) {
  const auto sys = hermitian_eig(rho.matrix, tol);
  double h = 0.0;
  for (double lam : sys.eigenvalues)
    if (lam > 0.0) h -= lam * std::log2(lam);
  return std::max(h, 0.0);
}

/// H(B|X) for a cq state: sum_x r(x) H(rho_B^x), zero-weight letters skipped.
inline double conditional_entropy_cq(const CQState& s,
                                     const Tolerances& tol = default_tolerances()) {
  double h = 0.0;
  for (std::size_t x = 0; x < s.alphabet_size; ++x) {
    const double r = s.weights.weights[x];
    if (r <= 0.0) continue;
    h += r * von_neumann(DensityOperator{s.dim_b, s.conditionals[x]}, tol);
  }
  return h;
}

/// Conditional entropy of the second factor given the first:
/// H(B|A) = H(AB) - H(A). Applied to embed_cq output this reproduces
/// conditional_entropy_cq; may be negative for entangled states.
inline double conditional_entropy_bipartite(const DensityOperator& rho, std::size_t dim_a,
                                            std::size_t dim_b,
                                            const Tolerances& tol = default_tolerances()) {
  if (rho.dim != dim_a * dim_b)
    throw DimensionMismatch("conditional_entropy_bipartite: dim " + std::to_string(rho.dim) +
                            " != " + std::to_string(dim_a) + "*" + std::to_string(dim_b));
  const DensityOperator marg{dim_a, partial_trace(rho.matrix, dim_a, dim_b, Subsystem::First)};
  return von_neumann(rho, tol) - von_neumann(marg, tol);
}

/// Relative entropy value: finite bits or a distinguished infinity. Never a
/// float sentinel, so support violations cannot be mistaken for data.
class RelEntropy {
 public:
  static RelEntropy finite(double bits) { return RelEntropy{false, bits}; }
  static RelEntropy infinite() { return RelEntropy{true, 0.0}; }

  bool is_infinite() const { return infinite_; }
  double bits() const {
    if (infinite_) throw OutOfRange("RelEntropy: value is infinite");
    return bits_;
  }

 private:
  RelEntropy(bool inf, double bits) : infinite_(inf), bits_(bits) {}
  bool infinite_ = false;
  double bits_ = 0.0;
};

/// D(omega || tau) from the spectral decompositions:
/// (1/ln2) sum_{x,y} |<phi_x|psi_y>|^2 [lambda_x ln(lambda_x/mu_y) + mu_y - lambda_x].
/// lambda_x = 0 terms keep only the mu_y - lambda_x part; lambda_x > 0
/// against mu_y = 0 with overlap above the support threshold is infinite.
inline RelEntropy relative_entropy(const DensityOperator& omega, const DensityOperator& tau,
                                   const Tolerances& tol = default_tolerances()) {
  if (omega.dim != tau.dim)
    throw DimensionMismatch("relative_entropy: dims " + std::to_string(omega.dim) + " vs " +
                            std::to_string(tau.dim));
  const auto a = hermitian_eig(omega.matrix, tol);
  const auto b = hermitian_eig(tau.matrix, tol);
  const std::size_t n = omega.dim;
  double acc = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    const double lam = std::max(a.eigenvalues[x], 0.0);
    for (std::size_t y = 0; y < n; ++y) {
      const double mu = std::max(b.eigenvalues[y], 0.0);
      Complex ip = 0.0;
      for (std::size_t i = 0; i < n; ++i) ip += std::conj(a.eigenvectors[x][i]) * b.eigenvectors[y][i];
      const double ov = std::norm(ip);
      if (lam <= 0.0) {
        acc += ov * mu;
      } else if (mu <= 0.0) {
        if (ov > tol.support_overlap) return RelEntropy::infinite();
      } else {
        acc += ov * (lam * std::log(lam / mu) + mu - lam);
      }
    }
  }
  return RelEntropy::finite(std::max(acc / std::log(2.0), 0.0));
}

/// I(L;M) = D(rho_LM || rho_L (x) rho_M). Finite for every genuine state;
/// a numerically infinite result signals corrupted input and is refused.
inline double mutual_information(const DensityOperator& rho, std::size_t dim_l, std::size_t dim_m,
                                 const Tolerances& tol = default_tolerances()) {
  if (rho.dim != dim_l * dim_m)
    throw DimensionMismatch("mutual_information: dim " + std::to_string(rho.dim) + " != " +
                            std::to_string(dim_l) + "*" + std::to_string(dim_m));
  const ComplexMatrix marg_l = partial_trace(rho.matrix, dim_l, dim_m, Subsystem::First);
  const ComplexMatrix marg_m = partial_trace(rho.matrix, dim_l, dim_m, Subsystem::Second);
  const DensityOperator prod{rho.dim, tensor_product(marg_l, marg_m)};
  const RelEntropy r = relative_entropy(rho, prod, tol);
  if (r.is_infinite())
    throw Unreachable("mutual_information: marginal product lost the state's support");
  return r.bits();
}

}  // namespace cqbound
