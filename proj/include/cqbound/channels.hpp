#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cqbound/errors.hpp"
#include "cqbound/matcore.hpp"
#include "cqbound/states.hpp"
#include "cqbound/tolerances.hpp"

namespace cqbound {

/// Measure the classical register, then dephase the quantum register in the
/// per-letter basis. Built from a cq state, the bases are the eigenbases of
/// its conditionals, which makes that state a fixed point. In degenerate
/// eigenspaces the stored basis is whichever one the eigensolver returned;
/// every property used downstream holds for any eigenbasis choice.
struct ConditionalDephasingChannel {
  std::size_t alphabet_size = 0;
  std::size_t dim_b = 0;
  std::vector<std::vector<std::vector<Complex>>> bases;  // bases[x][y] on B
};

inline ConditionalDephasingChannel make_conditional_dephasing(
    std::size_t alphabet_size, std::size_t dim_b,
    std::vector<std::vector<std::vector<Complex>>> bases,
    const Tolerances& tol = default_tolerances()) {
  if (bases.size() != alphabet_size)
    throw DimensionMismatch("make_conditional_dephasing: expected " +
                            std::to_string(alphabet_size) + " bases");
  for (std::size_t x = 0; x < alphabet_size; ++x) {
    const auto& basis = bases[x];
    if (basis.size() != dim_b)
      throw DimensionMismatch("make_conditional_dephasing: basis " + std::to_string(x) +
                              " has " + std::to_string(basis.size()) + " vectors");
    for (std::size_t y = 0; y < dim_b; ++y) {
      if (basis[y].size() != dim_b)
        throw DimensionMismatch("make_conditional_dephasing: vector length mismatch");
      for (std::size_t z = y; z < dim_b; ++z) {
        Complex ip = 0.0;
        for (std::size_t i = 0; i < dim_b; ++i) ip += std::conj(basis[y][i]) * basis[z][i];
        const double target = (y == z) ? 1.0 : 0.0;
        if (std::abs(ip - Complex(target)) > tol.orthonormal)
          throw NotOrthonormal("make_conditional_dephasing: basis " + std::to_string(x) +
                               " fails orthonormality at pair (" + std::to_string(y) + "," +
                               std::to_string(z) + ")");
      }
    }
  }
  return ConditionalDephasingChannel{alphabet_size, dim_b, std::move(bases)};
}

inline ConditionalDephasingChannel build_conditional_dephasing(
    const CQState& rho, const Tolerances& tol = default_tolerances()) {
  std::vector<std::vector<std::vector<Complex>>> bases;
  bases.reserve(rho.alphabet_size);
  for (std::size_t x = 0; x < rho.alphabet_size; ++x)
    bases.push_back(hermitian_eig(rho.conditionals[x], tol).eigenvectors);
  return make_conditional_dephasing(rho.alphabet_size, rho.dim_b, std::move(bases), tol);
}

/// sum_{x,y} P_{x,y} omega P_{x,y} with P_{x,y} = |x><x| (x) |phi^{y,x}><phi^{y,x}|.
/// Implemented per diagonal block as basis change + diagonal extraction
/// instead of the literal projector sandwiches; off-diagonal classical
/// blocks are annihilated either way.
inline DensityOperator apply_conditional_dephasing(const ConditionalDephasingChannel& ch,
                                                   const DensityOperator& omega) {
  const std::size_t n = ch.alphabet_size;
  const std::size_t d = ch.dim_b;
  if (omega.dim != n * d)
    throw DimensionMismatch("apply_conditional_dephasing: dim " + std::to_string(omega.dim) +
                            " != " + std::to_string(n) + "*" + std::to_string(d));
  ComplexMatrix out(n * d, n * d);
  std::vector<Complex> bphi(d);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < d; ++y) {
      const auto& phi = ch.bases[x][y];
      for (std::size_t i = 0; i < d; ++i) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += omega.matrix(x * d + i, x * d + j) * phi[j];
        bphi[i] = s;
      }
      Complex c = 0.0;
      for (std::size_t i = 0; i < d; ++i) c += std::conj(phi[i]) * bphi[i];
      const double weight = c.real();
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          out(x * d + i, x * d + j) += weight * phi[i] * std::conj(phi[j]);
    }
  }
  return DensityOperator{n * d, std::move(out)};
}

/// True iff the channel maps the maximally mixed state to itself within 1e-10.
inline bool check_unital(const ConditionalDephasingChannel& ch) {
  const std::size_t dim = ch.alphabet_size * ch.dim_b;
  ComplexMatrix mixed(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) mixed(i, i) = 1.0 / static_cast<double>(dim);
  const DensityOperator image = apply_conditional_dephasing(ch, DensityOperator{dim, mixed});
  double dev = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) dev = std::max(dev, std::abs(image.matrix(i, j) - mixed(i, j)));
  return dev <= 1e-10;
}

/// Joint distribution s_XY(x,y) = s(x) <phi^{y,x}| sigma_B^x |phi^{y,x}>
/// induced by measuring sigma in the channel's bases.
inline JointDistribution extract_joint(const ConditionalDephasingChannel& ch, const CQState& sigma) {
  const std::size_t n = ch.alphabet_size;
  const std::size_t d = ch.dim_b;
  if (sigma.alphabet_size != n || sigma.dim_b != d)
    throw DimensionMismatch("extract_joint: state shape does not match channel");
  std::vector<double> probs(n * d);
  for (std::size_t x = 0; x < n; ++x) {
    const double s = sigma.weights.weights[x];
    for (std::size_t y = 0; y < d; ++y) {
      const auto& phi = ch.bases[x][y];
      Complex val = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          val += std::conj(phi[i]) * sigma.conditionals[x](i, j) * phi[j];
      probs[x * d + y] = std::max(s * val.real(), 0.0);
    }
  }
  return JointDistribution{n, d, std::move(probs)};
}

/// Pi rho Pi + (Pi/Tr[Pi]) (x) Tr_X[(I - Pi) rho] with Pi = sum_{x<k} |x><x|_X.
/// Keeps the first k classical labels and routes the leaked mass, tensored
/// with uniform weight over those labels, back in. Trace preserving.
inline DensityOperator apply_projection_channel(std::size_t k, const DensityOperator& rho,
                                                std::size_t alphabet_size, std::size_t dim_b) {
  if (k < 1 || k > alphabet_size)
    throw BadTruncationLevel("apply_projection_channel: k = " + std::to_string(k) +
                             " outside [1, " + std::to_string(alphabet_size) + "]");
  const std::size_t n = alphabet_size;
  const std::size_t d = dim_b;
  if (rho.dim != n * d)
    throw DimensionMismatch("apply_projection_channel: dim " + std::to_string(rho.dim) +
                            " != " + std::to_string(n) + "*" + std::to_string(d));
  ComplexMatrix out(n * d, n * d);
  const std::size_t keep = k * d;
  for (std::size_t i = 0; i < keep; ++i)
    for (std::size_t j = 0; j < keep; ++j) out(i, j) = rho.matrix(i, j);
  ComplexMatrix leak(d, d);
  for (std::size_t x = k; x < n; ++x)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) leak(i, j) += rho.matrix(x * d + i, x * d + j);
  const double inv_k = 1.0 / static_cast<double>(k);
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out(x * d + i, x * d + j) += inv_k * leak(i, j);
  return DensityOperator{n * d, std::move(out)};
}

}  // namespace cqbound
