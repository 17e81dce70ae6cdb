#include "cqbound/eof.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cqbound/entropy.hpp"
#include "cqbound/errors.hpp"
#include "cqbound/states.hpp"

namespace cqbound {
namespace {

DensityOperator pure_density(const std::vector<Complex>& psi) {
  ComplexMatrix m(psi.size(), psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * std::conj(psi[j]);
  return make_density(std::move(m));
}

std::vector<Complex> bell_vector() {
  const double r = 1.0 / std::sqrt(2.0);
  return {Complex(r), Complex(0.0), Complex(0.0), Complex(r)};
}

/// Average entanglement of the eigendecomposition itself; the estimator must
/// never land above this.
double eigendecomposition_value(const DensityOperator& rho, std::size_t dim_a, std::size_t dim_b) {
  const auto sys = hermitian_eig(rho.matrix);
  double value = 0.0;
  for (std::size_t i = 0; i < rho.dim; ++i) {
    if (sys.eigenvalues[i] <= 1e-12) continue;
    value += sys.eigenvalues[i] * eof_pure(sys.eigenvectors[i], dim_a, dim_b);
  }
  return value;
}

TEST(EofPure, ProductAndBellValues) {
  EXPECT_NEAR(eof_pure({Complex(1.0), Complex(0.0), Complex(0.0), Complex(0.0)}, 2, 2), 0.0, 1e-12);
  EXPECT_NEAR(eof_pure(bell_vector(), 2, 2), 1.0, 1e-12);
  const std::vector<Complex> tilted{Complex(std::sqrt(0.75)), Complex(0.0), Complex(0.0),
                                    Complex(std::sqrt(0.25))};
  EXPECT_NEAR(eof_pure(tilted, 2, 2), 0.81127812445913286, 1e-12);
}

TEST(EofPure, RejectsBadVectors) {
  EXPECT_THROW(eof_pure({Complex(1.0), Complex(1.0), Complex(0.0), Complex(0.0)}, 2, 2),
               OutOfRange);
  EXPECT_THROW(eof_pure({Complex(1.0), Complex(0.0)}, 2, 2), DimensionMismatch);
}

TEST(DecompositionValue, SingleTermMatchesPureEntanglement) {
  PureDecomposition dec;
  dec.size = 1;
  dec.weights = ProbabilityDistribution{1, {1.0}};
  dec.pure_states = {bell_vector()};
  EXPECT_NEAR(decomposition_value(dec, 2, 2), 1.0, 1e-12);
}

TEST(EofEstimate, PureStatesAreExact) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const DensityOperator rho = sample_density_rank(4, 1, seed);
    const EofResult res = eof_estimate(rho, 2, 2);
    const auto sys = hermitian_eig(rho.matrix);
    EXPECT_NEAR(res.value, eof_pure(sys.eigenvectors[0], 2, 2), 1e-9);
    EXPECT_LE(reconstruction_defect(res.witness, rho), 1e-8);
  }
}

TEST(EofEstimate, BellStateIsOneEbit) {
  const EofResult res = eof_estimate(pure_density(bell_vector()), 2, 2);
  EXPECT_NEAR(res.value, 1.0, 1e-9);
  EXPECT_TRUE(res.converged);
}

TEST(EofEstimate, MaximallyMixedIsSeparable) {
  const DensityOperator rho = make_density(Complex(0.25) * ComplexMatrix::identity(4));
  const EofResult res = eof_estimate(rho, 2, 2);
  EXPECT_NEAR(res.value, 0.0, 1e-4);
  EXPECT_LE(reconstruction_defect(res.witness, rho), 1e-8);
}

TEST(EofEstimate, ProductMixedStatesVanish) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DensityOperator a = sample_density(2, mix_seed(seed, 0));
    const DensityOperator b = sample_density(2, mix_seed(seed, 1));
    const DensityOperator rho = make_density(tensor_product(a.matrix, b.matrix));
    EXPECT_NEAR(eof_estimate(rho, 2, 2).value, 0.0, 1e-6);
  }
}

TEST(EofEstimate, FindsSeparableDecompositionOfProductMixture) {
  // 0.5|00><00| + 0.5|++><++|: separable but the eigenbasis is entangled.
  const std::vector<Complex> zz{Complex(1.0), Complex(0.0), Complex(0.0), Complex(0.0)};
  const std::vector<Complex> pp{Complex(0.5), Complex(0.5), Complex(0.5), Complex(0.5)};
  ComplexMatrix m(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      m(i, j) = 0.5 * zz[i] * std::conj(zz[j]) + 0.5 * pp[i] * std::conj(pp[j]);
  const DensityOperator rho = make_density(std::move(m));
  const EofResult res = eof_estimate(rho, 2, 2);
  EXPECT_GT(eigendecomposition_value(rho, 2, 2), 0.1);
  EXPECT_NEAR(res.value, 0.0, 1e-3);
}

TEST(EofEstimate, NeverExceedsEigendecomposition) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const DensityOperator rho = sample_density(4, seed);
    EXPECT_LE(eof_estimate(rho, 2, 2).value, eigendecomposition_value(rho, 2, 2) + 1e-9);
  }
}

TEST(EofEstimate, WitnessIsConsistent) {
  const DensityOperator rho = sample_density(4, 99);
  const EofResult res = eof_estimate(rho, 2, 2);
  EXPECT_LE(reconstruction_defect(res.witness, rho), 1e-8);
  EXPECT_NEAR(decomposition_value(res.witness, 2, 2), res.value, 1e-8);
  double total = 0.0;
  for (double p : res.witness.weights.weights) total += p;
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(EofEstimate, DeterministicPerSeed) {
  const DensityOperator rho = sample_density(4, 5);
  EofConfig cfg;
  cfg.starts = 8;
  const EofResult a = eof_estimate(rho, 2, 2, cfg);
  const EofResult b = eof_estimate(rho, 2, 2, cfg);
  EXPECT_EQ(a.value, b.value);
  ASSERT_EQ(a.witness.size, b.witness.size);
  for (std::size_t x = 0; x < a.witness.size; ++x)
    EXPECT_EQ(a.witness.weights.weights[x], b.witness.weights.weights[x]);
  cfg.seed = 1;
  const EofResult c = eof_estimate(rho, 2, 2, cfg);
  EXPECT_LE(std::abs(a.value - c.value), 1e-3);  // different starts, same optimum regime
}

TEST(EofEstimate, RejectsOversizedProblems) {
  const DensityOperator rho = sample_density(25, 1);
  EXPECT_THROW(eof_estimate(rho, 5, 5), DimensionOverflow);
  EXPECT_THROW(eof_estimate(sample_density(4, 1), 2, 3), DimensionMismatch);
}

TEST(CertifyEofCorollary, IdenticalStatesGiveZeroLhs) {
  const DensityOperator rho = sample_density(4, 7);
  const EofCorollaryReport rep = certify_eof_corollary(rho, rho, 2, 2);
  EXPECT_EQ(rep.report.lhs, 0.0);
  EXPECT_EQ(rep.report.rhs, 0.0);
  EXPECT_FALSE(rep.report.epsilon_valid);
  EXPECT_TRUE(rep.report.satisfied);
  EXPECT_TRUE(rep.heuristic);
}

TEST(CertifyEofCorollary, ClosePureStatesAreExact) {
  const double t1 = 0.7, t2 = 0.72;
  const std::vector<Complex> psi{Complex(std::cos(t1)), Complex(0.0), Complex(0.0),
                                 Complex(std::sin(t1))};
  const std::vector<Complex> phi{Complex(std::cos(t2)), Complex(0.0), Complex(0.0),
                                 Complex(std::sin(t2))};
  const EofCorollaryReport rep =
      certify_eof_corollary(pure_density(psi), pure_density(phi), 2, 2);
  EXPECT_FALSE(rep.heuristic);
  EXPECT_TRUE(rep.report.satisfied);
  EXPECT_TRUE(rep.report.epsilon_valid);
  const double h1 = binary_entropy(std::cos(t1) * std::cos(t1));
  const double h2v = binary_entropy(std::cos(t2) * std::cos(t2));
  EXPECT_NEAR(rep.report.lhs, std::abs(h1 - h2v), 1e-8);
}

TEST(CertifyEofCorollary, MixedPairsStayHeuristicAndSatisfied) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto [rho, sigma] = pair_at_distance(4, 0.1, seed);
    const EofCorollaryReport rep = certify_eof_corollary(rho, sigma, 2, 2);
    EXPECT_TRUE(rep.heuristic);
    EXPECT_TRUE(rep.report.satisfied) << "margin=" << rep.report.margin;
    EXPECT_NEAR(rep.report.epsilon, 0.1, 1e-8);
  }
}

TEST(CertifyEofCorollary, RejectsDistanceBeyondWindow) {
  const DensityOperator a = pure_density({Complex(1.0), Complex(0.0), Complex(0.0), Complex(0.0)});
  const DensityOperator b = pure_density({Complex(0.0), Complex(0.0), Complex(0.0), Complex(1.0)});
  EXPECT_THROW(certify_eof_corollary(a, b, 2, 2), EpsilonOutOfRange);
}

}  // namespace
}  // namespace cqbound
