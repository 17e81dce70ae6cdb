#include "cqbound/entropy.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "cqbound/errors.hpp"
#include "cqbound/states.hpp"

namespace cqbound {
namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

TEST(BinaryEntropy, EndpointsAndMaximum) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.0), 0.0);
  EXPECT_DOUBLE_EQ(binary_entropy(1.0), 0.0);
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_NEAR(binary_entropy(0.25), 0.8112781244591328, 1e-15);
  EXPECT_THROW(binary_entropy(-0.1), OutOfRange);
  EXPECT_THROW(binary_entropy(1.1), OutOfRange);
}

TEST(BinaryEntropy, IsConcave) {
  Rng rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = unit(rng);
    const double b = unit(rng);
    EXPECT_GE(binary_entropy(0.5 * (a + b)) + 1e-12,
              0.5 * (binary_entropy(a) + binary_entropy(b)));
  }
}

TEST(ShannonConditional, UniformAndDeterministic) {
  // X uniform on 2, Y uniform on 4 independently.
  const JointDistribution uniform = make_joint(2, 4, std::vector<double>(8, 0.125));
  EXPECT_NEAR(shannon_conditional(uniform), 2.0, 1e-12);
  // Y = X.
  const JointDistribution copy = make_joint(2, 2, {0.5, 0.0, 0.0, 0.5});
  EXPECT_NEAR(shannon_conditional(copy), 0.0, 1e-12);
}

TEST(ShannonConditional, MatchesBoundFormulaOnSpreadRow) {
  const double eps = 0.25;
  const JointDistribution p = make_joint(1, 3, {1.0 - eps, eps / 2.0, eps / 2.0});
  EXPECT_NEAR(shannon_conditional(p), 1.0612781244591328, 1e-15);
}

TEST(ShannonConditional, BoundedByLogAlphabet) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Rng rng(seed);
    auto w = detail::flat_simplex(12, rng);
    const JointDistribution p = make_joint(3, 4, std::move(w));
    const double h = shannon_conditional(p);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log2(4.0) + 1e-12);
  }
}

TEST(VonNeumann, PureMixedDiagonal) {
  EXPECT_NEAR(von_neumann(make_density(diag2(1.0, 0.0))), 0.0, 1e-15);
  EXPECT_NEAR(von_neumann(make_density(diag2(0.5, 0.5))), 1.0, 1e-15);
  EXPECT_NEAR(von_neumann(make_density(diag2(0.25, 0.75))), 0.8112781244591328, 1e-14);
}

TEST(VonNeumann, RangeOnRandomStates) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const std::size_t d = 2 + seed % 4;
    const double h = von_neumann(sample_density(d, seed));
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log2(static_cast<double>(d)) + 1e-12);
  }
}

TEST(ConditionalEntropyCq, PureAndMixedConditionals) {
  const CQState pure = make_cq({0.4, 0.6}, {diag2(1.0, 0.0), diag2(0.0, 1.0)});
  EXPECT_NEAR(conditional_entropy_cq(pure), 0.0, 1e-15);
  const CQState mixed = make_cq({0.4, 0.6}, {diag2(0.5, 0.5), diag2(0.5, 0.5)});
  EXPECT_NEAR(conditional_entropy_cq(mixed), 1.0, 1e-15);
}

TEST(ConditionalEntropyCq, AgreesWithEmbeddingDifference) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const CQState s = sample_cq(3, 3, seed);
    const DensityOperator full = embed_cq(s);
    const DensityOperator marg{3, partial_trace(full.matrix, 3, 3, Subsystem::First)};
    const double via_embedding = von_neumann(full) - von_neumann(marg);
    EXPECT_NEAR(conditional_entropy_cq(s), via_embedding, 1e-8);
  }
}

TEST(ConditionalEntropyBipartite, ProductStates) {
  const DensityOperator a = sample_density(2, 3);
  const DensityOperator b = sample_density(3, 4);
  const DensityOperator ab{6, tensor_product(a.matrix, b.matrix)};
  EXPECT_NEAR(conditional_entropy_bipartite(ab, 2, 3), von_neumann(b), 1e-9);
}

TEST(ConditionalEntropyBipartite, MaximallyEntangledIsMinusOne) {
  ComplexMatrix bell(4, 4);
  const std::size_t idx[2] = {0, 3};
  for (std::size_t i : idx)
    for (std::size_t j : idx) bell(i, j) = 0.5;
  EXPECT_NEAR(conditional_entropy_bipartite(DensityOperator{4, bell}, 2, 2), -1.0, 1e-12);
}

TEST(ConditionalEntropyBipartite, MatchesCqOnEmbeddings) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const CQState s = sample_cq(2 + seed % 3, 2 + seed % 2, seed);
    EXPECT_NEAR(conditional_entropy_bipartite(embed_cq(s), s.alphabet_size, s.dim_b),
                conditional_entropy_cq(s), 1e-8);
  }
}

TEST(RelativeEntropy, SelfDistanceIsZero) {
  const DensityOperator rho = sample_density(3, 5);
  const RelEntropy r = relative_entropy(rho, rho);
  ASSERT_FALSE(r.is_infinite());
  EXPECT_NEAR(r.bits(), 0.0, 1e-10);
}

TEST(RelativeEntropy, DisjointSupportIsInfinite) {
  const RelEntropy r =
      relative_entropy(make_density(diag2(1.0, 0.0)), make_density(diag2(0.0, 1.0)));
  EXPECT_TRUE(r.is_infinite());
  EXPECT_THROW(r.bits(), OutOfRange);
}

TEST(RelativeEntropy, DiagonalKlDivergence) {
  const RelEntropy r =
      relative_entropy(make_density(diag2(0.5, 0.5)), make_density(diag2(0.75, 0.25)));
  ASSERT_FALSE(r.is_infinite());
  EXPECT_NEAR(r.bits(), 0.2075187496394219, 1e-12);
}

TEST(RelativeEntropy, NonNegativeOnRandomPairs) {
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const DensityOperator a = sample_density(3, mix_seed(seed, 0));
    const DensityOperator b = sample_density(3, mix_seed(seed, 1));
    const RelEntropy r = relative_entropy(a, b);
    ASSERT_FALSE(r.is_infinite());
    EXPECT_GE(r.bits(), 0.0);
  }
}

TEST(MutualInformation, ProductCorrelatedEntangled) {
  const DensityOperator a = sample_density(2, 6);
  const DensityOperator b = sample_density(2, 7);
  const DensityOperator ab{4, tensor_product(a.matrix, b.matrix)};
  EXPECT_NEAR(mutual_information(ab, 2, 2), 0.0, 1e-9);

  ComplexMatrix corr(4, 4);
  corr(0, 0) = 0.5;
  corr(3, 3) = 0.5;
  EXPECT_NEAR(mutual_information(DensityOperator{4, corr}, 2, 2), 1.0, 1e-10);

  ComplexMatrix bell(4, 4);
  const std::size_t idx[2] = {0, 3};
  for (std::size_t i : idx)
    for (std::size_t j : idx) bell(i, j) = 0.5;
  EXPECT_NEAR(mutual_information(DensityOperator{4, bell}, 2, 2), 2.0, 1e-10);
}

TEST(MutualInformation, PaperReductionIdentity) {
  // H(B) - I(X;B) = sum_x r(x) H(rho_B^x) on cq states.
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const CQState s = sample_cq(2 + seed % 3, 2 + seed % 3, seed);
    const DensityOperator full = embed_cq(s);
    const DensityOperator marg_b{
        s.dim_b, partial_trace(full.matrix, s.alphabet_size, s.dim_b, Subsystem::Second)};
    const double lhs = von_neumann(marg_b) - mutual_information(full, s.alphabet_size, s.dim_b);
    EXPECT_NEAR(lhs, conditional_entropy_cq(s), 1e-8);
  }
}

}  // namespace
}  // namespace cqbound
