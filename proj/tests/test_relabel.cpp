#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "fixtures.hpp"

using namespace plmix;

namespace {

// An aligned G = 2 chain: draws jittered around a well-separated pivot.
GibbsChain aligned_chain(const MixtureParams& pivot, std::size_t L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 0.01);
  GibbsChain c;
  c.num_components = pivot.num_components();
  c.num_items = pivot.num_items();
  c.P = RealMatrix(L, c.num_components * c.num_items);
  c.W = RealMatrix(L, c.num_components);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t k = 0; k < c.P.cols(); ++k)
      c.P(l, k) = pivot.supports.data()[k] * (1.0 + jitter(rng));
    double w0 = pivot.weights[0] + jitter(rng);
    c.W(l, 0) = w0;
    c.W(l, 1) = 1.0 - w0;
  }
  return c;
}

void fill_loglik(GibbsChain& c, const Dataset& d) {
  c.log_lik.resize(c.length());
  c.deviance.resize(c.length());
  for (std::size_t l = 0; l < c.length(); ++l) {
    c.log_lik[l] = mixture_loglik(c.draw(l), d);
    c.deviance[l] = -2.0 * c.log_lik[l];
  }
}

const MixtureParams kPivot{RealMatrix{{0.6, 0.25, 0.1, 0.05}, {0.05, 0.1, 0.25, 0.6}}, {0.3, 0.7}};

}  // namespace

TEST(Pra, AlignedChainKeepsIdentity) {
  const GibbsChain c = aligned_chain(kPivot, 100, 1);
  const auto r = pra_relabel(c, kPivot);
  for (const auto& p : r.permutations) EXPECT_EQ(p, (std::vector<int>{0, 1}));
  EXPECT_EQ(r.chain.P, c.P);
  EXPECT_EQ(r.chain.W, c.W);
}

TEST(Pra, RestoresHalfSwappedChainExactly) {
  std::mt19937_64 rng(2);
  const Dataset d(fixtures::random_partial_orderings(50, 4, rng));
  GibbsChain aligned = aligned_chain(kPivot, 200, 3);
  fill_loglik(aligned, d);
  std::vector<std::vector<int>> swaps(aligned.length(), {0, 1});
  for (std::size_t l = 0; l < swaps.size(); l += 2) swaps[l] = {1, 0};
  GibbsChain swapped = apply_permutations(aligned, swaps);
  fill_loglik(swapped, d);

  const auto r = pra_relabel(swapped, kPivot);
  EXPECT_EQ(r.chain.P, aligned.P);
  EXPECT_EQ(r.chain.W, aligned.W);
  for (std::size_t l = 0; l < aligned.length(); ++l)
    EXPECT_NEAR(r.chain.log_lik[l], mixture_loglik(r.chain.draw(l), d), 1e-10);
  EXPECT_EQ(r.chain.log_lik, swapped.log_lik);

  const auto again = pra_relabel(r.chain, kPivot);
  for (const auto& p : again.permutations) EXPECT_EQ(p, (std::vector<int>{0, 1}));
  EXPECT_EQ(again.chain.P, r.chain.P);
}

TEST(Pra, PermutationsReproduceRelabelledChain) {
  std::mt19937_64 rng(4);
  const Dataset d(fixtures::random_partial_orderings(40, 4, rng));
  const GibbsChain raw = gibbs_run(d, 3, Hyperparams::flat(3, 4), std::nullopt, {150, 50}, 4);
  Rng r = make_stream(4);
  const auto fit = fit_map(d, 3, Hyperparams::flat(3, 4), std::nullopt, {}, r);
  const auto out = pra_relabel(raw, fit);
  const GibbsChain rebuilt = apply_permutations(raw, out.permutations);
  EXPECT_EQ(rebuilt.P, out.chain.P);
  EXPECT_EQ(rebuilt.W, out.chain.W);
  for (const auto& p : out.permutations) {
    std::vector<int> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2}));
  }
}

TEST(Pra, ChosenPermutationIsOptimal) {
  std::mt19937_64 rng(5);
  for (int G = 2; G <= 4; ++G) {
    const Dataset d(fixtures::random_partial_orderings(40, 4, rng));
    const GibbsChain raw = gibbs_run(d, G, Hyperparams::flat(G, 4), std::nullopt, {60, 10}, G);
    const MixtureParams pivot = fixtures::random_params(G, 4, rng);
    const auto out = pra_relabel(raw, pivot);
    const auto ref = normalize(pivot);
    for (std::size_t l = 0; l < raw.length(); ++l) {
      const auto draw = normalize(raw.draw(l));
      const double chosen = relabel_distance(draw, ref, out.permutations[l]);
      std::vector<int> perm(G);
      std::iota(perm.begin(), perm.end(), 0);
      do ASSERT_LE(chosen, relabel_distance(draw, ref, perm));
      while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
}

TEST(Pra, Guards) {
  const GibbsChain c = aligned_chain(kPivot, 5, 6);
  EXPECT_THROW(pra_relabel(c, MixtureParams::uniform(3, 4)), ValidationError);
  GibbsChain big;
  big.num_components = 9;
  big.num_items = 2;
  big.P = RealMatrix(1, 18, 1.0);
  big.W = RealMatrix(1, 9, 1.0 / 9);
  MixtureParams pivot{RealMatrix(9, 2, 1.0), std::vector<double>(9, 1.0 / 9)};
  pivot.weights[8] = 1.0 - 8.0 / 9;
  EXPECT_THROW(pra_relabel(big, pivot), ValidationError);
}
