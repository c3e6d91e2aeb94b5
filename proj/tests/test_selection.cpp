#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

using namespace plmix;

TEST(SelectionCriteria, HandArithmetic) {
  const std::vector<double> trace{2.0, 4.0};
  const auto r = selection_criteria(trace, 1.0, 100);
  const double log100 = std::log(100.0);
  EXPECT_NEAR(r.D_bar, 3.0, 1e-12);
  EXPECT_NEAR(r.var_D, 2.0, 1e-12);
  EXPECT_NEAR(r.DIC1, 5.0, 1e-12);
  EXPECT_NEAR(r.DIC2, 4.0, 1e-12);
  EXPECT_NEAR(r.BPIC1, 7.0, 1e-12);
  EXPECT_NEAR(r.BPIC2, 5.0, 1e-12);
  EXPECT_NEAR(r.BICM1, 3.0 + (log100 - 1.0), 1e-12);
  EXPECT_NEAR(r.BICM2, 1.0 + log100, 1e-12);
  EXPECT_FALSE(r.negative_complexity);
}

TEST(SelectionCriteria, ConstantTraceAtPointEstimate) {
  const std::vector<double> trace(10, 42.0);
  const auto r = selection_criteria(trace, 42.0, 500);
  for (double v : {r.DIC1, r.DIC2, r.BPIC1, r.BPIC2, r.BICM2}) EXPECT_DOUBLE_EQ(v, 42.0);
}

TEST(SelectionCriteria, Identities) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(300.0, 5.0);
  std::vector<double> trace(1000);
  for (double& v : trace) v = n(rng);
  const auto r = selection_criteria(trace, 296.0, 250);
  EXPECT_NEAR(r.BPIC1 - r.DIC1, r.D_bar - r.D_map, 1e-9);
  EXPECT_NEAR(r.BPIC2 - r.DIC2, r.var_D / 2.0, 1e-9);
}

TEST(SelectionCriteria, Errors) {
  const std::vector<double> short_trace{1.0};
  EXPECT_THROW(selection_criteria(short_trace, 1.0, 10), ValidationError);
  const std::vector<double> bad{1.0, std::nan("")};
  EXPECT_THROW(selection_criteria(bad, 1.0, 10), NumericalError);
}

TEST(SelectionCriteria, FlagsNegativeComplexity) {
  const std::vector<double> trace{10.0, 12.0};
  EXPECT_TRUE(selection_criteria(trace, 20.0, 10).negative_complexity);
}

TEST(SelectionCriteria, InvariantToComponentRelabelling) {
  std::mt19937_64 rng(42);
  const Dataset d(fixtures::random_partial_orderings(80, 4, rng));
  const auto chain = gibbs_run(d, 3, Hyperparams::flat(3, 4), std::nullopt, {200, 50}, 9);
  Rng r = make_stream(3);
  const auto fit = fit_map(d, 3, Hyperparams::flat(3, 4), std::nullopt, {}, r);

  const std::vector<int> perm{2, 0, 1};
  MixtureParams permuted{RealMatrix(3, 4), std::vector<double>(3)};
  for (int g = 0; g < 3; ++g) {
    permuted.weights[g] = fit.params.weights[perm[g]];
    for (int i = 0; i < 4; ++i) permuted.supports(g, i) = fit.params.supports(perm[g], i);
  }
  // deviance of every permuted draw
  std::vector<double> dev_perm(chain.length());
  for (std::size_t l = 0; l < chain.length(); ++l) {
    const MixtureParams th = chain.draw(l);
    MixtureParams p{RealMatrix(3, 4), std::vector<double>(3)};
    for (int g = 0; g < 3; ++g) {
      p.weights[g] = th.weights[perm[g]];
      for (int i = 0; i < 4; ++i) p.supports(g, i) = th.supports(perm[g], i);
    }
    dev_perm[l] = -2.0 * mixture_loglik(p, d);
  }
  const auto a = selection_criteria({chain.deviance}, {fit.params}, d).rows[0];
  const auto b = selection_criteria({dev_perm}, {permuted}, d).rows[0];
  EXPECT_EQ(a.DIC1, b.DIC1);
  EXPECT_EQ(a.DIC2, b.DIC2);
  EXPECT_EQ(a.BPIC1, b.BPIC1);
  EXPECT_EQ(a.BPIC2, b.BPIC2);
  EXPECT_EQ(a.BICM1, b.BICM1);
  EXPECT_EQ(a.BICM2, b.BICM2);
  EXPECT_EQ(a.G, 3);
}

TEST(PosteriorPointEstimate, MeanAndMedian) {
  GibbsChain c;
  c.num_components = 1;
  c.num_items = 2;
  c.P = RealMatrix{{1, 3}, {2, 2}, {6, 2}};
  c.W = RealMatrix{{1}, {1}, {1}};
  c.log_lik = {0, 0, 0};
  c.deviance = {0, 0, 0};
  const auto mean = posterior_point_estimate(c, PosteriorSummary::mean);
  EXPECT_NEAR(mean.supports(0, 0), (0.25 + 0.5 + 0.75) / 3.0, 1e-15);
  const auto median = posterior_point_estimate(c, PosteriorSummary::median);
  EXPECT_NEAR(median.supports(0, 0), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(median.weights[0], 1.0);
}
