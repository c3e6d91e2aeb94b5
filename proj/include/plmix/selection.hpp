#pragma once

// Deviance-based Bayesian model comparison: DIC, BPIC and BICM in their two
// variants, computed from a posterior deviance trace and a point estimate.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "plmix/error.hpp"
#include "plmix/gibbs.hpp"
#include "plmix/plmodel.hpp"
#include "plmix/rank_data.hpp"

namespace plmix {

struct SelectionRow {
  int G = 0;
  double D_bar = 0.0;
  double D_map = 0.0;
  double var_D = 0.0;
  double DIC1 = 0.0;
  double DIC2 = 0.0;
  double BPIC1 = 0.0;
  double BPIC2 = 0.0;
  double BICM1 = 0.0;
  double BICM2 = 0.0;
  // D_bar - D_map < 0 means the point estimate is not the posterior mode.
  bool negative_complexity = false;
};

struct SelectionReport {
  std::vector<SelectionRow> rows;
};

/// The six criteria from a deviance trace (sample variance, denominator L-1),
/// the deviance at the point estimate, and the number of sample units N.
inline SelectionRow selection_criteria(std::span<const double> deviance, double d_map,
                                       std::size_t N) {
  detail::require(deviance.size() >= 2, "deviance trace needs at least two draws");
  for (std::size_t l = 0; l < deviance.size(); ++l)
    if (!std::isfinite(deviance[l]))
      throw NumericalError("deviance trace entry " + std::to_string(l + 1) + " is not finite");
  detail::require(std::isfinite(d_map), "deviance at the point estimate is not finite");
  const double L = static_cast<double>(deviance.size());
  double mean = 0.0;
  for (double d : deviance) mean += d;
  mean /= L;
  double ss = 0.0;
  for (double d : deviance) ss += (d - mean) * (d - mean);
  const double var = ss / (L - 1.0);
  const double logN = std::log(static_cast<double>(N));

  SelectionRow r;
  r.D_bar = mean;
  r.D_map = d_map;
  r.var_D = var;
  r.DIC1 = mean + (mean - d_map);
  r.DIC2 = mean + var / 2.0;
  r.BPIC1 = mean + 2.0 * (mean - d_map);
  r.BPIC2 = mean + var;
  r.BICM1 = mean + var / 2.0 * (logN - 1.0);
  r.BICM2 = d_map + var / 2.0 * logN;
  r.negative_complexity = mean - d_map < -1e-8 * std::max(1.0, std::abs(mean));
  return r;
}

/// Criteria for each candidate G. deviances[k] and point_estimates[k]
/// describe the same fitted model.
inline SelectionReport selection_criteria(const std::vector<std::vector<double>>& deviances,
                                          const std::vector<MixtureParams>& point_estimates,
                                          const Dataset& data) {
  detail::require(deviances.size() == point_estimates.size(),
                  "one deviance trace per point estimate is required");
  SelectionReport report;
  for (std::size_t k = 0; k < deviances.size(); ++k) {
    const double d_map = -2.0 * mixture_loglik(point_estimates[k], data);
    SelectionRow row = selection_criteria(deviances[k], d_map, data.size());
    row.G = static_cast<int>(point_estimates[k].num_components());
    report.rows.push_back(row);
  }
  return report;
}

enum class PosteriorSummary { mean, median };

/// Plug-in estimate from a (label-aligned) chain: component-wise posterior
/// mean or median of the normalized supports and of the weights, with the
/// weights renormalized to the simplex.
inline MixtureParams posterior_point_estimate(const GibbsChain& chain, PosteriorSummary kind) {
  const std::size_t L = chain.length();
  detail::require(L >= 1, "empty chain");
  const std::size_t G = chain.num_components;
  const std::size_t K = static_cast<std::size_t>(chain.num_items);
  RealMatrix norm_p(L, G * K);
  for (std::size_t l = 0; l < L; ++l) {
    const auto n = normalize(chain.draw(l));
    std::copy(n.supports.data().begin(), n.supports.data().end(), norm_p.row(l).begin());
  }
  auto summarize = [&](const RealMatrix& m, std::size_t col) {
    std::vector<double> v(L);
    for (std::size_t l = 0; l < L; ++l) v[l] = m(l, col);
    if (kind == PosteriorSummary::mean) {
      double total = 0.0;
      for (double x : v) total += x;
      return total / static_cast<double>(L);
    }
    std::sort(v.begin(), v.end());
    return L % 2 ? v[L / 2] : 0.5 * (v[L / 2 - 1] + v[L / 2]);
  };
  MixtureParams out{RealMatrix(G, K), std::vector<double>(G)};
  for (std::size_t c = 0; c < G * K; ++c) out.supports.data()[c] = summarize(norm_p, c);
  double total = 0.0;
  for (std::size_t g = 0; g < G; ++g) total += (out.weights[g] = summarize(chain.W, g));
  for (double& w : out.weights) w /= total;
  return out;
}

}  // namespace plmix
