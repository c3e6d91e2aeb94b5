#pragma once

// Posterior predictive checks built on two chi-squared discrepancies: the
// most-liked item frequencies and the paired-comparison frequencies, both
// unconditionally and stratified by the number of ranked items.
//
// Expected frequencies use the marginal normalized supports
// p_bar_i = sum_g omega_g p_gi, which makes every statistic invariant to
// component relabelling:
//   top choice:  E_i = N p_bar_i
//   pair (i,i'): E_ii' = n_ii' p_bar_i / (p_bar_i + p_bar_i'), where
//                n_ii' = tau_ii' + tau_i'i is the number of decided comparisons.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plmix/error.hpp"
#include "plmix/gibbs.hpp"
#include "plmix/matrix.hpp"
#include "plmix/parallel.hpp"
#include "plmix/plmodel.hpp"
#include "plmix/random.hpp"
#include "plmix/rank_data.hpp"

namespace plmix {

/// Chi-squared distance between top-choice counts r and N * marginal.
inline double top1_chisq(std::span<const double> r, std::span<const double> marginal) {
  double N = 0.0;
  for (double v : r) N += v;
  double x2 = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double e = N * marginal[i];
    if (!(e > 0.0)) {
      if (N == 0.0) return 0.0;
      throw NumericalError("expected top-choice frequency of item " + std::to_string(i + 1) +
                           " is zero");
    }
    x2 += (r[i] - e) * (r[i] - e) / e;
  }
  return x2;
}

/// Chi-squared distance between a paired-comparison matrix and its Luce
/// expectation; pairs never decided are skipped.
inline double paired_chisq(const RealMatrix& tau, std::span<const double> marginal) {
  const std::size_t K = tau.rows();
  double x2 = 0.0;
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = a + 1; b < K; ++b) {
      const double n = tau(a, b) + tau(b, a);
      if (n == 0.0) continue;
      const double pa = marginal[a] / (marginal[a] + marginal[b]);
      const double ea = n * pa;
      const double eb = n - ea;
      if (ea > 0.0) x2 += (tau(a, b) - ea) * (tau(a, b) - ea) / ea;
      if (eb > 0.0) x2 += (tau(b, a) - eb) * (tau(b, a) - eb) / eb;
    }
  return x2;
}

inline double top1_discrepancy(const Dataset& data, const MixtureParams& theta) {
  theta.validate();
  detail::require(theta.num_items() == data.num_items(), "parameters and data disagree on K");
  return top1_chisq(top1_counts(data), normalize(theta).marginal);
}

inline double paired_discrepancy(const Dataset& data, const MixtureParams& theta) {
  theta.validate();
  detail::require(theta.num_items() == data.num_items(), "parameters and data disagree on K");
  return paired_chisq(paired_comparisons(data), normalize(theta).marginal);
}

/// Depth strata m = 1..K-1; complete orderings fall in stratum K-1.
inline int depth_stratum(int depth, int K) { return depth >= K - 1 ? K - 1 : depth; }

/// Subsample of units whose depth falls in the given stratum.
inline std::optional<Dataset> stratum_subsample(const Dataset& data, int m) {
  IntMatrix rows(0, data.num_items());
  for (std::size_t s = 0; s < data.size(); ++s)
    if (depth_stratum(data.nranked(s), data.num_items()) == m) rows.append_row(data.row(s));
  if (rows.rows() == 0) return std::nullopt;
  return Dataset(std::move(rows));
}

/// Sum over depth strata of the top-choice discrepancy (empty strata add 0).
inline double top1_discrepancy_cond(const Dataset& data, const MixtureParams& theta) {
  double total = 0.0;
  for (int m = 1; m < data.num_items(); ++m)
    if (auto sub = stratum_subsample(data, m)) total += top1_discrepancy(*sub, theta);
  return total;
}

inline double paired_discrepancy_cond(const Dataset& data, const MixtureParams& theta) {
  double total = 0.0;
  for (int m = 1; m < data.num_items(); ++m)
    if (auto sub = stratum_subsample(data, m)) total += paired_discrepancy(*sub, theta);
  return total;
}

namespace detail {

// Top-choice and paired-comparison counts per depth stratum.
struct StratifiedCounts {
  std::vector<std::vector<double>> r;  // indexed by stratum m (0 unused)
  std::vector<RealMatrix> tau;

  explicit StratifiedCounts(int K)
      : r(K, std::vector<double>(K, 0.0)), tau(K, RealMatrix(K, K, 0.0)) {}

  void add(std::span<const int> row, int depth) {
    const int K = static_cast<int>(row.size());
    const int m = depth_stratum(depth, K);
    r[m][row[0] - 1] += 1.0;
    RealMatrix& t = tau[m];
    thread_local std::vector<char> ranked;
    ranked.assign(K, 0);
    for (int j = 0; j < depth; ++j) {
      const int a = row[j] - 1;
      ranked[a] = 1;
      for (int k = j + 1; k < depth; ++k) t(a, row[k] - 1) += 1.0;
    }
    if (depth < K)
      for (int j = 0; j < depth; ++j)
        for (int b = 0; b < K; ++b)
          if (!ranked[b]) t(row[j] - 1, b) += 1.0;
  }

  double top1(std::span<const double> marginal) const {
    std::vector<double> total(marginal.size(), 0.0);
    for (const auto& rm : r)
      for (std::size_t i = 0; i < rm.size(); ++i) total[i] += rm[i];
    return top1_chisq(total, marginal);
  }

  double paired(std::span<const double> marginal) const {
    RealMatrix total(marginal.size(), marginal.size(), 0.0);
    for (const auto& tm : tau)
      for (std::size_t k = 0; k < tm.data().size(); ++k) total.data()[k] += tm.data()[k];
    return paired_chisq(total, marginal);
  }

  double top1_cond(std::span<const double> marginal) const {
    double x2 = 0.0;
    for (std::size_t m = 1; m < r.size(); ++m) x2 += top1_chisq(r[m], marginal);
    return x2;
  }

  double paired_cond(std::span<const double> marginal) const {
    double x2 = 0.0;
    for (std::size_t m = 1; m < tau.size(); ++m) x2 += paired_chisq(tau[m], marginal);
    return x2;
  }
};

}  // namespace detail

/// Observed and replicated discrepancies for one posterior draw.
struct PpcheckDraw {
  double obs_top1 = 0.0, rep_top1 = 0.0;
  double obs_paired = 0.0, rep_paired = 0.0;
  double obs_top1_cond = 0.0, rep_top1_cond = 0.0;
  double obs_paired_cond = 0.0, rep_paired_cond = 0.0;
};

/// Replicated dataset from the mixture with the observed depths: unit s of
/// the replicate ranks exactly data.nranked(s) items.
inline Dataset replicate_dataset(const Dataset& data, const MixtureParams& theta, Rng& rng) {
  const int K = data.num_items();
  IntMatrix rows(data.size(), K, 0);
  std::vector<int> full(K);
  for (std::size_t s = 0; s < data.size(); ++s) {
    const std::size_t g = theta.num_components() == 1 ? 0 : categorical(rng, theta.weights);
    std::fill(full.begin(), full.end(), 0);
    detail::complete_tail(full, 0, theta.supports.row(g), rng);
    std::copy_n(full.begin(), data.nranked(s), rows.row(s).begin());
  }
  return Dataset(std::move(rows));
}

/// Per-draw statistics for one chain. Draw l uses make_stream(seed, l), so
/// the result does not depend on the thread count.
inline std::vector<PpcheckDraw> ppcheck_draws(const Dataset& data, const GibbsChain& chain,
                                              std::uint64_t seed, unsigned threads = 1) {
  detail::require(chain.length() >= 1, "chain has no draws");
  detail::require(chain.num_items == data.num_items(), "chain and data disagree on K");
  const int K = data.num_items();
  detail::StratifiedCounts observed(K);
  for (std::size_t s = 0; s < data.size(); ++s) observed.add(data.row(s), data.nranked(s));

  std::vector<PpcheckDraw> out(chain.length());
  parallel_for(chain.length(), threads, [&](std::size_t l) {
    const MixtureParams theta = chain.draw(l);
    const auto marginal = normalize(theta).marginal;
    Rng rng = make_stream(seed, l);
    const Dataset rep = replicate_dataset(data, theta, rng);
    detail::StratifiedCounts replicated(K);
    for (std::size_t s = 0; s < rep.size(); ++s) replicated.add(rep.row(s), rep.nranked(s));
    PpcheckDraw& d = out[l];
    d.obs_top1 = observed.top1(marginal);
    d.rep_top1 = replicated.top1(marginal);
    d.obs_paired = observed.paired(marginal);
    d.rep_paired = replicated.paired(marginal);
    d.obs_top1_cond = observed.top1_cond(marginal);
    d.rep_top1_cond = replicated.top1_cond(marginal);
    d.obs_paired_cond = observed.paired_cond(marginal);
    d.rep_paired_cond = replicated.paired_cond(marginal);
  });
  return out;
}

/// Fraction of draws with replicated discrepancy >= observed discrepancy.
template <class Select>
double posterior_predictive_pvalue(const std::vector<PpcheckDraw>& draws, Select&& pick) {
  detail::require(!draws.empty(), "no posterior draws");
  std::size_t hits = 0;
  for (const auto& d : draws) {
    const auto [rep, obs] = pick(d);
    if (rep >= obs) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws.size());
}

struct PpcheckRow {
  int G = 0;
  double top1 = 0.0;
  double paired = 0.0;
};

struct PpcheckReport {
  std::vector<PpcheckRow> rows;
};

namespace detail {

inline std::uint64_t chain_seed(std::uint64_t seed, std::size_t k) {
  return seed ^ (0x9E3779B97F4A7C15ull * (k + 1));
}

}  // namespace detail

/// Unconditional and depth-conditional reports computed from one set of
/// replicated datasets per chain.
struct PpcheckResult {
  PpcheckReport unconditional;
  PpcheckReport conditional;
  std::vector<std::vector<PpcheckDraw>> draws;  // per chain
};

inline PpcheckResult ppcheck_all(const Dataset& data, const std::vector<GibbsChain>& chains,
                                 std::uint64_t seed, unsigned threads = 1) {
  detail::require(!chains.empty(), "at least one chain is required");
  PpcheckResult out;
  for (std::size_t k = 0; k < chains.size(); ++k) {
    auto draws = ppcheck_draws(data, chains[k], detail::chain_seed(seed, k), threads);
    const int G = static_cast<int>(chains[k].num_components);
    out.unconditional.rows.push_back(
        {G,
         posterior_predictive_pvalue(draws, [](const PpcheckDraw& d) {
           return std::pair{d.rep_top1, d.obs_top1};
         }),
         posterior_predictive_pvalue(draws, [](const PpcheckDraw& d) {
           return std::pair{d.rep_paired, d.obs_paired};
         })});
    out.conditional.rows.push_back(
        {G,
         posterior_predictive_pvalue(draws, [](const PpcheckDraw& d) {
           return std::pair{d.rep_top1_cond, d.obs_top1_cond};
         }),
         posterior_predictive_pvalue(draws, [](const PpcheckDraw& d) {
           return std::pair{d.rep_paired_cond, d.obs_paired_cond};
         })});
    out.draws.push_back(std::move(draws));
  }
  return out;
}

inline PpcheckReport ppcheck(const Dataset& data, const std::vector<GibbsChain>& chains,
                             std::uint64_t seed, unsigned threads = 1) {
  return ppcheck_all(data, chains, seed, threads).unconditional;
}

inline PpcheckReport ppcheck_cond(const Dataset& data, const std::vector<GibbsChain>& chains,
                                  std::uint64_t seed, unsigned threads = 1) {
  return ppcheck_all(data, chains, seed, threads).conditional;
}

}  // namespace plmix
