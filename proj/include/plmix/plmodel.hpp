#pragma once

// Plackett-Luce and Plackett-Luce mixture probabilities and simulation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "plmix/error.hpp"
#include "plmix/matrix.hpp"
#include "plmix/random.hpp"
#include "plmix/rank_data.hpp"

namespace plmix {

/// G x K positive supports p_gi and a weight simplex omega_g.
struct MixtureParams {
  RealMatrix supports;
  std::vector<double> weights;

  std::size_t num_components() const noexcept { return supports.rows(); }
  int num_items() const noexcept { return static_cast<int>(supports.cols()); }

  void validate() const {
    detail::require(supports.rows() >= 1, "at least one mixture component is required");
    detail::require(weights.size() == supports.rows(),
                    "weights length " + std::to_string(weights.size()) + " does not match G = " +
                        std::to_string(supports.rows()));
    for (std::size_t g = 0; g < supports.rows(); ++g)
      for (std::size_t i = 0; i < supports.cols(); ++i)
        if (!(supports(g, i) > 0.0) || !std::isfinite(supports(g, i)))
          throw ValidationError("support p[" + std::to_string(g + 1) + "," +
                                std::to_string(i + 1) + "] must be positive and finite");
    double total = 0.0;
    for (double w : weights) {
      detail::require(w >= 0.0 && std::isfinite(w), "mixture weights must be nonnegative");
      total += w;
    }
    detail::require(std::abs(total - 1.0) <= 1e-12 * static_cast<double>(weights.size()) + 1e-12,
                    "mixture weights must sum to 1");
  }

  static MixtureParams homogeneous(std::span<const double> p) {
    MixtureParams m{RealMatrix(1, p.size()), {1.0}};
    std::copy(p.begin(), p.end(), m.supports.row(0).begin());
    return m;
  }

  static MixtureParams uniform(int G, int K) {
    return {RealMatrix(G, K, 1.0), std::vector<double>(G, 1.0 / G)};
  }
};

namespace detail {

// Sum of values in a canonical (sorted) order, so that sums over mixture
// components do not depend on the component labelling.
inline double canonical_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

// log(sum(exp(v))) computed in sorted order; -inf for an all -inf input.
// Sorts `values` in place.
inline double log_sum_exp(std::span<double> values) {
  std::sort(values.begin(), values.end());
  const double m = values.back();
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

// Stage rates R_t = sum of supports still available at stage t (t = 0..depth-1),
// accumulated backwards from the unranked mass so late stages carry no
// cancellation error.
inline void stage_rates_into(std::span<const int> ordering, int depth, std::span<const double> p,
                             std::span<double> rates) {
  const int K = static_cast<int>(p.size());
  double tail = 0.0;
  if (depth < K) {
    thread_local std::vector<char> ranked;
    ranked.assign(K, 0);
    for (int t = 0; t < depth; ++t) ranked[ordering[t] - 1] = 1;
    for (int i = 0; i < K; ++i)
      if (!ranked[i]) tail += p[i];
  }
  for (int t = depth - 1; t >= 0; --t) {
    tail += p[ordering[t] - 1];
    rates[t] = tail;
  }
}

// log PL probability of the first `depth` positions of `ordering`.
inline double pl_logprob_unchecked(std::span<const int> ordering, int depth,
                                   std::span<const double> p) {
  thread_local std::vector<double> rates;
  rates.resize(p.size());
  stage_rates_into(ordering, depth, p, rates);
  // The last stage of a complete ordering has probability exactly 1.
  const int stages = std::min(depth, static_cast<int>(p.size()) - 1);
  double lp = 0.0;
  for (int t = 0; t < stages; ++t) lp += std::log(p[ordering[t] - 1] / rates[t]);
  return lp;
}

inline void validate_support(std::span<const double> p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!(p[i] > 0.0) || !std::isfinite(p[i]))
      throw ValidationError("support parameter " + std::to_string(i + 1) + " must be positive");
}

}  // namespace detail

/// Marginal-normalized view: each support row sums to one, plus the
/// weight-averaged marginal supports p_bar_i = sum_g omega_g p_gi.
struct NormalizedParams {
  RealMatrix supports;
  std::vector<double> weights;
  std::vector<double> marginal;
};

inline NormalizedParams normalize(const MixtureParams& params) {
  const std::size_t G = params.num_components();
  const std::size_t K = params.supports.cols();
  NormalizedParams out{RealMatrix(G, K), params.weights, std::vector<double>(K)};
  for (std::size_t g = 0; g < G; ++g) {
    const auto row = params.supports.row(g);
    double total = 0.0;
    for (double v : row) total += v;
    for (std::size_t i = 0; i < K; ++i) out.supports(g, i) = row[i] / total;
  }
  std::vector<double> terms(G);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t g = 0; g < G; ++g) terms[g] = params.weights[g] * out.supports(g, i);
    out.marginal[i] = detail::canonical_sum(terms);
  }
  return out;
}

/// Probability of a (partial) ordering under a single PL with supports p.
inline double pl_logprob(std::span<const int> ordering, std::span<const double> p) {
  detail::require(ordering.size() == p.size(), "ordering and support lengths differ");
  detail::validate_support(p);
  const int depth = detail::validate_ordering_row(ordering, 0);
  detail::require(depth >= 1, "ordering has no ranked items");
  return detail::pl_logprob_unchecked(ordering, depth, p);
}

inline double pl_prob(std::span<const int> ordering, std::span<const double> p) {
  return std::exp(pl_logprob(ordering, p));
}

/// log sum_g omega_g PL(row | p_g) for one ordering of depth `depth`.
inline double mixture_logprob_row(const MixtureParams& params, std::span<const int> row,
                                  int depth) {
  const std::size_t G = params.num_components();
  if (G == 1) return detail::pl_logprob_unchecked(row, depth, params.supports.row(0));
  thread_local std::vector<double> terms;
  terms.resize(G);
  for (std::size_t g = 0; g < G; ++g)
    terms[g] = params.weights[g] > 0.0
                   ? std::log(params.weights[g]) +
                         detail::pl_logprob_unchecked(row, depth, params.supports.row(g))
                   : -std::numeric_limits<double>::infinity();
  return detail::log_sum_exp(terms);
}

/// Observed-data log-likelihood of the mixture. The result is invariant
/// (bitwise) under relabelling of the components.
inline double mixture_loglik(const MixtureParams& params, const Dataset& data) {
  params.validate();
  detail::require(params.num_items() == data.num_items(),
                  "parameters have K = " + std::to_string(params.num_items()) +
                      " but data has K = " + std::to_string(data.num_items()));
  double total = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s)
    total += mixture_logprob_row(params, data.row(s), data.nranked(s));
  return total;
}

/// Frequency-weighted log-likelihood over an aggregated table of orderings.
inline double mixture_loglik(const MixtureParams& params, const FreqTable& table) {
  const Dataset distinct(table.sequences);
  params.validate();
  detail::require(params.num_items() == distinct.num_items(), "parameters and table disagree on K");
  detail::require(table.counts.size() == distinct.size(), "one count per sequence is required");
  double total = 0.0;
  for (std::size_t m = 0; m < distinct.size(); ++m)
    total += static_cast<double>(table.counts[m]) *
             mixture_logprob_row(params, distinct.row(m), distinct.nranked(m));
  return total;
}

struct SimulatedSample {
  std::vector<int> components;  // 1-based
  IntMatrix orderings;
};

/// Draws n complete orderings from the mixture.
inline SimulatedSample sample_plmix(std::size_t n, const MixtureParams& params, Rng& rng) {
  detail::require(n >= 1, "sample size must be at least 1");
  params.validate();
  const int K = params.num_items();
  SimulatedSample out{std::vector<int>(n), IntMatrix(n, K, 0)};
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t g =
        params.num_components() == 1 ? 0 : categorical(rng, params.weights);
    out.components[s] = static_cast<int>(g + 1);
    detail::complete_tail(out.orderings.row(s), 0, params.supports.row(g), rng);
  }
  return out;
}

}  // namespace plmix
