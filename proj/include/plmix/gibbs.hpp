#pragma once

// Gibbs sampling of the Plackett-Luce mixture posterior under exponential
// data augmentation and the conjugate Gamma/Dirichlet prior.

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plmix/em_map.hpp"
#include "plmix/error.hpp"
#include "plmix/matrix.hpp"
#include "plmix/plmodel.hpp"
#include "plmix/random.hpp"
#include "plmix/rank_data.hpp"

namespace plmix {

/// Post-burn-in traces. Row l of P holds the supports of draw l in g-major
/// order (p_{1,1..K}, p_{2,1..K}, ...).
struct GibbsChain {
  std::size_t num_components = 0;
  int num_items = 0;
  RealMatrix P;  // L x (G*K)
  RealMatrix W;  // L x G
  std::vector<double> log_lik;
  std::vector<double> deviance;
  std::uint64_t seed = 0;
  int n_iter = 0;
  int n_burn = 0;

  std::size_t length() const noexcept { return P.rows(); }

  MixtureParams draw(std::size_t l) const {
    MixtureParams m{RealMatrix(num_components, num_items),
                    std::vector<double>(W.row(l).begin(), W.row(l).end())};
    std::copy(P.row(l).begin(), P.row(l).end(), m.supports.data().begin());
    return m;
  }
};

struct GibbsInit {
  RealMatrix supports;  // G x K, positive
  IntMatrix z;          // N x G one-hot memberships
};

struct GibbsOptions {
  int n_iter = 22000;
  int n_burn = 2000;
};

/// Exponential rates of the latent y_st for one ordering: entry t is the
/// total support of the items still available at stage t.
inline std::vector<double> stage_rates(std::span<const int> ordering, std::span<const double> p) {
  detail::require(ordering.size() == p.size(), "ordering and support lengths differ");
  detail::validate_support(p);
  const int depth = detail::validate_ordering_row(ordering, 0);
  std::vector<double> rates(depth);
  detail::stage_rates_into(ordering, depth, p, rates);
  return rates;
}

/// Gamma full-conditional parameters of every p_gi given memberships and
/// latent times: shape c_gi + gamma_gi, rate d_g + sum_{s in g} sum_t delta_sti y_st.
struct SupportConditional {
  RealMatrix shape;
  RealMatrix rate;
};

/// `labels` are 1-based memberships; row s of `y` holds y_s1..y_sn_s.
inline SupportConditional support_conditional(const Dataset& data, std::span<const int> labels,
                                              const RealMatrix& y, const Hyperparams& hyper) {
  const std::size_t G = hyper.rate.size();
  const int K = data.num_items();
  detail::require(labels.size() == data.size() && y.rows() == data.size(),
                  "labels and latent times must have one entry per unit");
  SupportConditional out{hyper.shape, RealMatrix(G, K, 0.0)};
  for (std::size_t g = 0; g < G; ++g)
    for (int i = 0; i < K; ++i) out.rate(g, i) = hyper.rate[g];
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto row = data.row(s);
    const int n = data.nranked(s);
    const std::size_t g = static_cast<std::size_t>(labels[s] - 1);
    auto shape = out.shape.row(g);
    auto rate = out.rate.row(g);
    const auto ys = y.row(s);
    double cum = 0.0;
    for (int t = 0; t < n; ++t) {
      cum += ys[t];
      shape[row[t] - 1] += 1.0;
      rate[row[t] - 1] += cum;
    }
    if (n < K) {
      for (int i = 0; i < K; ++i) rate[i] += cum;
      for (int t = 0; t < n; ++t) rate[row[t] - 1] -= cum;
    }
  }
  return out;
}

/// Independent Gamma draws. A row whose rates are all zero (an empty
/// component under an improper rate) is drawn with unit rate: only its
/// normalized value is identified, and that is Dirichlet(shape) for any
/// common rate.
inline RealMatrix draw_supports(const SupportConditional& cond, Rng& rng) {
  RealMatrix p(cond.shape.rows(), cond.shape.cols());
  for (std::size_t g = 0; g < p.rows(); ++g) {
    const auto rates = cond.rate.row(g);
    const bool scale_free = std::all_of(rates.begin(), rates.end(), [](double b) { return b == 0.0; });
    for (std::size_t i = 0; i < p.cols(); ++i) {
      const double a = cond.shape(g, i);
      const double b = scale_free ? 1.0 : cond.rate(g, i);
      if (!(a > 0.0) || !(b > 0.0))
        throw NumericalError("degenerate Gamma full-conditional for p[" + std::to_string(g + 1) +
                             "," + std::to_string(i + 1) + "]: shape " + std::to_string(a) +
                             ", rate " + std::to_string(b));
      p(g, i) = gamma_draw(rng, a, b);
      if (!(p(g, i) > 0.0)) p(g, i) = std::numeric_limits<double>::min();
    }
  }
  return p;
}

/// Runs n_iter sweeps and keeps the last n_iter - n_burn. Each sweep draws,
/// in order: weights | z, latent times y | z, p, supports | y, z, and
/// memberships z | y, p, weights (G = 1 skips the weight and membership
/// steps). Components with a zero Gamma rate are rescaled to unit sum after
/// every draw; the posterior of the normalized supports is unchanged.
inline GibbsChain gibbs_run(const Dataset& data, int G, const Hyperparams& hyper,
                            const std::optional<GibbsInit>& init, const GibbsOptions& options,
                            std::uint64_t seed) {
  const int K = data.num_items();
  const std::size_t N = data.size();
  detail::require(G >= 1, "G must be at least 1");
  detail::require(options.n_burn >= 0 && options.n_iter > options.n_burn,
                  "n_iter must exceed n_burn >= 0");
  hyper.validate(G, K);
  Rng rng = make_stream(seed);

  MixtureParams state{RealMatrix(G, K), std::vector<double>(G, 1.0 / G)};
  std::vector<int> labels(N, 1);
  if (init) {
    detail::require(init->supports.rows() == static_cast<std::size_t>(G) &&
                        init->supports.cols() == static_cast<std::size_t>(K),
                    "initial supports must be G x K");
    detail::require(init->z.rows() == N && init->z.cols() == static_cast<std::size_t>(G),
                    "initial memberships must be N x G");
    state.supports = init->supports;
    for (std::size_t s = 0; s < N; ++s) {
      int ones = 0;
      for (int g = 0; g < G; ++g) {
        const int v = init->z(s, g);
        detail::require(v == 0 || v == 1, "initial memberships must be binary");
        if (v == 1) {
          labels[s] = g + 1;
          ++ones;
        }
      }
      detail::require(ones == 1, detail::row_context(s) + "initial membership is not one-hot");
    }
  } else {
    for (double& v : state.supports.data()) v = 1.0 - uniform01(rng);
    if (G > 1)
      for (auto& l : labels) l = static_cast<int>(std::uniform_int_distribution<int>(1, G)(rng));
  }
  state.validate();

  GibbsChain chain;
  chain.num_components = G;
  chain.num_items = K;
  chain.seed = seed;
  chain.n_iter = options.n_iter;
  chain.n_burn = options.n_burn;
  const std::size_t L = static_cast<std::size_t>(options.n_iter - options.n_burn);
  chain.P = RealMatrix(L, static_cast<std::size_t>(G) * K);
  chain.W = RealMatrix(L, G);
  chain.log_lik.resize(L);
  chain.deviance.resize(L);

  RealMatrix y(N, K, 0.0);
  std::vector<double> rates(K), conc(G), logm(G), log_p(static_cast<std::size_t>(G) * K);

  for (int iter = 0; iter < options.n_iter; ++iter) {
    if (G > 1) {
      for (int g = 0; g < G; ++g) conc[g] = hyper.alpha[g];
      for (int l : labels) conc[l - 1] += 1.0;
      state.weights = dirichlet(rng, conc);
    }

    for (std::size_t s = 0; s < N; ++s) {
      const int n = data.nranked(s);
      detail::stage_rates_into(data.row(s), n, state.supports.row(labels[s] - 1), rates);
      auto ys = y.row(s);
      for (int t = 0; t < n; ++t) ys[t] = exponential(rng, rates[t]);
    }

    state.supports = draw_supports(support_conditional(data, labels, y, hyper), rng);
    for (int g = 0; g < G; ++g) {
      if (hyper.rate[g] != 0.0) continue;
      auto row = state.supports.row(g);
      double total = 0.0;
      for (double v : row) total += v;
      for (double& v : row) v /= total;
    }

    if (G > 1) {
      for (int g = 0; g < G; ++g)
        for (int i = 0; i < K; ++i) log_p[g * K + i] = std::log(state.supports(g, i));
      for (std::size_t s = 0; s < N; ++s) {
        const auto row = data.row(s);
        const int n = data.nranked(s);
        const auto ys = y.row(s);
        for (int g = 0; g < G; ++g) {
          if (state.weights[g] <= 0.0) {
            logm[g] = -std::numeric_limits<double>::infinity();
            continue;
          }
          detail::stage_rates_into(row, n, state.supports.row(g), rates);
          double v = std::log(state.weights[g]);
          for (int t = 0; t < n; ++t) v += log_p[g * K + row[t] - 1] - ys[t] * rates[t];
          logm[g] = v;
        }
        labels[s] = static_cast<int>(categorical_log(rng, logm)) + 1;
      }
    }

    if (iter >= options.n_burn) {
      const std::size_t l = static_cast<std::size_t>(iter - options.n_burn);
      std::copy(state.supports.data().begin(), state.supports.data().end(), chain.P.row(l).begin());
      std::copy(state.weights.begin(), state.weights.end(), chain.W.row(l).begin());
      chain.log_lik[l] = mixture_loglik(state, data);
      chain.deviance[l] = -2.0 * chain.log_lik[l];
    }
  }
  return chain;
}

/// Posterior mean of the normalized supports and of the weights.
inline MixtureParams posterior_mean(const GibbsChain& chain) {
  MixtureParams mean{RealMatrix(chain.num_components, chain.num_items, 0.0),
                     std::vector<double>(chain.num_components, 0.0)};
  for (std::size_t l = 0; l < chain.length(); ++l) {
    const auto norm = normalize(chain.draw(l));
    for (std::size_t k = 0; k < mean.supports.data().size(); ++k)
      mean.supports.data()[k] += norm.supports.data()[k];
    for (std::size_t g = 0; g < chain.num_components; ++g) mean.weights[g] += norm.weights[g];
  }
  const double L = static_cast<double>(chain.length());
  for (double& v : mean.supports.data()) v /= L;
  for (double& v : mean.weights) v /= L;
  return mean;
}

}  // namespace plmix
