#pragma once

// MAP estimation of Plackett-Luce mixtures by the data-augmented EM
// algorithm. Under flat priors (shape 1, rate 0, alpha 1) the iteration is
// the MM algorithm for the MLE.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plmix/error.hpp"
#include "plmix/matrix.hpp"
#include "plmix/parallel.hpp"
#include "plmix/plmodel.hpp"
#include "plmix/random.hpp"
#include "plmix/rank_data.hpp"

namespace plmix {

/// Conjugate prior: p_gi ~ Gamma(shape(g,i), rate[g]), omega ~ Dirichlet(alpha).
struct Hyperparams {
  RealMatrix shape;
  std::vector<double> rate;
  std::vector<double> alpha;

  static Hyperparams flat(int G, int K) {
    return {RealMatrix(G, K, 1.0), std::vector<double>(G, 0.0), std::vector<double>(G, 1.0)};
  }

  static Hyperparams constant(int G, int K, double shape, double rate, double alpha) {
    return {RealMatrix(G, K, shape), std::vector<double>(G, rate), std::vector<double>(G, alpha)};
  }

  bool is_flat() const {
    return std::all_of(shape.data().begin(), shape.data().end(), [](double c) { return c == 1.0; }) &&
           std::all_of(rate.begin(), rate.end(), [](double d) { return d == 0.0; }) &&
           std::all_of(alpha.begin(), alpha.end(), [](double a) { return a == 1.0; });
  }

  void validate(std::size_t G, int K) const {
    detail::require(shape.rows() == G && shape.cols() == static_cast<std::size_t>(K) &&
                        rate.size() == G && alpha.size() == G,
                    "hyperparameter dimensions do not match G = " + std::to_string(G) +
                        ", K = " + std::to_string(K));
    for (double c : shape.data())
      detail::require(c >= 0.0 && std::isfinite(c), "Gamma shapes must be nonnegative");
    for (double d : rate)
      detail::require(d >= 0.0 && std::isfinite(d), "Gamma rates must be nonnegative");
    for (double a : alpha)
      detail::require(a >= 0.0 && std::isfinite(a), "Dirichlet concentrations must be nonnegative");
  }
};

struct MapFit {
  MixtureParams params;  // unnormalized MAP supports and weights
  RealMatrix responsibilities;  // N x G
  std::vector<int> class_map;   // 1-based argmax of responsibilities
  std::vector<double> log_post;  // trace, starting at the initial value
  bool converged = false;
  int n_iter = 0;
  double loglik = 0.0;
  std::optional<double> bic;  // flat-prior fits only
  std::vector<std::string> warnings;

  NormalizedParams normalized() const { return normalize(params); }
};

struct EmOptions {
  int max_iter = 0;  // 0 selects 400 * G
  double tol = 1e-6;
};

/// -2 loglik + nu log N with nu = G(K-1) + (G-1) free parameters.
inline double bic(double loglik_mle, int K, int G, std::size_t N) {
  const double nu = static_cast<double>(G) * (K - 1) + (G - 1);
  return -2.0 * loglik_mle + nu * std::log(static_cast<double>(N));
}

/// Log prior density up to its normalizing constant.
inline double log_prior(const MixtureParams& params, const Hyperparams& hyper) {
  double lp = 0.0;
  for (std::size_t g = 0; g < params.num_components(); ++g) {
    if (hyper.alpha[g] != 1.0) lp += (hyper.alpha[g] - 1.0) * std::log(params.weights[g]);
    for (std::size_t i = 0; i < params.supports.cols(); ++i) {
      const double p = params.supports(g, i);
      if (hyper.shape(g, i) != 1.0) lp += (hyper.shape(g, i) - 1.0) * std::log(p);
      lp -= hyper.rate[g] * p;
    }
  }
  return lp;
}

inline double log_posterior(const MixtureParams& params, const Dataset& data,
                            const Hyperparams& hyper) {
  return mixture_loglik(params, data) + log_prior(params, hyper);
}

struct EmStepResult {
  MixtureParams params;
  RealMatrix responsibilities;
  std::vector<std::string> warnings;
};

namespace detail {

// Responsibilities z_hat(s, g) proportional to omega_g PL(row_s | p_g),
// normalized in the log domain.
inline RealMatrix e_step(const MixtureParams& params, const Dataset& data) {
  const std::size_t G = params.num_components();
  RealMatrix z(data.size(), G, 0.0);
  std::vector<double> terms(G);
  for (std::size_t s = 0; s < data.size(); ++s) {
    if (G == 1) {
      z(s, 0) = 1.0;
      continue;
    }
    for (std::size_t g = 0; g < G; ++g)
      terms[g] = params.weights[g] > 0.0
                     ? std::log(params.weights[g]) +
                           pl_logprob_unchecked(data.row(s), data.nranked(s),
                                                params.supports.row(g))
                     : -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(terms.begin(), terms.end());
    if (!std::isfinite(m))
      throw NumericalError(row_context(s) + "all responsibilities are zero");
    double total = 0.0;
    for (std::size_t g = 0; g < G; ++g) total += (z(s, g) = std::exp(terms[g] - m));
    for (std::size_t g = 0; g < G; ++g) z(s, g) /= total;
  }
  return z;
}

constexpr double kSupportFloor = 1e-12;

}  // namespace detail

/// One EM iteration: E-step responsibilities at `params`, then the
/// closed-form M-step for weights and supports.
inline EmStepResult em_step(const MixtureParams& params, const Dataset& data,
                            const Hyperparams& hyper) {
  params.validate();
  const std::size_t G = params.num_components();
  const int K = data.num_items();
  detail::require(params.num_items() == K, "parameters and data disagree on K");
  hyper.validate(G, K);
  double alpha_total = 0.0;
  for (double a : hyper.alpha) alpha_total += a;
  const double weight_denominator =
      alpha_total - static_cast<double>(G) + static_cast<double>(data.size());
  detail::require(weight_denominator > 0.0, "sum(alpha) - G + N must be positive");

  EmStepResult out{params, detail::e_step(params, data), {}};
  const RealMatrix& z = out.responsibilities;

  RealMatrix gamma_hat(G, K, 0.0);
  RealMatrix exposure(G, K, 0.0);  // sum_s z_sg sum_t delta_sti / R_gst
  std::vector<double> z_total(G, 0.0);
  std::vector<double> cum(K), rates(K);
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto row = data.row(s);
    const int n = data.nranked(s);
    for (std::size_t g = 0; g < G; ++g) {
      const double zs = z(s, g);
      if (zs == 0.0) continue;
      z_total[g] += zs;
      detail::stage_rates_into(row, n, params.supports.row(g), rates);
      double acc = 0.0;
      for (int t = 0; t < n; ++t) cum[t] = (acc += 1.0 / rates[t]);
      auto gh = gamma_hat.row(g);
      auto ex = exposure.row(g);
      for (int t = 0; t < n; ++t) {
        gh[row[t] - 1] += zs;
        ex[row[t] - 1] += zs * cum[t];
      }
      if (n < K) {
        // Unranked items stay available through every observed stage.
        const double tail = zs * cum[n - 1];
        for (int i = 0; i < K; ++i) ex[i] += tail;
        for (int t = 0; t < n; ++t) ex[row[t] - 1] -= tail;
      }
    }
  }

  for (std::size_t g = 0; g < G; ++g) {
    out.params.weights[g] = (hyper.alpha[g] - 1.0 + z_total[g]) / weight_denominator;
    if (out.params.weights[g] < 0.0)
      throw ValidationError("weight update for component " + std::to_string(g + 1) +
                            " is negative; alpha below 1 with an empty component");
    if (z_total[g] == 0.0 && hyper.rate[g] == 0.0) continue;  // empty component keeps its supports
    for (int i = 0; i < K; ++i) {
      const double numerator = hyper.shape(g, i) - 1.0 + gamma_hat(g, i);
      const double denominator = hyper.rate[g] + exposure(g, i);
      if (numerator < 0.0)
        throw ValidationError("support update numerator c - 1 + gamma_hat is negative at (" +
                              std::to_string(g + 1) + "," + std::to_string(i + 1) + ")");
      double p = numerator / denominator;
      if (!(p >= detail::kSupportFloor)) {
        out.warnings.push_back("support (" + std::to_string(g + 1) + "," + std::to_string(i + 1) +
                               ") clamped to floor");
        p = detail::kSupportFloor;
      }
      out.params.supports(g, i) = p;
    }
  }
  return out;
}

namespace detail {

inline MixtureParams uniform_start(int G, int K, Rng& rng) {
  MixtureParams init{RealMatrix(G, K), std::vector<double>(G, 1.0 / G)};
  for (double& v : init.supports.data()) v = 1.0 - uniform01(rng);
  return init;
}

// Dirichlet draws centred on the (smoothed) relative frequencies with which
// each item is ranked first.
inline MixtureParams centered_start(const Dataset& data, int G, Rng& rng) {
  const int K = data.num_items();
  const auto r = top1_counts(data);
  const double N = static_cast<double>(data.size());
  constexpr double kConcentrationPerItem = 10.0;
  std::vector<double> conc(K);
  for (int i = 0; i < K; ++i)
    conc[i] = kConcentrationPerItem * K * (r[i] + 0.5) / (N + 0.5 * K);
  MixtureParams init{RealMatrix(G, K), std::vector<double>(G, 1.0 / G)};
  for (int g = 0; g < G; ++g) {
    auto draw = dirichlet(rng, conc);
    for (int i = 0; i < K; ++i) init.supports(g, i) = std::max(draw[i], kSupportFloor);
  }
  return init;
}

inline std::vector<int> argmax_labels(const RealMatrix& z) {
  std::vector<int> labels(z.rows());
  for (std::size_t s = 0; s < z.rows(); ++s) {
    const auto row = z.row(s);
    labels[s] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()) + 1;
  }
  return labels;
}

}  // namespace detail

/// Iterates em_step from `init` (uniform random supports when absent) until
/// the absolute change of the log-posterior drops below tol or max_iter is
/// reached.
inline MapFit fit_map(const Dataset& data, int G, const Hyperparams& hyper,
                      const std::optional<MixtureParams>& init, const EmOptions& options,
                      Rng& rng) {
  const int K = data.num_items();
  detail::require(G >= 1, "G must be at least 1");
  hyper.validate(G, K);
  MixtureParams current = init ? *init : detail::uniform_start(G, K, rng);
  current.validate();
  detail::require(current.num_components() == static_cast<std::size_t>(G) &&
                      current.num_items() == K,
                  "initial parameters do not match G and K");
  const int max_iter = options.max_iter > 0 ? options.max_iter : 400 * G;

  MapFit fit;
  double lp = log_posterior(current, data, hyper);
  if (!std::isfinite(lp)) throw NumericalError("log-posterior is not finite at the initial value");
  fit.log_post.push_back(lp);
  for (int it = 1; it <= max_iter; ++it) {
    auto step = em_step(current, data, hyper);
    for (auto& w : step.warnings)
      if (std::find(fit.warnings.begin(), fit.warnings.end(), w) == fit.warnings.end())
        fit.warnings.push_back(std::move(w));
    current = std::move(step.params);
    const double next = log_posterior(current, data, hyper);
    if (!std::isfinite(next))
      throw NumericalError("log-posterior is not finite at EM iteration " + std::to_string(it));
    fit.log_post.push_back(next);
    fit.n_iter = it;
    const double change = std::abs(next - lp);
    lp = next;
    if (change < options.tol) {
      fit.converged = true;
      break;
    }
  }
  fit.params = std::move(current);
  fit.responsibilities = detail::e_step(fit.params, data);
  fit.class_map = detail::argmax_labels(fit.responsibilities);
  fit.loglik = mixture_loglik(fit.params, data);
  if (hyper.is_flat()) fit.bic = bic(fit.loglik, K, G, data.size());
  return fit;
}

struct MultistartFit {
  MapFit best;
  std::size_t best_start = 0;
  std::vector<double> final_log_post;  // one per start, in start order
};

/// Runs n_start independent fits (start k uses make_stream(seed, k)) and keeps
/// the one with the highest final log-posterior, ties going to the lowest
/// start index.
inline MultistartFit fit_map_multistart(const Dataset& data, int G, int n_start,
                                        bool centered_start, const Hyperparams& hyper,
                                        const EmOptions& options, std::uint64_t seed,
                                        unsigned threads = 1) {
  detail::require(n_start >= 1, "n_start must be at least 1");
  std::vector<std::optional<MapFit>> fits(n_start);
  parallel_for(static_cast<std::size_t>(n_start), threads, [&](std::size_t k) {
    Rng rng = make_stream(seed, k);
    std::optional<MixtureParams> init;
    if (centered_start) init = detail::centered_start(data, G, rng);
    fits[k] = fit_map(data, G, hyper, init, options, rng);
  });
  MultistartFit out;
  out.final_log_post.reserve(n_start);
  for (int k = 0; k < n_start; ++k) {
    const double v = fits[k]->log_post.back();
    out.final_log_post.push_back(v);
    if (k == 0 || v > out.final_log_post[out.best_start]) out.best_start = k;
  }
  out.best = std::move(*fits[out.best_start]);
  return out;
}

}  // namespace plmix
