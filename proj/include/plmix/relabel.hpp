#pragma once

// Label-switching repair by pivotal reordering: every draw is permuted to
// the component labelling closest to a pivot estimate.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "plmix/em_map.hpp"
#include "plmix/error.hpp"
#include "plmix/gibbs.hpp"
#include "plmix/plmodel.hpp"

namespace plmix {

struct RelabeledChain {
  GibbsChain chain;  // P and W permuted; log_lik and deviance untouched
  // permutations[l][g] is the raw component placed at position g in draw l
  // (0-based).
  std::vector<std::vector<int>> permutations;
};

constexpr std::size_t kMaxRelabelComponents = 8;

/// Squared Euclidean distance between the draw relabelled by `perm` and the
/// pivot, over normalized supports followed by weights.
inline double relabel_distance(const NormalizedParams& draw, const NormalizedParams& pivot,
                               const std::vector<int>& perm) {
  double d = 0.0;
  const std::size_t K = pivot.supports.cols();
  for (std::size_t g = 0; g < perm.size(); ++g) {
    const auto src = draw.supports.row(perm[g]);
    const auto ref = pivot.supports.row(g);
    for (std::size_t i = 0; i < K; ++i) d += (src[i] - ref[i]) * (src[i] - ref[i]);
    const double dw = draw.weights[perm[g]] - pivot.weights[g];
    d += dw * dw;
  }
  return d;
}

/// Applies one permutation per draw: component perm[g] of draw l becomes
/// component g.
inline GibbsChain apply_permutations(const GibbsChain& chain,
                                     const std::vector<std::vector<int>>& permutations) {
  detail::require(permutations.size() == chain.length(), "one permutation per draw is required");
  GibbsChain out = chain;
  const std::size_t K = static_cast<std::size_t>(chain.num_items);
  for (std::size_t l = 0; l < chain.length(); ++l) {
    const auto& perm = permutations[l];
    for (std::size_t g = 0; g < chain.num_components; ++g) {
      const std::size_t src = static_cast<std::size_t>(perm[g]);
      std::copy_n(chain.P.row(l).begin() + src * K, K, out.P.row(l).begin() + g * K);
      out.W(l, g) = chain.W(l, src);
    }
  }
  return out;
}

/// Exhaustive search over the G! permutations of each draw; ties resolve to
/// the lexicographically first permutation, so aligned draws keep the
/// identity.
inline RelabeledChain pra_relabel(const GibbsChain& chain, const MixtureParams& pivot) {
  const std::size_t G = chain.num_components;
  detail::require(pivot.num_components() == G && pivot.num_items() == chain.num_items,
                  "pivot dimensions do not match the chain");
  if (G > kMaxRelabelComponents)
    throw ValidationError("pivotal relabelling enumerates G! permutations; G = " +
                          std::to_string(G) + " exceeds " +
                          std::to_string(kMaxRelabelComponents));
  const NormalizedParams ref = normalize(pivot);

  std::vector<std::vector<int>> perms;
  std::vector<int> perm(G);
  std::iota(perm.begin(), perm.end(), 0);
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  RelabeledChain out;
  out.permutations.resize(chain.length());
  for (std::size_t l = 0; l < chain.length(); ++l) {
    const NormalizedParams draw = normalize(chain.draw(l));
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < perms.size(); ++k) {
      const double d = relabel_distance(draw, ref, perms[k]);
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    out.permutations[l] = perms[best_k];
  }
  out.chain = apply_permutations(chain, out.permutations);
  return out;
}

inline RelabeledChain pra_relabel(const GibbsChain& chain, const MapFit& pivot) {
  return pra_relabel(chain, pivot.params);
}

}  // namespace plmix
