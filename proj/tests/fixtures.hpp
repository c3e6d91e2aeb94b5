#pragma once

// Data fixtures printed in the reference material and small independent
// oracles (enumeration, brute-force probabilities) used across the tests.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "plmix/plmix.hpp"

namespace fixtures {

// First six Dublin West ballots (orderings, K = 9).
inline plmix::IntMatrix dublin_west_head() {
  return {{7, 9, 4, 2, 8, 0, 0, 0, 0}, {5, 3, 7, 6, 0, 0, 0, 0, 0},
          {5, 7, 3, 0, 0, 0, 0, 0, 0}, {9, 2, 7, 0, 0, 0, 0, 0, 0},
          {3, 2, 0, 0, 0, 0, 0, 0, 0}, {5, 3, 2, 0, 0, 0, 0, 0, 0}};
}

inline plmix::IntMatrix dublin_west_head_rankings() {
  return {{0, 4, 0, 3, 0, 0, 1, 5, 2}, {0, 0, 2, 0, 1, 4, 3, 0, 0},
          {0, 0, 3, 0, 1, 0, 2, 0, 0}, {0, 2, 0, 0, 0, 0, 3, 0, 1},
          {0, 2, 1, 0, 0, 0, 0, 0, 0}, {0, 3, 2, 0, 1, 0, 0, 0, 0}};
}

inline const std::vector<long long>& german_counts() {
  static const std::vector<long long> c{137, 29, 309, 52, 255, 93, 48, 23, 330, 21, 294, 30,
                                        61,  33, 117, 29, 70,  35, 55, 59, 69,  52, 34, 27};
  return c;
}

// Frequency table of the German sample: the 24 orderings of K = 4 in
// lexicographic order with their counts (N = 2262).
inline plmix::FreqTable german_freq() {
  plmix::FreqTable t{plmix::IntMatrix(0, 4), german_counts()};
  std::vector<int> perm{1, 2, 3, 4};
  do t.sequences.append_row(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  return t;
}

inline plmix::Dataset german() { return plmix::Dataset(plmix::freq_to_unit(german_freq())); }

inline plmix::IntMatrix one_row(const std::vector<int>& row) {
  plmix::IntMatrix m(0, row.size());
  m.append_row(row);
  return m;
}

// All K! orderings of 1..K.
inline std::vector<std::vector<int>> all_orderings(int K) {
  std::vector<std::vector<int>> out;
  std::vector<int> perm(K);
  std::iota(perm.begin(), perm.end(), 1);
  do out.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// PL probability written directly from the stagewise definition: at each
// stage divide the chosen support by the sum over items not yet chosen.
inline double brute_pl_prob(const std::vector<int>& ordering, const std::vector<double>& p) {
  const int K = static_cast<int>(p.size());
  std::vector<bool> used(K, false);
  double prob = 1.0;
  for (int item : ordering) {
    if (item == 0) break;
    double denom = 0.0;
    for (int i = 0; i < K; ++i)
      if (!used[i]) denom += p[i];
    prob *= p[item - 1] / denom;
    used[item - 1] = true;
  }
  return prob;
}

inline double brute_mixture_prob(const std::vector<int>& ordering, const plmix::MixtureParams& th) {
  double total = 0.0;
  for (std::size_t g = 0; g < th.num_components(); ++g) {
    auto row = th.supports.row(g);
    total += th.weights[g] * brute_pl_prob(ordering, std::vector<double>(row.begin(), row.end()));
  }
  return total;
}

inline plmix::MixtureParams random_params(int G, int K, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 3.0);
  plmix::MixtureParams m{plmix::RealMatrix(G, K), std::vector<double>(G)};
  for (double& v : m.supports.data()) v = u(rng);
  double total = 0.0;
  for (double& w : m.weights) total += (w = u(rng));
  for (double& w : m.weights) w /= total;
  // force the weights onto the simplex to the last bit
  double head = 0.0;
  for (int g = 0; g + 1 < G; ++g) head += m.weights[g];
  m.weights[G - 1] = 1.0 - head;
  return m;
}

// Random partial orderings: uniform random permutation truncated to a
// uniformly drawn depth in 1..K.
inline plmix::IntMatrix random_partial_orderings(std::size_t N, int K, std::mt19937_64& rng) {
  plmix::IntMatrix m(N, K, 0);
  std::vector<int> perm(K);
  std::uniform_int_distribution<int> depth(1, K);
  for (std::size_t s = 0; s < N; ++s) {
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    const int d = depth(rng);
    for (int j = 0; j < d; ++j) m(s, j) = perm[j];
  }
  return m;
}

// Best permutation of components of `est` to match `truth` (L-infinity over
// normalized supports and weights).
inline double aligned_linf(const plmix::MixtureParams& est, const plmix::MixtureParams& truth) {
  const auto a = plmix::normalize(est);
  const auto b = plmix::normalize(truth);
  const std::size_t G = truth.num_components();
  std::vector<int> perm(G);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double d = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t i = 0; i < a.supports.cols(); ++i)
        d = std::max(d, std::abs(a.supports(perm[g], i) - b.supports(g, i)));
      d = std::max(d, std::abs(a.weights[perm[g]] - b.weights[g]));
    }
    best = std::min(best, d);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace fixtures
