#pragma once

// Partial top orderings and rankings: validation, format switching,
// aggregation, censoring, completion, descriptive summaries and the
// sufficient statistics of the Plackett-Luce likelihood.
//
// Item ids and ranks are 1-based in every matrix exposed here; 0 codes a
// missing entry. Rank 1 is the most-liked position.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plmix/error.hpp"
#include "plmix/matrix.hpp"
#include "plmix/random.hpp"

namespace plmix {

enum class Format { ordering, ranking };

namespace detail {

inline std::string row_context(std::size_t s) { return "row " + std::to_string(s + 1) + ": "; }

// Number of leading nonzero entries of an ordering row after checking that
// nonzero entries are distinct, within 1..K, and form a prefix.
inline int validate_ordering_row(std::span<const int> row, std::size_t s) {
  const int K = static_cast<int>(row.size());
  std::vector<char> seen(K + 1, 0);
  int depth = 0;
  bool gap = false;
  for (int j = 0; j < K; ++j) {
    const int item = row[j];
    if (item == 0) {
      gap = true;
      continue;
    }
    if (item < 0 || item > K)
      throw ValidationError(row_context(s) + "item id " + std::to_string(item) +
                            " outside 1.." + std::to_string(K));
    if (gap) throw ValidationError(row_context(s) + "ranked items do not form a prefix");
    if (seen[item]) throw ValidationError(row_context(s) + "duplicate item " + std::to_string(item));
    seen[item] = 1;
    ++depth;
  }
  return depth;
}

// Largest rank t after checking that nonzero ranks are distinct and form {1..t}.
inline int validate_ranking_row(std::span<const int> row, std::size_t s) {
  const int K = static_cast<int>(row.size());
  std::vector<char> seen(K + 1, 0);
  int count = 0;
  int top = 0;
  for (int i = 0; i < K; ++i) {
    const int r = row[i];
    if (r == 0) continue;
    if (r < 0 || r > K)
      throw ValidationError(row_context(s) + "rank " + std::to_string(r) + " outside 1.." +
                            std::to_string(K));
    if (seen[r]) throw ValidationError(row_context(s) + "duplicate rank " + std::to_string(r));
    seen[r] = 1;
    ++count;
    top = std::max(top, r);
  }
  if (count != top)
    throw ValidationError(row_context(s) + "ranks do not form a contiguous set 1..t");
  return count;
}

}  // namespace detail

/// Validated sample of N partial top orderings over K items.
///
/// Rows ranking K-1 items are completed on construction with the single
/// remaining item, so every stored depth lies in {1, ..., K-2, K}.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(IntMatrix orderings) : rows_(std::move(orderings)) {
    detail::require(rows_.rows() >= 1, "dataset must contain at least one row");
    detail::require(rows_.cols() >= 2, "at least two items are required");
    const int K = num_items();
    nranked_.resize(rows_.rows());
    for (std::size_t s = 0; s < rows_.rows(); ++s) {
      auto row = rows_.row(s);
      int depth = detail::validate_ordering_row(row, s);
      if (depth == 0) throw ValidationError(detail::row_context(s) + "no ranked items");
      if (depth == K - 1) {
        std::vector<char> seen(K + 1, 0);
        for (int j = 0; j < depth; ++j) seen[row[j]] = 1;
        for (int item = 1; item <= K; ++item)
          if (!seen[item]) row[K - 1] = item;
        depth = K;
      }
      nranked_[s] = depth;
    }
  }

  static Dataset from_rankings(const IntMatrix& rankings);

  std::size_t size() const noexcept { return rows_.rows(); }
  int num_items() const noexcept { return static_cast<int>(rows_.cols()); }
  std::span<const int> row(std::size_t s) const noexcept { return rows_.row(s); }
  int nranked(std::size_t s) const noexcept { return nranked_[s]; }
  const std::vector<int>& nranked() const noexcept { return nranked_; }
  const IntMatrix& orderings() const noexcept { return rows_; }
  bool complete() const noexcept {
    return std::all_of(nranked_.begin(), nranked_.end(),
                       [&](int d) { return d == num_items(); });
  }

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.rows_ == b.rows_; }

 private:
  IntMatrix rows_;
  std::vector<int> nranked_;
};

/// Converts orderings to rankings or vice versa. `from` declares the format
/// of the input; the output is in the other one. Zero entries stay zero:
/// unranked items get rank 0 and unfilled positions get item 0.
inline IntMatrix ord_rank_switch(const IntMatrix& data, Format from) {
  const std::size_t K = data.cols();
  IntMatrix out(data.rows(), K, 0);
  for (std::size_t s = 0; s < data.rows(); ++s) {
    auto in = data.row(s);
    if (from == Format::ordering)
      detail::validate_ordering_row(in, s);
    else
      detail::validate_ranking_row(in, s);
    // Both directions are the same inverse-permutation scatter.
    for (std::size_t j = 0; j < K; ++j)
      if (in[j] != 0) out(s, in[j] - 1) = static_cast<int>(j + 1);
  }
  return out;
}

/// Rankings matrix (item i -> rank) of a dataset.
inline IntMatrix to_rankings(const Dataset& data) {
  return ord_rank_switch(data.orderings(), Format::ordering);
}

inline Dataset Dataset::from_rankings(const IntMatrix& rankings) {
  return Dataset(ord_rank_switch(rankings, Format::ranking));
}

struct FreqTable {
  IntMatrix sequences;
  std::vector<long long> counts;
};

/// Distinct rows with multiplicities, in lexicographic row order.
inline FreqTable unit_to_freq(const IntMatrix& data) {
  std::map<std::vector<int>, long long> tally;
  for (std::size_t s = 0; s < data.rows(); ++s) {
    auto r = data.row(s);
    ++tally[std::vector<int>(r.begin(), r.end())];
  }
  FreqTable out;
  out.sequences = IntMatrix(0, data.cols());
  for (const auto& [seq, count] : tally) {
    out.sequences.append_row(seq);
    out.counts.push_back(count);
  }
  return out;
}

inline FreqTable unit_to_freq(const Dataset& data) { return unit_to_freq(data.orderings()); }

/// Expands a frequency table, replicating each sequence in table order.
inline IntMatrix freq_to_unit(const FreqTable& freq) {
  detail::require(freq.counts.size() == freq.sequences.rows(),
                  "frequency table has " + std::to_string(freq.counts.size()) +
                      " counts for " + std::to_string(freq.sequences.rows()) + " sequences");
  IntMatrix out(0, freq.sequences.cols());
  for (std::size_t m = 0; m < freq.counts.size(); ++m) {
    if (freq.counts[m] <= 0)
      throw ValidationError("frequency table entry " + std::to_string(m + 1) +
                            " has nonpositive count " + std::to_string(freq.counts[m]));
    for (long long c = 0; c < freq.counts[m]; ++c) out.append_row(freq.sequences.row(m));
  }
  return out;
}

struct CensoredData {
  Dataset data;
  std::vector<int> nranked;
};

namespace detail {

inline void require_complete(const Dataset& data) {
  for (std::size_t s = 0; s < data.size(); ++s)
    if (data.nranked(s) != data.num_items())
      throw ValidationError(row_context(s) + "censoring requires complete orderings");
}

inline CensoredData truncate(const Dataset& data, const std::vector<int>& depths) {
  const int K = data.num_items();
  IntMatrix out = data.orderings();
  for (std::size_t s = 0; s < data.size(); ++s)
    for (int j = depths[s]; j < K; ++j) out(s, j) = 0;
  Dataset censored(std::move(out));
  auto realized = censored.nranked();
  return {std::move(censored), std::move(realized)};
}

}  // namespace detail

/// Deterministic censoring: row s keeps its top nranked[s] positions.
inline CensoredData make_partial(const Dataset& data, std::span<const int> nranked) {
  detail::require_complete(data);
  detail::require(nranked.size() == data.size(),
                  "nranked has length " + std::to_string(nranked.size()) + ", expected " +
                      std::to_string(data.size()));
  const int K = data.num_items();
  for (std::size_t s = 0; s < nranked.size(); ++s)
    if (nranked[s] < 1 || nranked[s] > K)
      throw ValidationError(detail::row_context(s) + "nranked " + std::to_string(nranked[s]) +
                            " outside 1.." + std::to_string(K));
  return detail::truncate(data, std::vector<int>(nranked.begin(), nranked.end()));
}

/// Stochastic censoring. probcens has K-1 entries: entry m (m = 1..K-2) is the
/// probability of a top-m truncation and the last entry is the probability of
/// keeping the row complete (top-(K-1) and complete orderings coincide).
inline CensoredData make_partial_random(const Dataset& data, std::span<const double> probcens,
                                        Rng& rng) {
  detail::require_complete(data);
  const int K = data.num_items();
  detail::require(probcens.size() == static_cast<std::size_t>(K - 1),
                  "probcens has length " + std::to_string(probcens.size()) + ", expected " +
                      std::to_string(K - 1));
  double total = 0.0;
  for (double p : probcens) {
    detail::require(p >= 0.0 && std::isfinite(p), "probcens entries must be nonnegative");
    total += p;
  }
  detail::require(std::abs(total - 1.0) <= 1e-8, "probcens must sum to 1");
  std::vector<int> depths(data.size());
  for (auto& d : depths) {
    const auto m = categorical(rng, probcens);
    d = (m + 1 == probcens.size()) ? K : static_cast<int>(m + 1);
  }
  return detail::truncate(data, depths);
}

namespace detail {

// Fills positions [from, K) of `row` with the items absent from its prefix,
// in Plackett-Luce order under `support`. Uses the exponential race: sorting
// the arrival times E_i / p_i is sequential sampling without replacement.
inline void complete_tail(std::span<int> row, int from, std::span<const double> support,
                          Rng& rng) {
  const int K = static_cast<int>(row.size());
  std::vector<char> used(K + 1, 0);
  for (int j = 0; j < from; ++j) used[row[j]] = 1;
  std::vector<std::pair<double, int>> arrivals;
  arrivals.reserve(K - from);
  for (int item = 1; item <= K; ++item)
    if (!used[item]) arrivals.emplace_back(exponential(rng, 1.0) / support[item - 1], item);
  std::sort(arrivals.begin(), arrivals.end());
  for (std::size_t k = 0; k < arrivals.size(); ++k) row[from + k] = arrivals[k].second;
}

}  // namespace detail

/// Completes every row by Plackett-Luce sampling of the unranked items with
/// the (unnormalized) supports `probitems`.
inline Dataset make_complete(const Dataset& data, std::span<const double> probitems, Rng& rng) {
  const int K = data.num_items();
  detail::require(probitems.size() == static_cast<std::size_t>(K),
                  "probitems has length " + std::to_string(probitems.size()) + ", expected " +
                      std::to_string(K));
  for (std::size_t i = 0; i < probitems.size(); ++i)
    if (!(probitems[i] > 0.0) || !std::isfinite(probitems[i]))
      throw ValidationError("probitems entry " + std::to_string(i + 1) + " must be positive");
  IntMatrix out = data.orderings();
  for (std::size_t s = 0; s < data.size(); ++s)
    if (data.nranked(s) < K) detail::complete_tail(out.row(s), data.nranked(s), probitems, rng);
  return Dataset(std::move(out));
}

/// tau(i, i'): number of units preferring item i to item i'. A ranked item is
/// preferred to every unranked one; two unranked items are not compared.
inline RealMatrix paired_comparisons(const Dataset& data) {
  const int K = data.num_items();
  Matrix<long long> counts(K, K, 0);
  std::vector<char> ranked(K);
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto row = data.row(s);
    const int n = data.nranked(s);
    std::fill(ranked.begin(), ranked.end(), 0);
    for (int j = 0; j < n; ++j) {
      const int a = row[j] - 1;
      ranked[a] = 1;
      for (int k = j + 1; k < n; ++k) ++counts(a, row[k] - 1);
    }
    for (int j = 0; j < n; ++j)
      for (int b = 0; b < K; ++b)
        if (!ranked[b]) ++counts(row[j] - 1, b);
  }
  RealMatrix tau(K, K, 0.0);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) tau(a, b) = static_cast<double>(counts(a, b));
  return tau;
}

struct RankSummaries {
  std::vector<int> nranked;
  std::map<int, long long> nranked_distr;  // depth -> number of units
  std::vector<long long> missing_pos;      // per item: units not ranking it
  std::vector<double> mean_rank;           // NaN for an item never ranked
  Matrix<long long> marginal_rank_distr;   // (rank r, item i) counts
  RealMatrix pairedcomparisons;
};

inline RankSummaries rank_summaries(const Dataset& data) {
  const int K = data.num_items();
  RankSummaries out;
  out.nranked = data.nranked();
  out.missing_pos.assign(K, 0);
  out.marginal_rank_distr = Matrix<long long>(K, K, 0);
  std::vector<double> rank_sum(K, 0.0);
  std::vector<long long> rank_count(K, 0);
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto row = data.row(s);
    const int n = data.nranked(s);
    ++out.nranked_distr[n];
    for (int j = 0; j < n; ++j) {
      const int item = row[j] - 1;
      ++out.marginal_rank_distr(j, item);
      rank_sum[item] += j + 1;
      ++rank_count[item];
    }
  }
  out.mean_rank.resize(K);
  for (int i = 0; i < K; ++i) {
    out.missing_pos[i] = static_cast<long long>(data.size()) - rank_count[i];
    out.mean_rank[i] = rank_count[i] ? rank_sum[i] / static_cast<double>(rank_count[i])
                                     : std::numeric_limits<double>::quiet_NaN();
  }
  out.pairedcomparisons = paired_comparisons(data);
  return out;
}

/// Most-liked item counts r_i (first row of the marginal rank distribution).
inline std::vector<double> top1_counts(const Dataset& data) {
  std::vector<double> r(data.num_items(), 0.0);
  for (std::size_t s = 0; s < data.size(); ++s) r[data.row(s)[0] - 1] += 1.0;
  return r;
}

/// One-hot N x G membership matrix from 1-based labels.
inline IntMatrix binary_group_ind(std::span<const int> labels, int G) {
  detail::require(G >= 1, "G must be at least 1");
  IntMatrix z(labels.size(), G, 0);
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (labels[s] < 1 || labels[s] > G)
      throw ValidationError("label " + std::to_string(labels[s]) + " at position " +
                            std::to_string(s + 1) + " outside 1.." + std::to_string(G));
    z(s, labels[s] - 1) = 1;
  }
  return z;
}

/// u_si incidence and gamma_i = sum_s u_si. The stage indicators delta_sti
/// are not materialized; see available_items().
struct SufficientStats {
  Matrix<std::uint8_t> u;
  std::vector<double> gamma;
};

inline SufficientStats sufficient_stats(const Dataset& data) {
  const int K = data.num_items();
  SufficientStats st{Matrix<std::uint8_t>(data.size(), K, 0), std::vector<double>(K, 0.0)};
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto row = data.row(s);
    for (int j = 0; j < data.nranked(s); ++j) {
      st.u(s, row[j] - 1) = 1;
      st.gamma[row[j] - 1] += 1.0;
    }
  }
  return st;
}

/// Items (1-based) still available at stage t (1-based) for unit s, i.e. the
/// i with delta_sti = 1.
inline std::vector<int> available_items(const Dataset& data, std::size_t s, int t) {
  const int K = data.num_items();
  detail::require(t >= 1 && t <= data.nranked(s), "stage outside 1..n_s");
  std::vector<char> taken(K + 1, 0);
  const auto row = data.row(s);
  for (int j = 0; j < t - 1; ++j) taken[row[j]] = 1;
  std::vector<int> out;
  for (int item = 1; item <= K; ++item)
    if (!taken[item]) out.push_back(item);
  return out;
}

}  // namespace plmix
