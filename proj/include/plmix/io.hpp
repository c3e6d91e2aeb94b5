#pragma once

// Text formats: integer CSV matrices (orderings, rankings, frequency tables),
// PrefLib SOC/SOI preference files, and CSV traces of Gibbs chains.

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "plmix/error.hpp"
#include "plmix/gibbs.hpp"
#include "plmix/matrix.hpp"
#include "plmix/rank_data.hpp"
#include "plmix/relabel.hpp"

namespace plmix {

enum class InputFormat { csv_ordering, csv_ranking, preflib };

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

inline std::string slurp(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Integer CSV with an optional header line (detected when any field of the
/// first line is not an integer).
inline IntMatrix read_int_csv(std::istream& in) {
  IntMatrix m;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto fields = detail::split(body, ',');
    std::vector<int> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (auto f : fields) {
      auto v = detail::parse_number<int>(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw ValidationError("line " + std::to_string(lineno) + ": non-integer field");
    }
    first = false;
    if (m.rows() > 0 && row.size() != m.cols())
      throw ValidationError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(m.cols()) + " fields, found " +
                            std::to_string(row.size()));
    m.append_row(row);
  }
  return m;
}

inline void write_int_csv(std::ostream& out, const IntMatrix& m, const std::string& column_prefix) {
  for (std::size_t j = 0; j < m.cols(); ++j)
    out << (j ? "," : "") << column_prefix << (j + 1);
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(r, j);
    out << '\n';
  }
}

/// Pads a matrix with zero columns up to K, or rejects it when wider.
inline IntMatrix with_num_items(const IntMatrix& m, std::optional<int> K) {
  if (!K || static_cast<std::size_t>(*K) == m.cols()) return m;
  detail::require(*K > 0 && static_cast<std::size_t>(*K) > m.cols(),
                  "K = " + std::to_string(*K) + " is smaller than the " +
                      std::to_string(m.cols()) + " data columns");
  IntMatrix out(m.rows(), *K, 0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    std::copy(m.row(r).begin(), m.row(r).end(), out.row(r).begin());
  return out;
}

/// Frequency table CSV: K sequence columns followed by a count column.
inline FreqTable read_freq_csv(std::istream& in) {
  const IntMatrix m = read_int_csv(in);
  detail::require(m.cols() >= 2, "frequency table needs sequence columns and a count column");
  FreqTable t{IntMatrix(0, m.cols() - 1), {}};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    t.sequences.append_row(m.row(r).first(m.cols() - 1));
    t.counts.push_back(m(r, m.cols() - 1));
  }
  return t;
}

inline void write_freq_csv(std::ostream& out, const FreqTable& t) {
  const std::size_t K = t.sequences.cols();
  for (std::size_t j = 0; j < K; ++j) out << "x" << (j + 1) << ',';
  out << "count\n";
  for (std::size_t r = 0; r < t.sequences.rows(); ++r) {
    for (std::size_t j = 0; j < K; ++j) out << t.sequences(r, j) << ',';
    out << t.counts[r] << '\n';
  }
}

// ---------------------------------------------------------------------------
// PrefLib

namespace detail {

inline void expand_preference(std::string_view count_text, std::string_view items_text,
                              std::size_t lineno, std::vector<std::pair<long long, std::vector<int>>>& out) {
  const auto count = parse_number<long long>(count_text);
  if (!count || *count < 1)
    throw ValidationError("line " + std::to_string(lineno) + ": malformed count '" +
                          std::string(count_text) + "'");
  if (items_text.find('{') != std::string_view::npos)
    throw ValidationError("line " + std::to_string(lineno) + ": tied preferences are not supported");
  std::vector<int> items;
  for (auto f : split(items_text, ',')) {
    auto v = parse_number<int>(f);
    if (!v) throw ValidationError("line " + std::to_string(lineno) + ": malformed item id '" +
                                  std::string(f) + "'");
    items.push_back(*v);
  }
  out.emplace_back(*count, std::move(items));
}

inline std::optional<int> metadata_int(std::string_view line, std::string_view key) {
  const auto pos = line.find(key);
  if (pos == std::string_view::npos) return std::nullopt;
  auto rest = line.substr(pos + key.size());
  const auto colon = rest.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  return parse_number<int>(rest.substr(colon + 1));
}

}  // namespace detail

/// Parses PrefLib SOC/SOI text. Both the current layout (`#` metadata lines,
/// then `count: i1,i2,...`) and the legacy layout (candidate count, names,
/// totals line, then `count,i1,i2,...`) are accepted. Each preference line
/// expands to `count` unit rows; `K` overrides the declared number of items.
inline Dataset parse_preflib(std::string_view text, std::optional<int> K = std::nullopt) {
  std::vector<std::string_view> lines;
  for (auto l : detail::split(text, '\n'))
    if (!l.empty()) lines.push_back(l);
  detail::require(!lines.empty(), "empty PrefLib input");

  std::optional<int> declared;
  std::vector<std::pair<long long, std::vector<int>>> prefs;
  std::vector<std::size_t> line_numbers;
  if (lines.front().front() == '#' || lines.front().find(':') != std::string_view::npos) {
    std::size_t lineno = 0;
    for (auto l : detail::split(text, '\n')) {
      ++lineno;
      if (l.empty()) continue;
      if (l.front() == '#') {
        if (auto v = detail::metadata_int(l, "NUMBER ALTERNATIVES")) declared = *v;
        continue;
      }
      const auto colon = l.find(':');
      if (colon == std::string_view::npos)
        throw ValidationError("line " + std::to_string(lineno) + ": expected 'count: items'");
      detail::expand_preference(l.substr(0, colon), l.substr(colon + 1), lineno, prefs);
      line_numbers.push_back(lineno);
    }
  } else {
    declared = detail::parse_number<int>(lines[0]);
    if (!declared || *declared < 1) throw ValidationError("line 1: malformed candidate count");
    const std::size_t first_pref = static_cast<std::size_t>(*declared) + 2;
    detail::require(lines.size() >= first_pref, "truncated legacy PrefLib header");
    for (std::size_t k = first_pref; k < lines.size(); ++k) {
      const auto comma = lines[k].find(',');
      if (comma == std::string_view::npos)
        throw ValidationError("preference line " + std::to_string(k + 1) + ": expected 'count,items'");
      detail::expand_preference(lines[k].substr(0, comma), lines[k].substr(comma + 1), k + 1, prefs);
      line_numbers.push_back(k + 1);
    }
  }
  detail::require(!prefs.empty(), "PrefLib input contains no preferences");

  int num_items = K ? *K : declared ? *declared : 0;
  if (num_items == 0)
    for (const auto& [c, items] : prefs)
      for (int v : items) num_items = std::max(num_items, v);
  IntMatrix rows(0, num_items);
  std::vector<int> row(num_items);
  for (std::size_t k = 0; k < prefs.size(); ++k) {
    const auto& items = prefs[k].second;
    const std::string where = "line " + std::to_string(line_numbers[k]) + ": ";
    if (items.size() > static_cast<std::size_t>(num_items))
      throw ValidationError(where + "more items than the " + std::to_string(num_items) + " declared");
    std::vector<char> seen(num_items + 1, 0);
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t j = 0; j < items.size(); ++j) {
      const int v = items[j];
      if (v < 1 || v > num_items)
        throw ValidationError(where + "item id " + std::to_string(v) + " outside 1.." +
                              std::to_string(num_items));
      if (seen[v]) throw ValidationError(where + "duplicate item " + std::to_string(v));
      seen[v] = 1;
      row[j] = v;
    }
    for (long long c = 0; c < prefs[k].first; ++c) rows.append_row(row);
  }
  return Dataset(std::move(rows));
}

/// Writes a dataset as PrefLib text, grouping runs of identical consecutive
/// rows so that parsing reproduces the row order exactly.
inline void write_preflib(std::ostream& out, const Dataset& data) {
  const int K = data.num_items();
  std::size_t runs = 0;
  for (std::size_t s = 0; s < data.size(); ++s)
    if (s == 0 || !std::equal(data.row(s).begin(), data.row(s).end(), data.row(s - 1).begin())) ++runs;
  out << "# DATA TYPE: " << (data.complete() ? "soc" : "soi") << '\n'
      << "# NUMBER ALTERNATIVES: " << K << '\n'
      << "# NUMBER VOTERS: " << data.size() << '\n'
      << "# NUMBER UNIQUE ORDERS: " << runs << '\n';
  std::size_t s = 0;
  while (s < data.size()) {
    std::size_t e = s + 1;
    while (e < data.size() && std::equal(data.row(e).begin(), data.row(e).end(), data.row(s).begin())) ++e;
    out << (e - s) << ": ";
    for (int j = 0; j < data.nranked(s); ++j) out << (j ? "," : "") << data.row(s)[j];
    out << '\n';
    s = e;
  }
}

// ---------------------------------------------------------------------------
// Datasets

inline Dataset read_dataset(std::istream& in, InputFormat format, std::optional<int> K = std::nullopt) {
  switch (format) {
    case InputFormat::preflib:
      return parse_preflib(detail::slurp(in), K);
    case InputFormat::csv_ordering:
      return Dataset(with_num_items(read_int_csv(in), K));
    case InputFormat::csv_ranking:
      return Dataset::from_rankings(with_num_items(read_int_csv(in), K));
  }
  throw ValidationError("unknown input format");
}

inline Dataset load_dataset(const std::string& path, InputFormat format,
                            std::optional<int> K = std::nullopt) {
  auto in = detail::open_input(path);
  return read_dataset(in, format, K);
}

inline void write_dataset(std::ostream& out, const Dataset& data, InputFormat format) {
  switch (format) {
    case InputFormat::preflib:
      write_preflib(out, data);
      return;
    case InputFormat::csv_ordering:
      write_int_csv(out, data.orderings(), "rank");
      return;
    case InputFormat::csv_ranking:
      write_int_csv(out, to_rankings(data), "item");
      return;
  }
}

// ---------------------------------------------------------------------------
// Chain traces

/// One row per kept sweep: p_g_i in g-major order, then w_g, log_lik, deviance.
inline void write_chain_csv(std::ostream& out, const GibbsChain& chain) {
  const std::size_t G = chain.num_components;
  const int K = chain.num_items;
  for (std::size_t g = 0; g < G; ++g)
    for (int i = 0; i < K; ++i) out << "p_" << (g + 1) << '_' << (i + 1) << ',';
  for (std::size_t g = 0; g < G; ++g) out << "w_" << (g + 1) << ',';
  out << "log_lik,deviance\n";
  for (std::size_t l = 0; l < chain.length(); ++l) {
    for (double v : chain.P.row(l)) out << detail::format_double(v) << ',';
    for (double v : chain.W.row(l)) out << detail::format_double(v) << ',';
    out << detail::format_double(chain.log_lik[l]) << ',' << detail::format_double(chain.deviance[l])
        << '\n';
  }
}

inline GibbsChain read_chain_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty chain file");
  const auto header = detail::split(detail::trim(line), ',');
  std::size_t n_p = 0, n_w = 0;
  int K = 0;
  for (auto h : header) {
    if (h.starts_with("p_")) {
      ++n_p;
      const auto parts = detail::split(h.substr(2), '_');
      if (parts.size() == 2)
        if (auto i = detail::parse_number<int>(parts[1])) K = std::max(K, *i);
    } else if (h.starts_with("w_")) {
      ++n_w;
    }
  }
  detail::require(n_w >= 1 && K >= 2 && n_p == n_w * static_cast<std::size_t>(K) &&
                      header.size() == n_p + n_w + 2 && header[n_p + n_w] == "log_lik" &&
                      header[n_p + n_w + 1] == "deviance",
                  "chain header must be p_g_i..., w_g..., log_lik, deviance");
  GibbsChain chain;
  chain.num_components = n_w;
  chain.num_items = K;
  chain.P = RealMatrix(0, n_p);
  chain.W = RealMatrix(0, n_w);
  std::size_t lineno = 1;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(detail::trim(line), ',');
    if (fields.size() != header.size())
      throw ValidationError("chain line " + std::to_string(lineno) + ": wrong field count");
    values.clear();
    for (auto f : fields) {
      auto v = detail::parse_number<double>(f);
      if (!v) throw ValidationError("chain line " + std::to_string(lineno) + ": bad number");
      values.push_back(*v);
    }
    chain.P.append_row(std::span<const double>(values).first(n_p));
    chain.W.append_row(std::span<const double>(values).subspan(n_p, n_w));
    chain.log_lik.push_back(values[n_p + n_w]);
    chain.deviance.push_back(values[n_p + n_w + 1]);
  }
  chain.n_iter = static_cast<int>(chain.length());
  return chain;
}

inline GibbsChain load_chain(const std::string& path) {
  auto in = detail::open_input(path);
  return read_chain_csv(in);
}

inline void write_permutations_csv(std::ostream& out,
                                   const std::vector<std::vector<int>>& permutations) {
  const std::size_t G = permutations.empty() ? 0 : permutations.front().size();
  out << "draw";
  for (std::size_t g = 0; g < G; ++g) out << ",component_" << (g + 1);
  out << '\n';
  for (std::size_t l = 0; l < permutations.size(); ++l) {
    out << (l + 1);
    for (int v : permutations[l]) out << ',' << (v + 1);
    out << '\n';
  }
}

}  // namespace plmix
