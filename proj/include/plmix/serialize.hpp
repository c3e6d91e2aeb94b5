#pragma once

// JSON documents for MAP fits, summaries and model-assessment reports, plus
// CSV tables for the reports. Requires nlohmann/json (json.hpp).

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "plmix/assessment.hpp"
#include "plmix/em_map.hpp"
#include "plmix/io.hpp"
#include "plmix/rank_data.hpp"
#include "plmix/selection.hpp"

namespace plmix {

using Json = nlohmann::ordered_json;

namespace detail {

template <class T>
Json matrix_json(const Matrix<T>& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(std::vector<T>(m.row(r).begin(), m.row(r).end()));
  return out;
}

inline RealMatrix real_matrix_from_json(const Json& j, const std::string& what) {
  detail::require(j.is_array() && !j.empty(), "'" + what + "' must be a nonempty array of rows");
  RealMatrix m;
  for (const auto& row : j) {
    detail::require(row.is_array(), "'" + what + "' rows must be arrays");
    const auto v = row.get<std::vector<double>>();
    detail::require(m.rows() == 0 || v.size() == m.cols(), "'" + what + "' rows differ in length");
    m.append_row(v);
  }
  return m;
}

// NaN is not representable in JSON; map it to null.
inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace detail

inline Json hyperparams_json(const Hyperparams& h) {
  return Json{{"shape", detail::matrix_json(h.shape)}, {"rate", h.rate}, {"alpha", h.alpha}};
}

/// P_map and W_map are normalized; P_raw keeps the unnormalized supports so
/// that a fit can be reloaded exactly.
inline Json map_fit_json(const MapFit& fit) {
  const NormalizedParams n = fit.normalized();
  Json j;
  j["G"] = fit.params.num_components();
  j["K"] = fit.params.num_items();
  j["P_map"] = detail::matrix_json(n.supports);
  j["W_map"] = n.weights;
  j["P_raw"] = detail::matrix_json(fit.params.supports);
  j["W_raw"] = fit.params.weights;
  j["loglik"] = fit.loglik;
  j["log_post"] = fit.log_post.empty() ? Json(nullptr) : Json(fit.log_post.back());
  j["bic"] = fit.bic ? Json(*fit.bic) : Json(nullptr);
  j["converged"] = fit.converged;
  j["n_iter"] = fit.n_iter;
  j["log_post_trace"] = fit.log_post;
  j["class_map"] = fit.class_map;
  j["warnings"] = fit.warnings;
  return j;
}

inline Json map_fit_json(const MultistartFit& fit) {
  Json j = map_fit_json(fit.best);
  j["best_start"] = fit.best_start + 1;
  j["final_log_post"] = fit.final_log_post;
  return j;
}

/// Parameters stored by map_fit_json; prefers the raw supports and weights.
inline MixtureParams map_params_from_json(const Json& j) {
  try {
    MixtureParams p;
    if (j.contains("P_raw")) {
      p.supports = detail::real_matrix_from_json(j.at("P_raw"), "P_raw");
      p.weights = j.at("W_raw").get<std::vector<double>>();
    } else {
      p.supports = detail::real_matrix_from_json(j.at("P_map"), "P_map");
      p.weights = j.at("W_map").get<std::vector<double>>();
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed MAP document: ") + e.what());
  }
}

inline std::vector<int> map_class_from_json(const Json& j) {
  try {
    return j.at("class_map").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed MAP document: ") + e.what());
  }
}

inline Json read_json(std::istream& in, const std::string& what) {
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse " + what + " as JSON: " + e.what());
  }
}

inline Json load_json(const std::string& path) {
  auto in = detail::open_input(path);
  return read_json(in, "'" + path + "'");
}

inline Json summaries_json(const RankSummaries& s) {
  Json distr = Json::object();
  for (const auto& [depth, count] : s.nranked_distr) distr[std::to_string(depth)] = count;
  Json mean_rank = Json::array();
  for (double v : s.mean_rank) mean_rank.push_back(detail::number_or_null(v));
  return Json{{"N", s.nranked.size()},
              {"K", s.missing_pos.size()},
              {"nranked_distr", distr},
              {"missing_positions", s.missing_pos},
              {"mean_rank", mean_rank},
              {"marginal_rank_distr", detail::matrix_json(s.marginal_rank_distr)},
              {"paired_comparisons", detail::matrix_json(s.pairedcomparisons)}};
}

inline Json selection_json(const SelectionReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows)
    rows.push_back(Json{{"G", r.G},
                        {"D_bar", r.D_bar},
                        {"D_map", r.D_map},
                        {"var_D", r.var_D},
                        {"DIC1", r.DIC1},
                        {"DIC2", r.DIC2},
                        {"BPIC1", r.BPIC1},
                        {"BPIC2", r.BPIC2},
                        {"BICM1", r.BICM1},
                        {"BICM2", r.BICM2},
                        {"negative_complexity", r.negative_complexity}});
  return rows;
}

inline void write_selection_csv(std::ostream& out, const SelectionReport& report) {
  out << "G,D_bar,D_map,var_D,DIC1,DIC2,BPIC1,BPIC2,BICM1,BICM2\n";
  for (const auto& r : report.rows) {
    out << r.G;
    for (double v : {r.D_bar, r.D_map, r.var_D, r.DIC1, r.DIC2, r.BPIC1, r.BPIC2, r.BICM1, r.BICM2})
      out << ',' << detail::format_double(v);
    out << '\n';
  }
}

inline Json ppcheck_json(const PpcheckResult& result) {
  Json rows = Json::array();
  for (std::size_t k = 0; k < result.unconditional.rows.size(); ++k) {
    const auto& u = result.unconditional.rows[k];
    const auto& c = result.conditional.rows[k];
    rows.push_back(Json{{"G", u.G},
                        {"post_pred_pvalue_top1", u.top1},
                        {"post_pred_pvalue_paired", u.paired},
                        {"post_pred_pvalue_top1_cond", c.top1},
                        {"post_pred_pvalue_paired_cond", c.paired}});
  }
  return rows;
}

inline void write_ppcheck_csv(std::ostream& out, const PpcheckResult& result) {
  out << "G,post_pred_pvalue_top1,post_pred_pvalue_paired,post_pred_pvalue_top1_cond,"
         "post_pred_pvalue_paired_cond\n";
  for (std::size_t k = 0; k < result.unconditional.rows.size(); ++k) {
    const auto& u = result.unconditional.rows[k];
    const auto& c = result.conditional.rows[k];
    out << u.G << ',' << detail::format_double(u.top1) << ',' << detail::format_double(u.paired)
        << ',' << detail::format_double(c.top1) << ',' << detail::format_double(c.paired) << '\n';
  }
}

}  // namespace plmix
