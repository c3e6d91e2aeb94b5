// Command-line front end: convert, summarize, simulate, fit-map, fit-gibbs,
// select, ppcheck, relabel.
//
// With --out DIR the machine-readable results are written to files in DIR and
// a human summary goes to stdout; without it the primary result goes to
// stdout and the summary to stderr. Every flag can also be set through an
// environment variable PLMIX_<FLAG> (e.g. PLMIX_SEED) or a config file.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plmix/plmix.hpp"
#include "plmix/serialize.hpp"

namespace fs = std::filesystem;
using namespace plmix;

namespace {

struct RunConfig {
  std::string input;
  std::string format = "csv-ordering";
  std::optional<int> K;
  std::optional<int> G;
  std::optional<int> G_max;
  int n_start = 1;
  int max_iter = 0;
  double tol = 1e-6;
  int n_iter = 22000;
  int n_burn = 2000;
  std::optional<std::uint64_t> seed;
  std::optional<double> shape, rate, alpha;
  bool centered_start = false;
  unsigned parallel = default_threads();
  std::string out;
  std::string init_from;
  std::vector<std::string> maps, chains;
  // convert
  std::string to;
  // simulate
  std::size_t n = 0;
  std::string supports, weights, params_file;
  std::vector<double> probcens;
  // select
  std::string post_summary = "map";
};

std::string env_name(std::string flag) {
  flag.erase(0, flag.find_first_not_of('-'));
  for (char& c : flag) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return "PLMIX_" + flag;
}

template <class T>
CLI::Option* flag_option(CLI::App* app, const std::string& name, T& target, const std::string& help) {
  return app->add_option(name, target, help)->envname(env_name(name));
}

InputFormat parse_format(const std::string& f) {
  if (f == "csv-ordering" || f == "ordering") return InputFormat::csv_ordering;
  if (f == "csv-ranking" || f == "ranking") return InputFormat::csv_ranking;
  if (f == "preflib") return InputFormat::preflib;
  throw ValidationError("unknown format '" + f + "' (csv-ordering, csv-ranking, preflib)");
}

Dataset input_dataset(const RunConfig& cfg) {
  detail::require(!cfg.input.empty(), "--input is required");
  return load_dataset(cfg.input, parse_format(cfg.format), cfg.K);
}

std::uint64_t required_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw ValidationError("--seed is required for stochastic commands");
  return *cfg.seed;
}

std::vector<int> g_values(const RunConfig& cfg) {
  detail::require(cfg.G.has_value() != cfg.G_max.has_value(), "give exactly one of --G and --G-max");
  const int hi = cfg.G ? *cfg.G : *cfg.G_max;
  detail::require(hi >= 1, "the number of components must be at least 1");
  std::vector<int> out;
  for (int g = cfg.G ? hi : 1; g <= hi; ++g) out.push_back(g);
  return out;
}

Hyperparams hyperparams(const RunConfig& cfg, int G, int K) {
  return Hyperparams::constant(G, K, cfg.shape.value_or(1.0), cfg.rate.value_or(0.0),
                               cfg.alpha.value_or(1.0));
}

// Results go either to files in --out or to stdout; the summary goes to the
// other stream.
class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {
    if (!dir_.empty()) {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw IoError("cannot create output directory '" + dir_ + "': " + ec.message());
    }
  }

  bool to_files() const { return !dir_.empty(); }
  std::ostream& summary() { return to_files() ? std::cout : std::cerr; }

  template <class Writer>
  void artifact(const std::string& filename, Writer&& write, bool primary = true) {
    if (!to_files()) {
      if (primary) write(std::cout);
      return;
    }
    const std::string path = (fs::path(dir_) / filename).string();
    auto out = detail::open_output(path);
    write(out);
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
    written_.push_back(path);
  }

  void json(const std::string& filename, const Json& j, bool primary = true) {
    artifact(filename, [&](std::ostream& os) { os << j.dump(2) << '\n'; }, primary);
  }

  void list_written() {
    for (const auto& p : written_) summary() << "wrote " << p << '\n';
  }

 private:
  std::string dir_;
  std::vector<std::string> written_;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (auto f : detail::split(text, ',')) {
    auto v = detail::parse_number<double>(f);
    if (!v) throw ValidationError("malformed number '" + std::string(f) + "' in " + what);
    out.push_back(*v);
  }
  return out;
}

void print_matrix(std::ostream& os, const RealMatrix& m, const std::string& row_label) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << "  " << row_label << ' ' << (r + 1) << ':';
    for (double v : m.row(r)) os << ' ' << std::fixed << std::setprecision(4) << v;
    os << '\n';
  }
  os.unsetf(std::ios::floatfield);
  os << std::setprecision(6);
}

// ---------------------------------------------------------------------------

void run_convert(const RunConfig& cfg) {
  const InputFormat from = parse_format(cfg.format);
  detail::require(!cfg.input.empty(), "--input is required");
  std::string to = cfg.to;
  if (to.empty()) to = from == InputFormat::csv_ordering ? "csv-ranking" : "csv-ordering";
  Output out(cfg.out);
  if (to == "freq") {
    // raw matrix aggregation keeps the declared format of the rows
    IntMatrix rows;
    if (from == InputFormat::preflib) {
      rows = load_dataset(cfg.input, from, cfg.K).orderings();
    } else {
      auto in = detail::open_input(cfg.input);
      rows = with_num_items(read_int_csv(in), cfg.K);
      if (from == InputFormat::csv_ranking)
        (void)Dataset::from_rankings(rows);  // validation only
      else
        rows = Dataset(rows).orderings();
    }
    const FreqTable t = unit_to_freq(rows);
    out.artifact("freq.csv", [&](std::ostream& os) { write_freq_csv(os, t); });
    out.summary() << t.sequences.rows() << " distinct sequences over " << rows.rows() << " units\n";
  } else {
    const Dataset d = load_dataset(cfg.input, from, cfg.K);
    const InputFormat target = parse_format(to);
    const std::string name = target == InputFormat::preflib ? "converted.soi" : "converted.csv";
    out.artifact(name, [&](std::ostream& os) { write_dataset(os, d, target); });
    out.summary() << "converted " << d.size() << " units over K = " << d.num_items() << " items to "
                  << to << '\n';
  }
  out.list_written();
}

void run_summarize(const RunConfig& cfg) {
  const Dataset d = input_dataset(cfg);
  const RankSummaries s = rank_summaries(d);
  Output out(cfg.out);
  out.json("summary.json", summaries_json(s));
  auto& os = out.summary();
  os << "N = " << d.size() << ", K = " << d.num_items() << '\n' << "depth distribution:";
  for (const auto& [depth, count] : s.nranked_distr) os << "  top-" << depth << ": " << count;
  os << "\nmissing positions:";
  for (auto v : s.missing_pos) os << ' ' << v;
  os << "\nmean rank:";
  for (double v : s.mean_rank) os << ' ' << v;
  os << '\n';
  out.list_written();
}

MixtureParams simulation_params(const RunConfig& cfg) {
  if (!cfg.params_file.empty()) return map_params_from_json(load_json(cfg.params_file));
  detail::require(!cfg.supports.empty(), "give --supports (rows separated by ';') or --params");
  MixtureParams p;
  for (auto row : detail::split(cfg.supports, ';')) {
    const auto v = parse_list(std::string(row), "--supports");
    detail::require(p.supports.rows() == 0 || v.size() == p.supports.cols(),
                    "--supports rows differ in length");
    p.supports.append_row(v);
  }
  const std::size_t G = p.supports.rows();
  if (cfg.weights.empty()) {
    p.weights.assign(G, 1.0 / static_cast<double>(G));
  } else {
    p.weights = parse_list(cfg.weights, "--weights");
    detail::require(p.weights.size() == G, "--weights needs one entry per support row");
  }
  p.validate();
  return p;
}

void run_simulate(const RunConfig& cfg) {
  const std::uint64_t seed = required_seed(cfg);
  detail::require(cfg.n >= 1, "--N must be at least 1");
  const MixtureParams params = simulation_params(cfg);
  Rng rng = make_stream(seed);
  const SimulatedSample sample = sample_plmix(cfg.n, params, rng);
  Dataset data(sample.orderings);
  if (!cfg.probcens.empty()) data = make_partial_random(data, cfg.probcens, rng).data;
  Output out(cfg.out);
  out.artifact("data.csv", [&](std::ostream& os) { write_int_csv(os, data.orderings(), "rank"); });
  out.artifact(
      "components.csv",
      [&](std::ostream& os) {
        os << "component\n";
        for (int c : sample.components) os << c << '\n';
      },
      false);
  out.summary() << "simulated " << cfg.n << " orderings of K = " << params.num_items()
                << " items from G = " << params.num_components() << " components (seed " << seed
                << ")\n";
  out.list_written();
}

void run_fit_map(const RunConfig& cfg) {
  const std::uint64_t seed = required_seed(cfg);
  const Dataset d = input_dataset(cfg);
  const int K = d.num_items();
  const auto gs = g_values(cfg);
  Output out(cfg.out);
  Json all = Json::array();
  for (int G : gs) {
    const MultistartFit fit =
        fit_map_multistart(d, G, cfg.n_start, cfg.centered_start, hyperparams(cfg, G, K),
                           {cfg.max_iter, cfg.tol}, seed, cfg.parallel);
    const Json doc = map_fit_json(fit);
    if (gs.size() > 1 || out.to_files()) out.json("map_G" + std::to_string(G) + ".json", doc, gs.size() == 1);
    all.push_back(doc);
    auto& os = out.summary();
    os << "G = " << G << ": log-posterior " << std::setprecision(10) << fit.best.log_post.back()
       << ", log-likelihood " << fit.best.loglik;
    if (fit.best.bic) os << ", BIC " << *fit.best.bic;
    os << std::setprecision(6) << (fit.best.converged ? ", converged" : ", NOT converged") << " after "
       << fit.best.n_iter << " iterations (best of " << cfg.n_start << " starts)\n";
    print_matrix(os, fit.best.normalized().supports, "component");
    os << "  weights:";
    for (double w : fit.best.normalized().weights) os << ' ' << w;
    os << '\n';
    for (const auto& w : fit.best.warnings) os << "  warning: " << w << '\n';
  }
  if (gs.size() > 1 && !out.to_files()) std::cout << all.dump(2) << '\n';
  else if (out.to_files()) out.json("map.json", gs.size() > 1 ? all : all[0], false);
  out.list_written();
}

// MAP document for a given G: either a single document or one entry of an
// array of documents.
Json map_document_for(const Json& j, int G, const std::string& path) {
  if (j.is_array()) {
    for (const auto& doc : j)
      if (doc.value("G", 0) == G) return doc;
    throw ValidationError("'" + path + "' has no fit with G = " + std::to_string(G));
  }
  detail::require(j.value("G", 0) == G, "'" + path + "' holds a fit with G = " +
                                            std::to_string(j.value("G", 0)) + ", not " +
                                            std::to_string(G));
  return j;
}

void run_fit_gibbs(const RunConfig& cfg) {
  const std::uint64_t seed = required_seed(cfg);
  const Dataset d = input_dataset(cfg);
  const int K = d.num_items();
  const auto gs = g_values(cfg);
  detail::require(gs.size() == 1 || !cfg.out.empty(), "--G-max requires --out for the chain files");

  std::vector<std::optional<GibbsInit>> inits(gs.size());
  if (!cfg.init_from.empty()) {
    const Json j = load_json(cfg.init_from);
    for (std::size_t k = 0; k < gs.size(); ++k) {
      const Json doc = map_document_for(j, gs[k], cfg.init_from);
      const MixtureParams p = map_params_from_json(doc);
      const auto labels = map_class_from_json(doc);
      detail::require(p.num_items() == K, "initial fit has a different K");
      detail::require(labels.size() == d.size(), "initial classification has " +
                                                     std::to_string(labels.size()) +
                                                     " units, data has " + std::to_string(d.size()));
      inits[k] = GibbsInit{p.supports, binary_group_ind(labels, gs[k])};
    }
  }

  std::vector<GibbsChain> chains(gs.size());
  parallel_for(gs.size(), cfg.parallel, [&](std::size_t k) {
    chains[k] = gibbs_run(d, gs[k], hyperparams(cfg, gs[k], K), inits[k], {cfg.n_iter, cfg.n_burn}, seed);
  });

  Output out(cfg.out);
  for (std::size_t k = 0; k < gs.size(); ++k) {
    const GibbsChain& c = chains[k];
    const std::string tag = "_G" + std::to_string(gs[k]);
    out.artifact("chain" + tag + ".csv", [&](std::ostream& os) { write_chain_csv(os, c); });
    const MixtureParams mean = posterior_mean(c);
    double mean_dev = 0.0;
    for (double v : c.deviance) mean_dev += v;
    mean_dev /= static_cast<double>(c.length());
    Json summary{{"G", gs[k]},
                 {"K", K},
                 {"N", d.size()},
                 {"seed", c.seed},
                 {"n_iter", c.n_iter},
                 {"n_burn", c.n_burn},
                 {"hyper", hyperparams_json(hyperparams(cfg, gs[k], K))},
                 {"init", inits[k] ? Json{{"supports", detail::matrix_json(inits[k]->supports)},
                                          {"z", detail::matrix_json(inits[k]->z)}}
                                   : Json(nullptr)},
                 {"posterior_mean_P", detail::matrix_json(mean.supports)},
                 {"posterior_mean_W", mean.weights},
                 {"mean_deviance", mean_dev}};
    out.json("gibbs" + tag + ".json", summary, false);
    auto& os = out.summary();
    os << "G = " << gs[k] << ": " << c.length() << " draws kept (" << c.n_iter << " sweeps, "
       << c.n_burn << " burn-in, seed " << c.seed << "), mean deviance " << std::setprecision(10)
       << mean_dev << std::setprecision(6) << '\n';
    print_matrix(os, mean.supports, "posterior mean, component");
  }
  out.list_written();
}

void run_select(const RunConfig& cfg) {
  const Dataset d = input_dataset(cfg);
  detail::require(!cfg.chains.empty(), "--chain is required");
  std::vector<GibbsChain> chains;
  for (const auto& path : cfg.chains) chains.push_back(load_chain(path));
  std::vector<MixtureParams> estimates;
  if (cfg.post_summary == "map") {
    detail::require(cfg.maps.size() == chains.size(), "give one --map per --chain");
    for (std::size_t k = 0; k < chains.size(); ++k) {
      const Json doc = map_document_for(load_json(cfg.maps[k]),
                                        static_cast<int>(chains[k].num_components), cfg.maps[k]);
      estimates.push_back(map_params_from_json(doc));
    }
  } else {
    detail::require(cfg.post_summary == "mean" || cfg.post_summary == "median",
                    "--post-summary must be map, mean or median");
    const auto kind = cfg.post_summary == "mean" ? PosteriorSummary::mean : PosteriorSummary::median;
    for (const auto& c : chains) estimates.push_back(posterior_point_estimate(c, kind));
  }
  std::vector<std::vector<double>> deviances;
  for (const auto& c : chains) deviances.push_back(c.deviance);
  const SelectionReport report = selection_criteria(deviances, estimates, d);

  Output out(cfg.out);
  out.json("selection.json", selection_json(report));
  out.artifact("selection.csv", [&](std::ostream& os) { write_selection_csv(os, report); }, false);
  auto& os = out.summary();
  os << std::setw(3) << "G";
  for (const char* h : {"DIC1", "DIC2", "BPIC1", "BPIC2", "BICM1", "BICM2"}) os << std::setw(14) << h;
  os << '\n' << std::fixed << std::setprecision(2);
  for (const auto& r : report.rows) {
    os << std::setw(3) << r.G;
    for (double v : {r.DIC1, r.DIC2, r.BPIC1, r.BPIC2, r.BICM1, r.BICM2}) os << std::setw(14) << v;
    os << (r.negative_complexity ? "  (warning: D_bar < D at the point estimate)" : "") << '\n';
  }
  os.unsetf(std::ios::floatfield);
  out.list_written();
}

void run_ppcheck(const RunConfig& cfg) {
  const std::uint64_t seed = required_seed(cfg);
  const Dataset d = input_dataset(cfg);
  detail::require(!cfg.chains.empty(), "--chain is required");
  std::vector<GibbsChain> chains;
  for (const auto& path : cfg.chains) chains.push_back(load_chain(path));
  const PpcheckResult res = ppcheck_all(d, chains, seed, cfg.parallel);
  Output out(cfg.out);
  out.json("ppcheck.json", ppcheck_json(res));
  out.artifact("ppcheck.csv", [&](std::ostream& os) { write_ppcheck_csv(os, res); }, false);
  auto& os = out.summary();
  os << "  G  p_top1  p_paired  p_top1_cond  p_paired_cond\n" << std::fixed << std::setprecision(3);
  for (std::size_t k = 0; k < res.unconditional.rows.size(); ++k) {
    const auto& u = res.unconditional.rows[k];
    const auto& c = res.conditional.rows[k];
    os << std::setw(3) << u.G << std::setw(8) << u.top1 << std::setw(10) << u.paired
       << std::setw(13) << c.top1 << std::setw(15) << c.paired << '\n';
  }
  os.unsetf(std::ios::floatfield);
  out.list_written();
}

void run_relabel(const RunConfig& cfg) {
  detail::require(cfg.chains.size() == 1 && cfg.maps.size() == 1,
                  "relabel takes exactly one --chain and one --map");
  const GibbsChain chain = load_chain(cfg.chains[0]);
  const Json doc =
      map_document_for(load_json(cfg.maps[0]), static_cast<int>(chain.num_components), cfg.maps[0]);
  const RelabeledChain r = pra_relabel(chain, map_params_from_json(doc));
  Output out(cfg.out);
  out.artifact("chain_relabeled.csv", [&](std::ostream& os) { write_chain_csv(os, r.chain); });
  out.artifact("permutations.csv", [&](std::ostream& os) { write_permutations_csv(os, r.permutations); },
               false);
  std::size_t moved = 0;
  for (const auto& p : r.permutations)
    if (!std::is_sorted(p.begin(), p.end())) ++moved;
  auto& os = out.summary();
  os << "relabelled " << moved << " of " << r.permutations.size() << " draws\n";
  print_matrix(os, posterior_mean(r.chain).supports, "posterior mean, component");
  out.list_written();
}

int report_error(const char* kind, const std::string& message, int code) {
  std::cerr << Json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian analysis of partial top rankings with Plackett-Luce mixtures"};
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(1);
  RunConfig cfg;

  auto data_options = [&](CLI::App* sub) {
    flag_option(sub, "--input", cfg.input, "data file")->required();
    flag_option(sub, "--format", cfg.format, "csv-ordering (default), csv-ranking or preflib");
    flag_option(sub, "--K", cfg.K, "number of items (pads narrower files)");
  };
  auto out_option = [&](CLI::App* sub) {
    flag_option(sub, "--out", cfg.out, "output directory (default: stdout)");
  };
  auto seed_option = [&](CLI::App* sub) {
    flag_option(sub, "--seed", cfg.seed, "random seed (required)")->required();
  };
  auto parallel_option = [&](CLI::App* sub) {
    flag_option(sub, "--parallel", cfg.parallel, "worker threads (default: available cores)")
        ->check(CLI::PositiveNumber);
  };
  auto model_options = [&](CLI::App* sub) {
    flag_option(sub, "--G", cfg.G, "number of components");
    flag_option(sub, "--G-max", cfg.G_max, "fit G = 1..G-max");
    flag_option(sub, "--shape", cfg.shape, "Gamma prior shape c (default 1)");
    flag_option(sub, "--rate", cfg.rate, "Gamma prior rate d (default 0)");
    flag_option(sub, "--alpha", cfg.alpha, "Dirichlet prior concentration (default 1)");
  };

  auto* convert = app.add_subcommand("convert", "convert between orderings, rankings, PrefLib and frequency tables");
  data_options(convert);
  flag_option(convert, "--to", cfg.to, "csv-ordering, csv-ranking, preflib or freq (default: the other CSV format)");
  out_option(convert);

  auto* summarize = app.add_subcommand("summarize", "descriptive summaries of a ranking dataset");
  data_options(summarize);
  out_option(summarize);

  auto* simulate = app.add_subcommand("simulate", "draw orderings from a Plackett-Luce mixture");
  flag_option(simulate, "--N", cfg.n, "number of orderings")->required();
  flag_option(simulate, "--supports", cfg.supports, "support rows, e.g. \"4,3,2,1;1,2,3,4\"");
  flag_option(simulate, "--weights", cfg.weights, "mixture weights, e.g. \"0.3,0.7\"");
  flag_option(simulate, "--params", cfg.params_file, "take supports and weights from a fit-map JSON");
  flag_option(simulate, "--probcens", cfg.probcens, "censoring probabilities (K-1 values)")->delimiter(',');
  seed_option(simulate);
  out_option(simulate);

  auto* fit_map_cmd = app.add_subcommand("fit-map", "MAP estimation by EM with multiple starts");
  data_options(fit_map_cmd);
  model_options(fit_map_cmd);
  flag_option(fit_map_cmd, "--n-start", cfg.n_start, "number of starts")->check(CLI::PositiveNumber);
  flag_option(fit_map_cmd, "--max-iter", cfg.max_iter, "EM iteration cap (default 400 G)");
  flag_option(fit_map_cmd, "--tol", cfg.tol, "absolute log-posterior tolerance");
  fit_map_cmd->add_flag("--centered-start", cfg.centered_start, "centre starts on first-choice frequencies")
      ->envname(env_name("--centered-start"));
  seed_option(fit_map_cmd);
  parallel_option(fit_map_cmd);
  out_option(fit_map_cmd);

  auto* fit_gibbs = app.add_subcommand("fit-gibbs", "Gibbs sampling of the posterior");
  data_options(fit_gibbs);
  model_options(fit_gibbs);
  flag_option(fit_gibbs, "--n-iter", cfg.n_iter, "total sweeps");
  flag_option(fit_gibbs, "--n-burn", cfg.n_burn, "burn-in sweeps");
  flag_option(fit_gibbs, "--init-from", cfg.init_from, "start from a fit-map JSON");
  seed_option(fit_gibbs);
  parallel_option(fit_gibbs);
  out_option(fit_gibbs);

  auto* select = app.add_subcommand("select", "DIC, BPIC and BICM for fitted models");
  data_options(select);
  flag_option(select, "--chain", cfg.chains, "chain CSV files, one per G")->required();
  flag_option(select, "--map", cfg.maps, "fit-map JSON files, in the same order");
  flag_option(select, "--post-summary", cfg.post_summary, "point estimate: map (default), mean or median");
  out_option(select);

  auto* ppcheck_cmd = app.add_subcommand("ppcheck", "posterior predictive checks");
  data_options(ppcheck_cmd);
  flag_option(ppcheck_cmd, "--chain", cfg.chains, "chain CSV files, one per G")->required();
  seed_option(ppcheck_cmd);
  parallel_option(ppcheck_cmd);
  out_option(ppcheck_cmd);

  auto* relabel = app.add_subcommand("relabel", "undo label switching by pivotal reordering");
  flag_option(relabel, "--chain", cfg.chains, "chain CSV file")->required();
  flag_option(relabel, "--map", cfg.maps, "fit-map JSON used as pivot")->required();
  out_option(relabel);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("validation", e.what(), 2);
  }

  try {
    if (*convert) run_convert(cfg);
    else if (*summarize) run_summarize(cfg);
    else if (*simulate) run_simulate(cfg);
    else if (*fit_map_cmd) run_fit_map(cfg);
    else if (*fit_gibbs) run_fit_gibbs(cfg);
    else if (*select) run_select(cfg);
    else if (*ppcheck_cmd) run_ppcheck(cfg);
    else if (*relabel) run_relabel(cfg);
  } catch (const ValidationError& e) {
    return report_error("validation", e.what(), 2);
  } catch (const IoError& e) {
    return report_error("io", e.what(), 3);
  } catch (const NumericalError& e) {
    return report_error("numerical", e.what(), 4);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
