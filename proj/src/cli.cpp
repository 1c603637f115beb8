#include "cascadekit/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cascadekit/corpus.hpp"
#include "cascadekit/error.hpp"
#include "cascadekit/mmd.hpp"
#include "cascadekit/sim.hpp"
#include "cascadekit/stats.hpp"
#include "cascadekit/topo.hpp"
#include "text.hpp"

namespace cascadekit::cli {

namespace {

using detail::format_double;

// Buffers a command's output and writes it to its destination in one piece.
void emit(const std::string& path, const std::string& data, std::ostream& out) {
  if (path == "-") {
    out << data;
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open '" + path + "' for writing");
  file << data;
  if (!file) throw Error("failed writing '" + path + "'");
}

const topo::MetricSeries& find_series(const std::vector<topo::MetricSeries>& all,
                                      const std::string& feature, const std::string& path) {
  for (const auto& s : all) {
    if (s.feature == feature && !s.values.empty()) return s;
  }
  throw ValidationError(path + ": no values for feature '" + feature + "'");
}

std::vector<double> values_of(const topo::MetricSeries& s) {
  std::vector<double> v;
  v.reserve(s.values.size());
  for (const auto& [id, value] : s.values) v.push_back(value);
  return v;
}

constexpr Label kLabelOrder[] = {Label::Rumor, Label::NonRumor, Label::Unlabeled};

struct Options {
  // shared
  std::string out, corpus, metrics, feature, config;
  unsigned jobs = 1;
  // ingest
  std::string cascades, profiles, summary;
  // metrics
  std::string features = "size,depth,max_breadth,max_out_degree,diameter,structural_virality,"
                         "max_hop,avg_hop,max_time,avg_time";
  // ccdf
  bool by_label = false;
  // fit
  std::string family;
  bool rank_all = false, ks = false;
  std::size_t min_samples = 8;
  // simulate / generate
  std::string scenario = "homogeneous", cee = "off", score = "degree", select = "proportional";
  std::size_t n = 100, fanout = 3, active_rounds = 3, runs = 1, max_size = 0;
  double rate = 0.5, exponent = 2.5, min_rate = 0.05, beta = 0.9, delta_s = 1.0;
  double alpha = 1.0, gamma = 1.0;
  std::uint64_t seed = 0;
  // compare
  std::string a, b, stats = "degree,level_width,depth_profile";
  double sigma = 1.0;
};

sim::CeeConfig cee_from(const Options& o) {
  sim::CeeConfig cee;
  cee.mode = sim::parse_cee_mode(o.cee);
  cee.beta = o.beta;
  cee.delta_s = o.delta_s;
  return cee;
}

void run_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  Corpus corpus = parse_cascades(o.cascades);
  if (!o.profiles.empty()) corpus = attach_profiles(corpus, o.profiles);
  std::ostringstream data;
  write_cascades(data, corpus);
  emit(o.out, data.str(), out);
  if (!o.summary.empty()) {
    emit(o.summary, summary_to_json(corpus_summary(corpus)) + "\n", out);
  }
  err << "ingested " << corpus.size() << " cascades, profile coverage "
      << format_double(corpus.profile_coverage()) << '\n';
}

void run_metrics(const Options& o, std::ostream& out, std::ostream& err) {
  const Corpus corpus = parse_cascades(o.corpus);
  std::ostringstream data;
  topo::write_metrics_header(data);
  for (std::string_view name : detail::split(o.features, ',')) {
    if (name.empty()) continue;
    const topo::MetricSeries series = topo::metric_series(corpus, name, o.jobs);
    topo::write_metrics_rows(data, series);
    if (!series.skipped.empty()) {
      err << series.feature << ": skipped " << series.skipped.size()
          << " cascade(s) outside the metric's domain:";
      for (const auto& id : series.skipped) err << ' ' << id;
      err << '\n';
    }
  }
  emit(o.out, data.str(), out);
}

void run_ccdf(const Options& o, std::ostream& out, std::ostream&) {
  const auto all = topo::read_metrics(o.metrics);
  const auto& series = find_series(all, o.feature, o.metrics);
  std::ostringstream data;
  data << "feature,label,x,survival\n";
  const auto write_curve = [&](std::string_view label, const std::vector<double>& values) {
    for (const auto& p : stats::ccdf(values)) {
      data << series.feature << ',' << label << ',' << format_double(p.x) << ','
           << format_double(p.survival) << '\n';
    }
  };
  if (o.by_label) {
    for (Label label : kLabelOrder) {
      std::vector<double> values;
      for (const auto& [id, v] : series.values) {
        if (series.label_of.at(id) == label) values.push_back(v);
      }
      if (!values.empty()) write_curve(label_name(label), values);
    }
  } else {
    write_curve("all", values_of(series));
  }
  emit(o.out, data.str(), out);
}

void run_fit(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.family.empty() && o.rank_all) throw ValidationError("--family and --rank-all are exclusive");
  const auto all = topo::read_metrics(o.metrics);
  const auto& series = find_series(all, o.feature, o.metrics);
  const std::vector<double> values = values_of(series);
  stats::FitOptions options;
  options.min_samples = o.min_samples;

  std::vector<stats::FitResult> fits;
  if (o.rank_all) {
    auto ranking = stats::rank_families(values, options);
    for (const auto& [family, why] : ranking.excluded) {
      err << "excluded " << stats::family_name(family) << ": " << why << '\n';
    }
    fits = std::move(ranking.fits);
  } else {
    const auto family = stats::parse_family(o.family.empty() ? "exponential" : o.family);
    fits.push_back(stats::fit_mle(values, family, options));
  }

  std::ostringstream data;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const auto& fit = fits[i];
    nlohmann::ordered_json rec;
    rec["feature"] = series.feature;
    rec["family"] = std::string(stats::family_name(fit.family));
    if (o.rank_all) rec["rank"] = i + 1;
    rec["n"] = fit.n;
    nlohmann::ordered_json params;
    for (const auto& [name, value] : fit.params()) params[name] = value;
    rec["params"] = params;
    rec["nllf"] = fit.nllf;
    if (o.ks) {
      const auto ks = stats::ks_test(values, fit);
      rec["d_stat"] = ks.d_stat;
      rec["p_value"] = ks.p_value;
    }
    data << rec.dump() << '\n';
  }
  emit(o.out, data.str(), out);
}

void run_rank(const Options& o, std::ostream& out, std::ostream& err) {
  const Corpus corpus = parse_cascades(o.corpus);
  const auto m = stats::cascade_attributes(corpus);
  const auto ranking = stats::rank_features(m.columns, m.names, m.labels);
  std::ostringstream data;
  data << "rank,feature,chi2\n";
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    data << i + 1 << ',' << ranking.entries[i].feature << ','
         << format_double(ranking.entries[i].chi2) << '\n';
  }
  emit(o.out, data.str(), out);
  err << "ranked " << m.labels.size() << " cascades (" << m.skipped
      << " unlabelled or without profiles skipped, " << ranking.dropped_terms
      << " zero-mean terms dropped)\n";
}

void run_groups(const Options& o, std::ostream& out, std::ostream&) {
  const auto all = topo::read_metrics(o.metrics);
  const auto& series = find_series(all, o.feature, o.metrics);
  const auto summary = stats::label_group_summary(series);
  std::ostringstream data;
  data << "feature,label,count,mean,median\n";
  const auto row = [&](std::string_view label, const stats::GroupStats& g) {
    data << series.feature << ',' << label << ',' << g.count << ',' << format_double(g.mean)
         << ',' << format_double(g.median) << '\n';
  };
  for (Label label : kLabelOrder) {
    if (auto it = summary.by_label.find(label); it != summary.by_label.end()) {
      row(label_name(label), it->second);
    }
  }
  row("all", summary.overall);
  emit(o.out, data.str(), out);
}

void run_verify(const Options& o, std::ostream& out, std::ostream&) {
  const auto table = stats::verification_ratios(parse_cascades(o.corpus));
  std::ostringstream data;
  data << "role,label,verified,profiled,excluded,ratio\n";
  const auto row = [&](const char* role, Label label, const stats::RatioCell& c) {
    data << role << ',' << label_name(label) << ',' << c.verified << ',' << c.profiled << ','
         << c.excluded << ',' << (c.ratio ? format_double(*c.ratio) : "undefined") << '\n';
  };
  row("source", Label::Rumor, table.source_rumor);
  row("source", Label::NonRumor, table.source_non_rumor);
  row("participant", Label::Rumor, table.participant_rumor);
  row("participant", Label::NonRumor, table.participant_non_rumor);
  emit(o.out, data.str(), out);
}

void run_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  sim::ScenarioConfig c;
  c.kind = sim::parse_scenario(o.scenario);
  c.n_users = o.n;
  c.base_rate = o.rate;
  c.power_law_exponent = o.exponent;
  c.min_rate = o.min_rate;
  c.fanout = o.fanout;
  c.active_rounds = o.active_rounds;
  c.cee = cee_from(o);
  c.seed = o.seed;
  if (o.max_size > 0) c.max_size = o.max_size;
  const Corpus corpus = sim::run_ensemble(c, o.runs, o.jobs);
  std::ostringstream data;
  write_cascades(data, corpus);
  emit(o.out, data.str(), out);
  err << "simulated " << corpus.size() << " cascade(s), seeds " << o.seed << ".."
      << o.seed + o.runs - 1 << '\n';
}

void run_generate(const Options& o, std::ostream& out, std::ostream& err) {
  sim::GenConfig c;
  c.n_nodes = o.n;
  c.score_mode = sim::parse_score_mode(o.score);
  c.alpha = o.alpha;
  c.gamma = o.gamma;
  c.selection = sim::parse_selection(o.select);
  c.cee = cee_from(o);
  c.seed = o.seed;
  if (!o.profiles.empty()) {
    const ProfileTable table = parse_profiles(o.profiles);
    c.profiles.reserve(table.size());
    for (const auto& [uid, p] : table) c.profiles.push_back(p);
    // Hash-map order is unspecified; the pool order feeds the RNG.
    std::sort(c.profiles.begin(), c.profiles.end(),
              [](const UserProfile& x, const UserProfile& y) { return x.uid < y.uid; });
  }
  const Corpus corpus = sim::run_ensemble(c, o.runs, o.jobs);
  std::ostringstream data;
  write_cascades(data, corpus);
  emit(o.out, data.str(), out);
  err << "generated " << corpus.size() << " cascade(s), seeds " << o.seed << ".."
      << o.seed + o.runs - 1 << '\n';
}

void run_compare(const Options& o, std::ostream& out, std::ostream&) {
  const Corpus a = parse_cascades(o.a);
  const Corpus b = parse_cascades(o.b);
  if (a.empty()) throw ValidationError(o.a + ": corpus is empty");
  if (b.empty()) throw ValidationError(o.b + ": corpus is empty");
  const auto statistics = mmd::parse_statistics(o.stats);
  const auto report = mmd::compare_corpora(a, b, statistics, o.sigma, o.jobs);
  std::ostringstream data;
  mmd::write_report(data, report);
  emit(o.out, data.str(), out);
}

void add_cee_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--cee", o.cee, "Credibility decay: off, entropy or geometric")
      ->check(CLI::IsMember({"off", "entropy", "geometric"}));
  cmd->add_option("--beta", o.beta, "Geometric decay factor per spread");
  cmd->add_option("--delta-s", o.delta_s, "Entropy added per spread");
}

}  // namespace

std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  std::size_t lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, lineno, "expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw ParseError(path, lineno, "empty key");
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Cascade topology statistics, propagation simulation and corpus comparison",
               "cascadekit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "Validate cascades and attach user profiles");
  ingest->add_option("--cascades", o.cascades, "Cascade NDJSON")->required();
  ingest->add_option("--profiles", o.profiles, "Profile CSV");
  ingest->add_option("--out", o.out, "Validated corpus NDJSON")->required();
  ingest->add_option("--summary", o.summary, "Corpus summary JSON");

  auto* metrics = app.add_subcommand("metrics", "Per-cascade topology and timing metrics");
  metrics->add_option("--corpus", o.corpus)->required();
  metrics->add_option("--features", o.features, "Comma-separated metric names");
  metrics->add_option("--out", o.out)->required();
  metrics->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);

  auto* ccdf = app.add_subcommand("ccdf", "Complementary CDF of one metric");
  ccdf->add_option("--metrics", o.metrics)->required();
  ccdf->add_option("--feature", o.feature)->required();
  ccdf->add_flag("--by-label", o.by_label, "One curve per cascade label");
  ccdf->add_option("--out", o.out)->required();

  auto* fit = app.add_subcommand("fit", "Maximum-likelihood distribution fits");
  fit->add_option("--metrics", o.metrics)->required();
  fit->add_option("--feature", o.feature)->required();
  fit->add_option("--family", o.family)
      ->check(CLI::IsMember({"exponential", "gamma", "lognormal", "normal"}));
  fit->add_flag("--rank-all", o.rank_all, "Fit every family and rank by NLLF");
  fit->add_flag("--ks", o.ks, "Add Kolmogorov-Smirnov D and p-value");
  fit->add_option("--min-samples", o.min_samples)->check(CLI::PositiveNumber);
  fit->add_option("--out", o.out)->required();

  auto* rank = app.add_subcommand("rank", "Chi-squared ranking of user attributes");
  rank->add_option("--corpus", o.corpus)->required();
  rank->add_option("--out", o.out)->required();

  auto* groups = app.add_subcommand("groups", "Per-label mean and median of one metric");
  groups->add_option("--metrics", o.metrics)->required();
  groups->add_option("--feature", o.feature)->required();
  groups->add_option("--out", o.out)->required();

  auto* verify = app.add_subcommand("verify", "Verified-user ratios of sources and participants");
  verify->add_option("--corpus", o.corpus)->required();
  verify->add_option("--out", o.out)->required();

  auto* simulate = app.add_subcommand("simulate", "Mean-field propagation scenarios");
  simulate->add_option("--config", o.config, "key=value file; flags override it");
  simulate->add_option("--scenario", o.scenario)
      ->check(CLI::IsMember({"homogeneous", "heterogeneous", "barabasi_albert"}));
  simulate->add_option("--n", o.n, "Population size")->check(CLI::PositiveNumber);
  simulate->add_option("--rate", o.rate, "Homogeneous infection rate")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--exponent", o.exponent, "Power-law exponent (barabasi_albert)");
  simulate->add_option("--min-rate", o.min_rate, "Smallest power-law rate (barabasi_albert)");
  simulate->add_option("--fanout", o.fanout)->check(CLI::PositiveNumber);
  simulate->add_option("--active-rounds", o.active_rounds)->check(CLI::PositiveNumber);
  simulate->add_option("--max-size", o.max_size, "Stop a run at this many nodes");
  add_cee_flags(simulate, o);
  simulate->add_option("--runs", o.runs)->check(CLI::PositiveNumber);
  simulate->add_option("--seed", o.seed)->required();
  simulate->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
  simulate->add_option("--out", o.out)->required();

  auto* generate = app.add_subcommand("generate", "Sequential attachment generator");
  generate->add_option("--config", o.config, "key=value file; flags override it");
  generate->add_option("--n", o.n, "Nodes per cascade")->check(CLI::PositiveNumber);
  generate->add_option("--score", o.score)->check(CLI::IsMember({"degree", "attribute", "mixed"}));
  generate->add_option("--alpha", o.alpha, "Degree exponent");
  generate->add_option("--gamma", o.gamma, "Similarity exponent");
  generate->add_option("--select", o.select)->check(CLI::IsMember({"argmax", "proportional"}));
  add_cee_flags(generate, o);
  generate->add_option("--profiles", o.profiles, "Profile CSV used as the attribute pool");
  generate->add_option("--runs", o.runs)->check(CLI::PositiveNumber);
  generate->add_option("--seed", o.seed)->required();
  generate->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
  generate->add_option("--out", o.out)->required();

  auto* compare = app.add_subcommand("compare", "MMD between two cascade corpora");
  compare->add_option("--a", o.a)->required();
  compare->add_option("--b", o.b)->required();
  compare->add_option("--stats", o.stats, "Comma-separated: degree, level_width, depth_profile");
  compare->add_option("--sigma", o.sigma, "Gaussian kernel bandwidth")->check(CLI::PositiveNumber);
  compare->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
  compare->add_option("--out", o.out)->required();

  std::vector<std::string> args = raw_args;
  try {
    // Config values are spliced in right after the subcommand so that any
    // explicit flag later on the line takes precedence.
    if (args.size() > 2 && (args[1] == "simulate" || args[1] == "generate")) {
      for (std::size_t i = 2; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
          auto tokens = config_tokens(args[i + 1]);
          args.insert(args.begin() + 2, tokens.begin(), tokens.end());
          break;
        }
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) run_ingest(o, out, err);
    else if (*metrics) run_metrics(o, out, err);
    else if (*ccdf) run_ccdf(o, out, err);
    else if (*fit) run_fit(o, out, err);
    else if (*rank) run_rank(o, out, err);
    else if (*groups) run_groups(o, out, err);
    else if (*verify) run_verify(o, out, err);
    else if (*simulate) run_simulate(o, out, err);
    else if (*generate) run_generate(o, out, err);
    else if (*compare) run_compare(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace cascadekit::cli
