#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cascadekit/cli.hpp"
#include "cascadekit/corpus.hpp"
#include "cascadekit/error.hpp"
#include "cascadekit/mmd.hpp"
#include "cascadekit/sim.hpp"
#include "cascadekit/stats.hpp"
#include "cascadekit/topo.hpp"

namespace py = pybind11;

namespace cascadekit {
namespace {

Corpus corpus_from_string(const std::string& text) {
  std::istringstream in(text);
  return parse_cascades(in, "<string>");
}

std::string corpus_to_string(const Corpus& corpus) {
  std::ostringstream out;
  write_cascades(out, corpus);
  return out.str();
}

py::dict fit_dict(const stats::FitResult& fit) {
  py::dict d;
  d["family"] = std::string(stats::family_name(fit.family));
  py::dict params;
  for (const auto& [name, value] : fit.params()) params[py::str(name)] = value;
  d["params"] = params;
  d["nllf"] = fit.nllf;
  d["n"] = fit.n;
  return d;
}

py::object ratio_value(const stats::RatioCell& cell) {
  return cell.ratio ? py::object(py::float_(*cell.ratio)) : py::object(py::none());
}

void bind_corpus(py::module_& m) {
  py::enum_<Label>(m, "Label")
      .value("Rumor", Label::Rumor)
      .value("NonRumor", Label::NonRumor)
      .value("Unlabeled", Label::Unlabeled);

  py::class_<UserProfile>(m, "UserProfile")
      .def(py::init<>())
      .def_readwrite("uid", &UserProfile::uid)
      .def_readwrite("fans", &UserProfile::fans)
      .def_readwrite("followings", &UserProfile::followings)
      .def_readwrite("tweets", &UserProfile::tweets)
      .def_readwrite("registration_year", &UserProfile::registration_year)
      .def_readwrite("verified", &UserProfile::verified);

  py::class_<CascadeNode>(m, "CascadeNode")
      .def(py::init<>())
      .def(py::init([](std::string uid, std::optional<std::string> parent, double t) {
             return CascadeNode{std::move(uid), std::move(parent), t, std::nullopt};
           }),
           py::arg("uid"), py::arg("parent") = py::none(), py::arg("t") = 0.0)
      .def_readwrite("uid", &CascadeNode::uid)
      .def_readwrite("parent", &CascadeNode::parent)
      .def_readwrite("t", &CascadeNode::t)
      .def_readwrite("profile", &CascadeNode::profile);

  py::class_<Cascade>(m, "Cascade")
      .def(py::init<std::string, Label, std::vector<CascadeNode>>(), py::arg("id"),
           py::arg("label"), py::arg("nodes"))
      .def_property_readonly("id", &Cascade::id)
      .def_property_readonly("label", &Cascade::label)
      .def_property_readonly("nodes", &Cascade::nodes)
      .def_property_readonly("seed", &Cascade::seed)
      .def("__len__", &Cascade::size)
      .def("to_json", &cascade_to_json);

  py::class_<Corpus>(m, "Corpus")
      .def(py::init<std::vector<Cascade>>(), py::arg("cascades"))
      .def_property_readonly("cascades", &Corpus::cascades)
      .def_property_readonly("profile_coverage", &Corpus::profile_coverage)
      .def("__len__", &Corpus::size)
      .def("__eq__", [](const Corpus& a, const Corpus& b) { return a == b; });

  m.def("read_cascades", py::overload_cast<const std::string&>(&parse_cascades),
        py::arg("path"));
  m.def("loads_cascades", &corpus_from_string, py::arg("text"));
  m.def("dumps_cascades", &corpus_to_string, py::arg("corpus"));
  m.def("write_cascades",
        py::overload_cast<const std::string&, const Corpus&>(&write_cascades),
        py::arg("path"), py::arg("corpus"));
  m.def("attach_profiles",
        py::overload_cast<const Corpus&, const std::string&>(&attach_profiles),
        py::arg("corpus"), py::arg("path"));
  m.def("corpus_summary_json",
        [](const Corpus& c) { return summary_to_json(corpus_summary(c)); }, py::arg("corpus"));
}

void bind_topo(py::module_& m) {
  m.def("depth", &topo::depth);
  m.def("max_breadth", &topo::max_breadth);
  m.def("max_out_degree", &topo::max_out_degree);
  m.def("diameter", &topo::diameter);
  m.def("structural_virality", &topo::structural_virality);
  m.def("source_distance_stats", [](const Cascade& c) {
    const auto s = topo::source_distance_stats(c);
    return py::make_tuple(s.max_hop, s.avg_hop);
  });
  m.def("reception_time_stats", [](const Cascade& c) {
    const auto s = topo::reception_time_stats(c);
    return py::make_tuple(s.max_t, s.avg_t);
  });
  m.def("depth_time_profile", [](const Cascade& c) {
    py::list out;
    for (const auto& p : topo::depth_time_profile(c)) {
      out.append(py::make_tuple(p.depth, p.mean_time, p.count));
    }
    return out;
  });
  m.def(
      "metric_series",
      [](const Corpus& corpus, const std::string& feature, unsigned jobs) {
        const auto s = topo::metric_series(corpus, feature, jobs);
        py::dict d;
        d["feature"] = s.feature;
        py::list values;
        for (const auto& [id, v] : s.values) {
          values.append(py::make_tuple(id, std::string(label_name(s.label_of.at(id))), v));
        }
        d["values"] = values;
        d["skipped"] = s.skipped;
        return d;
      },
      py::arg("corpus"), py::arg("feature"), py::arg("jobs") = 1);
}

void bind_stats(py::module_& m) {
  m.def("ccdf", [](const std::vector<double>& values) {
    py::list out;
    for (const auto& p : stats::ccdf(values)) out.append(py::make_tuple(p.x, p.survival));
    return out;
  });
  m.def(
      "fit_mle",
      [](const std::vector<double>& values, const std::string& family,
         std::size_t min_samples) {
        stats::FitOptions opt;
        opt.min_samples = min_samples;
        return fit_dict(stats::fit_mle(values, stats::parse_family(family), opt));
      },
      py::arg("values"), py::arg("family"), py::arg("min_samples") = 8);
  m.def(
      "rank_families",
      [](const std::vector<double>& values) {
        py::list out;
        for (const auto& fit : stats::rank_families(values).fits) out.append(fit_dict(fit));
        return out;
      },
      py::arg("values"));
  m.def(
      "ks_exponential",
      [](const std::vector<double>& values) {
        const auto r = stats::ks_exponential(values);
        py::dict d = fit_dict(r.fitted);
        d["d_stat"] = r.d_stat;
        d["p_value"] = r.p_value;
        return d;
      },
      py::arg("values"));
  m.def(
      "rank_features",
      [](const std::vector<std::vector<double>>& columns, const std::vector<std::string>& names,
         const std::vector<std::string>& labels) {
        std::vector<Label> parsed;
        parsed.reserve(labels.size());
        for (const auto& l : labels) parsed.push_back(parse_label(l));
        py::list out;
        for (const auto& e : stats::rank_features(columns, names, parsed).entries) {
          out.append(py::make_tuple(e.feature, e.chi2));
        }
        return out;
      },
      py::arg("columns"), py::arg("names"), py::arg("labels"));
  m.def("verification_ratios", [](const Corpus& corpus) {
    const auto t = stats::verification_ratios(corpus);
    py::dict d;
    d["source_rumor"] = ratio_value(t.source_rumor);
    d["source_non_rumor"] = ratio_value(t.source_non_rumor);
    d["participant_rumor"] = ratio_value(t.participant_rumor);
    d["participant_non_rumor"] = ratio_value(t.participant_non_rumor);
    return d;
  });
}

void bind_sim(py::module_& m) {
  py::class_<sim::CeeConfig>(m, "CeeConfig")
      .def(py::init([](const std::string& mode, double beta, double delta_s) {
             return sim::CeeConfig{sim::parse_cee_mode(mode), delta_s, beta};
           }),
           py::arg("mode") = "off", py::arg("beta") = 0.9, py::arg("delta_s") = 1.0)
      .def_readwrite("beta", &sim::CeeConfig::beta)
      .def_readwrite("delta_s", &sim::CeeConfig::delta_s);

  m.def("effective_rate", &sim::effective_rate, py::arg("base"), py::arg("cee"),
        py::arg("spreads"));

  py::class_<sim::ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init([](const std::string& kind, std::size_t n_users, double base_rate,
                       std::size_t fanout, std::size_t active_rounds, sim::CeeConfig cee,
                       std::uint64_t seed) {
             sim::ScenarioConfig c;
             c.kind = sim::parse_scenario(kind);
             c.n_users = n_users;
             c.base_rate = base_rate;
             c.fanout = fanout;
             c.active_rounds = active_rounds;
             c.cee = cee;
             c.seed = seed;
             return c;
           }),
           py::arg("kind") = "homogeneous", py::arg("n_users") = 100, py::arg("base_rate") = 0.5,
           py::arg("fanout") = 3, py::arg("active_rounds") = 3,
           py::arg("cee") = sim::CeeConfig{}, py::arg("seed") = 0)
      .def_readwrite("n_users", &sim::ScenarioConfig::n_users)
      .def_readwrite("base_rate", &sim::ScenarioConfig::base_rate)
      .def_readwrite("power_law_exponent", &sim::ScenarioConfig::power_law_exponent)
      .def_readwrite("min_rate", &sim::ScenarioConfig::min_rate)
      .def_readwrite("fanout", &sim::ScenarioConfig::fanout)
      .def_readwrite("active_rounds", &sim::ScenarioConfig::active_rounds)
      .def_readwrite("cee", &sim::ScenarioConfig::cee)
      .def_readwrite("seed", &sim::ScenarioConfig::seed)
      .def_readwrite("max_size", &sim::ScenarioConfig::max_size);

  py::class_<sim::GenConfig>(m, "GenConfig")
      .def(py::init([](std::size_t n_nodes, const std::string& score, double alpha,
                       double gamma, const std::string& selection, sim::CeeConfig cee,
                       std::uint64_t seed, std::vector<UserProfile> profiles) {
             sim::GenConfig c;
             c.n_nodes = n_nodes;
             c.score_mode = sim::parse_score_mode(score);
             c.alpha = alpha;
             c.gamma = gamma;
             c.selection = sim::parse_selection(selection);
             c.cee = cee;
             c.seed = seed;
             c.profiles = std::move(profiles);
             return c;
           }),
           py::arg("n_nodes") = 100, py::arg("score") = "degree", py::arg("alpha") = 1.0,
           py::arg("gamma") = 1.0, py::arg("selection") = "proportional",
           py::arg("cee") = sim::CeeConfig{}, py::arg("seed") = 0,
           py::arg("profiles") = std::vector<UserProfile>{})
      .def_readwrite("n_nodes", &sim::GenConfig::n_nodes)
      .def_readwrite("alpha", &sim::GenConfig::alpha)
      .def_readwrite("gamma", &sim::GenConfig::gamma)
      .def_readwrite("cee", &sim::GenConfig::cee)
      .def_readwrite("seed", &sim::GenConfig::seed);

  m.def("run_meanfield", &sim::run_meanfield, py::arg("config"));
  m.def("sequential_generate", &sim::sequential_generate, py::arg("config"));
  m.def("run_ensemble",
        py::overload_cast<const sim::ScenarioConfig&, std::size_t, unsigned>(&sim::run_ensemble),
        py::arg("config"), py::arg("runs"), py::arg("jobs") = 1);
  m.def("run_ensemble",
        py::overload_cast<const sim::GenConfig&, std::size_t, unsigned>(&sim::run_ensemble),
        py::arg("config"), py::arg("runs"), py::arg("jobs") = 1);
}

void bind_mmd(py::module_& m) {
  m.def(
      "cascade_histogram",
      [](const Cascade& c, const std::string& statistic) {
        return mmd::cascade_histogram(c, mmd::parse_statistic(statistic));
      },
      py::arg("cascade"), py::arg("statistic"));
  m.def(
      "mmd2",
      [](const Corpus& a, const Corpus& b, const std::string& statistic, double sigma) {
        return mmd::mmd2(a, b, mmd::parse_statistic(statistic), sigma);
      },
      py::arg("a"), py::arg("b"), py::arg("statistic"), py::arg("sigma") = 1.0);
  m.def(
      "compare_corpora",
      [](const Corpus& a, const Corpus& b, const std::string& statistics, double sigma,
         unsigned jobs) {
        const auto report =
            mmd::compare_corpora(a, b, mmd::parse_statistics(statistics), sigma, jobs);
        py::dict scores;
        for (const auto& s : report.scores) {
          scores[py::str(std::string(mmd::statistic_name(s.statistic)))] = s.mmd2;
        }
        py::dict d;
        d["scores"] = scores;
        d["aggregate"] = report.aggregate;
        d["n_a"] = report.n_a;
        d["n_b"] = report.n_b;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("statistics") = "degree,level_width,depth_profile",
      py::arg("sigma") = 1.0, py::arg("jobs") = 1);
}

}  // namespace
}  // namespace cascadekit

PYBIND11_MODULE(_core, m) {
  using namespace cascadekit;
  m.doc() = "Cascade topology statistics, propagation simulation and corpus comparison";
  m.attr("__version__") = CASCADEKIT_VERSION;

  py::register_exception<Error>(m, "CascadeError", PyExc_ValueError);

  bind_corpus(m);
  bind_topo(m);
  bind_stats(m);
  bind_sim(m);
  bind_mmd(m);

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "cascadekit");
        std::ostringstream out, err;
        const int code = cli::dispatch(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a command line; returns (exit status, stdout text, stderr text).");
}
