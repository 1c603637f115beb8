#include "cascadekit/sim.hpp"

#include <algorithm>
#include <array>
#include <exception>
#include <cmath>
#include <string>
#include <thread>

#include "cascadekit/error.hpp"
#include "cascadekit/rng.hpp"

namespace cascadekit::sim {

std::string_view cee_mode_name(CeeMode m) {
  switch (m) {
    case CeeMode::Off:
      return "off";
    case CeeMode::Entropy:
      return "entropy";
    case CeeMode::Geometric:
      return "geometric";
  }
  return "off";
}

CeeMode parse_cee_mode(std::string_view name) {
  if (name == "off") return CeeMode::Off;
  if (name == "entropy") return CeeMode::Entropy;
  if (name == "geometric") return CeeMode::Geometric;
  throw ValidationError("unknown CEE mode '" + std::string(name) + "'");
}

void validate(const CeeConfig& cee) {
  if (!(cee.delta_s > 0.0) || !std::isfinite(cee.delta_s)) {
    throw ValidationError("delta_s must be a positive number");
  }
  if (!(cee.beta > 0.0 && cee.beta <= 1.0)) throw ValidationError("beta must lie in (0, 1]");
}

double decay_factor(const CeeConfig& cee, std::size_t spreads) {
  switch (cee.mode) {
    case CeeMode::Off:
      return 1.0;
    case CeeMode::Entropy:
      return 1.0 / (1.0 + static_cast<double>(spreads) * cee.delta_s);
    case CeeMode::Geometric:
      return std::pow(cee.beta, static_cast<double>(spreads));
  }
  return 1.0;
}

double effective_rate(double base, const CeeConfig& cee, std::size_t spreads) {
  return base * decay_factor(cee, spreads);
}

// -- mean-field -----------------------------------------------------------------

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Homogeneous:
      return "homogeneous";
    case Scenario::Heterogeneous:
      return "heterogeneous";
    case Scenario::BarabasiAlbert:
      return "barabasi_albert";
  }
  return "homogeneous";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "homogeneous") return Scenario::Homogeneous;
  if (name == "heterogeneous") return Scenario::Heterogeneous;
  if (name == "barabasi_albert") return Scenario::BarabasiAlbert;
  throw ValidationError("unknown scenario '" + std::string(name) + "'");
}

void validate(const ScenarioConfig& c) {
  if (c.n_users < 1) throw ValidationError("n_users must be >= 1");
  if (!(c.base_rate >= 0.0 && c.base_rate <= 1.0)) {
    throw ValidationError("base_rate must lie in [0, 1]");
  }
  if (!(c.power_law_exponent > 1.0)) throw ValidationError("power_law_exponent must be > 1");
  if (!(c.min_rate > 0.0 && c.min_rate <= 1.0)) {
    throw ValidationError("min_rate must lie in (0, 1]");
  }
  if (c.fanout < 1) throw ValidationError("fanout must be >= 1");
  if (c.active_rounds < 1) throw ValidationError("active_rounds must be >= 1");
  if (c.max_size && *c.max_size < 1) throw ValidationError("max_size must be >= 1");
  validate(c.cee);
}

namespace {

std::vector<double> user_rates(const ScenarioConfig& c, Rng& rng) {
  std::vector<double> rates(c.n_users, c.base_rate);
  switch (c.kind) {
    case Scenario::Homogeneous:
      break;
    case Scenario::Heterogeneous:
      for (double& r : rates) r = rng.uniform_open();
      break;
    case Scenario::BarabasiAlbert: {
      // Pareto tail above min_rate, truncated at 1.
      const double exponent = 1.0 / (1.0 - c.power_law_exponent);
      for (double& r : rates) r = std::min(1.0, c.min_rate * std::pow(rng.uniform_open(), exponent));
      break;
    }
  }
  return rates;
}

std::string user_uid(std::size_t user) { return "u" + std::to_string(user); }

Cascade meanfield_run(const ScenarioConfig& c, std::string id) {
  validate(c);
  Rng rng(c.seed);
  const std::vector<double> rates = user_rates(c, rng);
  const std::size_t n = c.n_users;
  const std::size_t cap = std::min(c.max_size.value_or(n), n);

  const std::size_t source = rng.below(n);
  // Susceptible users with O(1) removal; position[u] indexes into it.
  std::vector<std::size_t> susceptible;
  std::vector<std::size_t> position(n, 0);
  susceptible.reserve(n - 1);
  for (std::size_t u = 0; u < n; ++u) {
    if (u == source) continue;
    position[u] = susceptible.size();
    susceptible.push_back(u);
  }
  const auto swap_slots = [&](std::size_t a, std::size_t b) {
    std::swap(susceptible[a], susceptible[b]);
    position[susceptible[a]] = a;
    position[susceptible[b]] = b;
  };
  const auto remove_user = [&](std::size_t u) {
    swap_slots(position[u], susceptible.size() - 1);
    susceptible.pop_back();
  };

  std::vector<CascadeNode> nodes;
  std::vector<std::size_t> node_user;
  nodes.push_back({user_uid(source), std::nullopt, 0.0, std::nullopt});
  node_user.push_back(source);
  CeeState cee(c.cee, 1);

  struct Active {
    std::size_t node;
    std::size_t rounds_left;
  };
  std::vector<Active> active{{0, c.active_rounds}};
  std::vector<std::size_t> contacts;
  std::vector<std::size_t> joined;

  bool full = nodes.size() >= cap;
  for (std::size_t round = 1; !full && !active.empty() && !susceptible.empty(); ++round) {
    joined.clear();
    for (const Active& a : active) {
      const std::size_t m = std::min(c.fanout, susceptible.size());
      if (m == 0) break;
      for (std::size_t k = 0; k < m; ++k) {
        swap_slots(k, k + rng.below(susceptible.size() - k));
      }
      contacts.assign(susceptible.begin(), susceptible.begin() + static_cast<std::ptrdiff_t>(m));
      const std::size_t spreader = a.node;
      const double base = rates[node_user[spreader]];
      for (std::size_t user : contacts) {
        // The draw is taken unconditionally so that runs differing only in
        // the decay share one random stream.
        const double u = rng.uniform();
        if (u < cee.rate(base, spreader)) {
          nodes.push_back({user_uid(user), nodes[spreader].uid, static_cast<double>(round),
                           std::nullopt});
          node_user.push_back(user);
          cee.add_node();
          cee.record_spread(spreader);
          joined.push_back(nodes.size() - 1);
          remove_user(user);
          if (nodes.size() >= cap) {
            full = true;
            break;
          }
        }
      }
      if (full) break;
    }
    std::vector<Active> next;
    next.reserve(active.size() + joined.size());
    for (const Active& a : active) {
      if (a.rounds_left > 1) next.push_back({a.node, a.rounds_left - 1});
    }
    for (std::size_t node : joined) next.push_back({node, c.active_rounds});
    active = std::move(next);
  }
  return Cascade(std::move(id), Label::Unlabeled, std::move(nodes), c.seed);
}

}  // namespace

std::vector<double> draw_user_rates(const ScenarioConfig& config) {
  validate(config);
  Rng rng(config.seed);
  return user_rates(config, rng);
}

Cascade run_meanfield(const ScenarioConfig& config) {
  return meanfield_run(config, "run-0");
}

// -- sequential generator -------------------------------------------------------

std::string_view score_mode_name(ScoreMode m) {
  switch (m) {
    case ScoreMode::Degree:
      return "degree";
    case ScoreMode::Attribute:
      return "attribute";
    case ScoreMode::Mixed:
      return "mixed";
  }
  return "degree";
}

ScoreMode parse_score_mode(std::string_view name) {
  if (name == "degree") return ScoreMode::Degree;
  if (name == "attribute") return ScoreMode::Attribute;
  if (name == "mixed") return ScoreMode::Mixed;
  throw ValidationError("unknown score mode '" + std::string(name) + "'");
}

std::string_view selection_name(Selection s) {
  return s == Selection::Argmax ? "argmax" : "proportional";
}

Selection parse_selection(std::string_view name) {
  if (name == "argmax") return Selection::Argmax;
  if (name == "proportional") return Selection::Proportional;
  throw ValidationError("unknown selection rule '" + std::string(name) + "'");
}

void validate(const GenConfig& c) {
  if (c.n_nodes < 1) throw ValidationError("n_nodes must be >= 1");
  if (!(c.alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
  if (!(c.gamma >= 0.0)) throw ValidationError("gamma must be >= 0");
  if (c.score_mode != ScoreMode::Degree && c.profiles.empty()) {
    throw ValidationError(std::string(score_mode_name(c.score_mode)) +
                          " score mode requires a profile pool");
  }
  validate(c.cee);
}

double profile_similarity(const UserProfile& a, const UserProfile& b) {
  const auto features = [](const UserProfile& p) {
    return std::array<double, 5>{
        std::log1p(static_cast<double>(p.fans)),
        std::log1p(static_cast<double>(p.followings)),
        std::log1p(static_cast<double>(p.tweets)),
        (p.registration_year - kFirstRegistrationYear) / 10.0,
        p.verified ? 1.0 : 0.0,
    };
  };
  const auto za = features(a), zb = features(b);
  double ss = 0.0;
  for (std::size_t i = 0; i < za.size(); ++i) ss += (za[i] - zb[i]) * (za[i] - zb[i]);
  return 1.0 / (1.0 + std::sqrt(ss));
}

std::vector<double> attachment_scores(const GenConfig& c,
                                      const std::vector<std::size_t>& out_degree,
                                      const CeeState& cee,
                                      const std::vector<const UserProfile*>& assigned,
                                      std::size_t newcomer) {
  const bool use_degree = c.score_mode != ScoreMode::Attribute;
  const bool use_similarity = c.score_mode != ScoreMode::Degree;
  std::vector<double> scores(newcomer);
  for (std::size_t j = 0; j < newcomer; ++j) {
    double s = cee.decay(j);
    if (use_degree) s *= std::pow(static_cast<double>(out_degree[j] + 1), c.alpha);
    if (use_similarity) {
      s *= std::pow(profile_similarity(*assigned[newcomer], *assigned[j]), c.gamma);
    }
    scores[j] = s;
  }
  return scores;
}

namespace {

std::size_t argmax_lowest(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] > scores[best]) best = j;
  }
  return best;
}

Cascade generate_run(const GenConfig& c, std::string id) {
  validate(c);
  Rng rng(c.seed);
  const std::size_t n = c.n_nodes;

  std::vector<const UserProfile*> assigned;
  std::vector<CascadeNode> nodes;
  std::vector<std::size_t> out_degree;
  CeeState cee(c.cee);
  nodes.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    CascadeNode node;
    node.uid = "v" + std::to_string(i);
    node.t = static_cast<double>(i);
    if (!c.profiles.empty()) {
      assigned.push_back(&c.profiles[rng.below(c.profiles.size())]);
      node.profile = *assigned.back();
      node.profile->uid = node.uid;
    } else {
      assigned.push_back(nullptr);
    }
    if (i > 0) {
      const std::vector<double> scores = attachment_scores(c, out_degree, cee, assigned, i);
      std::size_t parent = 0;
      double total = 0.0;
      for (double s : scores) total += s;
      if (c.selection == Selection::Argmax || !(total > 0.0) || !std::isfinite(total)) {
        parent = argmax_lowest(scores);
      } else {
        const double target = rng.uniform() * total;
        double cumulative = 0.0;
        parent = scores.size();
        for (std::size_t j = 0; j < scores.size(); ++j) {
          cumulative += scores[j];
          if (target < cumulative) {
            parent = j;
            break;
          }
        }
        // Rounding can leave target at the very top of the range.
        if (parent == scores.size()) {
          parent = scores.size() - 1;
          while (scores[parent] <= 0.0) --parent;
        }
      }
      node.parent = nodes[parent].uid;
      ++out_degree[parent];
      cee.record_spread(parent);
    }
    nodes.push_back(std::move(node));
    out_degree.push_back(0);
    cee.add_node();
  }
  return Cascade(std::move(id), Label::Unlabeled, std::move(nodes), c.seed);
}

template <typename Config, typename Run>
Corpus ensemble(const Config& config, std::size_t runs, unsigned jobs, Run run) {
  if (runs < 1) throw ValidationError("runs must be >= 1");
  validate(config);
  std::vector<std::optional<Cascade>> slots(runs);
  std::vector<std::exception_ptr> errors(runs);
  const auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < runs; i += stride) {
      try {
        Config cfg = config;
        cfg.seed = config.seed + i;
        slots[i].emplace(run(cfg, "run-" + std::to_string(i)));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(runs)));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
  }
  std::vector<Cascade> cascades;
  cascades.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    cascades.push_back(std::move(*slots[i]));
  }
  return Corpus(std::move(cascades));
}

}  // namespace

Cascade sequential_generate(const GenConfig& config) { return generate_run(config, "run-0"); }

Corpus run_ensemble(const ScenarioConfig& config, std::size_t runs, unsigned jobs) {
  return ensemble(config, runs, jobs, meanfield_run);
}

Corpus run_ensemble(const GenConfig& config, std::size_t runs, unsigned jobs) {
  return ensemble(config, runs, jobs, generate_run);
}

}  // namespace cascadekit::sim
