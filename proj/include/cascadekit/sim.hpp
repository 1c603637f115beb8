#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cascadekit/corpus.hpp"

namespace cascadekit::sim {

enum class CeeMode { Off, Entropy, Geometric };

std::string_view cee_mode_name(CeeMode m);
CeeMode parse_cee_mode(std::string_view name);

struct CeeConfig {
  CeeMode mode = CeeMode::Off;
  double delta_s = 1.0;  // entropy added per successful spread
  double beta = 0.9;     // geometric decay per successful spread
};

// Throws ValidationError for delta_s <= 0 or beta outside (0, 1].
void validate(const CeeConfig& cee);

// Credibility multiplier after `spreads` successful spreads:
// 1 / (1 + spreads * delta_s) in entropy mode, beta^spreads in geometric mode.
double decay_factor(const CeeConfig& cee, std::size_t spreads);

// Infection rate of a spreader that has already passed the message on
// `spreads` times.
double effective_rate(double base, const CeeConfig& cee, std::size_t spreads);

// Per-node credibility bookkeeping for one growing cascade.
class CeeState {
 public:
  explicit CeeState(CeeConfig config, std::size_t nodes = 0)
      : config_(config), spreads_(nodes, 0) {}

  std::size_t add_node() {
    spreads_.push_back(0);
    return spreads_.size() - 1;
  }
  void record_spread(std::size_t node) { ++spreads_[node]; }

  std::size_t spreads(std::size_t node) const { return spreads_[node]; }
  // Accumulated entropy S = k * delta_s.
  double entropy(std::size_t node) const {
    return static_cast<double>(spreads_[node]) * config_.delta_s;
  }
  double credibility(std::size_t node) const { return 1.0 / (1.0 + entropy(node)); }
  double decay(std::size_t node) const { return decay_factor(config_, spreads_[node]); }
  double rate(double base, std::size_t node) const {
    return effective_rate(base, config_, spreads_[node]);
  }
  const CeeConfig& config() const noexcept { return config_; }

 private:
  CeeConfig config_;
  std::vector<std::size_t> spreads_;
};

// -- mean-field scenarios -------------------------------------------------------

enum class Scenario { Homogeneous, Heterogeneous, BarabasiAlbert };

std::string_view scenario_name(Scenario s);
Scenario parse_scenario(std::string_view name);

struct ScenarioConfig {
  Scenario kind = Scenario::Homogeneous;
  std::size_t n_users = 100;
  double base_rate = 0.5;           // homogeneous rate
  double power_law_exponent = 2.5;  // Barabasi-Albert scenario
  double min_rate = 0.05;           // lower cutoff of the power-law rates
  std::size_t fanout = 3;
  std::size_t active_rounds = 3;
  CeeConfig cee;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_size;  // defaults to n_users
};

void validate(const ScenarioConfig& config);

// Per-user infection rates; these are the first draws of a run's random stream.
std::vector<double> draw_user_rates(const ScenarioConfig& config);

// Synchronous-round contact process over a fully mixed population.
//
// One uniformly chosen source is infected at t = 0. In each round r >= 1,
// every active node, in infection order, contacts min(fanout, #susceptible)
// distinct susceptible users chosen uniformly; each contact succeeds with the
// contactor's effective rate, and the newcomer joins with t = r. Nodes stay
// active for `active_rounds` rounds. The run ends when no node is active, no
// user is susceptible, or the cascade reaches max_size.
Cascade run_meanfield(const ScenarioConfig& config);

// -- sequential attachment generator -------------------------------------------

enum class ScoreMode { Degree, Attribute, Mixed };
enum class Selection { Argmax, Proportional };

std::string_view score_mode_name(ScoreMode m);
ScoreMode parse_score_mode(std::string_view name);
std::string_view selection_name(Selection s);
Selection parse_selection(std::string_view name);

struct GenConfig {
  std::size_t n_nodes = 100;
  ScoreMode score_mode = ScoreMode::Degree;
  double alpha = 1.0;
  double gamma = 1.0;
  Selection selection = Selection::Proportional;
  CeeConfig cee;
  std::uint64_t seed = 0;
  // Attribute pool; required for the attribute and mixed score modes.
  std::vector<UserProfile> profiles;
};

void validate(const GenConfig& config);

// Similarity in (0, 1] between two users: 1 / (1 + ||z_a - z_b||) where z
// holds log1p of the three counts, years since 2004 / 10, and the verified
// flag.
double profile_similarity(const UserProfile& a, const UserProfile& b);

// Attachment scores of a newcomer (index i = scores.size()) against nodes
// 0..i-1: (out_degree + 1)^alpha * sim^gamma * decay. Exposed for testing.
std::vector<double> attachment_scores(const GenConfig& config,
                                      const std::vector<std::size_t>& out_degree,
                                      const CeeState& cee,
                                      const std::vector<const UserProfile*>& assigned,
                                      std::size_t newcomer);

// Adds nodes one at a time; node i attaches to one earlier node chosen by
// argmax (ties to the lowest index) or proportionally to the scores, and gets
// t = i.
Cascade sequential_generate(const GenConfig& config);

// -- ensembles ------------------------------------------------------------------

// `runs` cascades with ids run-0.. and seeds seed + i. `jobs` threads; the
// corpus is identical for any jobs value.
Corpus run_ensemble(const ScenarioConfig& config, std::size_t runs, unsigned jobs = 1);
Corpus run_ensemble(const GenConfig& config, std::size_t runs, unsigned jobs = 1);

}  // namespace cascadekit::sim
