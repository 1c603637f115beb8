#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascadekit/error.hpp"
#include "cascadekit/stats.hpp"

namespace cascadekit::stats {

namespace {

constexpr double kMinClassMean = 1e-12;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

GroupStats group_stats(const std::vector<double>& v) {
  GroupStats g;
  g.count = v.size();
  if (v.empty()) return g;
  g.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  g.median = median_of(v);
  return g;
}

void finish(RatioCell& cell) {
  if (cell.profiled > 0) {
    cell.ratio = static_cast<double>(cell.verified) / static_cast<double>(cell.profiled);
  }
}

}  // namespace

ChiSquaredRanking rank_features(std::span<const std::vector<double>> columns,
                                std::span<const std::string> names,
                                std::span<const Label> labels) {
  if (columns.size() != names.size()) {
    throw ValidationError("rank_features: " + std::to_string(columns.size()) +
                          " columns but " + std::to_string(names.size()) + " names");
  }
  std::size_t rumors = 0, non_rumors = 0;
  for (Label l : labels) {
    if (l == Label::Rumor) {
      ++rumors;
    } else if (l == Label::NonRumor) {
      ++non_rumors;
    } else {
      throw ValidationError("rank_features: every sample needs a rumor/non-rumor label");
    }
  }
  if (rumors < 2 || non_rumors < 2) {
    throw ValidationError("rank_features needs at least two samples of each class (got " +
                          std::to_string(rumors) + " rumor, " + std::to_string(non_rumors) +
                          " non-rumor)");
  }

  ChiSquaredRanking ranking;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const std::vector<double>& col = columns[j];
    if (col.size() != labels.size()) {
      throw ValidationError("rank_features: column '" + names[j] + "' has " +
                            std::to_string(col.size()) + " values for " +
                            std::to_string(labels.size()) + " labels");
    }
    const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
    const double lo = *lo_it, range = *hi_it - *lo_it;
    if (!(range > 0.0)) {
      ranking.entries.push_back({names[j], 0.0});
      continue;
    }
    std::vector<double> scaled(col.size());
    double sum_rumor = 0.0, sum_non = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      scaled[i] = (col[i] - lo) / range;
      (labels[i] == Label::Rumor ? sum_rumor : sum_non) += scaled[i];
    }
    const double mu1 = sum_rumor / static_cast<double>(rumors);
    const double mu0 = sum_non / static_cast<double>(non_rumors);
    double chi2 = 0.0;
    for (double x : scaled) {
      if (mu0 >= kMinClassMean) {
        chi2 += (x - mu0) * (x - mu0) / mu0;
      } else {
        ++ranking.dropped_terms;
      }
      if (mu1 >= kMinClassMean) {
        chi2 += (x - mu1) * (x - mu1) / mu1;
      } else {
        ++ranking.dropped_terms;
      }
    }
    ranking.entries.push_back({names[j], chi2});
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const ChiSquaredEntry& a, const ChiSquaredEntry& b) {
              if (a.chi2 != b.chi2) return a.chi2 > b.chi2;
              return a.feature < b.feature;
            });
  return ranking;
}

AttributeMatrix cascade_attributes(const Corpus& corpus) {
  AttributeMatrix m;
  m.names = {"fans", "followings", "tweets", "registration", "verification"};
  m.columns.assign(m.names.size(), {});
  for (const Cascade& c : corpus.cascades()) {
    if (c.label() == Label::Unlabeled) {
      ++m.skipped;
      continue;
    }
    std::array<double, 5> sums{};
    std::size_t profiled = 0;
    for (const CascadeNode& node : c.nodes()) {
      if (!node.profile) continue;
      const UserProfile& p = *node.profile;
      sums[0] += static_cast<double>(p.fans);
      sums[1] += static_cast<double>(p.followings);
      sums[2] += static_cast<double>(p.tweets);
      sums[3] += static_cast<double>(p.registration_year);
      sums[4] += p.verified ? 1.0 : 0.0;
      ++profiled;
    }
    if (profiled == 0) {
      ++m.skipped;
      continue;
    }
    for (std::size_t j = 0; j < sums.size(); ++j) {
      m.columns[j].push_back(sums[j] / static_cast<double>(profiled));
    }
    m.labels.push_back(c.label());
    m.cascade_ids.push_back(c.id());
  }
  return m;
}

GroupSummary label_group_summary(const topo::MetricSeries& series) {
  std::map<Label, std::vector<double>> groups;
  std::vector<double> all;
  for (const auto& [id, value] : series.values) {
    groups[series.label_of.at(id)].push_back(value);
    all.push_back(value);
  }
  GroupSummary summary;
  for (const auto& [label, values] : groups) summary.by_label[label] = group_stats(values);
  summary.overall = group_stats(all);
  return summary;
}

VerificationTable verification_ratios(const Corpus& corpus) {
  if (!(corpus.profile_coverage() > 0.0)) {
    throw ValidationError("verification ratios need at least one node with a profile");
  }
  VerificationTable table;
  for (const Cascade& c : corpus.cascades()) {
    if (c.label() == Label::Unlabeled) continue;
    const bool rumor = c.label() == Label::Rumor;
    RatioCell& source = rumor ? table.source_rumor : table.source_non_rumor;
    RatioCell& participant = rumor ? table.participant_rumor : table.participant_non_rumor;
    for (std::size_t i = 0; i < c.size(); ++i) {
      RatioCell& cell = i == c.root() ? source : participant;
      const auto& profile = c.nodes()[i].profile;
      if (!profile) {
        ++cell.excluded;
        continue;
      }
      ++cell.profiled;
      cell.verified += profile->verified ? 1 : 0;
    }
  }
  finish(table.source_rumor);
  finish(table.source_non_rumor);
  finish(table.participant_rumor);
  finish(table.participant_non_rumor);
  return table;
}

}  // namespace cascadekit::stats
