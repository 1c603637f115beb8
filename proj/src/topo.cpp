#include "cascadekit/topo.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <fstream>
#include <optional>
#include <ostream>
#include <thread>

#include "cascadekit/error.hpp"
#include "text.hpp"

namespace cascadekit::topo {

namespace {

void require_pair(const Cascade& c, const char* metric) {
  if (c.size() < 2) {
    throw UndefinedMetricError(std::string(metric) + " is undefined for single-node cascade '" +
                               c.id() + "'");
  }
}

// Farthest node from `start` in the undirected tree, and its distance.
std::pair<std::size_t, std::size_t> farthest(const Cascade& c, std::size_t start) {
  const std::size_t n = c.size();
  std::vector<std::size_t> dist(n, Cascade::kNoParent);
  std::vector<std::size_t> queue;
  queue.reserve(n);
  queue.push_back(start);
  dist[start] = 0;
  std::size_t best = start;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t u = queue[head];
    if (dist[u] > dist[best]) best = u;
    const auto visit = [&](std::size_t v) {
      if (dist[v] == Cascade::kNoParent) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    };
    if (c.parent_of(u) != Cascade::kNoParent) visit(c.parent_of(u));
    for (std::size_t v : c.children_of(u)) visit(v);
  }
  return {best, dist[best]};
}

}  // namespace

std::size_t depth(const Cascade& c) {
  // BFS order ends at a deepest node.
  return c.depth_of(c.bfs_order().back());
}

std::size_t max_breadth(const Cascade& c) {
  std::vector<std::size_t> width(depth(c) + 1, 0);
  for (std::size_t i = 0; i < c.size(); ++i) ++width[c.depth_of(i)];
  return *std::max_element(width.begin(), width.end());
}

std::size_t max_out_degree(const Cascade& c) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < c.size(); ++i) best = std::max(best, c.children_of(i).size());
  return best;
}

std::size_t diameter(const Cascade& c) {
  const auto [end, unused] = farthest(c, c.root());
  return farthest(c, end).second;
}

double wiener_index(const Cascade& c) {
  const std::size_t n = c.size();
  std::vector<std::size_t> subtree(n, 1);
  const auto order = c.bfs_order();
  double total = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    const std::size_t p = c.parent_of(v);
    if (p == Cascade::kNoParent) continue;
    subtree[p] += subtree[v];
    // The edge (v, p) lies on the path of every pair split by it.
    total += static_cast<double>(subtree[v]) * static_cast<double>(n - subtree[v]);
  }
  return total;
}

double structural_virality(const Cascade& c) {
  require_pair(c, "structural virality");
  const double n = static_cast<double>(c.size());
  return 2.0 * wiener_index(c) / (n * (n - 1.0));
}

HopStats source_distance_stats(const Cascade& c) {
  require_pair(c, "source distance");
  HopStats s;
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i == c.root()) continue;
    s.max_hop = std::max(s.max_hop, c.depth_of(i));
    sum += static_cast<double>(c.depth_of(i));
  }
  s.avg_hop = sum / static_cast<double>(c.size() - 1);
  return s;
}

TimeStats reception_time_stats(const Cascade& c) {
  require_pair(c, "reception time");
  TimeStats s;
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i == c.root()) continue;
    s.max_t = std::max(s.max_t, c.nodes()[i].t);
    sum += c.nodes()[i].t;
  }
  s.avg_t = sum / static_cast<double>(c.size() - 1);
  return s;
}

DepthTimeProfile depth_time_profile(const Cascade& c) {
  require_pair(c, "depth-time profile");
  const std::size_t levels = depth(c);
  std::vector<double> sum(levels + 1, 0.0);
  std::vector<std::size_t> count(levels + 1, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    sum[c.depth_of(i)] += c.nodes()[i].t;
    ++count[c.depth_of(i)];
  }
  DepthTimeProfile profile;
  for (std::size_t d = 1; d <= levels; ++d) {
    profile.push_back({d, sum[d] / static_cast<double>(count[d]), count[d]});
  }
  return profile;
}

// -- features -----------------------------------------------------------------

namespace {

constexpr std::array<std::pair<Feature, std::string_view>, 10> kFeatureNames{{
    {Feature::Size, "size"},
    {Feature::Depth, "depth"},
    {Feature::MaxBreadth, "max_breadth"},
    {Feature::MaxOutDegree, "max_out_degree"},
    {Feature::Diameter, "diameter"},
    {Feature::StructuralVirality, "structural_virality"},
    {Feature::MaxHop, "max_hop"},
    {Feature::AvgHop, "avg_hop"},
    {Feature::MaxTime, "max_time"},
    {Feature::AvgTime, "avg_time"},
}};

}  // namespace

std::string_view feature_name(Feature f) {
  for (const auto& [feature, name] : kFeatureNames) {
    if (feature == f) return name;
  }
  return "unknown";
}

Feature parse_feature(std::string_view name) {
  for (const auto& [feature, known] : kFeatureNames) {
    if (known == name) return feature;
  }
  throw ValidationError("unknown metric feature '" + std::string(name) + "'");
}

const std::vector<Feature>& all_features() {
  static const std::vector<Feature> features = [] {
    std::vector<Feature> out;
    for (const auto& entry : kFeatureNames) out.push_back(entry.first);
    return out;
  }();
  return features;
}

double evaluate(const Cascade& c, Feature f) {
  switch (f) {
    case Feature::Size:
      return static_cast<double>(c.size());
    case Feature::Depth:
      return static_cast<double>(depth(c));
    case Feature::MaxBreadth:
      return static_cast<double>(max_breadth(c));
    case Feature::MaxOutDegree:
      return static_cast<double>(max_out_degree(c));
    case Feature::Diameter:
      return static_cast<double>(diameter(c));
    case Feature::StructuralVirality:
      return structural_virality(c);
    case Feature::MaxHop:
      return static_cast<double>(source_distance_stats(c).max_hop);
    case Feature::AvgHop:
      return source_distance_stats(c).avg_hop;
    case Feature::MaxTime:
      return reception_time_stats(c).max_t;
    case Feature::AvgTime:
      return reception_time_stats(c).avg_t;
  }
  throw ValidationError("unknown metric feature");
}

MetricSeries metric_series(const Corpus& corpus, Feature feature, unsigned jobs) {
  const auto& cascades = corpus.cascades();
  std::vector<std::optional<double>> results(cascades.size());
  const auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < cascades.size(); i += stride) {
      try {
        results[i] = evaluate(cascades[i], feature);
      } catch (const UndefinedMetricError&) {
        results[i].reset();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cascades.size())));
  if (jobs <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
  }

  MetricSeries series;
  series.feature = std::string(feature_name(feature));
  for (std::size_t i = 0; i < cascades.size(); ++i) {
    series.label_of[cascades[i].id()] = cascades[i].label();
    if (results[i]) {
      series.values.emplace_back(cascades[i].id(), *results[i]);
    } else {
      series.skipped.push_back(cascades[i].id());
    }
  }
  return series;
}

MetricSeries metric_series(const Corpus& corpus, std::string_view feature,
                           unsigned jobs) {
  return metric_series(corpus, parse_feature(feature), jobs);
}

// -- CSV ----------------------------------------------------------------------

void write_metrics_header(std::ostream& out) { out << "cascade_id,label,feature,value\n"; }

void write_metrics_rows(std::ostream& out, const MetricSeries& series) {
  for (const auto& [id, value] : series.values) {
    out << id << ',' << label_name(series.label_of.at(id)) << ',' << series.feature
        << ',' << detail::format_double(value) << '\n';
  }
}

std::vector<MetricSeries> read_metrics(std::istream& in, const std::string& source) {
  std::vector<MetricSeries> out;
  std::map<std::string, std::size_t, std::less<>> slot;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != "cascade_id,label,feature,value") {
        throw ParseError(source, lineno, "expected header 'cascade_id,label,feature,value'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 4) {
      throw ParseError(source, lineno, "expected 4 fields, got " + std::to_string(fields.size()));
    }
    double value = 0.0;
    if (!detail::parse_double(fields[3], value) || !std::isfinite(value)) {
      throw ParseError(source, lineno, "non-numeric value '" + std::string(fields[3]) + "'");
    }
    Label label;
    try {
      label = parse_label(fields[1]);
    } catch (const ValidationError& e) {
      throw ParseError(source, lineno, e.what());
    }
    auto it = slot.find(fields[2]);
    if (it == slot.end()) {
      it = slot.emplace(std::string(fields[2]), out.size()).first;
      out.emplace_back().feature = std::string(fields[2]);
    }
    MetricSeries& series = out[it->second];
    std::string id(fields[0]);
    if (!series.label_of.emplace(id, label).second) {
      throw ParseError(source, lineno, "duplicate cascade '" + id + "' for feature '" +
                                           series.feature + "'");
    }
    series.values.emplace_back(std::move(id), value);
  }
  if (!header_seen) throw ParseError(source, 1, "empty metrics file");
  return out;
}

std::vector<MetricSeries> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_metrics(in, path);
}

}  // namespace cascadekit::topo
