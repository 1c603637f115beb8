#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cascadekit/corpus.hpp"

namespace cascadekit::topo {

// Longest root-to-node hop count. 0 for a single node.
std::size_t depth(const Cascade& c);

// Widest level: the largest number of nodes sharing one depth.
std::size_t max_breadth(const Cascade& c);

// Largest number of children of any single node. Reported alongside
// max_breadth for the "maximum degree" reading of breadth.
std::size_t max_out_degree(const Cascade& c);

// Longest shortest path in the undirected tree (two BFS sweeps).
std::size_t diameter(const Cascade& c);

// Mean hop distance over all ordered pairs of distinct nodes.
// Throws UndefinedMetricError for size 1.
double structural_virality(const Cascade& c);
// Sum of hop distances over unordered pairs, computed from subtree sizes.
double wiener_index(const Cascade& c);

struct HopStats {
  std::size_t max_hop = 0;
  double avg_hop = 0.0;
};
// Over non-root nodes. Throws UndefinedMetricError for size 1.
HopStats source_distance_stats(const Cascade& c);

struct TimeStats {
  double max_t = 0.0;
  double avg_t = 0.0;
};
// Over non-root nodes. Throws UndefinedMetricError for size 1.
TimeStats reception_time_stats(const Cascade& c);

struct DepthTimePoint {
  std::size_t depth = 0;
  double mean_time = 0.0;
  std::size_t count = 0;

  friend bool operator==(const DepthTimePoint&, const DepthTimePoint&) = default;
};
using DepthTimeProfile = std::vector<DepthTimePoint>;

// Mean reception time at each depth >= 1, depths ascending.
DepthTimeProfile depth_time_profile(const Cascade& c);

enum class Feature {
  Size,
  Depth,
  MaxBreadth,
  MaxOutDegree,
  Diameter,
  StructuralVirality,
  MaxHop,
  AvgHop,
  MaxTime,
  AvgTime,
};

std::string_view feature_name(Feature f);
// Throws ValidationError for an unknown name.
Feature parse_feature(std::string_view name);
const std::vector<Feature>& all_features();

// Evaluates one feature; throws UndefinedMetricError on precondition failure.
double evaluate(const Cascade& c, Feature f);

struct MetricSeries {
  std::string feature;
  std::vector<std::pair<std::string, double>> values;  // (cascade id, value)
  std::map<std::string, Label> label_of;
  std::vector<std::string> skipped;  // cascades failing the precondition
};

// One value per cascade, in corpus order. `jobs` > 1 evaluates cascades on
// that many threads; output order is unaffected.
MetricSeries metric_series(const Corpus& corpus, Feature feature,
                           unsigned jobs = 1);
MetricSeries metric_series(const Corpus& corpus, std::string_view feature,
                           unsigned jobs = 1);

// CSV rows `cascade_id,label,feature,value`.
void write_metrics_header(std::ostream& out);
void write_metrics_rows(std::ostream& out, const MetricSeries& series);
// Reads the CSV written above; rows for every feature are returned.
std::vector<MetricSeries> read_metrics(std::istream& in,
                                       const std::string& source = "<stream>");
std::vector<MetricSeries> read_metrics(const std::string& path);

}  // namespace cascadekit::topo
