#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cascadekit/corpus.hpp"

namespace cascadekit::mmd {

enum class Statistic { Degree, LevelWidth, DepthProfile };

std::string_view statistic_name(Statistic s);
Statistic parse_statistic(std::string_view name);
// Comma-separated list of statistic names.
std::vector<Statistic> parse_statistics(std::string_view list);

// Normalized histogram over integer bins 0..size()-1.
using Histogram = std::vector<double>;

// degree: undirected node degrees; level_width: node count per depth;
// depth_profile: point mass at the cascade depth. Each sums to 1.
Histogram cascade_histogram(const Cascade& c, Statistic statistic);

// First Wasserstein distance between histograms on unit-spaced bins, the
// shorter one zero-padded.
double wasserstein1(std::span<const double> a, std::span<const double> b);

// exp(-W1(a, b)^2 / (2 sigma^2)).
double kernel(std::span<const double> a, std::span<const double> b, double sigma);

// Biased squared MMD between two samples of histograms. Kernel values are
// summed in sorted order, so the result does not depend on argument order.
double mmd2(std::span<const Histogram> a, std::span<const Histogram> b, double sigma,
            unsigned jobs = 1);
double mmd2(const Corpus& a, const Corpus& b, Statistic statistic, double sigma,
            unsigned jobs = 1);

struct StatisticScore {
  Statistic statistic;
  double mmd2 = 0.0;
  double sigma = 1.0;
};

struct MmdReport {
  std::vector<StatisticScore> scores;
  double aggregate = 0.0;  // mean of the per-statistic scores
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

MmdReport compare_corpora(const Corpus& a, const Corpus& b,
                          std::span<const Statistic> statistics, double sigma = 1.0,
                          unsigned jobs = 1);

// `statistic,mmd2,sigma,n_a,n_b` rows followed by an `aggregate` row.
void write_report(std::ostream& out, const MmdReport& report);

}  // namespace cascadekit::mmd
