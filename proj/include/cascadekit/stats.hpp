#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cascadekit/corpus.hpp"
#include "cascadekit/topo.hpp"

namespace cascadekit::stats {

// -- CCDF ---------------------------------------------------------------------

struct CcdfPoint {
  double x = 0.0;
  double survival = 0.0;

  friend bool operator==(const CcdfPoint&, const CcdfPoint&) = default;
};
using CcdfCurve = std::vector<CcdfPoint>;

// P(X > x) at every distinct sample value. Throws on empty or non-finite input.
CcdfCurve ccdf(std::span<const double> values);

// -- distribution fitting -------------------------------------------------------

enum class Family { Exponential, Gamma, Lognormal, Normal };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);
inline constexpr std::array<Family, 4> kAllFamilies{Family::Exponential, Family::Gamma,
                                                    Family::Lognormal, Family::Normal};

// Maximum-likelihood fit of one family.
//
// Parameterisation, with location `loc`, scale `s` and shape `k`:
//   exponential  f(x) = exp(-(x - loc)/s) / s,  x >= loc
//   gamma        f(x) = (x - loc)^(k-1) exp(-(x - loc)/s) / (Gamma(k) s^k)
//   lognormal    f(x) = N(log(x - loc); log s, k^2) / (x - loc)
//   normal       f(x) = N(x; loc, s^2)
// Gamma and lognormal hold loc fixed (0 by default).
struct FitResult {
  Family family = Family::Exponential;
  double location = 0.0;
  double scale = 1.0;
  std::optional<double> shape;
  double nllf = 0.0;
  std::size_t n = 0;

  // (name, value) pairs for export.
  std::vector<std::pair<std::string, double>> params() const;
  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
};

struct FitOptions {
  std::size_t min_samples = 8;
  // Fixed location for gamma and lognormal.
  double fixed_location = 0.0;
  double gamma_tolerance = 1e-10;
  int gamma_max_iterations = 200;
};

// Throws InsufficientSampleError when n < min_samples and
// DegenerateSampleError for zero spread or values outside the support.
FitResult fit_mle(std::span<const double> values, Family family,
                  const FitOptions& options = {});

struct FamilyRanking {
  std::vector<FitResult> fits;  // ascending nllf
  std::vector<std::pair<Family, std::string>> excluded;
};

// Fits every family and orders them by NLLF. Families whose fit fails are
// listed in `excluded`; throws the last failure if none succeed.
FamilyRanking rank_families(std::span<const double> values,
                            const FitOptions& options = {});

// -- Kolmogorov-Smirnov ----------------------------------------------------------

struct KsResult {
  double d_stat = 0.0;
  double p_value = 1.0;
  FitResult fitted;
};

// sup |F_n - F| over both one-sided gaps at the sorted sample points.
double ks_statistic(std::span<const double> values, const FitResult& fitted);
// Asymptotic Kolmogorov tail with the Stephens effective-n correction.
double kolmogorov_p_value(double d_stat, std::size_t n);
// Goodness of fit of an already-fitted distribution to the same sample.
KsResult ks_test(std::span<const double> values, const FitResult& fitted);
KsResult ks_exponential(std::span<const double> values, const FitOptions& options = {});

// -- chi-squared feature ranking -------------------------------------------------

struct ChiSquaredEntry {
  std::string feature;
  double chi2 = 0.0;
};

struct ChiSquaredRanking {
  std::vector<ChiSquaredEntry> entries;  // descending chi2, ties by name
  // Summands dropped because a class mean of the scaled feature was below
  // 1e-12 (e.g. a feature that is identically 0 within one class).
  std::size_t dropped_terms = 0;
};

// `columns[j][i]` is feature j of sample i; `labels[i]` (Rumor or NonRumor)
// is the class of sample i. Each column is min-max scaled to [0, 1], then scored with
//   sum_i (x'_ij - mu_j0)^2 / mu_j0 + (x'_ij - mu_j1)^2 / mu_j1
// where mu_j0 / mu_j1 are the non-rumor / rumor means of the scaled column.
// Throws ValidationError unless both classes have at least two samples.
ChiSquaredRanking rank_features(std::span<const std::vector<double>> columns,
                                std::span<const std::string> names,
                                std::span<const Label> labels);

// Per-cascade user-attribute matrix: mean fans, followings, tweets and
// registration year over profiled nodes, plus the verified fraction.
// Only labelled cascades with at least one profile contribute a row.
struct AttributeMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::vector<Label> labels;
  std::vector<std::string> cascade_ids;
  std::size_t skipped = 0;
};
AttributeMatrix cascade_attributes(const Corpus& corpus);

// -- label groups ---------------------------------------------------------------

struct GroupStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
};

struct GroupSummary {
  std::map<Label, GroupStats> by_label;  // only labels present in the series
  GroupStats overall;
};

GroupSummary label_group_summary(const topo::MetricSeries& series);

struct RatioCell {
  std::size_t verified = 0;
  std::size_t profiled = 0;
  std::size_t excluded = 0;  // nodes in this cell with no profile
  std::optional<double> ratio;  // empty when no node in the cell has a profile
};

// Verified fraction of sources and of participants (non-root nodes), for
// rumor and non-rumor cascades. Unlabelled cascades are ignored.
struct VerificationTable {
  RatioCell source_rumor;
  RatioCell source_non_rumor;
  RatioCell participant_rumor;
  RatioCell participant_non_rumor;
};

// Throws ValidationError when no node in the corpus carries a profile.
VerificationTable verification_ratios(const Corpus& corpus);

}  // namespace cascadekit::stats
