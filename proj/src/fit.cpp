#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "cascadekit/error.hpp"
#include "cascadekit/stats.hpp"

namespace cascadekit::stats {

namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("sample contains a non-finite value");
  }
}

double mean_of(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

// Biased (MLE) standard deviation.
double stddev_of(std::span<const double> values, double mean) {
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2 pi) / 2

double nllf_of(const FitResult& fit, std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total -= fit.log_pdf(v);
  return total;
}

std::vector<double> shifted_positive(std::span<const double> values, double loc,
                                     const char* family) {
  std::vector<double> z;
  z.reserve(values.size());
  for (double v : values) {
    if (!(v > loc)) {
      throw DegenerateSampleError(std::string(family) +
                                  " fit requires every value above the location");
    }
    z.push_back(v - loc);
  }
  return z;
}

FitResult fit_gamma(std::span<const double> values, const FitOptions& opt) {
  const std::vector<double> z = shifted_positive(values, opt.fixed_location, "gamma");
  const double m = mean_of(z);
  double mean_log = 0.0;
  for (double v : z) mean_log += std::log(v);
  mean_log /= static_cast<double>(z.size());
  const double s = std::log(m) - mean_log;
  const double sd = stddev_of(z, m);
  if (!(s > 0.0) || !(sd > 0.0)) throw DegenerateSampleError("gamma fit of a zero-variance sample");

  // Profile likelihood in the shape: log k - digamma(k) = s.
  double k = m * m / (sd * sd);
  bool converged = false;
  for (int it = 0; it < opt.gamma_max_iterations; ++it) {
    const double f = std::log(k) - boost::math::digamma(k) - s;
    const double df = 1.0 / k - boost::math::trigamma(k);
    double next = k - f / df;
    if (!(next > 0.0)) next = k / 2.0;
    const double step = std::abs(next - k);
    k = next;
    if (step <= opt.gamma_tolerance * k) {
      converged = true;
      break;
    }
  }
  if (!converged) throw DegenerateSampleError("gamma shape iteration did not converge");

  FitResult fit;
  fit.family = Family::Gamma;
  fit.location = opt.fixed_location;
  fit.shape = k;
  fit.scale = m / k;
  return fit;
}

}  // namespace

// -- CCDF ---------------------------------------------------------------------

CcdfCurve ccdf(std::span<const double> values) {
  if (values.empty()) throw ValidationError("CCDF of an empty sample");
  require_finite(values);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  CcdfCurve curve;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    // i + 1 values are <= sorted[i].
    curve.push_back({sorted[i], (n - static_cast<double>(i + 1)) / n});
  }
  return curve;
}

// -- families -----------------------------------------------------------------

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Exponential:
      return "exponential";
    case Family::Gamma:
      return "gamma";
    case Family::Lognormal:
      return "lognormal";
    case Family::Normal:
      return "normal";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  throw ValidationError("unknown distribution family '" + std::string(name) + "'");
}

std::vector<std::pair<std::string, double>> FitResult::params() const {
  std::vector<std::pair<std::string, double>> out{{"location", location}, {"scale", scale}};
  if (shape) out.emplace_back("shape", *shape);
  return out;
}

double FitResult::log_pdf(double x) const {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  switch (family) {
    case Family::Exponential:
      if (x < location) return kNegInf;
      return -std::log(scale) - (x - location) / scale;
    case Family::Gamma: {
      const double z = x - location;
      if (z <= 0.0) return kNegInf;
      const double k = *shape;
      return (k - 1.0) * std::log(z) - z / scale - std::lgamma(k) - k * std::log(scale);
    }
    case Family::Lognormal: {
      const double z = x - location;
      if (z <= 0.0) return kNegInf;
      const double sigma = *shape;
      const double u = (std::log(z) - std::log(scale)) / sigma;
      return -0.5 * u * u - std::log(sigma) - kHalfLog2Pi - std::log(z);
    }
    case Family::Normal: {
      const double u = (x - location) / scale;
      return -0.5 * u * u - std::log(scale) - kHalfLog2Pi;
    }
  }
  return kNegInf;
}

double FitResult::pdf(double x) const { return std::exp(log_pdf(x)); }

double FitResult::cdf(double x) const {
  switch (family) {
    case Family::Exponential:
      return x <= location ? 0.0 : -std::expm1(-(x - location) / scale);
    case Family::Gamma: {
      const double z = x - location;
      return z <= 0.0 ? 0.0 : boost::math::gamma_p(*shape, z / scale);
    }
    case Family::Lognormal: {
      const double z = x - location;
      return z <= 0.0 ? 0.0 : normal_cdf((std::log(z) - std::log(scale)) / *shape);
    }
    case Family::Normal:
      return normal_cdf((x - location) / scale);
  }
  return 0.0;
}

FitResult fit_mle(std::span<const double> values, Family family, const FitOptions& opt) {
  if (values.size() < std::max<std::size_t>(opt.min_samples, 2)) {
    throw InsufficientSampleError(std::string(family_name(family)) + " fit needs at least " +
                                  std::to_string(std::max<std::size_t>(opt.min_samples, 2)) +
                                  " values, got " + std::to_string(values.size()));
  }
  require_finite(values);

  FitResult fit;
  switch (family) {
    case Family::Exponential: {
      const double lo = *std::min_element(values.begin(), values.end());
      const double scale = mean_of(values) - lo;
      if (!(scale > 0.0)) throw DegenerateSampleError("exponential fit of a zero-variance sample");
      fit.family = family;
      fit.location = lo;
      fit.scale = scale;
      break;
    }
    case Family::Gamma:
      fit = fit_gamma(values, opt);
      break;
    case Family::Lognormal: {
      std::vector<double> logs = shifted_positive(values, opt.fixed_location, "lognormal");
      for (double& v : logs) v = std::log(v);
      const double mu = mean_of(logs);
      const double sigma = stddev_of(logs, mu);
      if (!(sigma > 0.0)) throw DegenerateSampleError("lognormal fit of a zero-variance sample");
      fit.family = family;
      fit.location = opt.fixed_location;
      fit.scale = std::exp(mu);
      fit.shape = sigma;
      break;
    }
    case Family::Normal: {
      const double mu = mean_of(values);
      const double sd = stddev_of(values, mu);
      if (!(sd > 0.0)) throw DegenerateSampleError("normal fit of a zero-variance sample");
      fit.family = family;
      fit.location = mu;
      fit.scale = sd;
      break;
    }
  }
  fit.n = values.size();
  fit.nllf = nllf_of(fit, values);
  return fit;
}

FamilyRanking rank_families(std::span<const double> values, const FitOptions& opt) {
  FamilyRanking ranking;
  std::exception_ptr last_error;
  for (Family f : kAllFamilies) {
    try {
      ranking.fits.push_back(fit_mle(values, f, opt));
    } catch (const Error& e) {
      ranking.excluded.emplace_back(f, e.what());
      last_error = std::current_exception();
    }
  }
  if (ranking.fits.empty()) std::rethrow_exception(last_error);
  std::stable_sort(ranking.fits.begin(), ranking.fits.end(),
                   [](const FitResult& a, const FitResult& b) { return a.nllf < b.nllf; });
  return ranking;
}

// -- Kolmogorov-Smirnov ---------------------------------------------------------

double ks_statistic(std::span<const double> values, const FitResult& fitted) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = fitted.cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_p_value(double d_stat, std::size_t n) {
  const double en = std::sqrt(static_cast<double>(n));
  const double lambda = (en + 0.12 + 0.11 / en) * d_stat;
  // Q(lambda) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2); it is 1 to
  // double precision below ~0.2, where the alternating series converges slowly.
  if (lambda < 0.2) return 1.0;
  const double a = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 2.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(a * j * j);
    sum += term;
    if (std::abs(term) <= 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> values, const FitResult& fitted) {
  KsResult r;
  r.fitted = fitted;
  r.d_stat = ks_statistic(values, fitted);
  r.p_value = kolmogorov_p_value(r.d_stat, values.size());
  return r;
}

KsResult ks_exponential(std::span<const double> values, const FitOptions& opt) {
  return ks_test(values, fit_mle(values, Family::Exponential, opt));
}

}  // namespace cascadekit::stats
