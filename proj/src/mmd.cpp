#include "cascadekit/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "cascadekit/error.hpp"
#include "cascadekit/topo.hpp"
#include "text.hpp"

namespace cascadekit::mmd {

std::string_view statistic_name(Statistic s) {
  switch (s) {
    case Statistic::Degree:
      return "degree";
    case Statistic::LevelWidth:
      return "level_width";
    case Statistic::DepthProfile:
      return "depth_profile";
  }
  return "degree";
}

Statistic parse_statistic(std::string_view name) {
  if (name == "degree") return Statistic::Degree;
  if (name == "level_width") return Statistic::LevelWidth;
  if (name == "depth_profile") return Statistic::DepthProfile;
  throw ValidationError("unknown MMD statistic '" + std::string(name) + "'");
}

std::vector<Statistic> parse_statistics(std::string_view list) {
  std::vector<Statistic> out;
  for (std::string_view name : detail::split(list, ',')) {
    if (!name.empty()) out.push_back(parse_statistic(name));
  }
  if (out.empty()) throw ValidationError("empty MMD statistic list");
  return out;
}

Histogram cascade_histogram(const Cascade& c, Statistic statistic) {
  const double n = static_cast<double>(c.size());
  Histogram h;
  switch (statistic) {
    case Statistic::Degree: {
      std::vector<std::size_t> degree(c.size());
      std::size_t top = 0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        degree[i] = c.children_of(i).size() + (i == c.root() ? 0 : 1);
        top = std::max(top, degree[i]);
      }
      h.assign(top + 1, 0.0);
      for (std::size_t d : degree) h[d] += 1.0;
      break;
    }
    case Statistic::LevelWidth:
      h.assign(topo::depth(c) + 1, 0.0);
      for (std::size_t i = 0; i < c.size(); ++i) h[c.depth_of(i)] += 1.0;
      break;
    case Statistic::DepthProfile:
      h.assign(topo::depth(c) + 1, 0.0);
      h.back() = 1.0;
      return h;
  }
  for (double& v : h) v /= n;
  return h;
}

namespace {

// Running sums of a histogram; W1 is the L1 distance between these.
std::vector<double> cumulative(std::span<const double> h) {
  std::vector<double> out(h.size());
  double run = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = run += h[i];
  return out;
}

double cdf_distance(std::span<const double> ca, std::span<const double> cb) {
  const std::size_t len = std::max(ca.size(), cb.size());
  const double tail_a = ca.empty() ? 0.0 : ca.back();
  const double tail_b = cb.empty() ? 0.0 : cb.back();
  double total = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double x = i < ca.size() ? ca[i] : tail_a;
    const double y = i < cb.size() ? cb[i] : tail_b;
    total += std::abs(x - y);
  }
  return total;
}

double gaussian(double w, double sigma) { return std::exp(-(w * w) / (2.0 * sigma * sigma)); }

// Sum of K(x, y) over all pairs, accumulated in ascending order of value.
double kernel_sum(const std::vector<std::vector<double>>& xs,
                  const std::vector<std::vector<double>>& ys, double sigma, unsigned jobs) {
  std::vector<double> values(xs.size() * ys.size());
  const auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < xs.size(); i += stride) {
      for (std::size_t j = 0; j < ys.size(); ++j) {
        values[i * ys.size() + j] = gaussian(cdf_distance(xs[i], ys[j]), sigma);
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(xs.size())));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
  }
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be positive");
}

}  // namespace

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  return cdf_distance(cumulative(a), cumulative(b));
}

double kernel(std::span<const double> a, std::span<const double> b, double sigma) {
  check_sigma(sigma);
  return gaussian(wasserstein1(a, b), sigma);
}

double mmd2(std::span<const Histogram> a, std::span<const Histogram> b, double sigma,
            unsigned jobs) {
  check_sigma(sigma);
  if (a.empty() || b.empty()) throw ValidationError("MMD needs two non-empty samples");
  std::vector<std::vector<double>> ca, cb;
  ca.reserve(a.size());
  cb.reserve(b.size());
  for (const Histogram& h : a) ca.push_back(cumulative(h));
  for (const Histogram& h : b) cb.push_back(cumulative(h));
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double kaa = kernel_sum(ca, ca, sigma, jobs) / (na * na);
  const double kbb = kernel_sum(cb, cb, sigma, jobs) / (nb * nb);
  const double kab = kernel_sum(ca, cb, sigma, jobs) / (na * nb);
  return (kaa + kbb) - 2.0 * kab;
}

double mmd2(const Corpus& a, const Corpus& b, Statistic statistic, double sigma,
            unsigned jobs) {
  if (a.empty() || b.empty()) throw ValidationError("MMD needs two non-empty corpora");
  std::vector<Histogram> ha, hb;
  for (const Cascade& c : a.cascades()) ha.push_back(cascade_histogram(c, statistic));
  for (const Cascade& c : b.cascades()) hb.push_back(cascade_histogram(c, statistic));
  return mmd2(ha, hb, sigma, jobs);
}

MmdReport compare_corpora(const Corpus& a, const Corpus& b,
                          std::span<const Statistic> statistics, double sigma,
                          unsigned jobs) {
  if (statistics.empty()) throw ValidationError("no MMD statistics requested");
  MmdReport report;
  report.n_a = a.size();
  report.n_b = b.size();
  double total = 0.0;
  for (Statistic s : statistics) {
    const double score = mmd2(a, b, s, sigma, jobs);
    report.scores.push_back({s, score, sigma});
    total += score;
  }
  report.aggregate = total / static_cast<double>(statistics.size());
  return report;
}

void write_report(std::ostream& out, const MmdReport& report) {
  out << "statistic,mmd2,sigma,n_a,n_b\n";
  for (const StatisticScore& s : report.scores) {
    out << statistic_name(s.statistic) << ',' << detail::format_double(s.mmd2) << ','
        << detail::format_double(s.sigma) << ',' << report.n_a << ',' << report.n_b << '\n';
  }
  const double sigma = report.scores.empty() ? 0.0 : report.scores.front().sigma;
  out << "aggregate," << detail::format_double(report.aggregate) << ','
      << detail::format_double(sigma) << ',' << report.n_a << ',' << report.n_b << '\n';
}

}  // namespace cascadekit::mmd
