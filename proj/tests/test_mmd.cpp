#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cascadekit/error.hpp"
#include "cascadekit/mmd.hpp"
#include "cascadekit/sim.hpp"
#include "support.hpp"

using namespace cascadekit;
using namespace cascadekit::mmd;

namespace {

Corpus random_corpus(std::size_t count, std::uint64_t seed, std::size_t max_size = 40) {
  std::vector<Cascade> out;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(testing::random_tree(1 + rng() % max_size, rng(), "r" + std::to_string(i)));
  }
  return Corpus(std::move(out));
}

Histogram random_histogram(std::mt19937_64& rng) {
  Histogram h(1 + rng() % 8);
  double total = 0.0;
  for (double& v : h) total += v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (double& v : h) v /= total;
  return h;
}

}  // namespace

TEST_CASE("histograms") {
  // Chain of 4: degrees 1, 2, 2, 1.
  CHECK(cascade_histogram(testing::chain(4), Statistic::Degree) == Histogram{0.0, 0.5, 0.5});
  CHECK(cascade_histogram(testing::star(3), Statistic::Degree) == Histogram{0.0, 0.75, 0.0, 0.25});
  CHECK(cascade_histogram(testing::star(3), Statistic::LevelWidth) == Histogram{0.25, 0.75});
  CHECK(cascade_histogram(testing::chain(3), Statistic::DepthProfile) == Histogram{0.0, 0.0, 1.0});
  CHECK(cascade_histogram(testing::chain(1), Statistic::Degree) == Histogram{1.0});
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Cascade c = testing::random_tree(1 + seed * 3, seed);
    for (Statistic s : {Statistic::Degree, Statistic::LevelWidth, Statistic::DepthProfile}) {
      double total = 0.0;
      for (double v : cascade_histogram(c, s)) total += v;
      CHECK(total == doctest::Approx(1.0));
    }
  }
  CHECK(parse_statistics("degree,level_width") ==
        std::vector<Statistic>{Statistic::Degree, Statistic::LevelWidth});
  CHECK_THROWS_AS(parse_statistic("wl"), ValidationError);
}

TEST_CASE("adjacent point masses") {
  const std::vector<Histogram> a{{1.0, 0.0}}, b{{0.0, 1.0}};
  CHECK(wasserstein1(a[0], b[0]) == 1.0);
  CHECK(std::abs(mmd2(a, b, 1.0) - (2.0 - 2.0 * std::exp(-0.5))) <= 1e-9);
  // Unequal lengths are padded with zero mass.
  const std::vector<Histogram> c{{1.0}};
  CHECK(std::abs(mmd2(c, b, 1.0) - (2.0 - 2.0 * std::exp(-0.5))) <= 1e-9);
  CHECK(wasserstein1(Histogram{1.0}, Histogram{0.0, 0.0, 0.0, 1.0}) == 3.0);
}

TEST_CASE("self-distance and symmetry") {
  const Corpus a = random_corpus(40, 1), b = random_corpus(25, 2);
  for (Statistic s : {Statistic::Degree, Statistic::LevelWidth, Statistic::DepthProfile}) {
    CHECK(std::abs(mmd2(a, a, s, 1.0)) <= 1e-12);
    CHECK(mmd2(a, b, s, 1.0) == mmd2(b, a, s, 1.0));
    CHECK(mmd2(a, b, s, 0.7, 1) == mmd2(a, b, s, 0.7, 4));
  }
  const std::vector<Statistic> all{Statistic::Degree, Statistic::LevelWidth, Statistic::DepthProfile};
  const auto self = compare_corpora(a, a, all, 1.0);
  CHECK(std::abs(self.aggregate) <= 1e-12);
  const auto r = compare_corpora(a, b, all, 1.0);
  CHECK(r.n_a == 40);
  CHECK(r.n_b == 25);
  CHECK(r.aggregate == doctest::Approx((r.scores[0].mmd2 + r.scores[1].mmd2 + r.scores[2].mmd2) / 3.0));
}

TEST_CASE("W1 is a metric on random histograms") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const Histogram x = random_histogram(rng), y = random_histogram(rng), z = random_histogram(rng);
    CHECK(wasserstein1(x, x) == 0.0);
    CHECK(wasserstein1(x, y) >= 0.0);
    CHECK(wasserstein1(x, y) == doctest::Approx(wasserstein1(y, x)));
    CHECK(wasserstein1(x, z) <= wasserstein1(x, y) + wasserstein1(y, z) + 1e-12);
  }
}

TEST_CASE("replacing or injecting a foreign cascade increases mmd2") {
  const Corpus base = random_corpus(30, 4, 10);
  const Cascade foreign = testing::chain(60, "foreign");
  std::vector<Cascade> replaced = base.cascades();
  replaced[0] = foreign;
  for (Statistic s : {Statistic::Degree, Statistic::LevelWidth, Statistic::DepthProfile}) {
    CHECK(mmd2(base, Corpus(replaced), s, 1.0) > 0.0);
    double previous = 0.0;
    for (std::size_t k = 1; k <= 5; ++k) {
      std::vector<Cascade> grown = base.cascades();
      for (std::size_t j = 0; j < k; ++j) {
        grown.push_back(testing::chain(60, "foreign" + std::to_string(j)));
      }
      const double d = mmd2(base, Corpus(grown), s, 1.0);
      CHECK(d > previous);
      previous = d;
    }
  }
}

TEST_CASE("mmd errors and report format") {
  const Corpus a = random_corpus(3, 5);
  CHECK_THROWS_AS(mmd2(a, Corpus{}, Statistic::Degree, 1.0), ValidationError);
  CHECK_THROWS_AS(mmd2(a, a, Statistic::Degree, 0.0), ValidationError);
  const std::vector<Statistic> one{Statistic::Degree};
  std::ostringstream out;
  write_report(out, compare_corpora(a, a, one, 1.0));
  CHECK(out.str() == "statistic,mmd2,sigma,n_a,n_b\ndegree,0,1,3,3\naggregate,0,1,3,3\n");
}
