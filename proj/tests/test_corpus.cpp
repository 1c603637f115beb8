#include <doctest.h>

#include <sstream>

#include "cascadekit/corpus.hpp"
#include "cascadekit/error.hpp"
#include "support.hpp"

using namespace cascadekit;

namespace {

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_cascades(in, "test.ndjson");
}

ProfileTable profiles(const std::string& text) {
  std::istringstream in(text);
  return parse_profiles(in, "profiles.csv");
}

template <typename E>
std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const E& e) {
    return e.what();
  }
  FAIL("expected an exception");
  return {};
}

}  // namespace

TEST_CASE("minimal record parses to one cascade of size one") {
  const Corpus c = parse(R"({"id":"c1","label":"rumor","nodes":[{"uid":"a","parent":null,"t":0}]})");
  REQUIRE(c.size() == 1);
  CHECK(c.cascades()[0].size() == 1);
  CHECK(c.cascades()[0].label() == Label::Rumor);
}

TEST_CASE("chain record") {
  const Corpus c = parse(
      R"({"id":"c","label":"non-rumor","nodes":[{"uid":"a","parent":null,"t":0},)"
      R"({"uid":"b","parent":"a","t":1},{"uid":"c","parent":"b","t":2}]})");
  const Cascade& k = c.cascades()[0];
  CHECK(k.size() == 3);
  CHECK(k.nodes()[k.root()].uid == "a");
  CHECK(k.depth_of(2) == 2);
  CHECK(k.label() == Label::NonRumor);
}

TEST_CASE("null label and blank lines") {
  const Corpus c = parse("\n" R"({"id":"x","label":null,"nodes":[{"uid":"a","parent":null,"t":0}]})" "\n\n");
  CHECK(c.cascades()[0].label() == Label::Unlabeled);
}

TEST_CASE("root time is normalized to zero") {
  const Corpus c = parse(
      R"({"id":"c","label":null,"nodes":[{"uid":"b","parent":"a","t":105},{"uid":"a","parent":null,"t":100}]})");
  const Cascade& k = c.cascades()[0];
  CHECK(k.nodes()[k.root()].t == 0.0);
  CHECK(k.nodes()[0].t == 5.0);
}

TEST_CASE("validation errors name cascade and node") {
  const auto orphan = error_of<ValidationError>(
      R"({"id":"c9","label":null,"nodes":[{"uid":"a","parent":null,"t":0},{"uid":"b","parent":"z","t":1}]})");
  CHECK(orphan.find("orphan parent") != std::string::npos);
  CHECK(orphan.find("c9") != std::string::npos);
  CHECK(orphan.find("'b'") != std::string::npos);

  const auto roots = error_of<ValidationError>(
      R"({"id":"c","label":null,"nodes":[{"uid":"a","parent":null,"t":0},{"uid":"b","parent":null,"t":1}]})");
  CHECK(roots.find("multiple roots") != std::string::npos);

  const auto inversion = error_of<ValidationError>(
      R"({"id":"c","label":null,"nodes":[{"uid":"a","parent":null,"t":0},{"uid":"b","parent":"a","t":5},{"uid":"c","parent":"b","t":3}]})");
  CHECK(inversion.find("time inversion") != std::string::npos);
  CHECK(inversion.find("'c'") != std::string::npos);

  const auto cycle = error_of<ValidationError>(
      R"({"id":"c","label":null,"nodes":[{"uid":"a","parent":null,"t":0},{"uid":"b","parent":"c","t":1},{"uid":"c","parent":"b","t":1}]})");
  CHECK(cycle.find("cycle") != std::string::npos);

  CHECK(error_of<ValidationError>(
            R"({"id":"c","label":null,"nodes":[{"uid":"a","parent":null,"t":0},{"uid":"a","parent":"a","t":1}]})")
            .find("duplicate node uid") != std::string::npos);
  CHECK(error_of<ValidationError>(R"({"id":"c","label":null,"nodes":[]})").find("no nodes") !=
        std::string::npos);
  CHECK(error_of<ValidationError>(
            R"({"id":"c","label":null,"nodes":[{"uid":"a","parent":null,"t":0}]})"
            "\n"
            R"({"id":"c","label":null,"nodes":[{"uid":"a","parent":null,"t":0}]})")
            .find("duplicate cascade id") != std::string::npos);
}

TEST_CASE("malformed records report the line number") {
  try {
    parse(R"({"id":"a","label":null,"nodes":[{"uid":"a","parent":null,"t":0}]})"
          "\n{not json\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("test.ndjson:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse(R"({"id":"a","label":"maybe","nodes":[{"uid":"a","parent":null,"t":0}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse(R"({"id":"a","label":null,"nodes":[{"uid":"a","parent":null,"t":"x"}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse(R"({"id":"a","label":null})"), ParseError);
  CHECK_THROWS_AS(parse(R"([1,2])"), ParseError);
}

TEST_CASE("round trip: serialize then parse yields the same corpus") {
  std::vector<Cascade> cascades;
  for (std::uint64_t s = 0; s < 40; ++s) {
    Cascade c = testing::random_tree(1 + s * 3, s, "r" + std::to_string(s));
    std::vector<CascadeNode> nodes = c.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      nodes[i].t = nodes[i].t * 1.37 + (nodes[i].parent ? 0.1 : 0.0);
      if (i % 3 == 0) {
        nodes[i].profile = UserProfile{nodes[i].uid, static_cast<std::int64_t>(i), 7, 11,
                                       2010 + static_cast<int>(i % 10), i % 2 == 0};
      }
    }
    const Label label = s % 3 == 0 ? Label::Rumor : s % 3 == 1 ? Label::NonRumor : Label::Unlabeled;
    cascades.emplace_back(c.id(), label, std::move(nodes),
                          s % 2 ? std::optional<std::uint64_t>(s * 1000003) : std::nullopt);
  }
  const Corpus original(std::move(cascades));
  std::ostringstream out;
  write_cascades(out, original);
  const Corpus again = parse(out.str());
  CHECK(again == original);
  CHECK(again.profile_coverage() == doctest::Approx(original.profile_coverage()));
  std::ostringstream out2;
  write_cascades(out2, again);
  CHECK(out2.str() == out.str());
}

TEST_CASE("attach_profiles") {
  const Corpus corpus(std::vector<Cascade>{testing::chain(3)});
  const std::string header = "uid,fans,followings,tweets,registration_year,verified\n";

  SUBCASE("partial coverage") {
    const Corpus out = attach_profiles(corpus, profiles(header + "n0,10,5,100,2015,true\nn2,1,2,3,2020,false\nzz,1,1,1,2019,false\n"));
    CHECK(out.profile_coverage() == doctest::Approx(2.0 / 3.0));
    const auto& n0 = out.cascades()[0].nodes()[0];
    REQUIRE(n0.profile);
    CHECK(n0.profile->fans == 10);
    CHECK(n0.profile->followings == 5);
    CHECK(n0.profile->tweets == 100);
    CHECK(n0.profile->registration_year == 2015);
    CHECK(n0.profile->verified);
    CHECK_FALSE(out.cascades()[0].nodes()[1].profile);
  }
  SUBCASE("empty table") {
    const Corpus out = attach_profiles(corpus, profiles(header));
    CHECK(out.profile_coverage() == 0.0);
  }
  SUBCASE("idempotent") {
    const auto table = profiles(header + "n1,3,4,5,2012,true\n");
    const Corpus once = attach_profiles(corpus, table);
    CHECK(attach_profiles(once, table) == once);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(profiles(header + "a,1,1,1,2015,true\na,2,2,2,2016,false\n"), ParseError);
    try {
      profiles(header + "a,1,1,1,2015,true\nb,x,1,1,2015,true\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(profiles("uid,fans\n"), ParseError);
    CHECK_THROWS_AS(profiles(""), ParseError);
    CHECK_THROWS_AS(profiles(header + "a,-1,1,1,2015,true\n"), ParseError);
    CHECK_THROWS_AS(profiles(header + "a,1,1,1,1999,true\n"), ParseError);
    CHECK_THROWS_AS(profiles(header + "a,1,1,1,2015,yes\n"), ParseError);
    CHECK_THROWS_AS(profiles(header + "a,1,1,1,2015\n"), ParseError);
  }
}

TEST_CASE("corpus summary") {
  const Corpus corpus(std::vector<Cascade>{testing::chain(3, "a", Label::Rumor),
                                           testing::chain(5, "b", Label::NonRumor)});
  const CorpusSummary s = corpus_summary(corpus);
  CHECK(s.cascades == 2);
  CHECK(s.overall.size.mean == doctest::Approx(4.0));
  CHECK(s.overall.depth.mean == doctest::Approx(3.0));
  CHECK(s.overall.size.min == 3);
  CHECK(s.overall.size.max == 5);
  CHECK(s.rumor.cascades == 1);
  CHECK(s.rumor.depth.max == 2);
  CHECK(s.non_rumor.size.mean == 5);
  CHECK(s.unlabeled.cascades == 0);
  // Both chains reuse uids n0..n2.
  CHECK(s.users == 5);
  CHECK_THROWS_AS(corpus_summary(Corpus{}), ValidationError);
  CHECK(summary_to_json(s).find("\"cascades\": 2") != std::string::npos);
}
