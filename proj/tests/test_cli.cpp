#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "cascadekit/cli.hpp"
#include "cascadekit/corpus.hpp"

namespace fs = std::filesystem;
using namespace cascadekit;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "cascadekit");
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("cascadekit_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

const char* kCascades =
    R"({"id":"r1","label":"rumor","nodes":[{"uid":"a","parent":null,"t":0},{"uid":"b","parent":"a","t":1},{"uid":"c","parent":"b","t":3}]})"
    "\n"
    R"({"id":"n1","label":"non-rumor","nodes":[{"uid":"d","parent":null,"t":0},{"uid":"e","parent":"d","t":2},{"uid":"f","parent":"d","t":2},{"uid":"g","parent":"e","t":5}]})"
    "\n"
    R"({"id":"r2","label":"rumor","nodes":[{"uid":"h","parent":null,"t":0},{"uid":"i","parent":"h","t":1}]})"
    "\n"
    R"({"id":"n2","label":"non-rumor","nodes":[{"uid":"a","parent":null,"t":0},{"uid":"d","parent":"a","t":4}]})"
    "\n";

const char* kProfiles =
    "uid,fans,followings,tweets,registration_year,verified\n"
    "a,10,5,100,2015,true\n"
    "b,3,40,20,2018,false\n"
    "d,5000,12,900,2010,true\n"
    "e,7,7,7,2020,false\n"
    "h,2,9,50,2019,false\n";

}  // namespace

TEST_CASE("simulate example") {
  const auto r = run({"simulate", "--scenario", "homogeneous", "--n", "100", "--rate", "0", "--seed", "7",
                      "--runs", "1", "--out", "-"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  const Corpus c = parse_cascades(in);
  REQUIRE(c.size() == 1);
  CHECK(c.cascades()[0].size() == 1);
  CHECK(c.cascades()[0].seed() == 7u);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({"simulate", "--scenario", "homogeneous", "--out", "-"}).code == 2);
  CHECK(run({"generate", "--n", "5", "--out", "-"}).code == 2);
  CHECK(run({"simulate", "--seed", "1", "--out", "-", "--bogus", "3"}).code == 2);
  CHECK(run({"simulate", "--seed", "1", "--out", "-", "--scenario", "ring"}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("validation errors exit 1 and name the file") {
  TempDir dir("cli_errors");
  spit(dir / "m.csv", "");
  const auto r = run({"ccdf", "--metrics", dir / "m.csv", "--feature", "depth", "--out", "-"});
  CHECK(r.code == 1);
  CHECK(r.err.find(dir / "m.csv") != std::string::npos);
  CHECK(r.out.empty());

  spit(dir / "bad.ndjson", "{\"id\":\"x\",\"nodes\":[{\"uid\":\"a\",\"parent\":\"z\",\"t\":0}]}\n");
  const auto bad = run({"metrics", "--corpus", dir / "bad.ndjson", "--out", "-"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("bad.ndjson") != std::string::npos);
  CHECK(run({"metrics", "--corpus", dir / "missing.ndjson", "--out", "-"}).code == 1);
}

TEST_CASE("full pipeline is byte-identical across invocations") {
  TempDir dir("cli_pipeline");
  spit(dir / "cascades.ndjson", kCascades);
  spit(dir / "profiles.csv", kProfiles);
  const auto pipeline = [&](const std::string& tag) {
    const auto f = [&](const std::string& name) { return dir / (tag + "_" + name); };
    std::vector<std::vector<std::string>> steps{
        {"ingest", "--cascades", dir / "cascades.ndjson", "--profiles", dir / "profiles.csv", "--out",
         f("corpus.ndjson"), "--summary", f("summary.json")},
        {"metrics", "--corpus", f("corpus.ndjson"), "--out", f("metrics.csv")},
        {"ccdf", "--metrics", f("metrics.csv"), "--feature", "size", "--by-label", "--out", f("ccdf.csv")},
        {"fit", "--metrics", f("metrics.csv"), "--feature", "size", "--rank-all", "--ks", "--min-samples", "3",
         "--out", f("fit.jsonl")},
        {"rank", "--corpus", f("corpus.ndjson"), "--out", f("rank.csv")},
        {"groups", "--metrics", f("metrics.csv"), "--feature", "size", "--out", f("groups.csv")},
        {"verify", "--corpus", f("corpus.ndjson"), "--out", f("verify.csv")},
        {"simulate", "--scenario", "heterogeneous", "--n", "50", "--cee", "entropy", "--runs", "20", "--seed",
         "3", "--jobs", "3", "--out", f("sim.ndjson")},
        {"generate", "--n", "30", "--score", "mixed", "--profiles", dir / "profiles.csv", "--runs", "5",
         "--seed", "9", "--out", f("gen.ndjson")},
        {"metrics", "--corpus", f("sim.ndjson"), "--features", "size,depth,structural_virality", "--out",
         f("sim_metrics.csv")},
        {"compare", "--a", f("sim.ndjson"), "--b", f("gen.ndjson"), "--out", f("compare.csv")},
    };
    for (const auto& step : steps) {
      const auto r = run(step);
      CAPTURE(step[0]);
      CAPTURE(r.err);
      REQUIRE(r.code == 0);
    }
  };
  pipeline("one");
  pipeline("two");
  for (const std::string name : {"corpus.ndjson", "summary.json", "metrics.csv", "ccdf.csv", "fit.jsonl",
                                 "rank.csv", "groups.csv", "verify.csv", "sim.ndjson", "gen.ndjson",
                                 "sim_metrics.csv", "compare.csv"}) {
    CAPTURE(name);
    const std::string a = slurp(dir / ("one_" + name));
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / ("two_" + name)));
  }

  CHECK(slurp(dir / "one_verify.csv") ==
        "role,label,verified,profiled,excluded,ratio\n"
        "source,rumor,1,2,0,0.5\n"
        "source,non-rumor,2,2,0,1\n"
        "participant,rumor,0,1,2,0\n"
        "participant,non-rumor,1,2,2,0.5\n");
  CHECK(slurp(dir / "one_groups.csv") ==
        "feature,label,count,mean,median\n"
        "size,rumor,2,2.5,2.5\n"
        "size,non-rumor,2,3,3\n"
        "size,all,4,2.75,2.5\n");
  const std::string ccdf = slurp(dir / "one_ccdf.csv");
  CHECK(ccdf.rfind("feature,label,x,survival\n", 0) == 0);
  CHECK(ccdf.find("size,rumor,2,0.5\n") != std::string::npos);
  const std::string rank = slurp(dir / "one_rank.csv");
  CHECK(rank.rfind("rank,feature,chi2\n1,", 0) == 0);
}

TEST_CASE("config file values are overridden by explicit flags") {
  TempDir dir("cli_config");
  spit(dir / "sim.cfg", "# homogeneous certainty run\nscenario = homogeneous\nn = 12\nrate = 1\nfanout = 11\n");
  const auto from_config = run({"simulate", "--config", dir / "sim.cfg", "--seed", "1", "--out", "-"});
  REQUIRE(from_config.code == 0);
  std::istringstream in(from_config.out);
  CHECK(parse_cascades(in).cascades()[0].size() == 12);

  const auto overridden =
      run({"simulate", "--config", dir / "sim.cfg", "--rate", "0", "--seed", "1", "--out", "-"});
  REQUIRE(overridden.code == 0);
  std::istringstream in2(overridden.out);
  CHECK(parse_cascades(in2).cascades()[0].size() == 1);

  spit(dir / "bad.cfg", "bogus_key = 1\n");
  CHECK(run({"simulate", "--config", dir / "bad.cfg", "--seed", "1", "--out", "-"}).code == 2);
  spit(dir / "broken.cfg", "no equals sign\n");
  CHECK(run({"simulate", "--config", dir / "broken.cfg", "--seed", "1", "--out", "-"}).code == 1);
}

TEST_CASE("installed binary") {
  TempDir dir("cli_binary");
  const std::string out = dir / "sim.ndjson";
  const std::string cmd = std::string(CASCADEKIT_CLI_PATH) +
                          " simulate --scenario barabasi_albert --n 40 --seed 5 --runs 4 --out " + out;
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(parse_cascades(out).size() == 4);
  const std::string missing = std::string(CASCADEKIT_CLI_PATH) + " simulate --out " + out + " 2>/dev/null";
  const int status = std::system(missing.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
