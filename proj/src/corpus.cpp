#include "cascadekit/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "cascadekit/error.hpp"
#include "text.hpp"

namespace cascadekit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

int current_year() {
  const auto today = std::chrono::floor<std::chrono::days>(
      std::chrono::system_clock::now());
  return static_cast<int>(std::chrono::year_month_day{today}.year());
}

void validate_profile(const UserProfile& p) {
  if (p.uid.empty()) throw ValidationError("profile with empty uid");
  if (p.fans < 0 || p.followings < 0 || p.tweets < 0) {
    throw ValidationError("profile '" + p.uid + "' has a negative count");
  }
  if (p.registration_year < kFirstRegistrationYear ||
      p.registration_year > current_year()) {
    throw ValidationError("profile '" + p.uid + "' has registration year " +
                          std::to_string(p.registration_year) +
                          " outside [" +
                          std::to_string(kFirstRegistrationYear) + ", " +
                          std::to_string(current_year()) + "]");
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::string_view label_name(Label label) {
  switch (label) {
    case Label::Rumor:
      return "rumor";
    case Label::NonRumor:
      return "non-rumor";
    case Label::Unlabeled:
      return "unlabeled";
  }
  return "unlabeled";
}

Label parse_label(std::string_view name) {
  if (name == "rumor") return Label::Rumor;
  if (name == "non-rumor") return Label::NonRumor;
  if (name == "unlabeled") return Label::Unlabeled;
  throw ValidationError("unknown label '" + std::string(name) + "'");
}

// -- Cascade ------------------------------------------------------------------

Cascade::Cascade(std::string id, Label label, std::vector<CascadeNode> nodes,
                 std::optional<std::uint64_t> seed)
    : id_(std::move(id)),
      label_(label),
      nodes_(std::move(nodes)),
      seed_(seed) {
  const auto fail = [this](const std::string& what) -> void {
    throw ValidationError("cascade '" + id_ + "': " + what);
  };
  const std::size_t n = nodes_.size();
  if (n == 0) fail("cascade has no nodes");

  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(n);
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < n; ++i) {
    const CascadeNode& node = nodes_[i];
    if (node.uid.empty()) fail("node " + std::to_string(i) + " has empty uid");
    if (!index.emplace(node.uid, i).second) {
      fail("duplicate node uid '" + node.uid + "'");
    }
    if (!std::isfinite(node.t) || node.t < 0.0) {
      fail("node '" + node.uid + "' has invalid time");
    }
    if (node.profile) {
      if (node.profile->uid != node.uid) {
        fail("node '" + node.uid + "' carries profile of '" +
             node.profile->uid + "'");
      }
      validate_profile(*node.profile);
    }
    if (!node.parent) {
      if (root) {
        fail("multiple roots: '" + nodes_[*root].uid + "' and '" + node.uid +
             "'");
      }
      root = i;
    }
  }
  if (!root) fail("no root node (every node has a parent)");
  root_ = *root;

  parent_.assign(n, kNoParent);
  std::vector<std::size_t> child_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const CascadeNode& node = nodes_[i];
    if (!node.parent) continue;
    auto it = index.find(*node.parent);
    if (it == index.end()) {
      fail("orphan parent: node '" + node.uid + "' has parent '" +
           *node.parent + "' which is not in the cascade");
    }
    parent_[i] = it->second;
    ++child_count[it->second];
  }

  child_offset_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    child_offset_[i + 1] = child_offset_[i] + child_count[i];
  }
  children_.assign(n - 1, 0);
  std::vector<std::size_t> fill(child_offset_.begin(), child_offset_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (parent_[i] != kNoParent) children_[fill[parent_[i]]++] = i;
  }

  depth_.assign(n, 0);
  order_.clear();
  order_.reserve(n);
  order_.push_back(root_);
  for (std::size_t head = 0; head < order_.size(); ++head) {
    const std::size_t u = order_[head];
    for (std::size_t v : children_of(u)) {
      depth_[v] = depth_[u] + 1;
      order_.push_back(v);
    }
  }
  if (order_.size() != n) {
    std::vector<bool> seen(n, false);
    for (std::size_t u : order_) seen[u] = true;
    const auto it = std::find(seen.begin(), seen.end(), false);
    fail("cycle: node '" + nodes_[it - seen.begin()].uid +
         "' is not reachable from the root");
  }

  const double t0 = nodes_[root_].t;
  if (t0 != 0.0) {
    for (CascadeNode& node : nodes_) node.t -= t0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (parent_[i] != kNoParent && nodes_[i].t < nodes_[parent_[i]].t) {
      fail("time inversion: node '" + nodes_[i].uid + "' (t=" +
           std::to_string(nodes_[i].t) + ") precedes its parent '" +
           nodes_[parent_[i]].uid + "'");
    }
  }
}

Cascade Cascade::with_profiles(
    const std::unordered_map<std::string, UserProfile>& table) const {
  Cascade copy = *this;
  for (CascadeNode& node : copy.nodes_) {
    auto it = table.find(node.uid);
    if (it != table.end()) node.profile = it->second;
  }
  return copy;
}

// -- Corpus -------------------------------------------------------------------

Corpus::Corpus(std::vector<Cascade> cascades) : cascades_(std::move(cascades)) {
  std::unordered_set<std::string_view> ids;
  std::size_t nodes = 0;
  std::size_t profiled = 0;
  for (const Cascade& c : cascades_) {
    if (!ids.insert(c.id()).second) {
      throw ValidationError("duplicate cascade id '" + c.id() + "'");
    }
    nodes += c.size();
    for (const CascadeNode& node : c.nodes()) profiled += node.profile ? 1 : 0;
  }
  profile_coverage_ =
      nodes == 0 ? 0.0 : static_cast<double>(profiled) / static_cast<double>(nodes);
}

// -- NDJSON -------------------------------------------------------------------

namespace {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

UserProfile profile_from_json(const json& j) {
  UserProfile p;
  p.uid = j.at("uid").get<std::string>();
  p.fans = j.at("fans").get<std::int64_t>();
  p.followings = j.at("followings").get<std::int64_t>();
  p.tweets = j.at("tweets").get<std::int64_t>();
  p.registration_year = j.at("registration_year").get<int>();
  p.verified = j.at("verified").get<bool>();
  return p;
}

Cascade cascade_from_json(const json& rec) {
  if (!rec.is_object()) throw FormatError("record is not an object");
  std::string id = rec.at("id").get<std::string>();

  Label label = Label::Unlabeled;
  if (auto it = rec.find("label"); it != rec.end() && !it->is_null()) {
    label = parse_label(it->get<std::string>());
  }
  std::optional<std::uint64_t> seed;
  if (auto it = rec.find("seed"); it != rec.end() && !it->is_null()) {
    seed = it->get<std::uint64_t>();
  }

  const json& arr = rec.at("nodes");
  if (!arr.is_array()) throw FormatError("'nodes' is not an array");
  std::vector<CascadeNode> nodes;
  nodes.reserve(arr.size());
  for (const json& jn : arr) {
    CascadeNode node;
    node.uid = jn.at("uid").get<std::string>();
    if (const json& p = jn.at("parent"); !p.is_null()) {
      node.parent = p.get<std::string>();
    }
    const json& t = jn.at("t");
    if (!t.is_number()) throw FormatError("'t' is not a number");
    node.t = t.get<double>();
    if (auto it = jn.find("profile"); it != jn.end() && !it->is_null()) {
      node.profile = profile_from_json(*it);
    }
    nodes.push_back(std::move(node));
  }
  return Cascade(std::move(id), label, std::move(nodes), seed);
}

ordered_json cascade_json(const Cascade& c) {
  ordered_json rec;
  rec["id"] = c.id();
  if (c.label() == Label::Unlabeled) {
    rec["label"] = nullptr;
  } else {
    rec["label"] = std::string(label_name(c.label()));
  }
  if (c.seed()) rec["seed"] = *c.seed();
  ordered_json nodes = ordered_json::array();
  for (const CascadeNode& n : c.nodes()) {
    ordered_json jn;
    jn["uid"] = n.uid;
    jn["parent"] = n.parent ? ordered_json(*n.parent) : ordered_json(nullptr);
    jn["t"] = n.t;
    if (n.profile) {
      const UserProfile& p = *n.profile;
      jn["profile"] = {{"uid", p.uid},
                       {"fans", p.fans},
                       {"followings", p.followings},
                       {"tweets", p.tweets},
                       {"registration_year", p.registration_year},
                       {"verified", p.verified}};
    }
    nodes.push_back(std::move(jn));
  }
  rec["nodes"] = std::move(nodes);
  return rec;
}

}  // namespace

Corpus parse_cascades(std::istream& in, const std::string& source) {
  std::vector<Cascade> cascades;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char ch) { return std::isspace(ch); })) {
      continue;
    }
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(source, lineno, std::string("malformed record: ") + e.what());
    }
    try {
      cascades.push_back(cascade_from_json(rec));
    } catch (const json::exception& e) {
      throw ParseError(source, lineno, std::string("malformed record: ") + e.what());
    } catch (const FormatError& e) {
      throw ParseError(source, lineno, std::string("malformed record: ") + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  try {
    return Corpus(std::move(cascades));
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

Corpus parse_cascades(const std::string& path) {
  auto in = open_input(path);
  return parse_cascades(in, path);
}

std::string cascade_to_json(const Cascade& cascade) {
  return cascade_json(cascade).dump();
}

void write_cascades(std::ostream& out, const Corpus& corpus) {
  for (const Cascade& c : corpus.cascades()) out << cascade_to_json(c) << '\n';
}

void write_cascades(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_cascades(out, corpus);
  if (!out) throw Error("failed writing '" + path + "'");
}

// -- Profiles -----------------------------------------------------------------

namespace {

constexpr std::string_view kProfileHeader =
    "uid,fans,followings,tweets,registration_year,verified";

template <typename Int>
Int parse_int(std::string_view field, const char* name, const std::string& source,
              std::size_t lineno) {
  Int value{};
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(source, lineno,
                     std::string("non-numeric ") + name + " '" +
                         std::string(field) + "'");
  }
  return value;
}

}  // namespace

ProfileTable parse_profiles(std::istream& in, const std::string& source) {
  ProfileTable table;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != kProfileHeader) {
        throw ParseError(source, lineno,
                         "expected header '" + std::string(kProfileHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 6) {
      throw ParseError(source, lineno,
                       "expected 6 fields, got " + std::to_string(fields.size()));
    }
    UserProfile p;
    p.uid = std::string(fields[0]);
    p.fans = parse_int<std::int64_t>(fields[1], "fans", source, lineno);
    p.followings = parse_int<std::int64_t>(fields[2], "followings", source, lineno);
    p.tweets = parse_int<std::int64_t>(fields[3], "tweets", source, lineno);
    p.registration_year =
        parse_int<int>(fields[4], "registration_year", source, lineno);
    if (fields[5] == "true") {
      p.verified = true;
    } else if (fields[5] == "false") {
      p.verified = false;
    } else {
      throw ParseError(source, lineno,
                       "verified must be true or false, got '" +
                           std::string(fields[5]) + "'");
    }
    try {
      validate_profile(p);
    } catch (const ValidationError& e) {
      throw ParseError(source, lineno, e.what());
    }
    const std::string uid = p.uid;
    if (!table.emplace(uid, std::move(p)).second) {
      throw ParseError(source, lineno, "duplicate uid '" + uid + "'");
    }
  }
  if (!header_seen) throw ParseError(source, 1, "missing header");
  return table;
}

ProfileTable parse_profiles(const std::string& path) {
  auto in = open_input(path);
  return parse_profiles(in, path);
}

void write_profiles(std::ostream& out, std::span<const UserProfile> profiles) {
  out << kProfileHeader << '\n';
  for (const UserProfile& p : profiles) {
    out << p.uid << ',' << p.fans << ',' << p.followings << ',' << p.tweets
        << ',' << p.registration_year << ',' << (p.verified ? "true" : "false")
        << '\n';
  }
}

Corpus attach_profiles(const Corpus& corpus, const ProfileTable& table) {
  std::vector<Cascade> out;
  out.reserve(corpus.size());
  for (const Cascade& c : corpus.cascades()) out.push_back(c.with_profiles(table));
  return Corpus(std::move(out));
}

Corpus attach_profiles(const Corpus& corpus, const std::string& path) {
  return attach_profiles(corpus, parse_profiles(path));
}

// -- Summary ------------------------------------------------------------------

namespace {

struct Accumulator {
  std::size_t cascades = 0;
  double size_sum = 0, depth_sum = 0;
  double size_min = 0, size_max = 0, depth_min = 0, depth_max = 0;

  void add(double size, double depth) {
    if (cascades == 0) {
      size_min = size_max = size;
      depth_min = depth_max = depth;
    }
    size_min = std::min(size_min, size);
    size_max = std::max(size_max, size);
    depth_min = std::min(depth_min, depth);
    depth_max = std::max(depth_max, depth);
    size_sum += size;
    depth_sum += depth;
    ++cascades;
  }

  LabelSummary finish() const {
    LabelSummary s;
    s.cascades = cascades;
    if (cascades == 0) return s;
    const double n = static_cast<double>(cascades);
    s.size = {cascades, size_min, size_max, size_sum / n};
    s.depth = {cascades, depth_min, depth_max, depth_sum / n};
    return s;
  }
};

ordered_json label_summary_json(const LabelSummary& s) {
  const auto range = [](const RangeStats& r) {
    return ordered_json{{"min", r.min}, {"max", r.max}, {"mean", r.mean}};
  };
  ordered_json j;
  j["cascades"] = s.cascades;
  if (s.cascades > 0) {
    j["size"] = range(s.size);
    j["depth"] = range(s.depth);
  }
  return j;
}

}  // namespace

CorpusSummary corpus_summary(const Corpus& corpus) {
  if (corpus.empty()) throw ValidationError("corpus summary of an empty corpus");
  Accumulator all, rumor, non_rumor, unlabeled;
  std::unordered_set<std::string_view> users;
  std::size_t nodes = 0;
  for (const Cascade& c : corpus.cascades()) {
    std::size_t depth = 0;
    for (std::size_t i = 0; i < c.size(); ++i) depth = std::max(depth, c.depth_of(i));
    const double size = static_cast<double>(c.size());
    all.add(size, static_cast<double>(depth));
    switch (c.label()) {
      case Label::Rumor:
        rumor.add(size, static_cast<double>(depth));
        break;
      case Label::NonRumor:
        non_rumor.add(size, static_cast<double>(depth));
        break;
      case Label::Unlabeled:
        unlabeled.add(size, static_cast<double>(depth));
        break;
    }
    for (const CascadeNode& n : c.nodes()) users.insert(n.uid);
    nodes += c.size();
  }
  CorpusSummary s;
  s.users = users.size();
  s.cascades = corpus.size();
  s.nodes = nodes;
  s.profile_coverage = corpus.profile_coverage();
  s.overall = all.finish();
  s.rumor = rumor.finish();
  s.non_rumor = non_rumor.finish();
  s.unlabeled = unlabeled.finish();
  return s;
}

std::string summary_to_json(const CorpusSummary& s) {
  ordered_json j;
  j["users"] = s.users;
  j["cascades"] = s.cascades;
  j["nodes"] = s.nodes;
  j["profile_coverage"] = s.profile_coverage;
  j["overall"] = label_summary_json(s.overall);
  j["rumor"] = label_summary_json(s.rumor);
  j["non_rumor"] = label_summary_json(s.non_rumor);
  j["unlabeled"] = label_summary_json(s.unlabeled);
  return j.dump(2);
}

}  // namespace cascadekit
