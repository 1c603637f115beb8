#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cascadekit {

struct UserProfile {
  std::string uid;
  std::int64_t fans = 0;
  std::int64_t followings = 0;
  std::int64_t tweets = 0;
  int registration_year = 2004;
  bool verified = false;

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

// Earliest registration year accepted in profile tables.
inline constexpr int kFirstRegistrationYear = 2004;

enum class Label { Rumor, NonRumor, Unlabeled };

// "rumor", "non-rumor", "unlabeled".
std::string_view label_name(Label label);
// Accepts the names produced by label_name; throws ValidationError otherwise.
Label parse_label(std::string_view name);

struct CascadeNode {
  std::string uid;
  std::optional<std::string> parent;
  double t = 0.0;
  std::optional<UserProfile> profile;

  friend bool operator==(const CascadeNode&, const CascadeNode&) = default;
};

// A validated rooted propagation tree.
//
// Construction checks every structural invariant: a single parentless node,
// unique uids, parents that exist, no cycles, and reception times that never
// decrease along an edge. Times are shifted so that the root sits at t = 0.
// Instances are immutable; the index arrays below are built once.
class Cascade {
 public:
  static constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

  // Throws ValidationError naming the cascade id and the offending node.
  Cascade(std::string id, Label label, std::vector<CascadeNode> nodes,
          std::optional<std::uint64_t> seed = std::nullopt);

  const std::string& id() const noexcept { return id_; }
  Label label() const noexcept { return label_; }
  const std::vector<CascadeNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  // Seed of the generator run that produced this cascade, if any.
  const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }

  std::size_t root() const noexcept { return root_; }
  // Index of the parent node, kNoParent for the root.
  std::size_t parent_of(std::size_t i) const { return parent_[i]; }
  std::span<const std::size_t> children_of(std::size_t i) const {
    return {children_.data() + child_offset_[i],
            children_.data() + child_offset_[i + 1]};
  }
  // Hop distance from the root.
  std::size_t depth_of(std::size_t i) const { return depth_[i]; }
  // Node indices in breadth-first order from the root.
  std::span<const std::size_t> bfs_order() const noexcept { return order_; }

  // Copy with profiles looked up by uid. Nodes whose uid is absent from the
  // table keep whatever profile they already carried.
  Cascade with_profiles(
      const std::unordered_map<std::string, UserProfile>& table) const;

  friend bool operator==(const Cascade& a, const Cascade& b) {
    return a.id_ == b.id_ && a.label_ == b.label_ && a.seed_ == b.seed_ &&
           a.nodes_ == b.nodes_;
  }

 private:
  std::string id_;
  Label label_;
  std::vector<CascadeNode> nodes_;
  std::optional<std::uint64_t> seed_;

  std::size_t root_ = 0;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> child_offset_;
  std::vector<std::size_t> children_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> order_;
};

// An immutable collection of cascades with unique ids.
class Corpus {
 public:
  Corpus() = default;
  // Throws ValidationError on duplicate cascade ids.
  explicit Corpus(std::vector<Cascade> cascades);

  const std::vector<Cascade>& cascades() const noexcept { return cascades_; }
  std::size_t size() const noexcept { return cascades_.size(); }
  bool empty() const noexcept { return cascades_.empty(); }
  // Fraction of nodes (over all cascades) that carry a profile.
  double profile_coverage() const noexcept { return profile_coverage_; }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.cascades_ == b.cascades_;
  }

 private:
  std::vector<Cascade> cascades_;
  double profile_coverage_ = 0.0;
};

// NDJSON cascade records, one per line. Blank lines are skipped.
// `source` names the input in error messages.
Corpus parse_cascades(std::istream& in, const std::string& source = "<stream>");
Corpus parse_cascades(const std::string& path);

// Inverse of parse_cascades. Profiles and generator seeds are included when
// present so that the output re-parses to an identical corpus.
void write_cascades(std::ostream& out, const Corpus& corpus);
void write_cascades(const std::string& path, const Corpus& corpus);
std::string cascade_to_json(const Cascade& cascade);

using ProfileTable = std::unordered_map<std::string, UserProfile>;

// CSV with header `uid,fans,followings,tweets,registration_year,verified`.
ProfileTable parse_profiles(std::istream& in,
                            const std::string& source = "<stream>");
ProfileTable parse_profiles(const std::string& path);
void write_profiles(std::ostream& out, std::span<const UserProfile> profiles);

Corpus attach_profiles(const Corpus& corpus, const ProfileTable& table);
Corpus attach_profiles(const Corpus& corpus, const std::string& path);

struct RangeStats {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct LabelSummary {
  std::size_t cascades = 0;
  RangeStats size;
  RangeStats depth;
};

struct CorpusSummary {
  std::size_t users = 0;  // distinct uids over the whole corpus
  std::size_t cascades = 0;
  std::size_t nodes = 0;
  double profile_coverage = 0.0;
  LabelSummary overall;
  LabelSummary rumor;
  LabelSummary non_rumor;
  LabelSummary unlabeled;
};

// Throws ValidationError on an empty corpus.
CorpusSummary corpus_summary(const Corpus& corpus);
std::string summary_to_json(const CorpusSummary& summary);

}  // namespace cascadekit
