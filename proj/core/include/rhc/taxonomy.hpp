#ifndef RHC_TAXONOMY_HPP_
#define RHC_TAXONOMY_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rhc {

// Uppercases ASCII letters and strips surrounding whitespace. Every code
// lookup goes through this.
std::string NormalizeCode(std::string_view raw);

/// One level of a label hierarchy, e.g. "Section" with the codes A..H.
struct LevelSpec {
  std::string name;
  std::vector<std::string> codes;                 // sorted, unique
  std::map<std::string, std::string> parent_of;   // empty at level 1
  std::map<std::string, std::string> description_of;

  std::size_t size() const { return codes.size(); }
  bool contains(std::string_view code) const;
};

/// A gold or predicted code sequence, shallowest level first.
struct LabelPath {
  std::vector<std::string> codes;

  std::size_t depth() const { return codes.size(); }
  bool empty() const { return codes.empty(); }
  const std::string& leaf() const { return codes.back(); }

  friend bool operator==(const LabelPath&, const LabelPath&) = default;
};

struct TaxonomyRecord {
  std::string code;
  std::size_t level = 1;  // 1-based
  std::string parent;     // empty at level 1
  std::string description;
};

/// An L-level label hierarchy. Immutable once built; share freely across
/// threads.
///
/// Text format, one record per line, tab separated:
///
///     <code> TAB <level_index> TAB <parent_code or -> TAB <description>
///
/// Lines starting with `#` are comments, except the two directives
/// `#! name <id>` and `#! level <index> <display name>`.
class Taxonomy {
 public:
  static Taxonomy FromRecords(std::string name,
                              std::vector<std::string> level_names,
                              const std::vector<TaxonomyRecord>& records);
  static Taxonomy Parse(std::istream& in, std::string default_name = "taxonomy");
  static Taxonomy Load(const std::filesystem::path& path);

  // Inverse of Parse, records in level then code order.
  std::string Serialize() const;

  const std::string& name() const { return name_; }
  // Name plus a content digest; two taxonomies with the same id are identical.
  std::string Id() const;

  std::size_t depth() const { return levels_.size(); }
  const std::vector<LevelSpec>& levels() const { return levels_; }
  const LevelSpec& level(std::size_t index0) const { return levels_.at(index0); }
  std::vector<std::string> LevelNames() const;
  // K_i for every level.
  std::vector<std::size_t> CategoryCounts() const;

  bool Contains(std::size_t index0, std::string_view code) const;
  // Deepest level (0-based) that holds `code`.
  std::optional<std::size_t> LevelOf(std::string_view code) const;
  std::vector<std::string> Children(std::size_t index0, std::string_view code) const;

  // Full ancestor chain ending at `code`. Throws UnknownCode.
  LabelPath PathTo(std::string_view code) const;

  // Every code exists at its level and each one's parent is its predecessor.
  bool IsValidPath(const LabelPath& path) const;
  void ValidatePath(const LabelPath& path) const;

  // Sub-hierarchy containing only the given leaves and their ancestors; this
  // is the label space a dataset actually covers.
  Taxonomy RestrictedTo(std::span<const std::string> leaves) const;

 private:
  Taxonomy() = default;
  void CheckInvariants() const;

  std::string name_;
  std::vector<LevelSpec> levels_;
};

// IPC-shaped codes: section letter, optional 2-digit class, optional
// subclass letter ("H", "H03", "H03L"). Returns the prefix chain without
// consulting any taxonomy. Throws MalformedCode.
LabelPath DecomposeIpcCode(std::string_view raw);

// DecomposeIpcCode plus membership and parent checks. Throws MalformedCode or
// UnknownCode.
LabelPath ParseIpcCode(std::string_view raw, const Taxonomy& taxonomy);

// The deepest code of the path; ParseIpcCode(RenderCode(p)) == p.
std::string RenderCode(const LabelPath& path);

// Prefix of length `depth`. Throws DepthOutOfRange.
LabelPath Truncate(const LabelPath& path, std::size_t depth);

// w_i = log K_i / sum_j log K_j. Throws DegenerateLevel if some K_i < 2.
std::vector<double> LevelWeights(std::span<const std::size_t> counts);
std::vector<double> LevelWeights(const Taxonomy& taxonomy);

}  // namespace rhc

#endif  // RHC_TAXONOMY_HPP_
