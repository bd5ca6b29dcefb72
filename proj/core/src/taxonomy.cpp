#include "rhc/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rhc/error.hpp"
#include "rhc/text.hpp"

namespace rhc {

namespace {

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::size_t ParseLevelIndex(const std::string& field, std::size_t line_no) {
  std::size_t value = 0;
  if (field.empty() ||
      !std::all_of(field.begin(), field.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    throw Error(ErrorCode::kInvalidTaxonomy,
                "line " + std::to_string(line_no) + ": bad level index '" +
                    field + "'");
  }
  value = std::stoul(field);
  if (value == 0) {
    throw Error(ErrorCode::kInvalidTaxonomy,
                "line " + std::to_string(line_no) + ": level indices are 1-based");
  }
  return value;
}

}  // namespace

std::string NormalizeCode(std::string_view raw) {
  std::string out(TrimView(raw));
  for (char& c : out) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

bool LevelSpec::contains(std::string_view code) const {
  return std::binary_search(codes.begin(), codes.end(), code);
}

Taxonomy Taxonomy::FromRecords(std::string name,
                               std::vector<std::string> level_names,
                               const std::vector<TaxonomyRecord>& records) {
  Taxonomy t;
  t.name_ = std::move(name);
  std::size_t depth = level_names.size();
  for (const auto& r : records) depth = std::max(depth, r.level);
  if (depth == 0) {
    throw Error(ErrorCode::kInvalidTaxonomy, "taxonomy has no levels");
  }
  t.levels_.resize(depth);
  for (std::size_t i = 0; i < depth; ++i) {
    t.levels_[i].name = i < level_names.size() && !level_names[i].empty()
                            ? level_names[i]
                            : "Level " + std::to_string(i + 1);
  }
  for (const auto& r : records) {
    if (r.level == 0) {
      throw Error(ErrorCode::kInvalidTaxonomy, "level indices are 1-based");
    }
    LevelSpec& level = t.levels_[r.level - 1];
    const std::string code = NormalizeCode(r.code);
    if (code.empty()) {
      throw Error(ErrorCode::kInvalidTaxonomy, "empty code");
    }
    if (level.description_of.count(code) != 0) {
      throw Error(ErrorCode::kInvalidTaxonomy,
                  "duplicate code '" + code + "' at level " +
                      std::to_string(r.level));
    }
    level.codes.push_back(code);
    level.description_of[code] = r.description;
    const std::string parent = NormalizeCode(r.parent);
    if (r.level == 1) {
      if (!parent.empty() && parent != "-") {
        throw Error(ErrorCode::kInvalidTaxonomy,
                    "level-1 code '" + code + "' must not have a parent");
      }
    } else {
      if (parent.empty() || parent == "-") {
        throw Error(ErrorCode::kInvalidTaxonomy,
                    "code '" + code + "' needs a parent");
      }
      level.parent_of[code] = parent;
    }
  }
  for (auto& level : t.levels_) std::sort(level.codes.begin(), level.codes.end());
  t.CheckInvariants();
  return t;
}

void Taxonomy::CheckInvariants() const {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const LevelSpec& level = levels_[i];
    if (level.codes.empty()) {
      throw Error(ErrorCode::kInvalidTaxonomy,
                  "level " + std::to_string(i + 1) + " has no codes");
    }
    if (i == 0) continue;
    for (const auto& [code, parent] : level.parent_of) {
      if (!levels_[i - 1].contains(parent)) {
        throw Error(ErrorCode::kInvalidTaxonomy,
                    "parent '" + parent + "' of '" + code +
                        "' is not a level-" + std::to_string(i) + " code");
      }
    }
  }
}

Taxonomy Taxonomy::Parse(std::istream& in, std::string default_name) {
  std::string name = std::move(default_name);
  std::vector<std::string> level_names;
  std::vector<TaxonomyRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimView(line).empty()) continue;
    if (line.rfind("#!", 0) == 0) {
      std::istringstream directive(line.substr(2));
      std::string key;
      directive >> key;
      if (key == "name") {
        directive >> name;
      } else if (key == "level") {
        std::size_t index = 0;
        directive >> index;
        std::string rest;
        std::getline(directive, rest);
        if (index == 0) {
          throw Error(ErrorCode::kInvalidTaxonomy,
                      "line " + std::to_string(line_no) + ": bad level directive");
        }
        if (level_names.size() < index) level_names.resize(index);
        level_names[index - 1] = std::string(TrimView(rest));
      }
      continue;
    }
    if (line[0] == '#') continue;
    const auto fields = SplitTabs(line);
    if (fields.size() < 3) {
      throw Error(ErrorCode::kInvalidTaxonomy,
                  "line " + std::to_string(line_no) +
                      ": expected code, level, parent[, description]");
    }
    TaxonomyRecord r;
    r.code = fields[0];
    r.level = ParseLevelIndex(std::string(TrimView(fields[1])), line_no);
    r.parent = fields[2];
    if (fields.size() > 3) r.description = fields[3];
    records.push_back(std::move(r));
  }
  return FromRecords(std::move(name), std::move(level_names), records);
}

Taxonomy Taxonomy::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open taxonomy file " + path.string());
  }
  return Parse(in, path.stem().string());
}

std::string Taxonomy::Serialize() const {
  std::ostringstream out;
  out << "#! name " << name_ << '\n';
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    out << "#! level " << (i + 1) << ' ' << levels_[i].name << '\n';
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const LevelSpec& level = levels_[i];
    for (const auto& code : level.codes) {
      out << code << '\t' << (i + 1) << '\t'
          << (i == 0 ? std::string("-") : level.parent_of.at(code)) << '\t'
          << level.description_of.at(code) << '\n';
    }
  }
  return out.str();
}

std::string Taxonomy::Id() const { return name_ + "@" + Fnv1aHex(Serialize()); }

std::vector<std::string> Taxonomy::LevelNames() const {
  std::vector<std::string> names;
  names.reserve(levels_.size());
  for (const auto& level : levels_) names.push_back(level.name);
  return names;
}

std::vector<std::size_t> Taxonomy::CategoryCounts() const {
  std::vector<std::size_t> counts;
  counts.reserve(levels_.size());
  for (const auto& level : levels_) counts.push_back(level.size());
  return counts;
}

bool Taxonomy::Contains(std::size_t index0, std::string_view code) const {
  return index0 < levels_.size() && levels_[index0].contains(NormalizeCode(code));
}

std::optional<std::size_t> Taxonomy::LevelOf(std::string_view raw) const {
  const std::string code = NormalizeCode(raw);
  for (std::size_t i = levels_.size(); i-- > 0;) {
    if (levels_[i].contains(code)) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Taxonomy::Children(std::size_t index0,
                                            std::string_view raw) const {
  const std::string code = NormalizeCode(raw);
  std::vector<std::string> out;
  if (index0 + 1 >= levels_.size()) return out;
  for (const auto& [child, parent] : levels_[index0 + 1].parent_of) {
    if (parent == code) out.push_back(child);
  }
  return out;
}

LabelPath Taxonomy::PathTo(std::string_view raw) const {
  const std::string code = NormalizeCode(raw);
  const auto level = LevelOf(code);
  if (!level) {
    throw Error(ErrorCode::kUnknownCode, "unknown code '" + code + "'");
  }
  LabelPath path;
  path.codes.resize(*level + 1);
  std::string current = code;
  for (std::size_t i = *level + 1; i-- > 0;) {
    path.codes[i] = current;
    if (i > 0) current = levels_[i].parent_of.at(current);
  }
  return path;
}

bool Taxonomy::IsValidPath(const LabelPath& path) const {
  if (path.empty() || path.depth() > levels_.size()) return false;
  for (std::size_t i = 0; i < path.depth(); ++i) {
    if (!levels_[i].contains(path.codes[i])) return false;
    if (i > 0 && levels_[i].parent_of.at(path.codes[i]) != path.codes[i - 1]) {
      return false;
    }
  }
  return true;
}

void Taxonomy::ValidatePath(const LabelPath& path) const {
  if (path.empty() || path.depth() > levels_.size()) {
    throw Error(ErrorCode::kDepthOutOfRange,
                "path depth " + std::to_string(path.depth()) +
                    " outside [1, " + std::to_string(levels_.size()) + "]");
  }
  for (std::size_t i = 0; i < path.depth(); ++i) {
    if (!levels_[i].contains(path.codes[i])) {
      throw Error(ErrorCode::kUnknownCode,
                  "'" + path.codes[i] + "' is not a level-" +
                      std::to_string(i + 1) + " code");
    }
    if (i > 0 && levels_[i].parent_of.at(path.codes[i]) != path.codes[i - 1]) {
      throw Error(ErrorCode::kUnknownCode,
                  "'" + path.codes[i] + "' is not a child of '" +
                      path.codes[i - 1] + "'");
    }
  }
}

Taxonomy Taxonomy::RestrictedTo(std::span<const std::string> leaves) const {
  std::vector<std::set<std::string>> keep(levels_.size());
  for (const auto& leaf : leaves) {
    const LabelPath path = PathTo(leaf);
    for (std::size_t i = 0; i < path.depth(); ++i) keep[i].insert(path.codes[i]);
  }
  std::vector<TaxonomyRecord> records;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    for (const auto& code : keep[i]) {
      records.push_back({code, i + 1, i == 0 ? "-" : levels_[i].parent_of.at(code),
                         levels_[i].description_of.at(code)});
    }
  }
  // Levels emptied by the restriction are dropped from the tail.
  std::vector<std::string> names = LevelNames();
  while (!names.empty() && keep[names.size() - 1].empty()) names.pop_back();
  return FromRecords(name_ + "/restricted", names, records);
}

LabelPath DecomposeIpcCode(std::string_view raw) {
  const std::string code = NormalizeCode(raw);
  auto malformed = [&] {
    return Error(ErrorCode::kMalformedCode,
                 "'" + code + "' is not an IPC section, class or subclass code");
  };
  if (code.empty()) throw malformed();
  const auto is_upper = [](char c) { return c >= 'A' && c <= 'Z'; };
  const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!is_upper(code[0])) throw malformed();
  LabelPath path;
  path.codes.push_back(code.substr(0, 1));
  if (code.size() == 1) return path;
  if (code.size() < 3 || code.size() > 4 || !is_digit(code[1]) ||
      !is_digit(code[2])) {
    throw malformed();
  }
  path.codes.push_back(code.substr(0, 3));
  if (code.size() == 3) return path;
  if (!is_upper(code[3])) throw malformed();
  path.codes.push_back(code);
  return path;
}

LabelPath ParseIpcCode(std::string_view raw, const Taxonomy& taxonomy) {
  LabelPath path = DecomposeIpcCode(raw);
  if (path.depth() > taxonomy.depth()) {
    throw Error(ErrorCode::kUnknownCode,
                "'" + path.leaf() + "' is deeper than the taxonomy");
  }
  for (std::size_t i = 0; i < path.depth(); ++i) {
    if (!taxonomy.Contains(i, path.codes[i])) {
      throw Error(ErrorCode::kUnknownCode,
                  "unknown code '" + path.codes[i] + "'");
    }
  }
  taxonomy.ValidatePath(path);
  return path;
}

std::string RenderCode(const LabelPath& path) {
  return path.empty() ? std::string() : path.leaf();
}

LabelPath Truncate(const LabelPath& path, std::size_t depth) {
  if (depth < 1 || depth > path.depth()) {
    throw Error(ErrorCode::kDepthOutOfRange,
                "cannot truncate a depth-" + std::to_string(path.depth()) +
                    " path to depth " + std::to_string(depth));
  }
  LabelPath out;
  out.codes.assign(path.codes.begin(), path.codes.begin() + depth);
  return out;
}

std::vector<double> LevelWeights(std::span<const std::size_t> counts) {
  if (counts.empty()) {
    throw Error(ErrorCode::kDegenerateLevel, "no levels");
  }
  std::vector<double> logs;
  logs.reserve(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 2) {
      throw Error(ErrorCode::kDegenerateLevel,
                  "level " + std::to_string(i + 1) + " has " +
                      std::to_string(counts[i]) + " categories; need at least 2");
    }
    logs.push_back(std::log(static_cast<double>(counts[i])));
    total += logs.back();
  }
  for (double& w : logs) w /= total;
  return logs;
}

std::vector<double> LevelWeights(const Taxonomy& taxonomy) {
  const auto counts = taxonomy.CategoryCounts();
  return LevelWeights(counts);
}

}  // namespace rhc
