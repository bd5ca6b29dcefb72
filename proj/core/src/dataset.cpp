#include "rhc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "rhc/error.hpp"
#include "rhc/rng.hpp"
#include "rhc/text.hpp"

namespace rhc {

using nlohmann::json;

namespace {

std::string StringField(const json& j, const char* key, std::size_t line_no,
                        bool required = true) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (!required) return {};
    throw Error(ErrorCode::kInvalidInput,
                "line " + std::to_string(line_no) + ": missing field '" + key + "'");
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw Error(ErrorCode::kInvalidInput,
              "line " + std::to_string(line_no) + ": field '" + key + "' must be a string");
}

}  // namespace

std::vector<CorpusDocument> ReadCorpus(std::istream& in) {
  std::vector<CorpusDocument> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (TrimView(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kInvalidInput,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    CorpusDocument doc;
    doc.doc_id = StringField(j, "doc_id", line_no);
    doc.text = StringField(j, "text", line_no, false);
    doc.main_label = StringField(j, "main_label", line_no);
    doc.source = StringField(j, "source", line_no, false);
    doc.status = StringField(j, "status", line_no, false);
    if (auto it = j.find("year"); it != j.end() && it->is_number_integer()) {
      doc.year = it->get<int>();
    }
    if (!seen.insert(doc.doc_id).second) {
      throw Error(ErrorCode::kInvalidInput,
                  "line " + std::to_string(line_no) + ": duplicate doc_id '" +
                      doc.doc_id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

LabelResolver LabelResolver::FromTaxonomy(const Taxonomy& taxonomy) {
  return LabelResolver([&taxonomy](std::string_view label) -> std::optional<std::string> {
    const std::string code = NormalizeCode(label);
    const auto level = taxonomy.LevelOf(code);
    if (!level || *level + 1 != taxonomy.depth()) return std::nullopt;
    return code;
  });
}

LabelResolver LabelResolver::IpcSubclass() {
  return LabelResolver([](std::string_view label) -> std::optional<std::string> {
    try {
      LabelPath path = DecomposeIpcCode(label);
      if (path.depth() != 3) return std::nullopt;
      return path.leaf();
    } catch (const Error&) {
      return std::nullopt;
    }
  });
}

std::size_t SplitParams::TestCount() const {
  const double exact = static_cast<double>(per_class) * test_fraction;
  const double rounded = std::round(exact);
  if (std::fabs(exact - rounded) > 1e-9) {
    throw Error(ErrorCode::kNonIntegralTestCount,
                "per_class * test_fraction = " + std::to_string(exact) +
                    " is not an integer");
  }
  return static_cast<std::size_t>(rounded);
}

void SplitParams::Validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "test_fraction must lie in (0, 1)");
  }
  if (per_class == 0) throw Error(ErrorCode::kInvalidConfig, "per_class must be >= 1");
  if (min_instances < per_class) {
    throw Error(ErrorCode::kInvalidConfig, "min_instances must be >= per_class");
  }
  TestCount();
}

std::set<std::string> SplitManifest::TrainIds() const {
  std::set<std::string> out;
  for (const auto& e : entries) {
    if (e.split == "train") out.insert(e.doc_id);
  }
  return out;
}

std::set<std::string> SplitManifest::TestIds() const {
  std::set<std::string> out;
  for (const auto& e : entries) {
    if (e.split == "test") out.insert(e.doc_id);
  }
  return out;
}

std::set<std::string> SplitManifest::Labels() const {
  std::set<std::string> out;
  for (const auto& [label, counts] : per_subclass) out.insert(label);
  return out;
}

void SplitManifest::Write(std::ostream& out) const {
  out << "# rhc-split-manifest v1\n";
  out << "# seed=" << params.seed << '\n';
  out << "# algorithm=" << algorithm << '\n';
  out << "# min_instances=" << params.min_instances << '\n';
  out << "# per_class=" << params.per_class << '\n';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", params.test_fraction);
  out << "# test_fraction=" << buf << '\n';
  out << "# accepted_status=" << params.accepted_status << '\n';
  out << "# subclasses=" << per_subclass.size() << '\n';
  out << "# skipped_status=" << skipped_status << '\n';
  out << "# skipped_unparseable=" << skipped_unparseable << '\n';
  for (const auto& e : entries) {
    out << e.doc_id << '\t' << e.split << '\t' << e.subclass << '\n';
  }
}

SplitManifest SplitManifest::Read(std::istream& in) {
  SplitManifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key(TrimView(std::string_view(line).substr(1, eq - 1)));
      const std::string value = line.substr(eq + 1);
      if (key == "seed") m.params.seed = std::stoull(value);
      else if (key == "algorithm") m.algorithm = value;
      else if (key == "min_instances") m.params.min_instances = std::stoul(value);
      else if (key == "per_class") m.params.per_class = std::stoul(value);
      else if (key == "test_fraction") m.params.test_fraction = std::stod(value);
      else if (key == "accepted_status") m.params.accepted_status = value;
      else if (key == "skipped_status") m.skipped_status = std::stoul(value);
      else if (key == "skipped_unparseable") m.skipped_unparseable = std::stoul(value);
      continue;
    }
    std::istringstream fields(line);
    SplitEntry e;
    std::getline(fields, e.doc_id, '\t');
    std::getline(fields, e.split, '\t');
    std::getline(fields, e.subclass, '\t');
    if (e.split != "train" && e.split != "test") {
      throw Error(ErrorCode::kInvalidInput, "bad manifest line: " + line);
    }
    auto& counts = m.per_subclass[e.subclass];
    (e.split == "train" ? counts.train : counts.test)++;
    m.entries.push_back(std::move(e));
  }
  return m;
}

SplitManifest BuildBalancedSplit(std::span<const CorpusDocument> corpus,
                                 const SplitParams& params,
                                 const LabelResolver& resolver) {
  params.Validate();
  const std::size_t test_count = params.TestCount();

  SplitManifest manifest;
  manifest.params = params;
  manifest.algorithm = std::string(kRngAlgorithmId);

  std::map<std::string, std::vector<std::string>> by_label;
  for (const auto& doc : corpus) {
    if (!params.accepted_status.empty() && doc.status != params.accepted_status) {
      ++manifest.skipped_status;
      continue;
    }
    const auto label = resolver.Resolve(doc.main_label);
    if (!label) {
      ++manifest.skipped_unparseable;
      continue;
    }
    by_label[*label].push_back(doc.doc_id);
  }

  for (auto& [label, ids] : by_label) {
    if (ids.size() < params.min_instances) continue;
    // Sorting first makes the sample independent of corpus order.
    std::sort(ids.begin(), ids.end());
    Rng rng(DeriveSeed(params.seed, "dataset.split:" + label));
    rng.PartialShuffle(ids, params.per_class);
    auto& counts = manifest.per_subclass[label];
    for (std::size_t i = 0; i < params.per_class; ++i) {
      const bool test = i < test_count;
      manifest.entries.push_back({ids[i], test ? "test" : "train", label});
      (test ? counts.test : counts.train)++;
    }
  }
  if (manifest.per_subclass.empty()) {
    throw Error(ErrorCode::kInsufficientCorpus,
                "no subclass has at least " + std::to_string(params.min_instances) +
                    " usable documents");
  }
  return manifest;
}

std::vector<OodEntry> BuildOodSet(std::span<const CorpusDocument> corpus,
                                  const std::set<std::string>& train_label_set,
                                  std::size_t cap_per_class, std::uint64_t seed,
                                  const LabelResolver& resolver) {
  if (cap_per_class == 0) {
    throw Error(ErrorCode::kInvalidConfig, "cap_per_class must be >= 1");
  }
  std::map<std::string, std::vector<std::string>> by_label;
  for (const auto& doc : corpus) {
    const auto label = resolver.Resolve(doc.main_label);
    if (!label || train_label_set.count(*label) == 0) continue;
    by_label[*label].push_back(doc.doc_id);
  }
  std::vector<OodEntry> out;
  for (auto& [label, ids] : by_label) {
    std::sort(ids.begin(), ids.end());
    Rng rng(DeriveSeed(seed, "dataset.ood:" + label));
    const std::size_t take = std::min(cap_per_class, ids.size());
    rng.PartialShuffle(ids, take);
    for (std::size_t i = 0; i < take; ++i) out.push_back({ids[i], label});
  }
  return out;
}

TraceFilterResult FilterSyntheticTraces(std::span<const TraceCandidate> traces,
                                        std::span<const std::string> level_names) {
  TraceFilterResult result;
  for (const auto& t : traces) {
    const ParseReport report = ParseTrace(t.raw, level_names, ParseMode::kStrict);
    if (!report.trace) {
      const FormatViolation& v = report.violations.front();
      result.rejected.push_back({t.id, std::string(ViolationTag(v.kind)), v.level});
      continue;
    }
    std::size_t mismatch = 0;
    for (std::size_t i = 0; i < level_names.size(); ++i) {
      const bool ok = i < t.gold.depth() &&
                      report.trace->steps[i].decision == NormalizeCode(t.gold.codes[i]);
      if (!ok) {
        mismatch = i + 1;
        break;
      }
    }
    if (mismatch == 0 && t.gold.depth() != level_names.size()) {
      mismatch = std::min(t.gold.depth(), level_names.size()) + 1;
    }
    if (mismatch != 0) {
      result.rejected.push_back({t.id, "label_mismatch", mismatch});
    } else {
      result.kept.push_back(t);
    }
  }
  return result;
}

}  // namespace rhc
