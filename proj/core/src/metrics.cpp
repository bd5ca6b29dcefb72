#include "rhc/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "rhc/error.hpp"

namespace rhc {

std::string_view ToString(LevelSource source) {
  return source == LevelSource::kDeepestPrefix ? "deepest_prefix" : "per_step";
}

LevelSource ParseLevelSource(std::string_view s) {
  if (s == "deepest_prefix") return LevelSource::kDeepestPrefix;
  if (s == "per_step") return LevelSource::kPerStep;
  throw Error(ErrorCode::kInvalidConfig,
              "level source must be 'deepest_prefix' or 'per_step', got '" +
                  std::string(s) + "'");
}

namespace {

struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

double F1(const ClassCounts& c) {
  // 2PR/(P+R) reduces to 2TP/(2TP+FP+FN); zero when TP = 0.
  if (c.tp == 0) return 0.0;
  return 2.0 * static_cast<double>(c.tp) /
         static_cast<double>(2 * c.tp + c.fp + c.fn);
}

// Path implied by a single code: taxonomy ancestors when known, IPC prefixes
// when the code has IPC shape, otherwise nothing.
std::optional<LabelPath> ExpandCode(const std::string& code, const Taxonomy& taxonomy) {
  if (taxonomy.LevelOf(code)) return taxonomy.PathTo(code);
  try {
    return DecomposeIpcCode(code);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

double MacroF1(std::span<const std::string> golds, std::span<const std::string> preds,
               std::span<const std::string> class_set) {
  if (golds.size() != preds.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(golds.size()) + " golds vs " +
                    std::to_string(preds.size()) + " predictions");
  }
  std::set<std::string> classes(class_set.begin(), class_set.end());
  if (classes.empty()) return 0.0;
  std::map<std::string, ClassCounts> counts;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (golds[i] == preds[i]) {
      ++counts[golds[i]].tp;
    } else {
      ++counts[golds[i]].fn;
      if (!preds[i].empty()) ++counts[preds[i]].fp;
    }
  }
  double sum = 0.0;
  for (const auto& c : classes) {
    auto it = counts.find(c);
    sum += it == counts.end() ? 0.0 : F1(it->second);
  }
  return sum / static_cast<double>(classes.size());
}

std::vector<std::string> PredictedLevels(const EvalRecord& record,
                                         const Taxonomy& taxonomy,
                                         LevelSource level_source) {
  const std::size_t depth = record.gold.depth();
  std::vector<std::string> out(depth);
  if (!record.predicted || record.predicted->empty()) return out;
  const LabelPath& pred = *record.predicted;
  if (level_source == LevelSource::kPerStep) {
    for (std::size_t i = 0; i < depth && i < pred.depth(); ++i) out[i] = pred.codes[i];
    return out;
  }
  const auto expanded = ExpandCode(NormalizeCode(pred.leaf()), taxonomy);
  if (expanded) {
    for (std::size_t i = 0; i < depth && i < expanded->depth(); ++i) {
      out[i] = expanded->codes[i];
    }
  } else if (pred.depth() <= depth) {
    out[pred.depth() - 1] = NormalizeCode(pred.leaf());
  }
  return out;
}

EvalReport Evaluate(std::span<const EvalRecord> records, const Taxonomy& taxonomy,
                    LevelSource level_source) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no records to evaluate");
  const std::size_t depth = taxonomy.depth();
  std::vector<std::vector<std::string>> golds(depth), preds(depth);
  EvalReport report;
  for (const auto& r : records) {
    if (r.gold.depth() != depth) {
      throw Error(ErrorCode::kInvalidInput,
                  "record '" + r.doc_id + "' has a gold path of depth " +
                      std::to_string(r.gold.depth()));
    }
    if (!r.predicted || r.predicted->empty()) ++report.unparsed_count;
    auto levels = PredictedLevels(r, taxonomy, level_source);
    for (std::size_t i = 0; i < depth; ++i) {
      golds[i].push_back(NormalizeCode(r.gold.codes[i]));
      preds[i].push_back(std::move(levels[i]));
    }
  }
  const auto names = taxonomy.LevelNames();
  for (std::size_t i = 0; i < depth; ++i) {
    LevelMetrics m;
    m.name = names[i];
    m.n = golds[i].size();
    std::size_t tp = 0;
    for (std::size_t k = 0; k < m.n; ++k) tp += golds[i][k] == preds[i][k] ? 1 : 0;
    std::set<std::string> support(golds[i].begin(), golds[i].end());
    std::vector<std::string> class_set(support.begin(), support.end());
    m.class_count = class_set.size();
    m.accuracy = static_cast<double>(tp) / static_cast<double>(m.n);
    // Every record carries exactly one (possibly empty) prediction, so
    // FP + FN = 2 (n - TP) globally and micro F1 = 2TP / 2n.
    m.micro_f1 = static_cast<double>(2 * tp) / static_cast<double>(2 * m.n);
    m.macro_f1 = MacroF1(golds[i], preds[i], class_set);
    report.levels.push_back(std::move(m));
  }
  return report;
}

EvalRecord MakeEvalRecord(std::string doc_id, std::string_view gold_code,
                          std::string_view raw_output, const Taxonomy& taxonomy) {
  EvalRecord record;
  record.doc_id = std::move(doc_id);
  record.gold = taxonomy.PathTo(gold_code);
  if (record.gold.depth() != taxonomy.depth()) {
    throw Error(ErrorCode::kInvalidInput,
                "gold code '" + std::string(gold_code) + "' is not a leaf");
  }
  const auto names = taxonomy.LevelNames();
  ParseReport parsed = ParseTrace(raw_output, names, ParseMode::kLenient);
  record.parse_violations = parsed.violations;
  LabelPath steps;
  if (parsed.trace) {
    for (const auto& step : parsed.trace->steps) {
      if (!step.boxed) break;
      steps.codes.push_back(step.decision);
    }
  }
  if (steps.depth() == taxonomy.depth()) {
    record.predicted = std::move(steps);
    return record;
  }
  if (auto last = ParseFinalOnly(raw_output)) {
    if (steps.empty()) {
      record.predicted = ExpandCode(*last, taxonomy).value_or(LabelPath{{*last}});
      return record;
    }
  }
  if (!steps.empty()) record.predicted = std::move(steps);
  return record;
}

std::string RenderReportTable(const EvalReport& report, std::string_view row_label) {
  const bool two_level = report.levels.size() == 2;
  const char* first = two_level ? "Micro-F1" : "Acc";
  const char* second = two_level ? "Macro-F1" : "F1";
  std::size_t label_width = std::max<std::size_t>(row_label.size(), 14);
  std::vector<std::size_t> widths;
  for (const auto& level : report.levels) {
    widths.push_back(std::max<std::size_t>(level.name.size(), two_level ? 19 : 13));
  }
  std::string out;
  char buf[128];
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  auto center = [](const std::string& s, std::size_t w) {
    if (s.size() >= w) return s;
    const std::size_t left = (w - s.size()) / 2;
    return std::string(left, ' ') + s + std::string(w - s.size() - left, ' ');
  };
  out += pad("", label_width);
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    out += " | " + center(report.levels[i].name, widths[i]);
  }
  out += "\n" + pad("Model / Setting", label_width);
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s / %s", first, second);
    out += " | " + center(buf, widths[i]);
  }
  out += "\n" + std::string(label_width, '-');
  for (std::size_t w : widths) out += "-+-" + std::string(w, '-');
  out += "\n" + pad(std::string(row_label), label_width);
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const auto& m = report.levels[i];
    const double a = two_level ? m.micro_f1 : m.accuracy;
    std::snprintf(buf, sizeof(buf), "%5.1f / %5.1f", 100.0 * a, 100.0 * m.macro_f1);
    out += " | " + center(buf, widths[i]);
  }
  std::snprintf(buf, sizeof(buf), "\n(n = %zu, unparsed = %zu)\n",
                report.levels.empty() ? std::size_t{0} : report.levels[0].n,
                report.unparsed_count);
  out += buf;
  return out;
}

}  // namespace rhc
