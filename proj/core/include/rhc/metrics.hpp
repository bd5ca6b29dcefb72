#ifndef RHC_METRICS_HPP_
#define RHC_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rhc/taxonomy.hpp"
#include "rhc/trace.hpp"

namespace rhc {

// How level-i predictions are read off a predicted path.
//  kDeepestPrefix: ancestors of the deepest predicted code.
//  kPerStep: the decision emitted at step i, consistent or not.
enum class LevelSource { kDeepestPrefix, kPerStep };
std::string_view ToString(LevelSource source);
LevelSource ParseLevelSource(std::string_view s);

struct EvalRecord {
  std::string doc_id;
  LabelPath gold;  // full depth
  std::optional<LabelPath> predicted;
  std::vector<FormatViolation> parse_violations;
};

struct LevelMetrics {
  std::string name;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::size_t n = 0;
  std::size_t class_count = 0;  // gold-support classes at this level
};

struct EvalReport {
  std::vector<LevelMetrics> levels;
  std::size_t unparsed_count = 0;
};

// Mean over class_set of per-class F1; F1_c = 0 when P_c + R_c = 0. An
// empty string in `preds` means no prediction. Throws LengthMismatch.
double MacroF1(std::span<const std::string> golds, std::span<const std::string> preds,
               std::span<const std::string> class_set);

// Per-level accuracy, macro F1 over gold-support classes and micro F1.
// Missing predictions count as wrong. Throws EmptyInput.
EvalReport Evaluate(std::span<const EvalRecord> records, const Taxonomy& taxonomy,
                    LevelSource level_source = LevelSource::kDeepestPrefix);

// Level-i prediction for a record ("" when absent).
std::vector<std::string> PredictedLevels(const EvalRecord& record,
                                         const Taxonomy& taxonomy,
                                         LevelSource level_source);

// Builds a record from raw model output: per-step boxed decisions when the
// output follows the step format, otherwise the last boxed code. Throws
// UnknownCode for a gold code outside the taxonomy, InvalidInput when gold is
// not a leaf.
EvalRecord MakeEvalRecord(std::string doc_id, std::string_view gold_code,
                          std::string_view raw_output, const Taxonomy& taxonomy);

// Aligned plain-text table: one row, Acc/F1 (percent) per level; two-level
// taxonomies get Micro-F1/Macro-F1 columns instead.
std::string RenderReportTable(const EvalReport& report, std::string_view row_label);

}  // namespace rhc

#endif  // RHC_METRICS_HPP_
