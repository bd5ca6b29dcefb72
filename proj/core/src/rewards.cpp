#include "rhc/rewards.hpp"

#include <algorithm>
#include <cmath>

#include "rhc/error.hpp"

namespace rhc {

std::string_view ToString(MainRewardMode mode) {
  return mode == MainRewardMode::kStep ? "step" : "final";
}

std::string_view ToString(WeightScope scope) {
  return scope == WeightScope::kTaxonomy ? "taxonomy" : "dataset";
}

std::string_view ToString(LengthBand band) {
  switch (band) {
    case LengthBand::kShort: return "short";
    case LengthBand::kInRange: return "in_range";
    case LengthBand::kLong: return "long";
  }
  return "unknown";
}

MainRewardMode ParseMainRewardMode(std::string_view s) {
  if (s == "step") return MainRewardMode::kStep;
  if (s == "final") return MainRewardMode::kFinal;
  throw Error(ErrorCode::kInvalidConfig,
              "main_mode must be 'step' or 'final', got '" + std::string(s) + "'");
}

WeightScope ParseWeightScope(std::string_view s) {
  if (s == "taxonomy") return WeightScope::kTaxonomy;
  if (s == "dataset") return WeightScope::kDataset;
  throw Error(ErrorCode::kInvalidConfig,
              "weight_scope must be 'taxonomy' or 'dataset', got '" + std::string(s) + "'");
}

void RewardConfig::Validate() const {
  if (!(l0 > 0 && l0 <= h0 && h0 < h_max)) {
    throw Error(ErrorCode::kInvalidConfig, "need 0 < l0 <= h0 < h_max");
  }
  if (!(omega >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "omega must be >= 0");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "lambda must be >= 0");
  if (!std::isfinite(beta)) throw Error(ErrorCode::kInvalidConfig, "beta must be finite");
}

std::pair<double, std::vector<bool>> StepReward(const ReasoningTrace& trace,
                                                const LabelPath& gold,
                                                std::span<const double> weights) {
  if (weights.size() != gold.depth()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(weights.size()) + " weights for a depth-" +
                    std::to_string(gold.depth()) + " gold path");
  }
  std::vector<bool> correct(gold.depth(), false);
  double score = 0.0;
  for (std::size_t i = 0; i < gold.depth(); ++i) {
    const TraceStep* step = trace.StepAt(i + 1);
    if (step != nullptr && step->boxed &&
        NormalizeCode(step->decision) == NormalizeCode(gold.codes[i])) {
      correct[i] = true;
      score += weights[i];
    }
  }
  return {score, std::move(correct)};
}

double FinalReward(const ReasoningTrace& trace, const LabelPath& gold) {
  if (gold.empty()) return 0.0;
  const std::string want = NormalizeCode(gold.leaf());
  if (const TraceStep* step = trace.StepAt(gold.depth())) {
    return step->boxed && NormalizeCode(step->decision) == want ? 1.0 : 0.0;
  }
  const auto last = ParseFinalOnly(trace.raw_text);
  return last && *last == want ? 1.0 : 0.0;
}

LengthBand ClassifyLength(std::size_t token_length, const RewardConfig& cfg) {
  const auto t = static_cast<long>(token_length);
  if (t < cfg.l0) return LengthBand::kShort;
  if (t <= cfg.h0) return LengthBand::kInRange;
  return LengthBand::kLong;
}

double FormatReward(std::size_t token_length, const RewardConfig& cfg) {
  const auto t = static_cast<double>(token_length);
  const auto l0 = static_cast<double>(cfg.l0);
  const auto h0 = static_cast<double>(cfg.h0);
  const auto h_max = static_cast<double>(cfg.h_max);
  // The ratio is formed first so it never exceeds 1 and the penalty stays
  // within [-omega, 0] after rounding.
  switch (ClassifyLength(token_length, cfg)) {
    case LengthBand::kShort:
      return -cfg.omega * ((l0 - t) / l0);
    case LengthBand::kInRange:
      return cfg.beta;
    case LengthBand::kLong:
      return -cfg.omega * ((std::min(t, h_max) - h0) / (h_max - h0));
  }
  return 0.0;
}

RewardBreakdown TotalReward(const ReasoningTrace& trace, const LabelPath& gold,
                            const RewardConfig& cfg, std::span<const double> weights) {
  RewardBreakdown out;
  auto [step, correct] = StepReward(trace, gold, weights);
  out.per_level_correct = std::move(correct);
  out.main = cfg.main_mode == MainRewardMode::kStep ? step : FinalReward(trace, gold);
  // Guard against a weight sum of 1 + ulp.
  out.main = std::clamp(out.main, 0.0, 1.0);
  out.token_length = trace.token_length;
  out.band = ClassifyLength(trace.token_length, cfg);
  out.format = FormatReward(trace.token_length, cfg);
  out.total = out.main + cfg.lambda * out.format;
  return out;
}

RewardBreakdown ScoreOutput(std::string_view raw, const LabelPath& gold,
                            std::span<const std::string> level_names,
                            const RewardConfig& cfg, std::span<const double> weights,
                            const TokenCounter& counter) {
  ParseReport report = ParseTrace(raw, level_names, ParseMode::kLenient, counter);
  ReasoningTrace trace;
  if (report.trace) {
    trace = std::move(*report.trace);
  } else {
    // No usable step; keep the text so the final-mode fallback and the
    // length term still apply.
    trace.raw_text = std::string(raw);
    trace.token_length = report.token_length;
  }
  RewardBreakdown out = TotalReward(trace, gold, cfg, weights);
  out.violations = std::move(report.violations);
  return out;
}

}  // namespace rhc
