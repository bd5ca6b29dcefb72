#ifndef RHC_REWARDS_HPP_
#define RHC_REWARDS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rhc/taxonomy.hpp"
#include "rhc/trace.hpp"

namespace rhc {

enum class MainRewardMode { kStep, kFinal };
// Where the per-level category counts for the level weights come from.
enum class WeightScope { kTaxonomy, kDataset };

std::string_view ToString(MainRewardMode mode);
std::string_view ToString(WeightScope scope);
MainRewardMode ParseMainRewardMode(std::string_view s);
WeightScope ParseWeightScope(std::string_view s);

/// Reward shaping parameters. Field names match the config file keys.
struct RewardConfig {
  MainRewardMode main_mode = MainRewardMode::kStep;
  double lambda = 0.1;
  double omega = 1.0;
  double beta = 0.0;
  long l0 = 128;
  long h0 = 384;
  long h_max = 512;
  WeightScope weight_scope = WeightScope::kDataset;

  // Throws InvalidConfig unless 0 < l0 <= h0 < h_max, omega >= 0, lambda >= 0.
  void Validate() const;

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

enum class LengthBand { kShort, kInRange, kLong };
std::string_view ToString(LengthBand band);

struct RewardBreakdown {
  std::vector<bool> per_level_correct;
  double main = 0.0;
  double format = 0.0;
  double total = 0.0;  // main + lambda * format
  std::size_t token_length = 0;
  LengthBand band = LengthBand::kInRange;
  std::vector<FormatViolation> violations;

  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

// Sum of weights over levels whose boxed decision matches gold. Throws
// LengthMismatch unless weights and gold have the same length.
std::pair<double, std::vector<bool>> StepReward(const ReasoningTrace& trace,
                                                const LabelPath& gold,
                                                std::span<const double> weights);

// 1 iff the deepest decision equals the gold leaf. Falls back to the last
// box in the raw text when the trace stops short of the gold depth.
double FinalReward(const ReasoningTrace& trace, const LabelPath& gold);

double FormatReward(std::size_t token_length, const RewardConfig& cfg);
LengthBand ClassifyLength(std::size_t token_length, const RewardConfig& cfg);

RewardBreakdown TotalReward(const ReasoningTrace& trace, const LabelPath& gold,
                            const RewardConfig& cfg, std::span<const double> weights);

// Parses `raw` leniently and scores it. Outputs without any usable step
// still get a defined reward: zero main credit and the length term.
RewardBreakdown ScoreOutput(std::string_view raw, const LabelPath& gold,
                            std::span<const std::string> level_names,
                            const RewardConfig& cfg, std::span<const double> weights,
                            const TokenCounter& counter = DefaultTokenCounter());

// Category counts published for the IPC scheme down to Subclass, and for
// the 500-subclass benchmark label space built from it.
inline constexpr std::size_t kIpcSchemeCounts[] = {8, 129, 639};
inline constexpr std::size_t kIpcDatasetCounts[] = {8, 117, 500};

}  // namespace rhc

#endif  // RHC_REWARDS_HPP_
