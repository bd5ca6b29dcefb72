#ifndef RHC_JSON_IO_HPP_
#define RHC_JSON_IO_HPP_

#include <string>

#include <nlohmann/json.hpp>

#include "rhc/grpo.hpp"
#include "rhc/metrics.hpp"
#include "rhc/rewards.hpp"
#include "rhc/trace.hpp"

namespace rhc {

// Compact JSON where every floating-point number is written with 17
// significant digits ("%#.17g"), so values round-trip bit-exactly and never
// print with fewer than 12 digits.
std::string DumpPrecise(const nlohmann::json& j);

nlohmann::json ToJson(const RewardConfig& cfg);
// Fields absent from `j` keep their value from `base`. Unknown keys and bad
// values throw InvalidConfig; the result is validated.
RewardConfig MergeRewardConfig(const RewardConfig& base, const nlohmann::json& j);

nlohmann::json ToJson(const FormatViolation& v);
nlohmann::json ToJson(const RewardBreakdown& b);
nlohmann::json ToJson(const EvalReport& report);

nlohmann::json ToJson(const TrainConfig& cfg);
TrainConfig MergeTrainConfig(const TrainConfig& base, const nlohmann::json& j);

}  // namespace rhc

#endif  // RHC_JSON_IO_HPP_
