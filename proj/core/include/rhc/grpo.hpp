#ifndef RHC_GRPO_HPP_
#define RHC_GRPO_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rhc/rewards.hpp"
#include "rhc/taxonomy.hpp"

namespace rhc {

/// Desk-scale autoregressive categorical policy. Level i has one logit row
/// per (document feature, previous-level decision) pair, over all level-i
/// codes. Level 1 has a single parent slot. All rows live in one flat
/// buffer so gradients and updates are plain vector arithmetic.
class PolicyParams {
 public:
  PolicyParams() = default;
  // Zero logits: the uniform policy.
  PolicyParams(std::size_t features, std::vector<std::size_t> classes_per_level);

  std::size_t features() const { return features_; }
  std::size_t depth() const { return classes_.size(); }
  std::size_t classes(std::size_t level0) const { return classes_[level0]; }
  std::size_t parents(std::size_t level0) const {
    return level0 == 0 ? 1 : classes_[level0 - 1];
  }
  std::size_t size() const { return data_.size(); }

  std::span<double> Row(std::size_t level0, std::size_t feature, std::size_t parent);
  std::span<const double> Row(std::size_t level0, std::size_t feature,
                              std::size_t parent) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool SameShape(const PolicyParams& other) const;
  bool AllFinite() const;

  // this += scale * other
  void Axpy(double scale, const PolicyParams& other);

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

 private:
  std::size_t Offset(std::size_t level0, std::size_t feature, std::size_t parent) const;

  std::size_t features_ = 0;
  std::vector<std::size_t> classes_;
  std::vector<std::size_t> level_offset_;
  std::vector<double> data_;
};

// Numerically stable log-softmax of logits / temperature.
void LogSoftmax(std::span<const double> logits, double temperature,
                std::span<double> out);

struct Trajectory {
  std::vector<std::size_t> decisions;  // class index per level
  std::vector<double> logprobs;        // under the sampling policy
  double reward = 0.0;
  double main = 0.0;
  double format = 0.0;
};

struct RolloutGroup {
  std::size_t prompt_id = 0;  // document feature id
  std::vector<Trajectory> trajectories;
  std::vector<double> advantages;
};

enum class AdvantageNorm { kStd, kNone };
std::string_view ToString(AdvantageNorm norm);
AdvantageNorm ParseAdvantageNorm(std::string_view s);

inline constexpr double kAdvantageEpsilon = 1e-8;

// G ancestral samples, each level conditioned on the previous decision.
// Trajectory k draws from its own stream derived from (seed, k).
RolloutGroup SampleGroup(const PolicyParams& policy, std::size_t feature,
                         std::size_t group_size, std::uint64_t seed,
                         double temperature = 1.0);

// Sum of log-probabilities of `decisions` for `feature`.
double TrajectoryLogProb(const PolicyParams& policy, std::size_t feature,
                         std::span<const std::size_t> decisions, double temperature);

// (r - mean) / (std + eps) with the population std, or r - mean.
std::vector<double> GroupAdvantages(std::span<const double> rewards,
                                    AdvantageNorm norm = AdvantageNorm::kStd);

struct TrainConfig {
  std::size_t group_size = 8;
  double clip_eps = 0.2;
  double kl_coef = 0.001;
  double learning_rate = 16.0;
  std::size_t iterations = 500;
  double sampling_temperature = 1.0;
  std::uint64_t seed = 0;
  std::size_t batch_size = 32;  // prompts per iteration
  AdvantageNorm advantage_norm = AdvantageNorm::kStd;

  void Validate() const;
};

struct LossResult {
  double loss = 0.0;
  double surrogate = 0.0;  // -(1/G) sum_k min(rho A, clip(rho) A)
  double kl = 0.0;         // KL(policy || ref) over paths for the prompt
  PolicyParams gradient;   // d loss / d policy logits
};

// Exact KL between the path distributions of two policies for one feature,
// plus its gradient with respect to `policy` (scaled by `scale`, added into
// `grad` when non-null).
double PathKl(const PolicyParams& policy, const PolicyParams& ref,
              std::size_t feature, double temperature, double scale = 1.0,
              PolicyParams* grad = nullptr);

// Clipped surrogate with sequence-level ratio plus kl_coef * KL(policy||ref).
// Throws ShapeMismatch when the three policies or the group disagree.
LossResult GrpoLoss(const RolloutGroup& group, const PolicyParams& policy,
                    const PolicyParams& old_policy, const PolicyParams& ref_policy,
                    const TrainConfig& cfg);

/// Documents are feature ids 0..F-1; each maps to a distinct leaf.
struct SyntheticTaskSpec {
  std::size_t features = 32;
  std::size_t levels = 3;
  std::size_t branching = 4;
  std::size_t justification_words = 40;
  std::uint64_t seed = 0;
};

struct SyntheticTask {
  SyntheticTaskSpec spec;
  Taxonomy taxonomy;
  std::vector<std::string> level_names;
  std::vector<LabelPath> gold;                       // per feature
  std::vector<std::vector<std::size_t>> gold_index;  // per feature, per level

  static SyntheticTask Make(const SyntheticTaskSpec& spec);

  std::size_t features() const { return gold.size(); }
  // Canonical step-by-step text for the given decisions.
  std::string RenderTrace(std::size_t feature,
                          std::span<const std::size_t> decisions) const;
  PolicyParams ZeroPolicy() const;
};

struct TrainingRecord {
  std::size_t iteration = 0;
  double mean_reward = 0.0;
  double mean_main = 0.0;
  double mean_format = 0.0;
  double kl = 0.0;
  double loss = 0.0;

  friend bool operator==(const TrainingRecord&, const TrainingRecord&) = default;
};

struct TrainingLog {
  std::vector<TrainingRecord> records;
  PolicyParams final_policy;

  // One JSON object per line.
  void WriteJsonLines(std::ostream& out) const;
};

// Scores one sampled trajectory through the text path: render, parse, reward.
RewardBreakdown ScoreTrajectory(const SyntheticTask& task, std::size_t feature,
                                std::span<const std::size_t> decisions,
                                const RewardConfig& reward_cfg,
                                std::span<const double> weights);

// Plain gradient descent, one update per rollout batch. The KL reference is
// the starting policy. Deterministic for a fixed cfg.seed.
TrainingLog Train(const SyntheticTask& task, const TrainConfig& cfg,
                  const RewardConfig& reward_cfg);
TrainingLog Train(const SyntheticTask& task, const TrainConfig& cfg,
                  const RewardConfig& reward_cfg, PolicyParams initial);

}  // namespace rhc

#endif  // RHC_GRPO_HPP_
