#include "rhc/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rhc/error.hpp"
#include "rhc/rng.hpp"
#include "rhc/trace.hpp"

namespace rhc {

PolicyParams::PolicyParams(std::size_t features,
                           std::vector<std::size_t> classes_per_level)
    : features_(features), classes_(std::move(classes_per_level)) {
  std::size_t offset = 0;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    level_offset_.push_back(offset);
    offset += features_ * parents(i) * classes_[i];
  }
  data_.assign(offset, 0.0);
}

std::size_t PolicyParams::Offset(std::size_t level0, std::size_t feature,
                                 std::size_t parent) const {
  return level_offset_[level0] +
         (feature * parents(level0) + parent) * classes_[level0];
}

std::span<double> PolicyParams::Row(std::size_t level0, std::size_t feature,
                                    std::size_t parent) {
  return std::span<double>(data_).subspan(Offset(level0, feature, parent),
                                          classes_[level0]);
}

std::span<const double> PolicyParams::Row(std::size_t level0, std::size_t feature,
                                          std::size_t parent) const {
  return std::span<const double>(data_).subspan(Offset(level0, feature, parent),
                                                classes_[level0]);
}

bool PolicyParams::SameShape(const PolicyParams& other) const {
  return features_ == other.features_ && classes_ == other.classes_;
}

bool PolicyParams::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

void PolicyParams::Axpy(double scale, const PolicyParams& other) {
  if (!SameShape(other)) {
    throw Error(ErrorCode::kShapeMismatch, "policy tables differ in shape");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

void LogSoftmax(std::span<const double> logits, double temperature,
                std::span<double> out) {
  double max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = logits[i] / temperature;
    max = std::max(max, out[i]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) sum += std::exp(out[i] - max);
  const double log_z = max + std::log(sum);
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] -= log_z;
}

std::string_view ToString(AdvantageNorm norm) {
  return norm == AdvantageNorm::kStd ? "std" : "none";
}

AdvantageNorm ParseAdvantageNorm(std::string_view s) {
  if (s == "std") return AdvantageNorm::kStd;
  if (s == "none") return AdvantageNorm::kNone;
  throw Error(ErrorCode::kInvalidConfig,
              "advantage_norm must be 'std' or 'none', got '" + std::string(s) + "'");
}

RolloutGroup SampleGroup(const PolicyParams& policy, std::size_t feature,
                         std::size_t group_size, std::uint64_t seed,
                         double temperature) {
  RolloutGroup group;
  group.prompt_id = feature;
  group.trajectories.resize(group_size);
  std::vector<double> logp;
  for (std::size_t k = 0; k < group_size; ++k) {
    Rng rng(DeriveSeed(seed, "trajectory", k));
    Trajectory& traj = group.trajectories[k];
    std::size_t parent = 0;
    for (std::size_t level = 0; level < policy.depth(); ++level) {
      const auto row = policy.Row(level, feature, parent);
      logp.resize(row.size());
      LogSoftmax(row, temperature, logp);
      const double u = rng.UniformDouble();
      double cumulative = 0.0;
      std::size_t choice = row.size() - 1;
      for (std::size_t c = 0; c < row.size(); ++c) {
        cumulative += std::exp(logp[c]);
        if (u < cumulative) {
          choice = c;
          break;
        }
      }
      traj.decisions.push_back(choice);
      traj.logprobs.push_back(logp[choice]);
      parent = choice;
    }
  }
  return group;
}

double TrajectoryLogProb(const PolicyParams& policy, std::size_t feature,
                         std::span<const std::size_t> decisions, double temperature) {
  double total = 0.0;
  std::size_t parent = 0;
  std::vector<double> logp;
  for (std::size_t level = 0; level < decisions.size(); ++level) {
    const auto row = policy.Row(level, feature, parent);
    logp.resize(row.size());
    LogSoftmax(row, temperature, logp);
    total += logp[decisions[level]];
    parent = decisions[level];
  }
  return total;
}

std::vector<double> GroupAdvantages(std::span<const double> rewards,
                                    AdvantageNorm norm) {
  const auto n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= n;
  const double denom =
      norm == AdvantageNorm::kStd ? std::sqrt(var) + kAdvantageEpsilon : 1.0;
  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) out.push_back((r - mean) / denom);
  return out;
}

void TrainConfig::Validate() const {
  if (group_size < 2) throw Error(ErrorCode::kInvalidConfig, "group size must be >= 2");
  if (!(clip_eps > 0.0)) throw Error(ErrorCode::kInvalidConfig, "clip_eps must be > 0");
  if (!(kl_coef >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "kl_coef must be >= 0");
  if (!(learning_rate >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "learning_rate must be >= 0");
  }
  if (!(sampling_temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "sampling_temperature must be > 0");
  }
  if (batch_size == 0) throw Error(ErrorCode::kInvalidConfig, "batch_size must be >= 1");
}

double PathKl(const PolicyParams& policy, const PolicyParams& ref,
              std::size_t feature, double temperature, double scale,
              PolicyParams* grad) {
  if (!policy.SameShape(ref)) {
    throw Error(ErrorCode::kShapeMismatch, "policy and reference differ in shape");
  }
  const std::size_t depth = policy.depth();
  // logp[level][parent * classes + c], likewise logq.
  std::vector<std::vector<double>> logp(depth), logq(depth);
  // reach[level][parent]: probability that the parent slot of `level` is used.
  std::vector<std::vector<double>> reach(depth + 1);
  reach[0] = {1.0};
  for (std::size_t level = 0; level < depth; ++level) {
    const std::size_t parents = policy.parents(level);
    const std::size_t classes = policy.classes(level);
    logp[level].resize(parents * classes);
    logq[level].resize(parents * classes);
    reach[level + 1].assign(classes, 0.0);
    for (std::size_t a = 0; a < parents; ++a) {
      std::span<double> lp(logp[level].data() + a * classes, classes);
      std::span<double> lq(logq[level].data() + a * classes, classes);
      LogSoftmax(policy.Row(level, feature, a), temperature, lp);
      LogSoftmax(ref.Row(level, feature, a), temperature, lq);
      for (std::size_t b = 0; b < classes; ++b) {
        reach[level + 1][b] += reach[level][a] * std::exp(lp[b]);
      }
    }
  }
  // value[b]: expected KL accumulated from the next level on, given the
  // current decision b.
  std::vector<double> value;
  std::vector<double> h;
  for (std::size_t level = depth; level-- > 0;) {
    const std::size_t parents = policy.parents(level);
    const std::size_t classes = policy.classes(level);
    std::vector<double> parent_value(parents, 0.0);
    h.resize(classes);
    for (std::size_t a = 0; a < parents; ++a) {
      const double* lp = logp[level].data() + a * classes;
      const double* lq = logq[level].data() + a * classes;
      double v = 0.0;
      for (std::size_t b = 0; b < classes; ++b) {
        h[b] = lp[b] - lq[b] + (value.empty() ? 0.0 : value[b]);
        v += std::exp(lp[b]) * h[b];
      }
      parent_value[a] = v;
      if (grad != nullptr && reach[level][a] != 0.0) {
        auto g = grad->Row(level, feature, a);
        const double w = scale * reach[level][a] / temperature;
        for (std::size_t c = 0; c < classes; ++c) {
          g[c] += w * std::exp(lp[c]) * (h[c] - v);
        }
      }
    }
    value = std::move(parent_value);
  }
  return value.empty() ? 0.0 : value[0];
}

LossResult GrpoLoss(const RolloutGroup& group, const PolicyParams& policy,
                    const PolicyParams& old_policy, const PolicyParams& ref_policy,
                    const TrainConfig& cfg) {
  if (!policy.SameShape(old_policy) || !policy.SameShape(ref_policy)) {
    throw Error(ErrorCode::kShapeMismatch, "policy tables differ in shape");
  }
  if (group.prompt_id >= policy.features()) {
    throw Error(ErrorCode::kShapeMismatch, "prompt id outside the feature range");
  }
  if (group.advantages.size() != group.trajectories.size() ||
      group.trajectories.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "advantages do not match trajectories");
  }
  const double tau = cfg.sampling_temperature;
  const std::size_t f = group.prompt_id;
  const auto g_count = static_cast<double>(group.trajectories.size());

  LossResult out;
  out.gradient = PolicyParams(policy.features(), [&] {
    std::vector<std::size_t> c;
    for (std::size_t i = 0; i < policy.depth(); ++i) c.push_back(policy.classes(i));
    return c;
  }());

  std::vector<double> logp;
  double objective = 0.0;
  for (std::size_t k = 0; k < group.trajectories.size(); ++k) {
    const Trajectory& traj = group.trajectories[k];
    if (traj.decisions.size() != policy.depth()) {
      throw Error(ErrorCode::kShapeMismatch, "trajectory depth differs from policy depth");
    }
    for (std::size_t level = 0; level < policy.depth(); ++level) {
      if (traj.decisions[level] >= policy.classes(level)) {
        throw Error(ErrorCode::kShapeMismatch, "decision index out of range");
      }
    }
    const double adv = group.advantages[k];
    const double log_new = TrajectoryLogProb(policy, f, traj.decisions, tau);
    const double log_old = TrajectoryLogProb(old_policy, f, traj.decisions, tau);
    const double ratio = std::exp(log_new - log_old);
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
    const double unclipped_term = ratio * adv;
    const double clipped_term = clipped * adv;
    if (unclipped_term <= clipped_term) {
      objective += unclipped_term;
      // d(ratio * A)/dz = A * ratio * dlog_new/dz
      const double coeff = -adv * ratio / g_count / tau;
      std::size_t parent = 0;
      for (std::size_t level = 0; level < policy.depth(); ++level) {
        const auto row = policy.Row(level, f, parent);
        logp.resize(row.size());
        LogSoftmax(row, tau, logp);
        auto g = out.gradient.Row(level, f, parent);
        const std::size_t chosen = traj.decisions[level];
        for (std::size_t c = 0; c < row.size(); ++c) {
          g[c] += coeff * ((c == chosen ? 1.0 : 0.0) - std::exp(logp[c]));
        }
        parent = chosen;
      }
    } else {
      objective += clipped_term;
    }
  }
  out.surrogate = -objective / g_count;
  out.kl = cfg.kl_coef != 0.0
               ? PathKl(policy, ref_policy, f, tau, cfg.kl_coef, &out.gradient)
               : PathKl(policy, ref_policy, f, tau);
  out.loss = out.surrogate + cfg.kl_coef * out.kl;
  return out;
}

namespace {

std::string SyntheticCode(const std::string& parent, std::size_t level0,
                          std::size_t child, bool ipc_style) {
  if (ipc_style) {
    if (level0 == 0) return std::string(1, static_cast<char>('A' + child));
    if (level0 == 1) {
      const std::size_t n = child + 1;
      return parent + static_cast<char>('0' + n / 10) + static_cast<char>('0' + n % 10);
    }
    return parent + static_cast<char>('A' + child);
  }
  return level0 == 0 ? "T" + std::to_string(child)
                     : parent + "." + std::to_string(child);
}

constexpr const char* kFillerWords[] = {
    "the",     "document", "describes", "a",        "system",  "whose",
    "central", "feature",  "matches",   "this",     "branch",  "of",
    "the",     "label",    "hierarchy", "because",  "its",     "claims",
    "focus",   "on",       "that",      "specific", "subject", "area"};

}  // namespace

SyntheticTask SyntheticTask::Make(const SyntheticTaskSpec& spec) {
  if (spec.levels == 0 || spec.branching < 2) {
    throw Error(ErrorCode::kInvalidConfig, "synthetic task needs >= 1 level and branching >= 2");
  }
  const bool ipc_style = spec.levels <= 3 && spec.branching <= 26;
  std::vector<TaxonomyRecord> records;
  std::vector<std::string> frontier = {""};
  for (std::size_t level = 0; level < spec.levels; ++level) {
    std::vector<std::string> next;
    for (const auto& parent : frontier) {
      for (std::size_t c = 0; c < spec.branching; ++c) {
        std::string code = SyntheticCode(parent, level, c, ipc_style);
        records.push_back({code, level + 1, level == 0 ? "-" : parent, ""});
        next.push_back(std::move(code));
      }
    }
    frontier = std::move(next);
  }
  if (spec.features == 0 || spec.features > frontier.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "synthetic task needs 1 <= features <= " + std::to_string(frontier.size()));
  }
  std::vector<std::string> level_names;
  for (std::size_t i = 0; i < spec.levels; ++i) {
    level_names.push_back("Level " + std::to_string(i + 1));
  }

  SyntheticTask task{spec,
                     Taxonomy::FromRecords("synthetic", level_names, records),
                     level_names,
                     {},
                     {}};
  Rng rng(DeriveSeed(spec.seed, "synthetic_task.gold"));
  rng.PartialShuffle(frontier, spec.features);
  for (std::size_t f = 0; f < spec.features; ++f) {
    LabelPath path = task.taxonomy.PathTo(frontier[f]);
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < path.depth(); ++i) {
      const auto& codes = task.taxonomy.level(i).codes;
      index.push_back(static_cast<std::size_t>(
          std::lower_bound(codes.begin(), codes.end(), path.codes[i]) - codes.begin()));
    }
    task.gold.push_back(std::move(path));
    task.gold_index.push_back(std::move(index));
  }
  return task;
}

std::string SyntheticTask::RenderTrace(std::size_t feature,
                                       std::span<const std::size_t> decisions) const {
  constexpr std::size_t kVocab = std::size(kFillerWords);
  std::vector<TraceStep> steps;
  for (std::size_t level = 0; level < decisions.size(); ++level) {
    TraceStep step;
    step.level_index = level + 1;
    step.level_name = level_names[level];
    for (std::size_t w = 0; w < spec.justification_words; ++w) {
      if (w > 0) step.justification += ' ';
      step.justification += kFillerWords[(feature + level * 7 + w) % kVocab];
    }
    step.decision = taxonomy.level(level).codes.at(decisions[level]);
    steps.push_back(std::move(step));
  }
  return RenderSteps(steps);
}

PolicyParams SyntheticTask::ZeroPolicy() const {
  return PolicyParams(features(), taxonomy.CategoryCounts());
}

RewardBreakdown ScoreTrajectory(const SyntheticTask& task, std::size_t feature,
                                std::span<const std::size_t> decisions,
                                const RewardConfig& reward_cfg,
                                std::span<const double> weights) {
  const std::string text = task.RenderTrace(feature, decisions);
  return ScoreOutput(text, task.gold[feature], task.level_names, reward_cfg, weights);
}

void TrainingLog::WriteJsonLines(std::ostream& out) const {
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf),
                  "{\"iteration\":%zu,\"mean_reward\":%.17g,\"mean_main\":%.17g,"
                  "\"mean_format\":%.17g,\"kl\":%.17g,\"loss\":%.17g}\n",
                  r.iteration, r.mean_reward, r.mean_main, r.mean_format, r.kl, r.loss);
    out << buf;
  }
}

TrainingLog Train(const SyntheticTask& task, const TrainConfig& cfg,
                  const RewardConfig& reward_cfg) {
  return Train(task, cfg, reward_cfg, task.ZeroPolicy());
}

TrainingLog Train(const SyntheticTask& task, const TrainConfig& cfg,
                  const RewardConfig& reward_cfg, PolicyParams initial) {
  cfg.Validate();
  reward_cfg.Validate();
  if (initial.features() != task.features() ||
      initial.depth() != task.taxonomy.depth()) {
    throw Error(ErrorCode::kShapeMismatch, "initial policy does not fit the task");
  }
  const std::vector<double> weights = LevelWeights(task.taxonomy);
  const PolicyParams ref = initial;
  PolicyParams policy = std::move(initial);

  std::vector<std::size_t> all_prompts(task.features());
  for (std::size_t f = 0; f < all_prompts.size(); ++f) all_prompts[f] = f;

  TrainingLog log;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    std::vector<std::size_t> prompts = all_prompts;
    if (cfg.batch_size < prompts.size()) {
      Rng rng(DeriveSeed(cfg.seed, "grpo.prompts", it));
      rng.PartialShuffle(prompts, cfg.batch_size);
      prompts.resize(cfg.batch_size);
    }
    // One epoch per batch: the sampling policy is the current one.
    const PolicyParams& old_policy = policy;
    PolicyParams grad = task.ZeroPolicy();
    TrainingRecord rec;
    rec.iteration = it;
    std::size_t samples = 0;
    for (std::size_t f : prompts) {
      RolloutGroup group =
          SampleGroup(policy, f, cfg.group_size, DeriveSeed(cfg.seed, "grpo.rollout", it, f),
                      cfg.sampling_temperature);
      std::vector<double> rewards;
      for (auto& traj : group.trajectories) {
        const RewardBreakdown b =
            ScoreTrajectory(task, f, traj.decisions, reward_cfg, weights);
        traj.reward = b.total;
        traj.main = b.main;
        traj.format = b.format;
        rewards.push_back(b.total);
        rec.mean_reward += b.total;
        rec.mean_main += b.main;
        rec.mean_format += b.format;
        ++samples;
      }
      group.advantages = GroupAdvantages(rewards, cfg.advantage_norm);
      const LossResult loss = GrpoLoss(group, policy, old_policy, ref, cfg);
      rec.loss += loss.loss;
      rec.kl += loss.kl;
      grad.Axpy(1.0, loss.gradient);
    }
    const auto groups = static_cast<double>(prompts.size());
    rec.mean_reward /= static_cast<double>(samples);
    rec.mean_main /= static_cast<double>(samples);
    rec.mean_format /= static_cast<double>(samples);
    rec.loss /= groups;
    rec.kl /= groups;
    log.records.push_back(rec);
    if (cfg.learning_rate != 0.0) policy.Axpy(-cfg.learning_rate / groups, grad);
  }
  log.final_policy = std::move(policy);
  return log;
}

}  // namespace rhc
