#include "rhc/rewards.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/weights_oracle.hpp"
#include "rhc/io.hpp"
#include "rhc/rng.hpp"
#include "support/errors.hpp"
#include "support/test_paths.hpp"

namespace rhc {
namespace {

using testing::CodeOf;

const std::vector<std::string> kLevels{"Section", "Class", "Subclass"};
const LabelPath kGold{{"H", "H03", "H03L"}};

std::vector<double> IpcWeights() { return LevelWeights(kIpcSchemeCounts); }

ReasoningTrace MakeTrace(const std::vector<std::string>& decisions, std::size_t tokens = 200) {
  ReasoningTrace t;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    t.steps.push_back({i + 1, kLevels[i], "because.", decisions[i], true});
  }
  t.token_length = tokens;
  return t;
}

TEST(StepRewardTest, Examples) {
  const auto w = IpcWeights();
  EXPECT_DOUBLE_EQ(StepReward(MakeTrace({"H", "H03", "H03L"}), kGold, w).first, 1.0);
  EXPECT_EQ(StepReward(MakeTrace({"G", "G06", "G06F"}), kGold, w).first, 0.0);
  EXPECT_EQ(StepReward(ReasoningTrace{}, kGold, w).first, 0.0);

  const auto [two, flags] = StepReward(MakeTrace({"H", "H03", "H03K"}), kGold, w);
  const auto mp = oracle::LevelWeightsMp(kIpcSchemeCounts);
  EXPECT_NEAR(two, mp[0] + mp[1], 1e-12);
  EXPECT_NEAR(two, 0.5179, 5e-5);
  EXPECT_EQ(flags, (std::vector<bool>{true, true, false}));
}

TEST(StepRewardTest, UnboxedAndLowercaseDecisions) {
  const auto w = IpcWeights();
  ReasoningTrace t = MakeTrace({"h", " h03 ", "H03L"});
  EXPECT_DOUBLE_EQ(StepReward(t, kGold, w).first, 1.0);
  t.steps[2].boxed = false;
  EXPECT_NEAR(StepReward(t, kGold, w).first, w[0] + w[1], 1e-15);
}

TEST(StepRewardTest, LengthMismatch) {
  const std::vector<double> w{0.5, 0.5};
  EXPECT_EQ(CodeOf([&] { StepReward(MakeTrace({"H"}), kGold, w); }),
            ErrorCode::kLengthMismatch);
}

TEST(FinalRewardTest, Examples) {
  EXPECT_EQ(FinalReward(MakeTrace({"H", "H03", "H03L"}), kGold), 1.0);
  EXPECT_EQ(FinalReward(MakeTrace({"H", "H03", "H03K"}), kGold), 0.0);
  EXPECT_EQ(FinalReward(ReasoningTrace{}, kGold), 0.0);
  // A short trace falls back to the last box in the raw text.
  ReasoningTrace short_trace = MakeTrace({"H"});
  short_trace.raw_text = "Step 1 — Section\nDecision: \\box{H}\nSo the answer is \\box{H03L}";
  EXPECT_EQ(FinalReward(short_trace, kGold), 1.0);
}

TEST(FormatRewardTest, Examples) {
  const RewardConfig cfg;
  EXPECT_EQ(FormatReward(200, cfg), 0.0);
  EXPECT_DOUBLE_EQ(FormatReward(64, cfg), -0.5);
  EXPECT_DOUBLE_EQ(FormatReward(448, cfg), -0.5);
  EXPECT_DOUBLE_EQ(FormatReward(1000, cfg), -1.0);
  EXPECT_DOUBLE_EQ(FormatReward(0, cfg), -1.0);
  EXPECT_EQ(ClassifyLength(64, cfg), LengthBand::kShort);
  EXPECT_EQ(ClassifyLength(128, cfg), LengthBand::kInRange);
  EXPECT_EQ(ClassifyLength(384, cfg), LengthBand::kInRange);
  EXPECT_EQ(ClassifyLength(385, cfg), LengthBand::kLong);
}

TEST(FormatRewardTest, ContinuousAtBandEdgesAndFlatPastLimit) {
  RewardConfig cfg;
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    cfg.l0 = 1 + static_cast<long>(rng.UniformInt(300));
    cfg.h0 = cfg.l0 + static_cast<long>(rng.UniformInt(300));
    cfg.h_max = cfg.h0 + 1 + static_cast<long>(rng.UniformInt(300));
    cfg.omega = rng.Uniform(0.0, 3.0);
    cfg.beta = 0.0;
    const auto l0 = static_cast<std::size_t>(cfg.l0);
    const auto h0 = static_cast<std::size_t>(cfg.h0);
    const auto hm = static_cast<std::size_t>(cfg.h_max);
    // Each branch is linear with slope omega/l0 or omega/(h_max-h0); a jump
    // at an edge would show up as a step larger than the slope.
    if (l0 > 1) {
      EXPECT_NEAR(FormatReward(l0 - 1, cfg) - FormatReward(l0, cfg), -cfg.omega / cfg.l0, 1e-12);
    }
    EXPECT_EQ(FormatReward(l0, cfg), 0.0);
    EXPECT_EQ(FormatReward(h0, cfg), 0.0);
    EXPECT_NEAR(FormatReward(h0 + 1, cfg), -cfg.omega / static_cast<double>(hm - h0), 1e-12);
    EXPECT_NEAR(FormatReward(hm, cfg), -cfg.omega, 1e-15);
    EXPECT_EQ(FormatReward(hm + 1 + rng.UniformInt(10000), cfg), FormatReward(hm, cfg));
  }
}

TEST(TotalRewardTest, Examples) {
  const RewardConfig cfg;
  const auto w = IpcWeights();
  EXPECT_DOUBLE_EQ(TotalReward(MakeTrace({"H", "H03", "H03L"}, 200), kGold, cfg, w).total, 1.0);
  const RewardBreakdown b = TotalReward(MakeTrace({"H", "H03", "H03L"}, 64), kGold, cfg, w);
  EXPECT_NEAR(b.total, 0.95, 1e-12);
  EXPECT_EQ(b.total, b.main + cfg.lambda * b.format);
  const RewardBreakdown empty = ScoreOutput("", kGold, kLevels, cfg, w);
  EXPECT_EQ(empty.main, 0.0);
  EXPECT_EQ(empty.format, -1.0);
  EXPECT_NEAR(empty.total, -0.1, 1e-12);
  EXPECT_EQ(empty.violations.size(), 3u);
}

TEST(TotalRewardTest, PublishedExampleOutput) {
  const RewardConfig cfg;
  const auto w = LevelWeights(kIpcDatasetCounts);
  for (const char* fixture : {"worked_output.txt", "worked_output_lines.txt"}) {
    const std::string raw = ReadFile(testing::FixturePath(fixture));
    const RewardBreakdown b = ScoreOutput(raw, kGold, kLevels, cfg, w);
    EXPECT_EQ(b.main, 1.0);
    EXPECT_EQ(b.per_level_correct, (std::vector<bool>{true, true, true}));
    EXPECT_EQ(b.token_length, CountTokens(raw));
    EXPECT_EQ(b.total, 1.0 + cfg.lambda * FormatReward(b.token_length, cfg));
  }
}

TEST(TotalRewardTest, FinalModeUsesLeafOnly) {
  RewardConfig cfg;
  cfg.main_mode = MainRewardMode::kFinal;
  const auto w = IpcWeights();
  EXPECT_EQ(TotalReward(MakeTrace({"H", "H03", "H03K"}), kGold, cfg, w).main, 0.0);
  EXPECT_EQ(TotalReward(MakeTrace({"G", "G06", "H03L"}), kGold, cfg, w).main, 1.0);
}

TEST(RewardPropertyTest, BoundsMonotonicityDominanceDeterminism) {
  Rng rng(2024);
  const std::vector<std::string> alternatives[] = {{"G", "H"}, {"H03", "H04"}, {"H03K", "H03L"}};
  for (int trial = 0; trial < 5000; ++trial) {
    RewardConfig cfg;
    cfg.main_mode = rng.UniformInt(2) ? MainRewardMode::kStep : MainRewardMode::kFinal;
    cfg.lambda = rng.Uniform(0.0, 1.0);
    cfg.omega = rng.Uniform(0.0, 2.0);
    cfg.beta = rng.UniformInt(2) ? 0.0 : rng.Uniform(0.0, 1.0);
    cfg.l0 = 1 + static_cast<long>(rng.UniformInt(200));
    cfg.h0 = cfg.l0 + static_cast<long>(rng.UniformInt(300));
    cfg.h_max = cfg.h0 + 1 + static_cast<long>(rng.UniformInt(300));
    std::vector<std::size_t> counts{2 + rng.UniformInt(20), 2 + rng.UniformInt(200),
                                    2 + rng.UniformInt(900)};
    const auto w = LevelWeights(counts);
    std::vector<std::string> decisions;
    const std::size_t depth = rng.UniformInt(4);
    for (std::size_t i = 0; i < depth; ++i) decisions.push_back(alternatives[i][rng.UniformInt(2)]);
    const ReasoningTrace t = MakeTrace(decisions, rng.UniformInt(1000));

    const RewardBreakdown b = TotalReward(t, kGold, cfg, w);
    EXPECT_GE(b.main, 0.0);
    EXPECT_LE(b.main, 1.0);
    EXPECT_GE(b.format, -cfg.omega);
    EXPECT_LE(b.format, cfg.beta);
    EXPECT_EQ(b.total, b.main + cfg.lambda * b.format);
    EXPECT_GE(b.total, -cfg.lambda * cfg.omega - 1e-15);
    EXPECT_LE(b.total, 1.0 + cfg.lambda * cfg.beta + 1e-15);
    EXPECT_EQ(b, TotalReward(t, kGold, cfg, w));

    const auto [step, flags] = StepReward(t, kGold, w);
    const double final_r = FinalReward(t, kGold);
    if (final_r == 1.0) EXPECT_TRUE(flags.back());
    if (step == 1.0) EXPECT_EQ(final_r, 1.0);

    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      if (flags[i]) continue;
      ReasoningTrace fixed = t;
      fixed.steps[i].decision = kGold.codes[i];
      EXPECT_NEAR(StepReward(fixed, kGold, w).first - step, w[i], 1e-12);
    }
  }
}

TEST(RewardConfigTest, ValidateRejectsBadIntervals) {
  RewardConfig cfg;
  cfg.l0 = 0;
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kInvalidConfig);
  cfg = RewardConfig{};
  cfg.h0 = cfg.h_max;
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kInvalidConfig);
  cfg = RewardConfig{};
  cfg.lambda = -1;
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kInvalidConfig);
  EXPECT_NO_THROW(RewardConfig{}.Validate());
}

}  // namespace
}  // namespace rhc
