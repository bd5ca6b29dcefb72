// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails or exceeds its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "oracles/finite_diff.hpp"
#include "oracles/metrics_oracle.hpp"
#include "oracles/toy_optimum.hpp"
#include "oracles/weights_oracle.hpp"
#include "rhc/dataset.hpp"
#include "rhc/error.hpp"
#include "rhc/grpo.hpp"
#include "rhc/http_server.hpp"
#include "rhc/json_io.hpp"
#include "rhc/metrics.hpp"
#include "rhc/rewards.hpp"
#include "rhc/rng.hpp"
#include "rhc/scoring.hpp"
#include "rhc/taxonomy.hpp"
#include "rhc/trace.hpp"
#include "support/eval_instances.hpp"
#include "support/grpo_instances.hpp"
#include "support/synthetic.hpp"
#include "support/test_paths.hpp"

namespace rhc {
namespace {

using nlohmann::json;

// Collects failed checks; a criterion passes when none are recorded.
class Checks {
 public:
  void Expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ = failed_ || !ok;
  }
  void Near(double actual, double expected, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), " (got %.17g, want %.17g, tol %g)", actual, expected, tol);
    Expect(std::abs(actual - expected) <= tol, what + buf);
  }
  bool ok() const { return !failed_; }
  std::size_t count() const { return count_; }
  std::string Failures() const {
    std::string out;
    for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + f;
    return out;
  }

 private:
  bool failed_ = false;
  std::size_t count_ = 0;
  std::vector<std::string> failures_;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome Finish(const Checks& c, const std::string& summary) {
  return {c.ok(), c.ok() ? summary : summary + "; failures: " + c.Failures()};
}

std::string Fmt(const char* fmt, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

// ---- 1 ----
Outcome LevelWeightsCriterion() {
  Checks c;
  const auto w = LevelWeights(kIpcSchemeCounts);
  const auto mp = oracle::LevelWeightsMp(kIpcSchemeCounts);
  double max_err = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    max_err = std::max(max_err, std::abs(w[i] - mp[i]));
    c.Near(w[i], mp[i], 1e-12, "K=(8,129,639) level " + std::to_string(i + 1));
  }
  Rng rng(DeriveSeed(1, "acceptance.weights"));
  double max_base_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Taxonomy t = testing::RandomTaxonomy(rng, 1 + rng.UniformInt(4), 2, 6);
    const auto counts = t.CategoryCounts();
    const auto we = LevelWeights(t);
    const auto w10 = oracle::LevelWeightsLog10(counts);
    const auto wmp = oracle::LevelWeightsMp(counts);
    c.Near(std::accumulate(we.begin(), we.end(), 0.0), 1.0, 1e-12, "weights sum");
    for (std::size_t i = 0; i < we.size(); ++i) {
      max_base_err = std::max(max_base_err, std::abs(we[i] - w10[i]));
      c.Near(we[i], w10[i], 1e-12, "base invariance");
      c.Near(we[i], wmp[i], 1e-12, "random taxonomy vs oracle");
    }
  }
  return Finish(c, Fmt("w=(%.6f, %.6f, %.6f)", w[0], w[1], w[2]) +
                       Fmt(", max|w-oracle|=%.2e, 100 taxonomies max|ln-log10|=%.2e",
                           max_err, max_base_err));
}

// ---- 2 ----
Outcome RewardCriterion() {
  Checks c;
  const std::vector<std::string> levels{"Section", "Class", "Subclass"};
  const LabelPath gold{{"H", "H03", "H03L"}};
  const auto w = LevelWeights(kIpcSchemeCounts);
  const auto mp = oracle::LevelWeightsMp(kIpcSchemeCounts);
  auto trace = [&](std::vector<std::string> d, std::size_t tokens) {
    ReasoningTrace t;
    for (std::size_t i = 0; i < d.size(); ++i) t.steps.push_back({i + 1, levels[i], "j", d[i], true});
    t.token_length = tokens;
    return t;
  };
  const RewardConfig cfg;
  const double two = StepReward(trace({"H", "H03", "H03K"}, 200), gold, w).first;
  c.Near(two, mp[0] + mp[1], 1e-12, "two-of-three step credit");
  c.Near(two, 0.5179, 5e-5, "two-of-three step credit ~0.5179");
  c.Near(FormatReward(64, cfg), -0.5, 1e-12, "format T=64");
  c.Near(FormatReward(448, cfg), -0.5, 1e-12, "format T=448");
  c.Near(FormatReward(1000, cfg), -1.0, 1e-12, "format T=1000");
  c.Near(FormatReward(200, cfg), 0.0, 1e-12, "format T=200");
  c.Near(TotalReward(trace({"H", "H03", "H03L"}, 200), gold, cfg, w).total, 1.0, 1e-12,
         "total full credit T=200");
  c.Near(TotalReward(trace({"H", "H03", "H03L"}, 64), gold, cfg, w).total, 0.95, 1e-12,
         "total full credit T=64");
  c.Near(ScoreOutput("", gold, levels, cfg, w).total, -0.1, 1e-12, "total empty output");
  const std::size_t examples = c.count();

  Rng rng(DeriveSeed(2, "acceptance.rewards"));
  const std::vector<std::string> alt[] = {{"G", "H"}, {"H03", "H04"}, {"H03K", "H03L"}};
  const int kCases = 12000;
  for (int trial = 0; trial < kCases; ++trial) {
    RewardConfig rc;
    rc.main_mode = rng.UniformInt(2) ? MainRewardMode::kStep : MainRewardMode::kFinal;
    rc.lambda = rng.Uniform(0.0, 1.0);
    rc.omega = rng.Uniform(0.0, 3.0);
    rc.beta = rng.UniformInt(2) ? 0.0 : rng.Uniform(0.0, 1.0);
    rc.l0 = 1 + static_cast<long>(rng.UniformInt(300));
    rc.h0 = rc.l0 + static_cast<long>(rng.UniformInt(400));
    rc.h_max = rc.h0 + 1 + static_cast<long>(rng.UniformInt(400));
    const std::vector<std::size_t> counts{2 + rng.UniformInt(30), 2 + rng.UniformInt(300),
                                          2 + rng.UniformInt(3000)};
    const auto wr = LevelWeights(counts);
    std::vector<std::string> d;
    const std::size_t depth = rng.UniformInt(4);
    for (std::size_t i = 0; i < depth; ++i) d.push_back(alt[i][rng.UniformInt(2)]);
    const std::size_t tokens = rng.UniformInt(2 * static_cast<std::size_t>(rc.h_max) + 10);
    const ReasoningTrace t = trace(d, tokens);
    const RewardBreakdown b = TotalReward(t, gold, rc, wr);
    // Bounds.
    c.Expect(b.main >= 0.0 && b.main <= 1.0, "main in [0,1]");
    c.Expect(b.format >= -rc.omega && b.format <= rc.beta, "format in [-omega, beta]");
    c.Expect(b.total == b.main + rc.lambda * b.format, "total = main + lambda*format");
    c.Expect(b.total >= -rc.lambda * rc.omega - 1e-15 &&
                 b.total <= 1.0 + rc.lambda * rc.beta + 1e-15,
             "total bounds");
    c.Expect(b == TotalReward(t, gold, rc, wr), "deterministic breakdown");
    // Monotonicity: fixing a wrong level adds exactly its weight.
    const auto [step, flags] = StepReward(t, gold, wr);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      if (flags[i]) continue;
      ReasoningTrace fixed = t;
      fixed.steps[i].decision = gold.codes[i];
      c.Near(StepReward(fixed, gold, wr).first - step, wr[i], 1e-12, "monotone step credit");
    }
    // Mode dominance.
    const double fin = FinalReward(t, gold);
    if (fin == 1.0) c.Expect(flags.back(), "final=1 implies deepest flag");
    if (step == 1.0) c.Expect(fin == 1.0, "step=1 implies final=1");
    // Continuity at the band edges (beta = 0) and flatness past h_max.
    RewardConfig flat = rc;
    flat.beta = 0.0;
    const auto l0 = static_cast<std::size_t>(flat.l0);
    const auto h0 = static_cast<std::size_t>(flat.h0);
    const auto hm = static_cast<std::size_t>(flat.h_max);
    if (l0 > 1) {
      c.Near(FormatReward(l0 - 1, flat) - FormatReward(l0, flat), -flat.omega / flat.l0, 1e-12,
             "continuity at l0");
    }
    c.Near(FormatReward(h0 + 1, flat) - FormatReward(h0, flat),
           -flat.omega / static_cast<double>(hm - h0), 1e-12, "continuity at h0");
    c.Expect(FormatReward(hm + rng.UniformInt(5000), flat) == FormatReward(hm, flat),
             "constant past h_max");
  }
  return Finish(c, std::to_string(examples) + " worked examples, " + std::to_string(kCases) +
                       " randomized cases (" + std::to_string(c.count()) + " checks)" +
                       Fmt(", two-of-three credit=%.10f", two));
}

// ---- 3 ----
Outcome RoundTripCriterion() {
  Checks c;
  Rng rng(DeriveSeed(3, "acceptance.roundtrip"));
  const char* words[] = {"claims", "a", "circuit", "signal", "gene", "with", "turbine",
                         "delay-locked", "loop;", "plants,", "(phase)", "data", "x=1", "\xe2\x80\x94"};
  const std::vector<std::vector<std::string>> name_sets = {
      {"Section", "Class", "Subclass"},
      {"Level 1 (Field)", "Level 2 (Subfield)"},
  };
  std::size_t exact = 0;
  const int kTraces = 1000;
  for (int trial = 0; trial < kTraces; ++trial) {
    const std::size_t depth = 1 + rng.UniformInt(4);
    const Taxonomy tax = testing::RandomTaxonomy(rng, depth, 2, 5);
    std::vector<std::string> names = tax.LevelNames();
    for (const auto& set : name_sets) {
      if (set.size() == depth && rng.UniformInt(2)) names = set;
    }
    const auto leaves = testing::Leaves(tax);
    const LabelPath path = tax.PathTo(leaves[rng.UniformInt(leaves.size())]);
    std::vector<TraceStep> steps;
    for (std::size_t i = 0; i < depth; ++i) {
      std::string j;
      const std::size_t n = 1 + rng.UniformInt(25);
      for (std::size_t k = 0; k < n; ++k) j += (k ? " " : "") + std::string(words[rng.UniformInt(14)]);
      steps.push_back({i + 1, names[i], j, path.codes[i], true});
    }
    const ParseReport r = ParseTrace(RenderSteps(steps), names, ParseMode::kStrict);
    bool same = r.ok() && r.trace->steps.size() == steps.size();
    for (std::size_t i = 0; same && i < steps.size(); ++i) {
      same = r.trace->steps[i].decision == steps[i].decision &&
             r.trace->steps[i].level_name == steps[i].level_name;
    }
    c.Expect(same, "trace " + std::to_string(trial));
    exact += same ? 1 : 0;
  }
  return Finish(c, std::to_string(exact) + "/" + std::to_string(kTraces) + " exact");
}

// ---- 4 ----
Outcome GradientCriterion() {
  Checks c;
  Rng rng(DeriveSeed(4, "acceptance.gradient"));
  double worst = 0.0;
  std::size_t coords = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const testing::GrpoInstance inst = testing::RandomGrpoInstance(rng);
    const LossResult r =
        GrpoLoss(inst.group, inst.policy, inst.old_policy, inst.ref_policy, inst.cfg);
    const auto numeric = oracle::NumericGradient(inst.group, inst.policy, inst.old_policy,
                                                 inst.ref_policy, inst.cfg, 1e-5);
    const auto cmp = oracle::CompareGradients(r.gradient.data(), numeric, 1e-8);
    worst = std::max(worst, cmp.max_relative_error);
    coords += cmp.compared;
    c.Expect(cmp.compared > 0, "instance " + std::to_string(trial) + " has gradient");
    c.Expect(cmp.max_relative_error < 1e-4, "instance " + std::to_string(trial) +
                                                Fmt(" rel err %.3e", cmp.max_relative_error));
  }
  return Finish(c, Fmt("50 instances, %.0f coordinates, max relative error %.3e",
                       static_cast<double>(coords), worst));
}

// ---- 5 ----
Outcome TrainingCriterion() {
  Checks c;
  SyntheticTaskSpec spec;  // F=32, 3 levels, branching 4
  spec.seed = DeriveSeed(5, "acceptance.task");
  const SyntheticTask task = SyntheticTask::Make(spec);
  TrainConfig cfg;  // G=8, kl_coef=0.001, temperature 1.0, 500 iterations
  cfg.seed = DeriveSeed(5, "acceptance.train");
  const RewardConfig reward_cfg;
  const double optimum =
      oracle::OptimalMeanReward(task, reward_cfg, LevelWeights(task.taxonomy));
  const TrainingLog a = Train(task, cfg, reward_cfg);
  const TrainingLog b = Train(task, cfg, reward_cfg);
  std::ostringstream la, lb;
  a.WriteJsonLines(la);
  b.WriteJsonLines(lb);
  c.Expect(a.records == b.records && a.final_policy == b.final_policy && la.str() == lb.str(),
           "two seeded runs bit-identical");
  c.Expect(a.records.size() == 500, "500 iterations");
  std::size_t first_hit = 0;
  for (const auto& r : a.records) {
    if (r.mean_reward >= 0.9 * optimum) {
      first_hit = r.iteration + 1;
      break;
    }
  }
  const double final_reward = a.records.back().mean_reward;
  c.Expect(final_reward >= 0.9 * optimum, Fmt("final mean reward %.4f", final_reward));
  return Finish(c, Fmt("optimum %.4f, final mean reward %.4f (%.1f%% of optimum)", optimum,
                       final_reward, 100.0 * final_reward / optimum) +
                       ", first reached 90% at iteration " + std::to_string(first_hit) +
                       ", runs bit-identical");
}

// ---- 6 ----
Outcome DatasetCriterion() {
  Checks c;
  testing::CorpusSpec spec;  // 500 qualifying subclasses plus distractors
  spec.seed = DeriveSeed(6, "acceptance.corpus");
  const auto corpus = testing::MakeCorpus(spec);
  SplitParams params;
  params.seed = DeriveSeed(6, "acceptance.split");
  const SplitManifest m = BuildBalancedSplit(corpus, params, LabelResolver::IpcSubclass());
  const auto train = m.TrainIds();
  const auto test = m.TestIds();
  c.Expect(m.per_subclass.size() == 500, "500 subclasses kept");
  c.Expect(train.size() == 22500, "22,500 train");
  c.Expect(test.size() == 2500, "2,500 test");
  for (const auto& [label, counts] : m.per_subclass) {
    c.Expect(counts.train == 45 && counts.test == 5, "45/5 for " + label);
  }
  std::set<std::string> corpus_ids;
  for (const auto& d : corpus) corpus_ids.insert(d.doc_id);
  std::set<std::string> seen;
  for (const auto& e : m.entries) {
    c.Expect(corpus_ids.count(e.doc_id) == 1, "sampled id exists");
    c.Expect(seen.insert(e.doc_id).second, "no id sampled twice");
  }
  for (const auto& id : test) c.Expect(train.count(id) == 0, "train/test disjoint");
  const SplitManifest again = BuildBalancedSplit(corpus, params, LabelResolver::IpcSubclass());
  c.Expect(again.entries == m.entries, "split deterministic");

  // Out-of-distribution corpus: most train labels plus labels never trained on.
  Rng rng(DeriveSeed(6, "acceptance.ood_corpus"));
  const auto labels = m.Labels();
  std::vector<std::string> overlap(labels.begin(), labels.end());
  rng.Shuffle(overlap);
  overlap.resize(437);
  std::vector<std::string> foreign;
  for (const auto& code : testing::IpcSubclassCodes(700, rng)) {
    if (labels.count(code) == 0 && foreign.size() < 60) foreign.push_back(code);
  }
  std::vector<CorpusDocument> eu;
  std::map<std::string, std::size_t> available;
  for (const auto* group : {&overlap, &foreign}) {
    for (const auto& label : *group) {
      const std::size_t n = 1 + rng.UniformInt(20);
      available[label] = n;
      for (std::size_t i = 0; i < n; ++i) {
        eu.push_back({"EP" + std::to_string(eu.size()), "", label, "EPO", 2021, "Accepted"});
      }
    }
  }
  const auto ood = BuildOodSet(eu, labels, 10, DeriveSeed(6, "acceptance.ood"),
                               LabelResolver::IpcSubclass());
  std::map<std::string, std::size_t> per_label;
  for (const auto& e : ood) {
    c.Expect(labels.count(e.subclass) == 1, "OOD label in train label set");
    ++per_label[e.subclass];
  }
  for (const auto& [label, n] : per_label) {
    c.Expect(n <= 10, "OOD cap");
    c.Expect(n == std::min<std::size_t>(10, available[label]), "OOD keeps min(cap, available)");
  }
  c.Expect(per_label.size() == 437, "437 overlapping subclasses");
  c.Expect(ood.size() >= 437 && ood.size() <= 4370, "OOD size within [437, 4370]");
  return Finish(c, std::to_string(train.size()) + " train / " + std::to_string(test.size()) +
                       " test over " + std::to_string(m.per_subclass.size()) +
                       " subclasses; OOD " + std::to_string(ood.size()) + " docs over " +
                       std::to_string(per_label.size()) + " overlapping subclasses");
}

// ---- 7 ----
Outcome MetricsCriterion() {
  Checks c;
  Rng rng(DeriveSeed(7, "acceptance.metrics"));
  double worst = 0.0;
  std::size_t identity_checks = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Taxonomy t = testing::RandomTaxonomy(rng, 2 + rng.UniformInt(2), 2, 4);
    const auto records = testing::RandomEvalRecords(t, rng, 20 + rng.UniformInt(181));
    const LevelSource source = trial % 2 ? LevelSource::kPerStep : LevelSource::kDeepestPrefix;
    const EvalReport report = Evaluate(records, t, source);
    for (std::size_t level = 0; level < t.depth(); ++level) {
      std::vector<std::string> golds, preds;
      for (const auto& r : records) {
        golds.push_back(r.gold.codes[level]);
        preds.push_back(testing::OracleLevels(r, t, source)[level]);
      }
      const auto o = oracle::FromConfusionMatrix(golds, preds);
      const LevelMetrics& m = report.levels[level];
      worst = std::max({worst, std::abs(m.accuracy - o.accuracy),
                        std::abs(m.macro_f1 - o.macro_f1), std::abs(m.micro_f1 - o.micro_f1)});
      c.Near(m.accuracy, o.accuracy, 1e-12, "accuracy");
      c.Near(m.macro_f1, o.macro_f1, 1e-12, "macro F1");
      c.Near(m.micro_f1, o.micro_f1, 1e-12, "micro F1");
      c.Expect(m.accuracy == m.micro_f1, "accuracy == micro F1 exactly");
      ++identity_checks;
    }
  }
  return Finish(c, Fmt("1000 prediction sets, max |lib-oracle|=%.2e, ", worst) +
                       std::to_string(identity_checks) + " exact accuracy/micro-F1 identities");
}

// ---- 8 ----
std::string RandomRawOutput(Rng& rng, const Taxonomy& tax, const LabelPath& gold) {
  const auto names = tax.LevelNames();
  switch (rng.UniformInt(6)) {
    case 0:
      return "";
    case 1:
      return "After reading the claims the answer is \\box{" +
             tax.level(2).codes[rng.UniformInt(tax.level(2).size())] + "}";
    case 2: {
      std::string s;
      const std::size_t n = rng.UniformInt(300);
      for (std::size_t i = 0; i < n; ++i) s += "ab \n{}\\Step1:"[rng.UniformInt(14)];
      return s;
    }
    default: {
      std::vector<TraceStep> steps;
      const std::size_t depth = 1 + rng.UniformInt(3);
      for (std::size_t i = 0; i < depth; ++i) {
        std::string code = gold.depth() > i ? gold.codes[i] : tax.level(i).codes[0];
        if (rng.UniformInt(3) == 0) code = tax.level(i).codes[rng.UniformInt(tax.level(i).size())];
        std::string just;
        const std::size_t words = rng.UniformInt(180);
        for (std::size_t w = 0; w < words; ++w) just += "word ";
        steps.push_back({i + 1, names[i], just + "end.", code, true});
      }
      std::string text = RenderSteps(steps);
      if (rng.UniformInt(4) == 0) {
        const auto pos = text.find("\\box{");
        if (pos != std::string::npos) text.replace(pos, 5, "{");
      }
      return text;
    }
  }
}

Outcome ServiceParityCriterion() {
  Checks c;
  const Taxonomy tax = Taxonomy::Load(testing::DataPath("taxonomies/ipc_sample.tsv"));
  const std::vector<std::string> subset{"H03L", "H03K", "G06F", "A01C", "C12N", "F02C"};
  const ScoringContext ctx = ScoringContext::FromTaxonomy(tax, tax.RestrictedTo(subset));
  const ScoringService service(ctx, RewardConfig{}, 64);
  HttpScoringServer server(service);
  const int port = server.BindToAnyPort("127.0.0.1");
  if (port <= 0) return {false, "could not bind a loopback port"};
  std::thread listener([&] { server.ListenAfterBind(); });
  server.WaitUntilReady();
  httplib::Client client("127.0.0.1", port);
  client.set_keep_alive(true);
  client.set_tcp_nodelay(true);

  Rng rng(DeriveSeed(8, "acceptance.service"));
  const auto& leaves = tax.level(2).codes;
  const std::vector<std::string> bad_golds{"ZZZZ", "H03", "", "H99Z", "h03l "};
  std::size_t items_total = 0;
  std::size_t item_errors = 0;
  for (int req_i = 0; req_i < 500; ++req_i) {
    json items = json::array();
    std::vector<std::pair<std::string, std::string>> plain;
    const std::size_t n = 1 + rng.UniformInt(8);
    for (std::size_t k = 0; k < n; ++k) {
      const std::string gold = rng.UniformInt(8) == 0
                                   ? bad_golds[rng.UniformInt(bad_golds.size())]
                                   : leaves[rng.UniformInt(leaves.size())];
      LabelPath gp;
      try {
        gp = tax.PathTo(gold);
      } catch (const Error&) {
      }
      const std::string raw = RandomRawOutput(rng, tax, gp);
      items.push_back({{"raw_output", raw}, {"gold_code", gold}});
      plain.emplace_back(raw, gold);
    }
    json override_cfg = json::object();
    if (rng.UniformInt(2)) override_cfg["main_mode"] = rng.UniformInt(2) ? "step" : "final";
    if (rng.UniformInt(2)) override_cfg["lambda"] = rng.Uniform(0.0, 0.5);
    if (rng.UniformInt(3) == 0) override_cfg["weight_scope"] = rng.UniformInt(2) ? "taxonomy" : "dataset";
    if (rng.UniformInt(3) == 0) override_cfg["beta"] = rng.Uniform(0.0, 0.3);
    json body{{"items", items}};
    if (!override_cfg.empty()) body["config_override"] = override_cfg;

    const auto res = client.Post("/score", body.dump(), "application/json");
    if (!res || res->status != 200) {
      c.Expect(false, "request " + std::to_string(req_i) + " failed");
      continue;
    }
    // Direct library scoring, serialized the same way.
    const RewardConfig cfg = MergeRewardConfig(RewardConfig{}, override_cfg);
    ScoreResponse expected_response;
    expected_response.resolved_config = cfg;
    expected_response.taxonomy_id = ctx.taxonomy_id();
    const json got = json::parse(res->body);
    for (std::size_t k = 0; k < plain.size(); ++k) {
      ++items_total;
      LabelPath gold;
      bool bad = false;
      try {
        gold = ctx.ResolveGold(plain[k].second);
      } catch (const Error& e) {
        bad = true;
        ++item_errors;
        c.Expect(e.code() == ErrorCode::kBadGoldCode, "bad gold maps to bad_gold_code");
        ScoreItemResult r;
        r.error = ItemError{std::string(ErrorCodeName(e.code())), e.what()};
        expected_response.items.push_back(r);
        c.Expect(got["items"][k].at("error").at("code") == "bad_gold_code",
                 "wire error code for request " + std::to_string(req_i));
      }
      if (bad) continue;
      const RewardBreakdown direct = ScoreOutput(plain[k].first, gold, ctx.level_names(), cfg,
                                                 ctx.Weights(cfg.weight_scope));
      expected_response.items.push_back({direct, std::nullopt});
      const json& item = got["items"][k];
      for (const char* field : {"main", "format", "total"}) {
        const double wire = item.at(field).get<double>();
        const double lib = field[0] == 'm' ? direct.main : field[0] == 'f' ? direct.format
                                                                            : direct.total;
        c.Expect(std::memcmp(&wire, &lib, sizeof(double)) == 0,
                 std::string(field) + " bit-identical in request " + std::to_string(req_i));
      }
    }
    const std::string expected = DumpPrecise(ToJson(expected_response));
    c.Expect(res->body == expected, "response body identical for request " + std::to_string(req_i));
  }
  server.Stop();
  listener.join();
  return Finish(c, "500 requests, " + std::to_string(items_total) + " items (" +
                       std::to_string(item_errors) + " item-level errors) identical to library");
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace rhc

int main() {
  using namespace rhc;
  const std::vector<Criterion> criteria{
      {1, "level weights vs arbitrary-precision oracle", 1.0, LevelWeightsCriterion},
      {2, "reward worked examples and properties", 10.0, RewardCriterion},
      {3, "trace render/parse round trip", 5.0, RoundTripCriterion},
      {4, "GRPO gradient vs central differences", 30.0, GradientCriterion},
      {5, "toy GRPO training reaches 90% of optimum", 120.0, TrainingCriterion},
      {6, "balanced split and OOD protocol", 30.0, DatasetCriterion},
      {7, "metrics vs confusion-matrix oracle", 10.0, MetricsCriterion},
      {8, "HTTP service parity with library", 30.0, ServiceParityCriterion},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = out.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("criterion %d %s: %s [%.2fs / limit %.0fs%s] %s\n", c.id, pass ? "PASS" : "FAIL",
                c.name, secs, c.limit_seconds, in_time ? "" : ", too slow", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
