#include "cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "rhc/dataset.hpp"
#include "rhc/error.hpp"
#include "rhc/grpo.hpp"
#include "rhc/http_server.hpp"
#include "rhc/io.hpp"
#include "rhc/json_io.hpp"
#include "rhc/metrics.hpp"
#include "rhc/rewards.hpp"
#include "rhc/rng.hpp"
#include "rhc/scoring.hpp"
#include "rhc/taxonomy.hpp"
#include "rhc/text.hpp"

namespace rhc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Every option a subcommand understands, so the resolved values can be
// written out and read back (`--config snapshot.json`).
class ParamRegistry {
 public:
  template <typename T>
  CLI::Option* Add(CLI::App* app, const std::string& flags, const std::string& key,
                   T& field, const std::string& help) {
    CLI::Option* opt = app->add_option(flags, field, help)->capture_default_str();
    entries_.push_back({key, opt, [&field] { return json(field); },
                        [&field](const json& j) { field = j.get<T>(); }, false});
    return opt;
  }

  json Snapshot() const {
    json out = json::object();
    for (const auto& e : entries_) out[e.key] = e.get();
    return out;
  }

  // Fills every option not given on the command line from `params`.
  void ApplyUnset(const json& params) {
    if (!params.is_object()) return;
    for (auto& e : entries_) {
      if (e.opt->count() > 0 || !params.contains(e.key)) continue;
      try {
        e.set(params.at(e.key));
      } catch (const json::exception& ex) {
        throw Error(ErrorCode::kInvalidConfig,
                    "snapshot field '" + e.key + "': " + ex.what());
      }
      e.from_snapshot = true;
    }
  }

  bool IsExplicit(const std::string& key) const {
    for (const auto& e : entries_) {
      if (e.key == key) return e.opt->count() > 0 || e.from_snapshot;
    }
    return false;
  }

  json Get(const std::string& key) const {
    for (const auto& e : entries_) {
      if (e.key == key) return e.get();
    }
    return nullptr;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<json()> get;
    std::function<void(const json&)> set;
    bool from_snapshot;
  };
  std::vector<Entry> entries_;
};

struct Globals {
  std::string taxonomy;
  std::string label_space;
  std::uint64_t seed = 0;
  std::string out_dir = "rhc-out";
  std::string format = "jsonl";
  std::string config;
};

json LoadJsonFile(const std::string& path) {
  try {
    return json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidInput, path + ": " + e.what());
  }
}

struct RewardFlags {
  std::string config_file;
  std::string main_mode = "step";
  double lambda = 0.1;
  double omega = 1.0;
  double beta = 0.0;
  long l0 = 128;
  long h0 = 384;
  long h_max = 512;
  std::string weight_scope = "dataset";

  void Register(CLI::App* app, ParamRegistry& reg) {
    reg.Add(app, "--reward-config", "reward_config_file", config_file,
            "JSON file with RewardConfig fields");
    reg.Add(app, "--mode", "main_mode", main_mode, "Main reward: step or final")
        ->check(CLI::IsMember({"step", "final"}));
    reg.Add(app, "--lambda", "lambda", lambda, "Weight of the format reward");
    reg.Add(app, "--omega", "omega", omega, "Length penalty scale");
    reg.Add(app, "--beta", "beta", beta, "In-range format reward");
    reg.Add(app, "--l0", "l0", l0, "Lower token bound");
    reg.Add(app, "--h0", "h0", h0, "Upper token bound");
    reg.Add(app, "--h-max", "h_max", h_max, "Hard token limit");
    reg.Add(app, "--weight-scope", "weight_scope", weight_scope,
            "Category counts for level weights: taxonomy or dataset")
        ->check(CLI::IsMember({"taxonomy", "dataset"}));
  }

  // File first, then explicitly given flags; the resolved values are written
  // back so the snapshot records them.
  RewardConfig Resolve(const ParamRegistry& reg) {
    RewardConfig cfg;
    if (!config_file.empty()) cfg = MergeRewardConfig(cfg, LoadJsonFile(config_file));
    json overrides = json::object();
    for (const char* key :
         {"main_mode", "lambda", "omega", "beta", "l0", "h0", "h_max", "weight_scope"}) {
      if (reg.IsExplicit(key)) overrides[key] = reg.Get(key);
    }
    cfg = MergeRewardConfig(cfg, overrides);
    main_mode = std::string(ToString(cfg.main_mode));
    lambda = cfg.lambda;
    omega = cfg.omega;
    beta = cfg.beta;
    l0 = cfg.l0;
    h0 = cfg.h0;
    h_max = cfg.h_max;
    weight_scope = std::string(ToString(cfg.weight_scope));
    return cfg;
  }
};

std::vector<std::string> ReadLabelSpace(const std::string& path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view t = TrimView(line);
    if (t.empty() || t[0] == '#') continue;
    // Split manifests carry the label in the third column.
    std::vector<std::string> cols;
    std::istringstream fields{std::string(t)};
    std::string col;
    while (std::getline(fields, col, '\t')) cols.push_back(col);
    out.push_back(cols.size() >= 3 ? cols[2] : cols[0]);
  }
  return out;
}

ScoringContext MakeScoringContext(const Globals& g) {
  if (g.taxonomy.empty()) {
    if (!g.label_space.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "--label-space needs --taxonomy");
    }
    return ScoringContext::BuiltinIpc();
  }
  Taxonomy taxonomy = Taxonomy::Load(g.taxonomy);
  std::optional<Taxonomy> space;
  if (!g.label_space.empty()) {
    const auto leaves = ReadLabelSpace(g.label_space);
    space = taxonomy.RestrictedTo(leaves);
  }
  return ScoringContext::FromTaxonomy(std::move(taxonomy), std::move(space));
}

void WriteSnapshot(const Globals& g, const std::string& subcommand,
                   const ParamRegistry& global_reg, const ParamRegistry& reg) {
  json snapshot{{"subcommand", subcommand},
                {"global", global_reg.Snapshot()},
                {"params", reg.Snapshot()}};
  const fs::path path = fs::path(g.out_dir) / (subcommand + ".config.json");
  WriteFileAtomic(path, snapshot.dump(2) + "\n");
  spdlog::info("resolved config written to {}", path.string());
}

std::string Jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += DumpPrecise(r) + "\n";
  return out;
}

// ---- build-dataset --------------------------------------------------------

struct BuildDatasetCmd {
  std::string corpus;
  std::size_t min_instances = 50;
  std::size_t per_class = 50;
  double test_fraction = 0.1;
  std::string accepted_status = "Accepted";
  std::string ood_corpus;
  std::size_t ood_cap = 10;

  void Register(CLI::App* app, ParamRegistry& reg) {
    reg.Add(app, "--corpus", "corpus", corpus, "Line-delimited corpus file");
    reg.Add(app, "--min-instances", "min_instances", min_instances,
            "Minimum accepted documents per subclass");
    reg.Add(app, "--per-class", "per_class", per_class, "Documents sampled per subclass");
    reg.Add(app, "--test-fraction", "test_fraction", test_fraction,
            "Fraction of each subclass sample sent to test");
    reg.Add(app, "--accepted-status", "accepted_status", accepted_status,
            "Status value of usable documents; empty accepts all");
    reg.Add(app, "--ood-corpus", "ood_corpus", ood_corpus,
            "Optional second corpus for the out-of-distribution set");
    reg.Add(app, "--ood-cap", "ood_cap", ood_cap, "Documents per subclass in the OOD set");
  }

  int Run(const Globals& g, std::ostream& out) const {
    if (corpus.empty()) throw Error(ErrorCode::kInvalidConfig, "--corpus is required");
    std::optional<Taxonomy> taxonomy;
    if (!g.taxonomy.empty()) taxonomy = Taxonomy::Load(g.taxonomy);
    const LabelResolver resolver =
        taxonomy ? LabelResolver::FromTaxonomy(*taxonomy) : LabelResolver::IpcSubclass();

    std::istringstream in(ReadFile(corpus));
    const auto docs = ReadCorpus(in);
    SplitParams params;
    params.min_instances = min_instances;
    params.per_class = per_class;
    params.test_fraction = test_fraction;
    params.accepted_status = accepted_status;
    params.seed = DeriveSeed(g.seed, "build-dataset.split");
    const SplitManifest manifest = BuildBalancedSplit(docs, params, resolver);
    if (manifest.skipped_unparseable > 0) {
      spdlog::warn("skipped {} documents with unparseable labels",
                   manifest.skipped_unparseable);
    }
    std::ostringstream text;
    manifest.Write(text);
    WriteFileAtomic(fs::path(g.out_dir) / "manifest.tsv", text.str());

    json summary{{"documents", docs.size()},
                 {"subclasses", manifest.per_subclass.size()},
                 {"train", manifest.TrainIds().size()},
                 {"test", manifest.TestIds().size()},
                 {"skipped_status", manifest.skipped_status},
                 {"skipped_unparseable", manifest.skipped_unparseable}};
    if (!ood_corpus.empty()) {
      std::istringstream ood_in(ReadFile(ood_corpus));
      const auto ood_docs = ReadCorpus(ood_in);
      const auto ood = BuildOodSet(ood_docs, manifest.Labels(), ood_cap,
                                   DeriveSeed(g.seed, "build-dataset.ood"), resolver);
      std::string ood_text = "# rhc-ood-set v1\n# cap_per_class=" + std::to_string(ood_cap) +
                             "\n# algorithm=" + std::string(kRngAlgorithmId) + "\n";
      std::set<std::string> ood_labels;
      for (const auto& e : ood) {
        ood_text += e.doc_id + "\tood\t" + e.subclass + "\n";
        ood_labels.insert(e.subclass);
      }
      WriteFileAtomic(fs::path(g.out_dir) / "ood.tsv", ood_text);
      summary["ood"] = ood.size();
      summary["ood_subclasses"] = ood_labels.size();
    }
    if (g.format == "table") {
      out << "subclasses  train  test";
      if (summary.contains("ood")) out << "  ood";
      out << "\n"
          << summary["subclasses"].get<std::size_t>() << "  "
          << summary["train"].get<std::size_t>() << "  "
          << summary["test"].get<std::size_t>();
      if (summary.contains("ood")) out << "  " << summary["ood"].get<std::size_t>();
      out << "\n";
    } else {
      out << DumpPrecise(summary) << "\n";
    }
    return kOk;
  }
};

// ---- filter-traces --------------------------------------------------------

struct FilterTracesCmd {
  std::string traces;

  void Register(CLI::App* app, ParamRegistry& reg) {
    reg.Add(app, "--traces", "traces", traces,
            "Line-delimited {id, raw, gold_code} records");
  }

  int Run(const Globals& g, std::ostream& out) const {
    if (traces.empty()) throw Error(ErrorCode::kInvalidConfig, "--traces is required");
    const ScoringContext ctx = MakeScoringContext(g);
    std::istringstream in(ReadFile(traces));
    std::vector<TraceCandidate> candidates;
    std::vector<json> originals;
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
                    traces + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (!j.contains("raw") || !j.contains("gold_code")) {
        throw Error(ErrorCode::kInvalidInput,
                    traces + ":" + std::to_string(line_no) + ": needs raw and gold_code");
      }
      TraceCandidate c;
      c.id = j.contains("id") ? j["id"].get<std::string>() : std::to_string(line_no);
      c.raw = j["raw"].get<std::string>();
      c.gold = ctx.ResolveGold(j["gold_code"].get<std::string>());
      candidates.push_back(std::move(c));
      originals.push_back(std::move(j));
    }
    const TraceFilterResult result = FilterSyntheticTraces(candidates, ctx.level_names());
    std::set<std::string> kept_ids;
    for (const auto& k : result.kept) kept_ids.insert(k.id);
    std::vector<json> kept_rows;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (kept_ids.count(candidates[i].id) != 0) kept_rows.push_back(originals[i]);
    }
    std::vector<json> rejected_rows;
    for (const auto& r : result.rejected) {
      rejected_rows.push_back({{"id", r.id}, {"reason", r.reason}, {"level", r.level}});
    }
    WriteFileAtomic(fs::path(g.out_dir) / "kept.jsonl", Jsonl(kept_rows));
    WriteFileAtomic(fs::path(g.out_dir) / "rejected.jsonl", Jsonl(rejected_rows));
    out << DumpPrecise(json{{"kept", result.kept.size()},
                            {"rejected", result.rejected.size()}})
        << "\n";
    return kOk;
  }
};

// ---- score ----------------------------------------------------------------

struct ScoreCmd {
  std::string gold;
  std::string input;
  std::string batch;
  RewardFlags reward;

  void Register(CLI::App* app, ParamRegistry& reg) {
    reg.Add(app, "--gold", "gold", gold, "Gold code for --input");
    reg.Add(app, "--input", "input", input, "File holding one raw model output");
    reg.Add(app, "--batch", "batch", batch,
            "Line-delimited {raw_output, gold_code} records");
    reward.Register(app, reg);
  }

  int Run(const Globals& g, const ParamRegistry& reg, std::ostream& out) {
    const RewardConfig cfg = reward.Resolve(reg);
    if (input.empty() == batch.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "give exactly one of --input or --batch");
    }
    ScoreRequest req;
    if (!input.empty()) {
      if (gold.empty()) throw Error(ErrorCode::kInvalidConfig, "--input needs --gold");
      req.items.push_back({ReadFile(input), gold});
    } else {
      std::istringstream in(ReadFile(batch));
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (TrimView(line).empty()) continue;
        try {
          const json j = json::parse(line);
          req.items.push_back({j.at("raw_output").get<std::string>(),
                               j.at("gold_code").get<std::string>()});
        } catch (const json::exception& e) {
          throw Error(ErrorCode::kInvalidInput,
                      batch + ":" + std::to_string(line_no) + ": " + e.what());
        }
      }
    }
    req.config_override = ToJson(cfg);
    const ScoringService service(MakeScoringContext(g), cfg,
                                 std::max<std::size_t>(req.items.size(), 1));
    const ScoreResponse resp = service.ScoreBatch(req);

    std::vector<json> rows;
    for (std::size_t i = 0; i < resp.items.size(); ++i) {
      json row;
      if (resp.items[i].breakdown) {
        row = ToJson(*resp.items[i].breakdown);
      } else {
        row = json{{"error",
                    {{"code", resp.items[i].error->code},
                     {"message", resp.items[i].error->message}}}};
      }
      row["gold_code"] = req.items[i].gold_code;
      row["resolved_config"] = ToJson(resp.resolved_config);
      rows.push_back(std::move(row));
    }
    if (g.format == "table") {
      char buf[160];
      out << "gold       main            format          total           tokens  band\n";
      for (std::size_t i = 0; i < resp.items.size(); ++i) {
        if (const auto& b = resp.items[i].breakdown) {
          std::snprintf(buf, sizeof(buf), "%-10s %-15.12g %-15.12g %-15.12g %-7zu %s\n",
                        req.items[i].gold_code.c_str(), b->main, b->format, b->total,
                        b->token_length, std::string(ToString(b->band)).c_str());
        } else {
          std::snprintf(buf, sizeof(buf), "%-10s error: %s\n",
                        req.items[i].gold_code.c_str(), resp.items[i].error->code.c_str());
        }
        out << buf;
      }
    } else {
      out << Jsonl(rows);
    }
    bool any_error = false;
    for (const auto& item : resp.items) any_error = any_error || item.error.has_value();
    return any_error && resp.items.size() == 1 ? kInputError : kOk;
  }
};

// ---- train-toy ------------------------------------------------------------

struct TrainToyCmd {
  std::size_t features = 32;
  std::size_t levels = 3;
  std::size_t branching = 4;
  std::size_t justification_words = 40;
  std::string train_config_file;
  std::size_t group_size = 8;
  double clip_eps = 0.2;
  double kl_coef = 0.001;
  double learning_rate = 16.0;
  std::size_t iterations = 500;
  double temperature = 1.0;
  std::size_t batch_size = 32;
  std::string advantage_norm = "std";
  RewardFlags reward;

  void Register(CLI::App* app, ParamRegistry& reg) {
    reg.Add(app, "--features", "features", features, "Synthetic documents");
    reg.Add(app, "--levels", "levels", levels, "Taxonomy depth");
    reg.Add(app, "--branching", "branching", branching, "Children per node");
    reg.Add(app, "--justification-words", "justification_words", justification_words,
            "Filler words per synthesized justification");
    reg.Add(app, "--train-config", "train_config_file", train_config_file,
            "JSON file with TrainConfig fields");
    reg.Add(app, "--group-size", "group_size", group_size, "Responses per prompt");
    reg.Add(app, "--clip-eps", "clip_eps", clip_eps, "Ratio clipping range");
    reg.Add(app, "--kl-coef", "kl_coef", kl_coef, "KL penalty coefficient");
    reg.Add(app, "--learning-rate", "learning_rate", learning_rate, "Gradient step size");
    reg.Add(app, "--iterations", "iterations", iterations, "Training iterations");
    reg.Add(app, "--temperature", "sampling_temperature", temperature,
            "Rollout sampling temperature");
    reg.Add(app, "--batch-size", "batch_size", batch_size, "Prompts per iteration");
    reg.Add(app, "--advantage-norm", "advantage_norm", advantage_norm,
            "Advantage normalization: std or none")
        ->check(CLI::IsMember({"std", "none"}));
    reward.Register(app, reg);
  }

  int Run(const Globals& g, const ParamRegistry& reg, std::ostream& out) {
    const RewardConfig reward_cfg = reward.Resolve(reg);
    TrainConfig cfg;
    if (!train_config_file.empty()) cfg = MergeTrainConfig(cfg, LoadJsonFile(train_config_file));
    json overrides = json::object();
    for (const char* key : {"group_size", "clip_eps", "kl_coef", "learning_rate", "iterations",
                            "sampling_temperature", "batch_size", "advantage_norm"}) {
      if (reg.IsExplicit(key)) overrides[key] = reg.Get(key);
    }
    overrides["seed"] = DeriveSeed(g.seed, "train-toy.grpo");
    cfg = MergeTrainConfig(cfg, overrides);
    group_size = cfg.group_size;
    clip_eps = cfg.clip_eps;
    kl_coef = cfg.kl_coef;
    learning_rate = cfg.learning_rate;
    iterations = cfg.iterations;
    temperature = cfg.sampling_temperature;
    batch_size = cfg.batch_size;
    advantage_norm = std::string(ToString(cfg.advantage_norm));

    SyntheticTaskSpec spec;
    spec.features = features;
    spec.levels = levels;
    spec.branching = branching;
    spec.justification_words = justification_words;
    spec.seed = DeriveSeed(g.seed, "train-toy.task");
    const SyntheticTask task = SyntheticTask::Make(spec);
    spdlog::info("training on {} documents, {} levels, branching {}", features, levels,
                 branching);
    const TrainingLog log = Train(task, cfg, reward_cfg);

    std::ostringstream lines;
    log.WriteJsonLines(lines);
    WriteFileAtomic(fs::path(g.out_dir) / "training_log.jsonl", lines.str());
    const TrainingRecord& last = log.records.empty() ? TrainingRecord{} : log.records.back();
    if (g.format == "table") {
      char buf[160];
      out << "iteration  mean_reward  mean_main  mean_format  kl          loss\n";
      const std::size_t stride = std::max<std::size_t>(1, log.records.size() / 10);
      for (std::size_t i = 0; i < log.records.size(); ++i) {
        if (i % stride != 0 && i + 1 != log.records.size()) continue;
        const auto& r = log.records[i];
        std::snprintf(buf, sizeof(buf), "%-9zu  %-11.4f  %-9.4f  %-11.4f  %-10.4g  %.4g\n",
                      r.iteration, r.mean_reward, r.mean_main, r.mean_format, r.kl, r.loss);
        out << buf;
      }
    } else {
      out << DumpPrecise(json{{"iterations", log.records.size()},
                              {"final_mean_reward", last.mean_reward},
                              {"final_mean_main", last.mean_main},
                              {"final_kl", last.kl}})
          << "\n";
    }
    return kOk;
  }
};

// ---- evaluate -------------------------------------------------------------

struct EvaluateCmd {
  std::string predictions;
  std::string level_source = "deepest_prefix";
  std::string name = "model";

  void Register(CLI::App* app, ParamRegistry& reg) {
    reg.Add(app, "--predictions", "predictions", predictions,
            "Line-delimited {doc_id, gold_code, raw_output} records");
    reg.Add(app, "--level-source", "level_source", level_source,
            "deepest_prefix or per_step")
        ->check(CLI::IsMember({"deepest_prefix", "per_step"}));
    reg.Add(app, "--name", "name", name, "Row label in the table report");
  }

  int Run(const Globals& g, std::ostream& out) const {
    if (predictions.empty()) throw Error(ErrorCode::kInvalidConfig, "--predictions is required");
    if (g.taxonomy.empty()) throw Error(ErrorCode::kInvalidConfig, "evaluate needs --taxonomy");
    const Taxonomy taxonomy = Taxonomy::Load(g.taxonomy);
    std::istringstream in(ReadFile(predictions));
    std::vector<EvalRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (TrimView(line).empty()) continue;
      try {
        const json j = json::parse(line);
        records.push_back(MakeEvalRecord(j.at("doc_id").get<std::string>(),
                                         j.at("gold_code").get<std::string>(),
                                         j.at("raw_output").get<std::string>(), taxonomy));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kInvalidInput,
                    predictions + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    const EvalReport report = Evaluate(records, taxonomy, ParseLevelSource(level_source));
    const std::string json_text = DumpPrecise(ToJson(report)) + "\n";
    const std::string table = RenderReportTable(report, name);
    WriteFileAtomic(fs::path(g.out_dir) / "report.json", json_text);
    WriteFileAtomic(fs::path(g.out_dir) / "report.txt", table);
    out << (g.format == "table" ? table : json_text);
    return kOk;
  }
};

// ---- serve ----------------------------------------------------------------

struct ServeCmd {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t batch_cap = 1024;
  RewardFlags reward;

  void Register(CLI::App* app, ParamRegistry& reg) {
    reg.Add(app, "--host", "host", host, "Listen address");
    reg.Add(app, "--port", "port", port, "Listen port; 0 picks a free one");
    reg.Add(app, "--batch-cap", "batch_cap", batch_cap, "Maximum items per request");
    reward.Register(app, reg);
  }

  int Run(const Globals& g, const ParamRegistry& reg, std::ostream& out) {
    const RewardConfig cfg = reward.Resolve(reg);
    const ScoringService service(MakeScoringContext(g), cfg, batch_cap);
    HttpScoringServer server(service);
    const int bound = port == 0 ? server.BindToAnyPort(host)
                                : (server.Bind(host, port) ? port : -1);
    if (bound < 0) {
      throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
    }
    out << DumpPrecise(json{{"listening", host + ":" + std::to_string(bound)},
                            {"taxonomy_id", service.context().taxonomy_id()},
                            {"config_digest", service.ConfigDigest()}})
        << std::endl;
    spdlog::info("serving on {}:{}", host, bound);
    server.ListenAfterBind();
    return kOk;
  }
};

int CategoryExit(ErrorCode code) {
  return code == ErrorCode::kInvalidConfig ? kUsageError : kInputError;
}

std::string OneLine(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') c = '\'';
  }
  return s;
}

void ReportError(std::ostream& err, std::string_view category, std::string_view code,
                 const std::string& message) {
  err << "error: category=" << category << " code=" << code << " message=\""
      << OneLine(message) << "\"\n";
}

void ConfigureLogging(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("rhc", sink);
  logger->set_pattern("[%H:%M:%S] [%l] %v");
  const char* level = std::getenv("RHC_LOG_LEVEL");
  logger->set_level(level != nullptr ? spdlog::level::from_str(level) : spdlog::level::warn);
  spdlog::set_default_logger(logger);
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ConfigureLogging(err);

  CLI::App app{"Verifiable-reward scoring, toy GRPO training, dataset and evaluation tools",
               "rhc"};
  app.fallthrough();
  app.require_subcommand(1);

  Globals g;
  if (const char* env = std::getenv("RHC_OUTPUT_DIR")) g.out_dir = env;
  ParamRegistry global_reg;
  global_reg.Add(&app, "--taxonomy", "taxonomy", g.taxonomy, "Taxonomy file (TSV)");
  global_reg.Add(&app, "--label-space", "label_space", g.label_space,
                 "Leaf codes (or split manifest) defining the dataset label space");
  global_reg.Add(&app, "--seed", "seed", g.seed, "Root seed for all randomness");
  global_reg.Add(&app, "--out-dir", "out_dir", g.out_dir, "Output directory");
  global_reg.Add(&app, "--format", "format", g.format, "Output format: jsonl or table")
      ->check(CLI::IsMember({"jsonl", "table"}));
  app.add_option("--config", g.config, "Replay a resolved-config snapshot");

  ParamRegistry reg;
  BuildDatasetCmd build_dataset;
  FilterTracesCmd filter_traces;
  ScoreCmd score;
  TrainToyCmd train_toy;
  EvaluateCmd evaluate;
  ServeCmd serve;
  // Each subcommand gets its own registry so snapshots only hold its flags.
  std::vector<std::unique_ptr<ParamRegistry>> regs;
  auto add = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    regs.push_back(std::make_unique<ParamRegistry>());
    cmd.Register(sub, *regs.back());
    return std::make_pair(sub, regs.back().get());
  };
  auto [build_app, build_reg] = add("build-dataset", "Balanced split and OOD set", build_dataset);
  auto [filter_app, filter_reg] = add("filter-traces", "Keep gold-consistent traces", filter_traces);
  auto [score_app, score_reg] = add("score", "Score model outputs", score);
  auto [train_app, train_reg] = add("train-toy", "GRPO on the synthetic task", train_toy);
  auto [eval_app, eval_reg] = add("evaluate", "Per-level accuracy and F1", evaluate);
  auto [serve_app, serve_reg] = add("serve", "HTTP scoring service", serve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    ReportError(err, "usage_error", "bad_arguments", e.what());
    err << app.help();
    return kUsageError;
  }

  std::string name;
  ParamRegistry* sub_reg = nullptr;
  for (auto [a, r] : {std::pair{build_app, build_reg}, std::pair{filter_app, filter_reg},
                      std::pair{score_app, score_reg}, std::pair{train_app, train_reg},
                      std::pair{eval_app, eval_reg}, std::pair{serve_app, serve_reg}}) {
    if (a->parsed()) {
      name = a->get_name();
      sub_reg = r;
    }
  }

  try {
    if (!g.config.empty()) {
      const json snapshot = LoadJsonFile(g.config);
      if (snapshot.value("subcommand", std::string()) != name) {
        throw Error(ErrorCode::kInvalidConfig,
                    "snapshot " + g.config + " is not for '" + name + "'");
      }
      global_reg.ApplyUnset(snapshot.value("global", json::object()));
      sub_reg->ApplyUnset(snapshot.value("params", json::object()));
    }
    int code = kOk;
    if (name == "build-dataset") {
      code = build_dataset.Run(g, out);
    } else if (name == "filter-traces") {
      code = filter_traces.Run(g, out);
    } else if (name == "score") {
      code = score.Run(g, *sub_reg, out);
    } else if (name == "train-toy") {
      code = train_toy.Run(g, *sub_reg, out);
    } else if (name == "evaluate") {
      code = evaluate.Run(g, out);
    } else if (name == "serve") {
      WriteSnapshot(g, name, global_reg, *sub_reg);
      return serve.Run(g, *sub_reg, out);
    }
    WriteSnapshot(g, name, global_reg, *sub_reg);
    return code;
  } catch (const Error& e) {
    const int exit_code = CategoryExit(e.code());
    ReportError(err, exit_code == kUsageError ? "usage_error" : "input_error",
                ErrorCodeName(e.code()), e.what());
    return exit_code;
  } catch (const std::exception& e) {
    ReportError(err, "internal_error", "exception", e.what());
    return kInternalError;
  }
}

}  // namespace rhc::cli
