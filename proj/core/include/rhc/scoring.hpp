#ifndef RHC_SCORING_HPP_
#define RHC_SCORING_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhc/rewards.hpp"
#include "rhc/taxonomy.hpp"

namespace rhc {

/// Everything needed to score outputs against gold codes: level names, how
/// to resolve gold codes, and level weights for both weight scopes.
class ScoringContext {
 public:
  // `dataset_space`, when given, supplies the K_i for weight_scope=dataset;
  // otherwise the loaded taxonomy is taken to be the dataset label space.
  static ScoringContext FromTaxonomy(Taxonomy taxonomy,
                                     std::optional<Taxonomy> dataset_space = std::nullopt);
  // No taxonomy file: IPC codes are decomposed structurally and the weights
  // come from the published IPC category counts.
  static ScoringContext BuiltinIpc();

  const std::string& taxonomy_id() const { return taxonomy_id_; }
  const std::vector<std::string>& level_names() const { return level_names_; }
  const std::vector<double>& Weights(WeightScope scope) const {
    return scope == WeightScope::kTaxonomy ? taxonomy_weights_ : dataset_weights_;
  }
  const std::optional<Taxonomy>& taxonomy() const { return taxonomy_; }

  // Full-depth gold path. Throws BadGoldCode.
  LabelPath ResolveGold(std::string_view code) const;

 private:
  ScoringContext() = default;

  std::string taxonomy_id_;
  std::vector<std::string> level_names_;
  std::vector<double> taxonomy_weights_;
  std::vector<double> dataset_weights_;
  std::optional<Taxonomy> taxonomy_;
};

struct ScoreItem {
  std::string raw_output;
  std::string gold_code;
};

struct ScoreRequest {
  std::vector<ScoreItem> items;
  nlohmann::json config_override;  // null or a partial RewardConfig object
};

struct ItemError {
  std::string code;  // e.g. "bad_gold_code"
  std::string message;
};

struct ScoreItemResult {
  std::optional<RewardBreakdown> breakdown;
  std::optional<ItemError> error;
};

struct ScoreResponse {
  std::vector<ScoreItemResult> items;  // request order
  RewardConfig resolved_config;
  std::string taxonomy_id;
};

// Parses the wire form {"items":[{"raw_output","gold_code"}...],
// "config_override":{...}}. Throws InvalidInput.
ScoreRequest ParseScoreRequest(std::string_view body);
nlohmann::json ToJson(const ScoreResponse& response);

/// Stateless verifier: every item is scored exactly as ScoreOutput would
/// score it. Safe to call concurrently.
class ScoringService {
 public:
  ScoringService(ScoringContext context, RewardConfig defaults,
                 std::size_t batch_cap = 1024);

  // Throws EmptyInput, BatchTooLarge, InvalidConfig. Bad gold codes become
  // item-level errors.
  ScoreResponse ScoreBatch(const ScoreRequest& request) const;

  // Wire entry point: request body in, response body out, plus HTTP status.
  std::string HandleScore(std::string_view body, int* status) const;
  std::string HandleHealth() const;

  // Digest of the default config, reported by /health.
  std::string ConfigDigest() const;

  const ScoringContext& context() const { return context_; }
  const RewardConfig& defaults() const { return defaults_; }
  std::size_t batch_cap() const { return batch_cap_; }

 private:
  ScoringContext context_;
  RewardConfig defaults_;
  std::size_t batch_cap_;
};

}  // namespace rhc

#endif  // RHC_SCORING_HPP_
