#include "rhc/scoring.hpp"

#include "rhc/error.hpp"
#include "rhc/json_io.hpp"
#include "rhc/text.hpp"

namespace rhc {

using nlohmann::json;

ScoringContext ScoringContext::FromTaxonomy(Taxonomy taxonomy,
                                            std::optional<Taxonomy> dataset_space) {
  ScoringContext ctx;
  ctx.taxonomy_id_ = taxonomy.Id();
  ctx.level_names_ = taxonomy.LevelNames();
  ctx.taxonomy_weights_ = LevelWeights(taxonomy);
  if (dataset_space) {
    if (dataset_space->depth() != taxonomy.depth()) {
      throw Error(ErrorCode::kInvalidTaxonomy,
                  "dataset label space depth differs from the taxonomy");
    }
    ctx.dataset_weights_ = LevelWeights(*dataset_space);
  } else {
    ctx.dataset_weights_ = ctx.taxonomy_weights_;
  }
  ctx.taxonomy_ = std::move(taxonomy);
  return ctx;
}

ScoringContext ScoringContext::BuiltinIpc() {
  ScoringContext ctx;
  ctx.taxonomy_id_ = "ipc-builtin";
  ctx.level_names_ = {"Section", "Class", "Subclass"};
  ctx.taxonomy_weights_ = LevelWeights(kIpcSchemeCounts);
  ctx.dataset_weights_ = LevelWeights(kIpcDatasetCounts);
  return ctx;
}

LabelPath ScoringContext::ResolveGold(std::string_view code) const {
  try {
    LabelPath path = taxonomy_ ? taxonomy_->PathTo(code) : DecomposeIpcCode(code);
    if (path.depth() != level_names_.size()) {
      throw Error(ErrorCode::kBadGoldCode,
                  "gold code '" + NormalizeCode(code) + "' is not a leaf code");
    }
    return path;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBadGoldCode) throw;
    throw Error(ErrorCode::kBadGoldCode, e.what());
  }
}

ScoreRequest ParseScoreRequest(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("request is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("items") || !j["items"].is_array()) {
    throw Error(ErrorCode::kInvalidInput, "request needs an 'items' array");
  }
  ScoreRequest req;
  for (const auto& item : j["items"]) {
    if (!item.is_object() || !item.contains("raw_output") || !item.contains("gold_code") ||
        !item["raw_output"].is_string() || !item["gold_code"].is_string()) {
      throw Error(ErrorCode::kInvalidInput,
                  "each item needs string fields 'raw_output' and 'gold_code'");
    }
    req.items.push_back({item["raw_output"].get<std::string>(),
                         item["gold_code"].get<std::string>()});
  }
  if (j.contains("config_override")) req.config_override = j["config_override"];
  return req;
}

json ToJson(const ScoreResponse& response) {
  json items = json::array();
  for (const auto& item : response.items) {
    if (item.breakdown) {
      items.push_back(ToJson(*item.breakdown));
    } else {
      items.push_back(
          json{{"error", {{"code", item.error->code}, {"message", item.error->message}}}});
    }
  }
  return json{{"items", items},
              {"resolved_config", ToJson(response.resolved_config)},
              {"taxonomy_id", response.taxonomy_id}};
}

ScoringService::ScoringService(ScoringContext context, RewardConfig defaults,
                               std::size_t batch_cap)
    : context_(std::move(context)), defaults_(defaults), batch_cap_(batch_cap) {
  defaults_.Validate();
}

ScoreResponse ScoringService::ScoreBatch(const ScoreRequest& request) const {
  if (request.items.empty()) throw Error(ErrorCode::kEmptyInput, "request has no items");
  if (request.items.size() > batch_cap_) {
    throw Error(ErrorCode::kBatchTooLarge,
                std::to_string(request.items.size()) + " items exceed the batch cap of " +
                    std::to_string(batch_cap_));
  }
  ScoreResponse response;
  response.resolved_config = MergeRewardConfig(defaults_, request.config_override);
  response.taxonomy_id = context_.taxonomy_id();
  const auto& weights = context_.Weights(response.resolved_config.weight_scope);
  response.items.reserve(request.items.size());
  for (const auto& item : request.items) {
    ScoreItemResult result;
    try {
      const LabelPath gold = context_.ResolveGold(item.gold_code);
      result.breakdown = ScoreOutput(item.raw_output, gold, context_.level_names(),
                                     response.resolved_config, weights);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBadGoldCode) throw;
      result.error = ItemError{std::string(ErrorCodeName(e.code())), e.what()};
    }
    response.items.push_back(std::move(result));
  }
  return response;
}

std::string ScoringService::HandleScore(std::string_view body, int* status) const {
  try {
    const ScoreResponse response = ScoreBatch(ParseScoreRequest(body));
    *status = 200;
    return DumpPrecise(ToJson(response));
  } catch (const Error& e) {
    *status = e.code() == ErrorCode::kBatchTooLarge ? 413 : 400;
    return DumpPrecise(
        json{{"error", {{"code", ErrorCodeName(e.code())}, {"message", e.what()}}}});
  }
}

std::string ScoringService::ConfigDigest() const {
  return Fnv1aHex(DumpPrecise(ToJson(defaults_)));
}

std::string ScoringService::HandleHealth() const {
  return DumpPrecise(json{{"status", "ok"},
                          {"taxonomy_id", context_.taxonomy_id()},
                          {"config_digest", ConfigDigest()},
                          {"resolved_config", ToJson(defaults_)},
                          {"batch_cap", batch_cap_}});
}

}  // namespace rhc
