#include "rhc/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "rhc/error.hpp"

namespace rhc {

using nlohmann::json;

namespace {

void DumpInto(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        out += json(it.key()).dump();
        out.push_back(':');
        DumpInto(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    case json::value_t::array: {
      out.push_back('[');
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out.push_back(',');
        DumpInto(j[i], out);
      }
      out.push_back(']');
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%#.17g", v);
      out += buf;
      break;
    }
    default:
      out += j.dump();
  }
}

template <typename T>
T Field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("config field '") + key + "': " + e.what());
  }
}

void RejectUnknown(const json& j, const std::set<std::string>& known) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (known.count(it.key()) == 0) {
      throw Error(ErrorCode::kInvalidConfig, "unknown config field '" + it.key() + "'");
    }
  }
}

}  // namespace

std::string DumpPrecise(const json& j) {
  std::string out;
  DumpInto(j, out);
  return out;
}

json ToJson(const RewardConfig& cfg) {
  return json{{"main_mode", ToString(cfg.main_mode)},
              {"lambda", cfg.lambda},
              {"omega", cfg.omega},
              {"beta", cfg.beta},
              {"l0", cfg.l0},
              {"h0", cfg.h0},
              {"h_max", cfg.h_max},
              {"weight_scope", ToString(cfg.weight_scope)}};
}

RewardConfig MergeRewardConfig(const RewardConfig& base, const json& j) {
  RewardConfig cfg = base;
  if (j.is_null()) return cfg;
  RejectUnknown(j, {"main_mode", "lambda", "omega", "beta", "l0", "h0", "h_max",
                    "weight_scope"});
  if (j.contains("main_mode")) cfg.main_mode = ParseMainRewardMode(Field<std::string>(j, "main_mode"));
  if (j.contains("lambda")) cfg.lambda = Field<double>(j, "lambda");
  if (j.contains("omega")) cfg.omega = Field<double>(j, "omega");
  if (j.contains("beta")) cfg.beta = Field<double>(j, "beta");
  if (j.contains("l0")) cfg.l0 = Field<long>(j, "l0");
  if (j.contains("h0")) cfg.h0 = Field<long>(j, "h0");
  if (j.contains("h_max")) cfg.h_max = Field<long>(j, "h_max");
  if (j.contains("weight_scope")) {
    cfg.weight_scope = ParseWeightScope(Field<std::string>(j, "weight_scope"));
  }
  cfg.Validate();
  return cfg;
}

json ToJson(const FormatViolation& v) {
  return json{{"tag", ViolationTag(v.kind)}, {"level", v.level}, {"fatal", v.fatal}};
}

json ToJson(const RewardBreakdown& b) {
  json violations = json::array();
  for (const auto& v : b.violations) violations.push_back(ToJson(v));
  json correct = json::array();
  for (bool c : b.per_level_correct) correct.push_back(c);
  return json{{"per_level_correct", correct},
              {"main", b.main},
              {"format", b.format},
              {"total", b.total},
              {"token_length", b.token_length},
              {"band", ToString(b.band)},
              {"violations", violations}};
}

json ToJson(const EvalReport& report) {
  json levels = json::array();
  for (const auto& m : report.levels) {
    levels.push_back(json{{"name", m.name},
                          {"accuracy", m.accuracy},
                          {"macro_f1", m.macro_f1},
                          {"micro_f1", m.micro_f1},
                          {"n", m.n},
                          {"class_count", m.class_count}});
  }
  return json{{"levels", levels}, {"unparsed_count", report.unparsed_count}};
}

json ToJson(const TrainConfig& cfg) {
  return json{{"group_size", cfg.group_size},
              {"clip_eps", cfg.clip_eps},
              {"kl_coef", cfg.kl_coef},
              {"learning_rate", cfg.learning_rate},
              {"iterations", cfg.iterations},
              {"sampling_temperature", cfg.sampling_temperature},
              {"seed", cfg.seed},
              {"batch_size", cfg.batch_size},
              {"advantage_norm", ToString(cfg.advantage_norm)}};
}

TrainConfig MergeTrainConfig(const TrainConfig& base, const json& j) {
  TrainConfig cfg = base;
  if (j.is_null()) return cfg;
  RejectUnknown(j, {"group_size", "clip_eps", "kl_coef", "learning_rate", "iterations",
                    "sampling_temperature", "seed", "batch_size", "advantage_norm"});
  if (j.contains("group_size")) cfg.group_size = Field<std::size_t>(j, "group_size");
  if (j.contains("clip_eps")) cfg.clip_eps = Field<double>(j, "clip_eps");
  if (j.contains("kl_coef")) cfg.kl_coef = Field<double>(j, "kl_coef");
  if (j.contains("learning_rate")) cfg.learning_rate = Field<double>(j, "learning_rate");
  if (j.contains("iterations")) cfg.iterations = Field<std::size_t>(j, "iterations");
  if (j.contains("sampling_temperature")) {
    cfg.sampling_temperature = Field<double>(j, "sampling_temperature");
  }
  if (j.contains("seed")) cfg.seed = Field<std::uint64_t>(j, "seed");
  if (j.contains("batch_size")) cfg.batch_size = Field<std::size_t>(j, "batch_size");
  if (j.contains("advantage_norm")) {
    cfg.advantage_norm = ParseAdvantageNorm(Field<std::string>(j, "advantage_norm"));
  }
  cfg.Validate();
  return cfg;
}

}  // namespace rhc
