#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqpf/estimation.hpp"
#include "sqpf/flow_mapping.hpp"
#include "sqpf/grid_model.hpp"
#include "sqpf/injection_model.hpp"

namespace sqpf {

struct AnalysisConfig {
  LineId line_id = 0;
  Metric::Kind metric = Metric::Kind::mean;
  double threshold_pct = 90.0;
  double epsilon = 0.01;
  double alpha = 0.05;
  std::vector<Method> methods{Method::iqae, Method::cmc, Method::exact};
  std::uint64_t shots_per_round = 100;
  std::uint64_t seed = 1;

  Metric as_metric() const {
    return metric == Metric::Kind::mean ? Metric::mean() : Metric::overload(threshold_pct / 100.0);
  }
  bool wants(Method m) const;
};

struct PipelineConfig {
  Network network;
  std::vector<InjectionDistribution> injections;  // one per non-slack bus, in bus order
  AnalysisConfig analysis;

  /// Rated PTDF row of the analysed line over the injection buses.
  VectorXd line_row() const;
};

/// Validates and fills defaults. Throws ValidationError with a field path.
PipelineConfig parse_config(const nlohmann::json& doc);
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const PipelineConfig& config);

std::string to_string(Metric::Kind kind);

}  // namespace sqpf
