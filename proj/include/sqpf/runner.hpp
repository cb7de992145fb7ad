#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqpf/baseline.hpp"
#include "sqpf/config.hpp"
#include "sqpf/estimation.hpp"

namespace sqpf {

inline constexpr const char* kToolVersion = "0.1.0";

struct ExactSummary {
  double mean = 0.0;
  double std = 0.0;
  double sigma_n = 0.0;
  double overload_probability = 0.0;
  double metric_value = 0.0;
  double amplitude_squared = 0.0;  // (metric / scaling)^2, 0 when degenerate
};

struct RunReport {
  PipelineConfig config;
  int n_qubits = 0;
  double scaling = 0.0;
  bool degenerate = false;  // metric is identically zero, IQAE skipped
  std::optional<ExactSummary> exact = std::nullopt;
  std::optional<EstimationResult> iqae_amplitude = std::nullopt;  // amplitude-squared scale
  std::optional<EstimationResult> iqae = std::nullopt;            // physical scale
  std::optional<EstimationResult> cmc = std::nullopt;
  std::uint64_t classical_required_samples = 0;
  std::optional<double> sample_ratio = std::nullopt;  // iqae shots_total / cmc N
  std::map<std::string, bool> covers_exact = {};

  const std::optional<EstimationResult>& result(Method m) const;
};

/// Runs every requested method. Errors from the modules propagate unchanged.
RunReport run_analysis(const PipelineConfig& config);

/// Deterministic JSON (sorted keys) for a given config and seed.
nlohmann::json to_json(const RunReport& report);

enum class Stage { psi, L, V };
Stage stage_from_string(const std::string& s);  // throws ValidationError

struct HistogramRow {
  std::string bitstring;
  std::uint64_t count = 0;
  double exact_probability = 0.0;
};

std::vector<HistogramRow> histogram(const PipelineConfig& config, Stage stage,
                                    std::uint64_t shots, std::uint64_t seed);

/// CSV "bitstring,count,exact_probability", one row per basis state.
void export_histogram(const PipelineConfig& config, Stage stage, std::uint64_t shots,
                      std::uint64_t seed, const std::filesystem::path& path);

}  // namespace sqpf
