#include "sqpf/runner.hpp"

#include <cstdio>
#include <fstream>

#include "sqpf/errors.hpp"
#include "sqpf/rng.hpp"

namespace sqpf {

using nlohmann::json;

namespace {

json to_json(const EstimationResult& r) {
  return {{"method", to_string(r.method)},
          {"raw_a", r.raw_a},
          {"metric_value", r.metric_value},
          {"ci_low", r.ci_low},
          {"ci_high", r.ci_high},
          {"shots_total", r.shots_total},
          {"oracle_applications", r.oracle_applications},
          {"rounds", r.rounds},
          {"epsilon", r.epsilon},
          {"alpha", r.alpha},
          {"seed", r.seed}};
}

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

}  // namespace

const std::optional<EstimationResult>& RunReport::result(Method m) const {
  static const std::optional<EstimationResult> none;
  switch (m) {
    case Method::iqae: return iqae;
    case Method::cmc: return cmc;
    case Method::exact: return none;
  }
  return none;
}

RunReport run_analysis(const PipelineConfig& config) {
  const auto& a = config.analysis;
  const Metric metric = a.as_metric();
  const VectorXd row = config.line_row();

  RunReport report{.config = config};
  const ExactDistribution exact = exact_line_distribution(row, config.injections);
  report.classical_required_samples =
      std::max<std::uint64_t>(1, required_samples(exact.sigma_n, a.epsilon, a.alpha));

  const LinePipeline lp = build_line_pipeline(row, config.injections, metric, a.line_id);
  report.n_qubits = lp.n_qubits();
  report.scaling = lp.estimator.scaling;
  report.degenerate = lp.estimator.degenerate();

  const double exact_value = exact.metric(metric);
  if (a.wants(Method::exact)) {
    ExactSummary s;
    s.mean = exact.mean;
    s.std = exact.std;
    s.sigma_n = exact.sigma_n;
    s.overload_probability = exact.exceedance(a.threshold_pct / 100.0);
    s.metric_value = exact_value;
    if (!report.degenerate) {
      const double amp = exact_value / report.scaling;
      s.amplitude_squared = amp * amp;
    }
    report.exact = s;
  }

  if (a.wants(Method::iqae)) {
    if (report.degenerate) {
      EstimationResult r;
      r.method = Method::iqae;
      r.epsilon = a.epsilon;
      r.alpha = a.alpha;
      r.seed = a.seed;
      report.iqae_amplitude = r;
      report.iqae = r;
    } else {
      const GroverOperator g = build_grover(*lp.pipeline);
      IqaeOptions opts;
      opts.epsilon = a.epsilon;
      opts.alpha = a.alpha;
      opts.shots_per_round = a.shots_per_round;
      opts.seed = a.seed;
      report.iqae_amplitude = iqae(g, opts);
      report.iqae = rescale(*report.iqae_amplitude, report.scaling);
    }
  }

  if (a.wants(Method::cmc)) {
    EstimationResult r = classical_mc_samples(row, config.injections, metric,
                                              report.classical_required_samples, a.alpha, a.seed);
    r.epsilon = a.epsilon;
    report.cmc = r;
  }

  if (report.iqae && report.cmc && report.cmc->shots_total > 0)
    report.sample_ratio = static_cast<double>(report.iqae->shots_total) /
                          static_cast<double>(report.cmc->shots_total);

  if (report.exact) {
    for (Method m : {Method::iqae, Method::cmc}) {
      const auto& r = report.result(m);
      if (r) report.covers_exact[to_string(m)] = r->ci_low <= exact_value && exact_value <= r->ci_high;
    }
  }
  return report;
}

json to_json(const RunReport& report) {
  const auto& a = report.config.analysis;
  json out;
  out["tool_version"] = kToolVersion;
  out["rng"] = std::string(Rng::kName);
  out["seed"] = a.seed;
  out["config"] = to_json(report.config);
  out["line_id"] = a.line_id;
  out["metric"] = to_string(a.metric);
  out["unit"] = a.metric == Metric::Kind::mean ? "fraction_of_rating" : "probability";
  if (a.metric == Metric::Kind::overload) out["threshold_fraction"] = a.threshold_pct / 100.0;
  out["n_qubits"] = report.n_qubits;
  out["scaling"] = report.scaling;
  out["degenerate"] = report.degenerate;
  out["classical_required_samples"] = report.classical_required_samples;

  json results = json::object();
  if (report.iqae) {
    results["iqae"] = to_json(*report.iqae);
    results["iqae"]["amplitude_interval"] = {report.iqae_amplitude->ci_low,
                                             report.iqae_amplitude->ci_high};
  }
  if (report.cmc) results["cmc"] = to_json(*report.cmc);
  if (report.exact) {
    const auto& e = *report.exact;
    results["exact"] = {{"method", "exact"},
                        {"metric_value", e.metric_value},
                        {"mean", e.mean},
                        {"std", e.std},
                        {"sigma_n", e.sigma_n},
                        {"overload_probability", e.overload_probability},
                        {"amplitude_squared", e.amplitude_squared}};
  }
  out["results"] = results;
  json samples = json::object();
  if (report.iqae) {
    samples["iqae_shots_total"] = report.iqae->shots_total;
    samples["iqae_oracle_applications"] = report.iqae->oracle_applications;
  }
  if (report.cmc) samples["cmc_samples"] = report.cmc->shots_total;
  out["sample_counts"] = samples;
  out["sample_ratio"] = report.sample_ratio ? json(*report.sample_ratio) : json(nullptr);
  out["covers_exact"] = report.covers_exact;
  return out;
}

Stage stage_from_string(const std::string& s) {
  if (s == "psi") return Stage::psi;
  if (s == "L") return Stage::L;
  if (s == "V") return Stage::V;
  throw ValidationError("stage must be psi, L or V", "stage");
}

std::vector<HistogramRow> histogram(const PipelineConfig& config, Stage stage,
                                    std::uint64_t shots, std::uint64_t seed) {
  const LinePipeline lp = build_line_pipeline(config.line_row(), config.injections,
                                              config.analysis.as_metric(), config.analysis.line_id);
  const StateVector state = [&] {
    switch (stage) {
      case Stage::psi: return lp.input_state();
      case Stage::L: return lp.loading_state();
      case Stage::V:
        if (!lp.pipeline)
          throw ValidationError("metric is identically zero; no estimator stage to export",
                                "analysis");
        return StateVector(lp.pipeline->a.matrix().col(0));
    }
    throw ValidationError("unknown stage", "stage");
  }();

  const auto counts = sample_counts(state, shots, seed);
  std::vector<HistogramRow> rows;
  rows.reserve(state.dim());
  for (std::size_t i = 0; i < state.dim(); ++i)
    rows.push_back({bitstring(i, state.n_qubits()), counts[i], probability_of(state, i)});
  return rows;
}

void export_histogram(const PipelineConfig& config, Stage stage, std::uint64_t shots,
                      std::uint64_t seed, const std::filesystem::path& path) {
  const auto rows = histogram(config, stage, shots, seed);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write histogram to " + path.string());
  out << "bitstring,count,exact_probability\n";
  for (const auto& r : rows)
    out << r.bitstring << ',' << r.count << ',' << format_probability(r.exact_probability) << '\n';
  if (!out) throw Error("failed writing histogram to " + path.string());
}

}  // namespace sqpf
