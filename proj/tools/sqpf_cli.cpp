#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqpf/config.hpp"
#include "sqpf/errors.hpp"
#include "sqpf/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitEstimation = 3;

std::vector<sqpf::Method> parse_methods(const std::string& csv) {
  std::vector<sqpf::Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(sqpf::method_from_string(item));
  if (out.empty()) throw sqpf::ValidationError("at least one method required", "--methods");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic power flow risk estimation on a simulated quantum statevector"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon, alpha;
  std::string methods, out_path;

  auto* run = app.add_subcommand("run", "estimate the configured line metric");
  run->add_option("--config", config_path, "configuration JSON")->required();
  run->add_option("--seed", seed, "RNG seed override");
  run->add_option("--epsilon", epsilon, "target half-width on the amplitude scale");
  run->add_option("--alpha", alpha, "1 - confidence level");
  run->add_option("--methods", methods, "comma-separated subset of iqae,cmc,exact");
  run->add_option("--out", out_path, "write the JSON report here instead of stdout");

  std::string stage = "psi";
  std::uint64_t shots = 1024;
  auto* hist = app.add_subcommand("histogram", "export measurement counts at a circuit stage");
  hist->add_option("--config", config_path, "configuration JSON")->required();
  hist->add_option("--stage", stage, "psi, L or V")->check(CLI::IsMember({"psi", "L", "V"}));
  hist->add_option("--shots", shots, "number of measurements")->check(CLI::PositiveNumber);
  hist->add_option("--seed", seed, "RNG seed override");
  hist->add_option("--out", out_path, "CSV output path")->required();

  auto* val = app.add_subcommand("validate", "check a configuration file");
  val->add_option("--config", config_path, "configuration JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    sqpf::PipelineConfig config = sqpf::load_config(config_path);
    auto& a = config.analysis;
    if (seed) a.seed = *seed;

    if (*run) {
      if (epsilon) a.epsilon = *epsilon;
      if (alpha) a.alpha = *alpha;
      if (!(a.epsilon > 0.0 && a.epsilon < 0.25))
        throw sqpf::ValidationError("epsilon must lie in (0, 0.25)", "--epsilon");
      if (!(a.alpha > 0.0 && a.alpha < 1.0))
        throw sqpf::ValidationError("alpha must lie in (0, 1)", "--alpha");
      if (!methods.empty()) a.methods = parse_methods(methods);
      const std::string text = sqpf::to_json(sqpf::run_analysis(config)).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!(out << text)) throw sqpf::Error("cannot write report to " + out_path);
      }
    } else if (*hist) {
      sqpf::export_histogram(config, sqpf::stage_from_string(stage), shots, a.seed, out_path);
    } else if (*val) {
      std::cout << "ok: " << config.network.bus_ids().size() << " buses, "
                << config.network.lines().size() << " lines, " << config.injections.size()
                << " injection buses, slack " << config.network.slack_bus() << "\n";
    }
  } catch (const sqpf::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const sqpf::EstimationFailure& e) {
    std::cerr << "estimation failure: " << e.what() << " (partial interval [" << e.a_low() << ", "
              << e.a_high() << "])\n";
    return kExitEstimation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
