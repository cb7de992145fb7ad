#include "sqpf/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "sqpf/errors.hpp"

namespace sqpf {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError("expected an object", path);
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError("missing required field", path + "." + key);
  return *it;
}

template <typename T>
T get_as(const json& value, const std::string& path) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ValidationError("wrong type", path);
  }
}

template <typename T>
T optional_field(const json& obj, const char* key, const std::string& path, T fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : get_as<T>(*it, path + "." + key);
}

Network parse_network(const json& net) {
  const std::string path = "network";
  auto buses = get_as<std::vector<BusId>>(require(net, "buses", path), path + ".buses");
  if (!net.contains("slack_bus")) throw ValidationError("missing slack bus", path + ".slack_bus");
  const auto slack = get_as<BusId>(net.at("slack_bus"), path + ".slack_bus");
  const json& lines_json = require(net, "lines", path);
  if (!lines_json.is_array()) throw ValidationError("expected an array", path + ".lines");
  std::vector<Line> lines;
  for (std::size_t k = 0; k < lines_json.size(); ++k) {
    const std::string lp = path + ".lines[" + std::to_string(k) + "]";
    const json& lj = lines_json[k];
    Line l;
    l.id = get_as<LineId>(require(lj, "id", lp), lp + ".id");
    l.from_bus = get_as<BusId>(require(lj, "from_bus", lp), lp + ".from_bus");
    l.to_bus = get_as<BusId>(require(lj, "to_bus", lp), lp + ".to_bus");
    l.susceptance = get_as<double>(require(lj, "susceptance_pu", lp), lp + ".susceptance_pu");
    l.rating_mw = get_as<double>(require(lj, "rating_mw", lp), lp + ".rating_mw");
    lines.push_back(l);
  }
  return Network(std::move(buses), slack, std::move(lines));
}

std::vector<InjectionDistribution> parse_injections(const json& arr, const Network& network) {
  if (!arr.is_array()) throw ValidationError("expected an array", "injections");
  std::vector<InjectionDistribution> by_bus;
  std::set<BusId> seen;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string p = "injections[" + std::to_string(k) + "]";
    InjectionDistribution d;
    d.bus = get_as<BusId>(require(arr[k], "bus", p), p + ".bus");
    if (!network.has_bus(d.bus))
      throw ValidationError("unknown bus " + std::to_string(d.bus), p + ".bus");
    if (d.bus == network.slack_bus())
      throw ValidationError("slack bus cannot carry an injection distribution", p + ".bus");
    if (!seen.insert(d.bus).second)
      throw ValidationError("duplicate injection for bus " + std::to_string(d.bus), p + ".bus");
    d.values_mw = get_as<std::vector<double>>(require(arr[k], "values_mw", p), p + ".values_mw");
    d.probabilities =
        get_as<std::vector<double>>(require(arr[k], "probabilities", p), p + ".probabilities");
    validate(d);
    by_bus.push_back(std::move(d));
  }
  std::vector<InjectionDistribution> ordered;
  for (BusId b : network.injection_buses()) {
    const auto it = std::find_if(by_bus.begin(), by_bus.end(),
                                 [b](const InjectionDistribution& d) { return d.bus == b; });
    if (it == by_bus.end())
      throw ValidationError("no injection distribution for bus " + std::to_string(b), "injections");
    ordered.push_back(*it);
  }
  return ordered;
}

AnalysisConfig parse_analysis(const json& a, const Network& network) {
  const std::string p = "analysis";
  AnalysisConfig out;
  out.line_id = get_as<LineId>(require(a, "line_id", p), p + ".line_id");
  if (std::none_of(network.lines().begin(), network.lines().end(),
                   [&](const Line& l) { return l.id == out.line_id; }))
    throw ValidationError("unknown line " + std::to_string(out.line_id), p + ".line_id");

  const auto metric = optional_field<std::string>(a, "metric", p, "mean");
  if (metric == "mean")
    out.metric = Metric::Kind::mean;
  else if (metric == "overload")
    out.metric = Metric::Kind::overload;
  else
    throw ValidationError("metric must be 'mean' or 'overload'", p + ".metric");

  out.threshold_pct = optional_field(a, "threshold_pct", p, out.threshold_pct);
  if (!(out.threshold_pct > 0.0 && out.threshold_pct <= 150.0))
    throw ValidationError("threshold must lie in (0, 150]", p + ".threshold_pct");
  out.epsilon = optional_field(a, "epsilon", p, out.epsilon);
  if (!(out.epsilon > 0.0 && out.epsilon < 0.25))
    throw ValidationError("epsilon must lie in (0, 0.25)", p + ".epsilon");
  out.alpha = optional_field(a, "alpha", p, out.alpha);
  if (!(out.alpha > 0.0 && out.alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)", p + ".alpha");
  out.shots_per_round = optional_field(a, "shots_per_round", p, out.shots_per_round);
  if (out.shots_per_round < 1)
    throw ValidationError("must be at least 1", p + ".shots_per_round");
  out.seed = optional_field(a, "seed", p, out.seed);

  if (a.contains("methods")) {
    const auto names = get_as<std::vector<std::string>>(a.at("methods"), p + ".methods");
    if (names.empty()) throw ValidationError("at least one method required", p + ".methods");
    out.methods.clear();
    for (const auto& n : names) {
      const Method m = method_from_string(n);
      if (std::find(out.methods.begin(), out.methods.end(), m) == out.methods.end())
        out.methods.push_back(m);
    }
  }
  return out;
}

}  // namespace

bool AnalysisConfig::wants(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

VectorXd PipelineConfig::line_row() const {
  const PtdfMatrix rated = rate_scale_ptdf(build_ptdf(network), network);
  return rated.injection_row(network.line_index(analysis.line_id));
}

PipelineConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ValidationError("configuration must be a JSON object", "$");
  Network network = parse_network(require(doc, "network", "$"));
  auto injections = parse_injections(require(doc, "injections", "$"), network);
  AnalysisConfig analysis = parse_analysis(require(doc, "analysis", "$"), network);
  return PipelineConfig{std::move(network), std::move(injections), std::move(analysis)};
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open configuration file", path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("JSON parse error: ") + e.what(), path.string());
  }
  return parse_config(doc);
}

std::string to_string(Metric::Kind kind) { return kind == Metric::Kind::mean ? "mean" : "overload"; }

json to_json(const PipelineConfig& config) {
  json lines = json::array();
  for (const Line& l : config.network.lines())
    lines.push_back({{"id", l.id},
                     {"from_bus", l.from_bus},
                     {"to_bus", l.to_bus},
                     {"susceptance_pu", l.susceptance},
                     {"rating_mw", l.rating_mw}});
  json injections = json::array();
  for (const auto& d : config.injections)
    injections.push_back(
        {{"bus", d.bus}, {"values_mw", d.values_mw}, {"probabilities", d.probabilities}});
  json methods = json::array();
  for (Method m : config.analysis.methods) methods.push_back(to_string(m));
  const auto& a = config.analysis;
  return {{"network",
           {{"buses", config.network.bus_ids()},
            {"slack_bus", config.network.slack_bus()},
            {"lines", lines}}},
          {"injections", injections},
          {"analysis",
           {{"line_id", a.line_id},
            {"metric", to_string(a.metric)},
            {"threshold_pct", a.threshold_pct},
            {"epsilon", a.epsilon},
            {"alpha", a.alpha},
            {"methods", methods},
            {"shots_per_round", a.shots_per_round},
            {"seed", a.seed}}}};
}

}  // namespace sqpf
