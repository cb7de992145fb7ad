#include "sqpf/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>

#include "sqpf/errors.hpp"

namespace sqpf {

Network::Network(std::vector<BusId> bus_ids, BusId slack_bus, std::vector<Line> lines)
    : bus_ids_(std::move(bus_ids)), slack_bus_(slack_bus), lines_(std::move(lines)) {
  if (bus_ids_.empty()) throw ValidationError("network has no buses", "network.buses");
  std::set<BusId> seen;
  for (BusId b : bus_ids_)
    if (!seen.insert(b).second)
      throw ValidationError("duplicate bus id " + std::to_string(b), "network.buses");
  if (!seen.count(slack_bus_))
    throw ValidationError("slack bus " + std::to_string(slack_bus_) + " is not a declared bus",
                          "network.slack_bus");
  if (lines_.empty()) throw ValidationError("network has no lines", "network.lines");

  std::set<LineId> line_ids;
  for (std::size_t k = 0; k < lines_.size(); ++k) {
    const Line& l = lines_[k];
    const std::string field = "network.lines[" + std::to_string(k) + "]";
    if (!line_ids.insert(l.id).second)
      throw ValidationError("duplicate line id " + std::to_string(l.id), field + ".id");
    if (!seen.count(l.from_bus))
      throw ValidationError("unknown bus " + std::to_string(l.from_bus), field + ".from_bus");
    if (!seen.count(l.to_bus))
      throw ValidationError("unknown bus " + std::to_string(l.to_bus), field + ".to_bus");
    if (l.from_bus == l.to_bus) throw ValidationError("self-loop line", field);
    if (!(l.susceptance > 0.0) || !std::isfinite(l.susceptance))
      throw ValidationError("susceptance must be positive", field + ".susceptance_pu");
    if (!(l.rating_mw > 0.0) || !std::isfinite(l.rating_mw))
      throw ValidationError("rating must be positive", field + ".rating_mw");
  }

  // Connectivity by BFS from the first bus.
  std::vector<std::vector<int>> adj(bus_ids_.size());
  for (const Line& l : lines_) {
    const int f = bus_index(l.from_bus), t = bus_index(l.to_bus);
    adj[f].push_back(t);
    adj[t].push_back(f);
  }
  std::vector<bool> visited(bus_ids_.size(), false);
  std::queue<int> frontier;
  frontier.push(0);
  visited[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int w : adj[u])
      if (!visited[w]) {
        visited[w] = true;
        ++reached;
        frontier.push(w);
      }
  }
  if (reached != bus_ids_.size())
    throw DisconnectedNetworkError("disconnected network", "network.lines");
}

int Network::bus_index(BusId id) const {
  const auto it = std::find(bus_ids_.begin(), bus_ids_.end(), id);
  if (it == bus_ids_.end()) throw ValidationError("unknown bus " + std::to_string(id));
  return static_cast<int>(it - bus_ids_.begin());
}

int Network::line_index(LineId id) const {
  const auto it =
      std::find_if(lines_.begin(), lines_.end(), [id](const Line& l) { return l.id == id; });
  if (it == lines_.end()) throw ValidationError("unknown line " + std::to_string(id));
  return static_cast<int>(it - lines_.begin());
}

bool Network::has_bus(BusId id) const {
  return std::find(bus_ids_.begin(), bus_ids_.end(), id) != bus_ids_.end();
}

std::vector<BusId> Network::injection_buses() const {
  std::vector<BusId> out;
  for (BusId b : bus_ids_)
    if (b != slack_bus_) out.push_back(b);
  return out;
}

VectorXd PtdfMatrix::injection_row(int line_index) const {
  VectorXd row(static_cast<Eigen::Index>(bus_order.size()) - 1);
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < bus_order.size(); ++i)
    if (bus_order[i] != slack_bus) row(k++) = h(line_index, static_cast<Eigen::Index>(i));
  return row;
}

PtdfMatrix build_ptdf(const Network& network) {
  const auto n_bus = static_cast<Eigen::Index>(network.bus_ids().size());
  const auto n_line = static_cast<Eigen::Index>(network.lines().size());
  const int slack = network.bus_index(network.slack_bus());

  MatrixXd bbus = MatrixXd::Zero(n_bus, n_bus);
  MatrixXd bf = MatrixXd::Zero(n_line, n_bus);
  for (Eigen::Index l = 0; l < n_line; ++l) {
    const Line& line = network.lines()[static_cast<std::size_t>(l)];
    const int f = network.bus_index(line.from_bus);
    const int t = network.bus_index(line.to_bus);
    const double b = line.susceptance;
    bbus(f, f) += b;
    bbus(t, t) += b;
    bbus(f, t) -= b;
    bbus(t, f) -= b;
    bf(l, f) = b;
    bf(l, t) = -b;
  }

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n_bus; ++i)
    if (i != slack) keep.push_back(i);
  const auto n_red = static_cast<Eigen::Index>(keep.size());

  PtdfMatrix out;
  out.h = MatrixXd::Zero(n_line, n_bus);
  out.line_order.reserve(network.lines().size());
  for (const Line& l : network.lines()) out.line_order.push_back(l.id);
  out.bus_order = network.bus_ids();
  out.slack_bus = network.slack_bus();
  if (n_red == 0) return out;

  MatrixXd bred(n_red, n_red);
  MatrixXd bf_red(n_line, n_red);
  for (Eigen::Index i = 0; i < n_red; ++i) {
    bf_red.col(i) = bf.col(keep[i]);
    for (Eigen::Index j = 0; j < n_red; ++j) bred(i, j) = bbus(keep[i], keep[j]);
  }

  Eigen::FullPivLU<MatrixXd> lu(bred);
  if (!lu.isInvertible()) throw DisconnectedNetworkError("disconnected network");
  const MatrixXd reduced = bf_red * lu.inverse();
  for (Eigen::Index i = 0; i < n_red; ++i) out.h.col(keep[i]) = reduced.col(i);
  if (!out.h.allFinite()) throw ConsistencyError("non-finite PTDF entry");
  return out;
}

PtdfMatrix rate_scale_ptdf(const PtdfMatrix& ptdf, const Network& network) {
  if (ptdf.rated) throw ValidationError("PTDF is already rating-scaled");
  PtdfMatrix out = ptdf;
  for (Eigen::Index l = 0; l < out.h.rows(); ++l)
    out.h.row(l) /= network.lines()[static_cast<std::size_t>(l)].rating_mw;
  out.rated = true;
  return out;
}

}  // namespace sqpf
