#pragma once

#include <vector>

#include "sqpf/linalg.hpp"

namespace sqpf {

using BusId = int;
using LineId = int;

struct Line {
  LineId id = 0;
  BusId from_bus = 0;
  BusId to_bus = 0;
  double susceptance = 0.0;  // per unit
  double rating_mw = 0.0;
};

/// Validated DC network. Construction throws ValidationError on bad topology
/// or parameters and DisconnectedNetworkError when the graph is not connected.
class Network {
 public:
  Network(std::vector<BusId> bus_ids, BusId slack_bus, std::vector<Line> lines);

  const std::vector<BusId>& bus_ids() const noexcept { return bus_ids_; }
  BusId slack_bus() const noexcept { return slack_bus_; }
  const std::vector<Line>& lines() const noexcept { return lines_; }

  int bus_index(BusId id) const;    // throws if unknown
  int line_index(LineId id) const;  // throws if unknown
  bool has_bus(BusId id) const;

  /// Buses in declaration order with the slack removed.
  std::vector<BusId> injection_buses() const;

 private:
  std::vector<BusId> bus_ids_;
  BusId slack_bus_;
  std::vector<Line> lines_;
};

struct PtdfMatrix {
  MatrixXd h;  // lines x buses, slack column all zeros
  bool rated = false;
  std::vector<LineId> line_order;
  std::vector<BusId> bus_order;
  BusId slack_bus = 0;

  /// Row for one line restricted to non-slack buses, in bus_order.
  VectorXd injection_row(int line_index) const;
};

/// PTDF = B_F * B_B^{-1} with the slack row and column removed from B_B.
/// Positive flow runs from_bus -> to_bus.
PtdfMatrix build_ptdf(const Network& network);

/// Divides each row by its line rating so flows come out as a fraction of rating.
PtdfMatrix rate_scale_ptdf(const PtdfMatrix& ptdf, const Network& network);

}  // namespace sqpf
