#pragma once

#include <span>
#include <vector>

#include "sqpf/grid_model.hpp"
#include "sqpf/linalg.hpp"
#include "sqpf/quantum_sim.hpp"

namespace sqpf {

/// Discrete injection forecast for one bus over 2^q megawatt levels.
/// Loads are negative values_mw.
struct InjectionDistribution {
  BusId bus = 0;
  std::vector<double> values_mw;
  std::vector<double> probabilities;

  std::size_t bins() const noexcept { return values_mw.size(); }
  int qubits() const { return log2_exact(values_mw.size()); }
};

/// Throws ValidationError naming the bus when the invariants do not hold.
void validate(const InjectionDistribution& dist);

/// Probabilities stored linearly in the amplitudes, L2-normalized.
/// amplitudes * norm_factor reproduces the probabilities.
struct EncodedInjection {
  VectorXd amplitudes;
  double norm_factor = 1.0;
};

EncodedInjection encode(const InjectionDistribution& dist);

/// Tensor product of the registers, first encoding most significant.
StateVector joint_state(std::span<const EncodedInjection> encodings);

/// Householder reflection taking e_0 to the amplitude vector.
UnitaryMatrix state_prep_unitary(const EncodedInjection& encoding);

/// Product of all per-register preparations, same ordering as joint_state.
UnitaryMatrix joint_prep_unitary(std::span<const EncodedInjection> encodings);

/// Product of the L2 norms of every register's raw probabilities.
double norm_product(std::span<const EncodedInjection> encodings);

}  // namespace sqpf
