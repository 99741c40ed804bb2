#pragma once

#include <functional>

#include "phasebundle/common.hpp"
#include "phasebundle/parameter_geometry.hpp"

namespace phasebundle {

// Uniform time grid over [0, T]; step j covers [times[j], times[j+1]].
// When built from a parameter path, samples align one-to-one with times.
struct Schedule {
  double total_time = 0.0;
  std::vector<double> times;
  ParameterPath path{ManifoldKind::JSpace, {}, {}, false};

  int steps() const { return static_cast<int>(times.size()) - 1; }
};

Schedule make_schedule(double total_time, int steps);
Schedule make_schedule(const ParameterPath& path, double total_time);

// H(t) on the fibre; may be empty for pure parallel transport.
using HamiltonianProvider = std::function<CMat(double)>;
// Fibre transport map for [t0, t1]; expected (near-)unitary.  Empty means the
// trivial connection.
using ConnectionStepProvider = std::function<CMat(double, double)>;

struct EvolutionResult {
  CMat final_states;  // columns evolve independently
  double unitarity_defect = 0.0;
  Schedule schedule;
};

// Parallel-transported gauge: per step, apply the connection step, then
// exp(-i H dt) by a 4th-order (two-point Gauss Magnus) integrator.
EvolutionResult evolve(const Schedule& schedule, const CMat& initial,
                       const HamiltonianProvider& hamiltonian,
                       const ConnectionStepProvider& connection);

struct AdiabaticSplit {
  Cplx dynamical;       // exp(-i int E dt)
  Cplx remainder;       // line-bundle geometric remainder (unit complex)
  CMat remainder_op;    // polar-unitarized remainder for multi-dim levels
  double leakage = 0.0; // 1 - |projection onto the tracked level|^2
};

// target_frame: D x m eigenframe of the tracked level at the end point.
// energies: tracked eigenvalue sampled on schedule.times.
AdiabaticSplit adiabatic_split(const EvolutionResult& result, const CMat& target_frame,
                               const std::vector<double>& energies);

}  // namespace phasebundle
