#pragma once

#include <json.hpp>

#include "phasebundle/fock_spaces.hpp"
#include "phasebundle/frame_transport.hpp"
#include "phasebundle/linear_structures.hpp"
#include "phasebundle/parameter_geometry.hpp"
#include "phasebundle/wavefunction_calculus.hpp"

namespace phasebundle {

using nlohmann::json;

// {"dim": int, "kind": "metric"|"symplectic"|"complex_structure",
//  "components": row-major array of arrays}
json form_to_json(const BilinearForm& form);
BilinearForm form_from_json(const json& j);

json structure_to_json(const ComplexStructure& s);
ComplexStructure structure_from_json(const json& j);

// {"kind": "sphere"|"hyperboloid", "vertices": [[x,y,z],...], "steps_per_edge": int}
ParameterPath loop_from_json(const json& j);

// {bundle, phase_re, phase_im, operator (re/im pairs), steps, error_estimate}
json holonomy_to_json(const HolonomyResult& h);

// {"metric": {...}, "terms": [{"alpha": [ints], "re": f, "im": f}]}
json polygaussian_to_json(const PolyGaussian& psi);
PolyGaussian polygaussian_from_json(const json& j);

// Deterministic float formatting shared by all CSV emitters.
std::string format_double(double v);

std::string spectra_csv(const std::vector<EigenBundleSample>& samples);
// rows: (T, level, dyn_phase_arg, geom_phase_arg, leakage)
struct EvolutionRow {
  double total_time;
  int level;
  double dyn_phase_arg;
  double geom_phase_arg;
  double leakage;
};
std::string evolution_csv(const std::vector<EvolutionRow>& rows);

// rows: (omega, measured_phase_arg, predicted_phase_arg, abs_difference)
struct PhaseRow {
  double omega;
  double measured_phase_arg;
  double predicted_phase_arg;
  double abs_difference;
};
std::string phases_csv(const std::vector<PhaseRow>& rows);

}  // namespace phasebundle
