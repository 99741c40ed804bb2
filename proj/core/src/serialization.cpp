#include "phasebundle/serialization.hpp"

#include <cstdio>

namespace phasebundle {

namespace {

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j, const char* field) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw StructuralError(std::string("config field '") + field + "': expected a matrix");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw StructuralError(std::string("config field '") + field + "': ragged matrix");
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace

json form_to_json(const BilinearForm& form) {
  return json{{"dim", form.dim()},
              {"kind", form.kind == FormKind::Metric ? "metric" : "symplectic"},
              {"components", matrix_to_json(form.components)}};
}

BilinearForm form_from_json(const json& j) {
  if (!j.contains("kind")) throw StructuralError("config field 'kind': missing");
  if (!j.contains("components")) throw StructuralError("config field 'components': missing");
  Mat m = matrix_from_json(j.at("components"), "components");
  if (j.contains("dim") && j.at("dim").get<int>() != m.rows())
    throw StructuralError("config field 'dim': inconsistent with components");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "metric") return BilinearForm::metric(std::move(m));
  if (kind == "symplectic") return BilinearForm::symplectic(std::move(m));
  throw StructuralError("config field 'kind': expected 'metric' or 'symplectic'");
}

json structure_to_json(const ComplexStructure& s) {
  return json{{"dim", s.dim()},
              {"kind", "complex_structure"},
              {"components", matrix_to_json(s.components)}};
}

ComplexStructure structure_from_json(const json& j) {
  Mat m = matrix_from_json(j.at("components"), "components");
  return ComplexStructure::from_matrix(std::move(m));
}

ParameterPath loop_from_json(const json& j) {
  if (!j.contains("kind")) throw StructuralError("config field 'loop.kind': missing");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "sphere" && kind != "hyperboloid")
    throw StructuralError("config field 'loop.kind': expected 'sphere' or 'hyperboloid'");
  if (!j.contains("vertices")) throw StructuralError("config field 'loop.vertices': missing");
  std::vector<Vec3> vertices;
  for (const auto& v : j.at("vertices")) {
    if (!v.is_array() || v.size() != 3)
      throw StructuralError("config field 'loop.vertices': expected triples");
    vertices.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }
  int steps = j.value("steps_per_edge", 1);
  ManifoldKind mk = (kind == "sphere") ? ManifoldKind::Sphere : ManifoldKind::Hyperboloid;
  return polygon_loop(mk, vertices, steps);
}

json holonomy_to_json(const HolonomyResult& h) {
  json op = json::array();
  for (int r = 0; r < h.op.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < h.op.cols(); ++c)
      row.push_back(json::array({h.op(r, c).real(), h.op(r, c).imag()}));
    op.push_back(std::move(row));
  }
  return json{{"bundle", h.bundle.name()},     {"phase_re", h.phase.real()},
              {"phase_im", h.phase.imag()},    {"operator", std::move(op)},
              {"steps", h.step_count},         {"error_estimate", h.error_estimate}};
}

json polygaussian_to_json(const PolyGaussian& psi) {
  json terms = json::array();
  for (const auto& [alpha, c] : psi.coeffs)
    terms.push_back(json{{"alpha", alpha}, {"re", c.real()}, {"im", c.imag()}});
  return json{{"metric", form_to_json(BilinearForm::metric(psi.metric))},
              {"terms", std::move(terms)}};
}

PolyGaussian polygaussian_from_json(const json& j) {
  BilinearForm metric = form_from_json(j.at("metric"));
  if (metric.kind != FormKind::Metric)
    throw StructuralError("config field 'metric': PolyGaussian needs a metric form");
  PolyGaussian psi{metric.components, {}};
  for (const auto& term : j.at("terms")) {
    MultiIndex alpha = term.at("alpha").get<MultiIndex>();
    if (static_cast<int>(alpha.size()) != psi.dim())
      throw StructuralError("config field 'terms.alpha': wrong length");
    psi.coeffs[alpha] += Cplx(term.at("re").get<double>(), term.at("im").get<double>());
  }
  return psi.prune();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string spectra_csv(const std::vector<EigenBundleSample>& samples) {
  std::string out = "sample_index,level,eigenvalue,gap\n";
  for (const auto& s : samples) {
    for (const auto& [level, energy] : s.energy) {
      out += std::to_string(s.sample_index) + "," + std::to_string(level) + "," +
             format_double(energy) + "," + format_double(s.gap.at(level)) + "\n";
    }
  }
  return out;
}

std::string evolution_csv(const std::vector<EvolutionRow>& rows) {
  std::string out = "T,level,dyn_phase_arg,geom_phase_arg,leakage\n";
  for (const auto& r : rows) {
    out += format_double(r.total_time) + "," + std::to_string(r.level) + "," +
           format_double(r.dyn_phase_arg) + "," + format_double(r.geom_phase_arg) + "," +
           format_double(r.leakage) + "\n";
  }
  return out;
}

std::string phases_csv(const std::vector<PhaseRow>& rows) {
  std::string out = "omega,measured_phase_arg,predicted_phase_arg,abs_difference\n";
  for (const auto& r : rows) {
    out += format_double(r.omega) + "," + format_double(r.measured_phase_arg) + "," +
           format_double(r.predicted_phase_arg) + "," + format_double(r.abs_difference) + "\n";
  }
  return out;
}

}  // namespace phasebundle
