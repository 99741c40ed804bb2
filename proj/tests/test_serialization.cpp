#include <doctest.h>

#include "phasebundle/serialization.hpp"

using namespace phasebundle;

TEST_CASE("forms and structures round-trip through JSON") {
  Mat g(2, 2);
  g << 2, 0.5, 0.5, 1;
  BilinearForm form = BilinearForm::metric(g);
  json j = form_to_json(form);
  CHECK(j.at("kind") == "metric");
  CHECK(j.at("dim") == 2);
  BilinearForm back = form_from_json(j);
  CHECK(max_abs(Mat(back.components - form.components)) == 0.0);

  JFamily family = JFamily::metric(g);
  ComplexStructure s = family.random_compatible(4);
  ComplexStructure s2 = structure_from_json(structure_to_json(s));
  CHECK(max_abs(Mat(s.components - s2.components)) == 0.0);

  json bad = j;
  bad["kind"] = "hyperbolic";
  CHECK_THROWS_AS(form_from_json(bad), StructuralError);
  json ragged = j;
  ragged["components"] = json::array({json::array({1.0, 0.0}), json::array({0.0})});
  CHECK_THROWS_AS(form_from_json(ragged), StructuralError);
}

TEST_CASE("loops parse from the documented schema") {
  json spec = {{"kind", "sphere"},
               {"vertices", json::array({json::array({1.0, 0.0, 0.0}),
                                         json::array({0.0, 1.0, 0.0}),
                                         json::array({0.0, 0.0, 1.0})})},
               {"steps_per_edge", 5}};
  ParameterPath loop = loop_from_json(spec);
  CHECK(loop.closed);
  CHECK(loop.kind == ManifoldKind::Sphere);
  CHECK(loop.size() == 16);  // 3 edges x 5 + closing duplicate

  json missing = spec;
  missing.erase("vertices");
  CHECK_THROWS_AS(loop_from_json(missing), StructuralError);
}

TEST_CASE("holonomy serializes with the documented fields") {
  HolonomyResult h;
  h.bundle = Bundle::sqrt_det();
  h.op = CMat::Constant(1, 1, std::polar(1.0, -M_PI_4));
  h.phase = std::polar(1.0, -M_PI_4);
  h.step_count = 100;
  h.error_estimate = 1e-4;
  json j = holonomy_to_json(h);
  for (const char* key : {"bundle", "phase_re", "phase_im", "operator", "steps",
                          "error_estimate"})
    CHECK(j.contains(key));
  CHECK(j.at("bundle") == "sqrt_det");
}

TEST_CASE("PolyGaussian round-trips through JSON") {
  Mat g = Mat::Identity(2, 2);
  PolyGaussian psi{g, {}};
  psi.coeffs[{1, 0}] = Cplx(0.5, -1.5);
  psi.coeffs[{0, 2}] = Cplx(0, 2);
  PolyGaussian back = polygaussian_from_json(polygaussian_to_json(psi));
  CHECK(back.coeffs.size() == 2);
  CHECK(back.coeffs.at({1, 0}) == psi.coeffs.at({1, 0}));
  CHECK(back.coeffs.at({0, 2}) == psi.coeffs.at({0, 2}));
}

TEST_CASE("CSV emitters use the documented headers") {
  CHECK(spectra_csv({}).rfind("sample_index,level,eigenvalue,gap\n", 0) == 0);
  CHECK(evolution_csv({}).rfind("T,level,dyn_phase_arg,geom_phase_arg,leakage\n", 0) == 0);
  CHECK(phases_csv({}).rfind("omega,measured_phase_arg,predicted_phase_arg,abs_difference\n",
                             0) == 0);
  std::string row = phases_csv({PhaseRow{1.5, -0.75, -0.75, 0.0}});
  CHECK(row.find("1.5,-0.75,-0.75,0") != std::string::npos);
}
