#include "phasebundle/scenario.hpp"

#include <cmath>
#include <optional>

#include "phasebundle/evolution.hpp"

namespace phasebundle {

json default_settings() {
  return json{{"steps", 10000},
              {"truncation", 40},
              {"metaplectic", true},
              {"seed", 0},
              {"levels", json::array({0})},
              {"T_ladder", json::array({50.0, 100.0, 200.0, 400.0})},
              {"time_steps", 4000},
              {"gap_floor", "1e-6 * mean level spacing"},
              {"cluster_width", 0.25},
              {"input_tolerance", kInputTol},
              {"construction_tolerance", kConstructionTol},
              {"quadrature_tolerance", 1e-6},
              {"plaquette_eps", 1e-2},
              {"plaquette_substeps", 256},
              {"loop_radius", 0.2},
              {"loop_segments", 400}};
}

namespace {

struct SpaceSpec {
  std::string kind;  // quaternionic | paraquaternionic | generic
  int half_dim = 0;
  std::optional<StructureTriple> triple;
  BilinearForm form;
  ComplexStructure j;
};

// validate_j = false: accept arbitrary square components for the check task,
// which reports violations instead of rejecting the input.
SpaceSpec resolve_space(const json& config, bool validate_j = true) {
  if (!config.contains("space")) throw StructuralError("config field 'space': missing");
  const json& sp = config.at("space");
  const std::string kind = sp.value("kind", "");
  unsigned seed = config.value("seed", 0u);

  if (kind == "quaternionic" || kind == "paraquaternionic") {
    TripleKind tk =
        kind == "quaternionic" ? TripleKind::Quaternionic : TripleKind::Paraquaternionic;
    int n = sp.value("half_dim", tk == TripleKind::Quaternionic ? 2 : 1);
    StructureTriple triple = standard_triple(tk, n);
    BilinearForm form = triple.invariant_form();
    Vec3 xi = tk == TripleKind::Quaternionic ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
    if (sp.contains("xi")) {
      const auto& x = sp.at("xi");
      if (!x.is_array() || x.size() != 3)
        throw StructuralError("config field 'space.xi': expected a 3-vector");
      xi = Vec3(x[0].get<double>(), x[1].get<double>(), x[2].get<double>());
    }
    ComplexStructure j = j_xi(triple, xi);
    return SpaceSpec{kind, n, std::move(triple), std::move(form), std::move(j)};
  }
  if (kind == "generic") {
    if (!sp.contains("form")) throw StructuralError("config field 'space.form': missing");
    BilinearForm form = form_from_json(sp.at("form"));
    JFamily family(form);
    ComplexStructure j{Mat()};
    if (sp.contains("j")) {
      if (validate_j) {
        j = structure_from_json(sp.at("j"));
        family.require_compatible(j.components);
      } else if (sp.at("j").contains("components")) {
        json comp = sp.at("j").at("components");
        Mat m(comp.size(), comp.size());
        for (size_t r = 0; r < comp.size(); ++r) {
          if (comp[r].size() != comp.size())
            throw StructuralError("config field 'space.j.components': expected square");
          for (size_t c = 0; c < comp.size(); ++c) m(r, c) = comp[r][c].get<double>();
        }
        j = ComplexStructure{std::move(m)};
      } else {
        throw StructuralError("config field 'space.j.components': missing");
      }
    } else if (sp.contains("seed") || config.contains("seed")) {
      j = family.random_compatible(sp.value("seed", seed));
    } else {
      j = family.canonical();
    }
    return SpaceSpec{kind, form.dim() / 2, std::nullopt, std::move(form), std::move(j)};
  }
  throw StructuralError(
      "config field 'space.kind': expected quaternionic|paraquaternionic|generic");
}

Bundle resolve_bundle(const json& config, const SpaceSpec& space) {
  if (config.contains("bundle"))
    return Bundle::from_name(config.at("bundle").get<std::string>());
  bool metaplectic = config.value("metaplectic", true);
  if (!metaplectic) return Bundle::trivial();
  return space.kind == "paraquaternionic" ? Bundle::inv_sqrt_det() : Bundle::sqrt_det();
}

std::string resolve_format(const json& config, const std::string& fallback) {
  if (config.contains("output") && config.at("output").contains("format"))
    return config.at("output").at("format").get<std::string>();
  return fallback;
}

std::string resolve_path(const json& config) {
  if (config.contains("output") && config.at("output").contains("path"))
    return config.at("output").at("path").get<std::string>();
  return "";
}

// Parameter loop from config; triples map it into J-space elsewhere.
ParameterPath resolve_loop(const json& config, const SpaceSpec& space, int steps) {
  json loop = config.value("loop", json::object());
  std::string kind = loop.value(
      "kind", space.kind == "paraquaternionic" ? std::string("circle") : std::string("cap"));
  if (kind == "sphere" || kind == "hyperboloid") {
    json with_steps = loop;
    if (!with_steps.contains("steps_per_edge")) {
      int edges = std::max<int>(1, static_cast<int>(loop.value("vertices", json::array()).size()));
      with_steps["steps_per_edge"] = std::max(1, steps / edges);
    }
    return loop_from_json(with_steps);
  }
  if (kind == "cap") {
    double colat = loop.value("colatitude", 1.0);
    return spherical_cap_loop(colat, std::max(3, steps));
  }
  if (kind == "circle") {
    double radius = loop.value("radius", 1.0);
    return hyperbolic_circle_loop(radius, std::max(3, steps));
  }
  throw StructuralError("config field 'loop.kind': unknown loop kind '" + kind + "'");
}

ParameterPath to_j_path(const StructureTriple& triple, const ParameterPath& loop) {
  ParameterPath jpath{ManifoldKind::JSpace, {}, {}, loop.closed};
  jpath.jpoints.reserve(loop.points.size());
  for (const auto& xi : loop.points) jpath.jpoints.push_back(j_xi(triple, xi).components);
  return jpath;
}

double enclosed_area(const ParameterPath& loop, const json& loop_config) {
  const std::string kind = loop_config.value("kind", "");
  if (kind == "cap") return 2.0 * M_PI * (1.0 - std::cos(loop_config.value("colatitude", 1.0)));
  if (kind == "circle") return 2.0 * M_PI * (std::cosh(loop_config.value("radius", 1.0)) - 1.0);
  std::vector<Vec3> vertices;
  for (const auto& v : loop_config.value("vertices", json::array()))
    vertices.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  if (vertices.size() >= 3)
    return polygon_area(loop.kind == ManifoldKind::Sphere ? ManifoldKind::Sphere
                                                          : ManifoldKind::Hyperboloid,
                        vertices);
  return std::nan("");
}

ScenarioOutcome run_check(const json& config) {
  SpaceSpec space = resolve_space(config, /*validate_j=*/false);
  auto report = validate(space.form, space.j);
  json out{{"valid", report.empty()}, {"violations", json::array()}};
  for (const auto& v : report)
    out["violations"].push_back(json{{"what", v.what}, {"magnitude", v.magnitude}});
  out["space"] = json{{"kind", space.kind}, {"dim", space.form.dim()}};
  return ScenarioOutcome{out.dump(2) + "\n", "json", resolve_path(config)};
}

ScenarioOutcome run_holonomy(const json& config) {
  SpaceSpec space = resolve_space(config);
  if (!space.triple)
    throw StructuralError("config field 'space.kind': holonomy task needs a structure triple");
  int steps = config.value("steps", 10000);
  ParameterPath loop = resolve_loop(config, space, steps);
  ParameterPath jpath = to_j_path(*space.triple, loop);
  JFamily family = space.triple->family();
  Bundle bundle = resolve_bundle(config, space);
  Frame start = standard_frame(family, ComplexStructure{jpath.jpoints.front()});
  HolonomyResult hol = loop_holonomy(family, jpath, start, bundle);

  json out = holonomy_to_json(hol);
  double area = enclosed_area(loop, config.value("loop", json::object()));
  if (std::isfinite(area)) out["loop_area"] = area;
  return ScenarioOutcome{out.dump(2) + "\n", "json", resolve_path(config)};
}

ScenarioOutcome run_curvature(const json& config) {
  SpaceSpec space = resolve_space(config);
  if (!space.triple)
    throw StructuralError("config field 'space.kind': curvature task needs a structure triple");
  const StructureTriple& triple = *space.triple;
  JFamily family = triple.family();

  Vec3 xi = triple.kind == TripleKind::Quaternionic ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
  Vec3 u = triple.kind == TripleKind::Quaternionic ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  Vec3 v = triple.kind == TripleKind::Quaternionic ? Vec3(0, 1, 0) : Vec3(0, 0, 1);
  ComplexStructure j = j_xi(triple, xi);
  Mat a = family.tangent_project(j.components, j_linear(triple, u));
  Mat b = family.tangent_project(j.components, j_linear(triple, v));

  double eps = config.value("plaquette_eps", 1e-2);
  int substeps = config.value("plaquette_substeps", 256);
  Bundle bundle = resolve_bundle(config, space);
  Cplx est = plaquette_curvature(family, j, family.tangent(j, a), family.tangent(j, b), eps,
                                 bundle, substeps);
  double sigma = kaehler_form_value(family, j, a, b);

  json out{{"bundle", bundle.name()},
           {"estimate_re", est.real()},
           {"estimate_im", est.imag()},
           {"sigma_value", sigma},
           {"eps", eps}};
  return ScenarioOutcome{out.dump(2) + "\n", "json", resolve_path(config)};
}

ScenarioOutcome run_spectrum(const json& config) {
  SpaceSpec space = resolve_space(config);
  std::vector<int> levels = config.value("levels", std::vector<int>{});
  EigenBundleSample sample;
  if (space.form.kind == FormKind::Metric) {
    FermionFock space_f = make_fermion_fock(space.form.components);
    sample = diagonalize_at(space_f, space.j, levels);
  } else {
    int truncation = config.value("truncation", 40);
    BosonFock space_b = make_boson_fock(space.form.components, truncation);
    sample = diagonalize_at(space_b, space.j, levels);
  }
  std::string csv = spectra_csv({sample});
  std::string format = resolve_format(config, "csv");
  if (format == "csv") return ScenarioOutcome{csv, "csv", resolve_path(config)};
  json out{{"eigenvalues", json::array()}};
  for (int i = 0; i < sample.eigenvalues.size(); ++i)
    out["eigenvalues"].push_back(sample.eigenvalues(i));
  return ScenarioOutcome{out.dump(2) + "\n", "json", resolve_path(config)};
}

ScenarioOutcome run_evolve(const json& config) {
  SpaceSpec space = resolve_space(config);
  if (space.form.kind != FormKind::Symplectic)
    throw StructuralError(
        "config field 'space': evolve task expects a symplectic (bosonic) space");
  int truncation = config.value("truncation", 40);
  BosonFock fock = make_boson_fock(space.form.components, truncation);
  JFamily family = fock.family;
  const ComplexStructure j0 = fock.j0;

  json loop_cfg = config.value("loop", json::object());
  double radius = loop_cfg.value("radius", 0.2);
  int segments = loop_cfg.value("segments", 400);
  auto dirs = family.tangent_basis(j0);
  if (dirs.size() < 2) throw NumericalError("evolve: tangent space too small for a loop");

  auto j_at = [&](double s) {
    double phi = 2.0 * M_PI * s;
    return family
        .retract(Mat(j0.components + radius * (std::cos(phi) * dirs[0] + std::sin(phi) * dirs[1])))
        .components;
  };
  ParameterPath jloop = j_circle_loop(family, j0, dirs[0], dirs[1], radius, segments);

  int level = config.value("level", 0);
  auto samples = spectral_frames(fock, jloop, {level});

  std::vector<double> ladder = config.value("T_ladder", std::vector<double>{50, 100, 200, 400});
  int time_steps = config.value("time_steps", 4000);
  CMat ground = samples.front().frame.at(level);

  std::vector<EvolutionRow> rows;
  for (double total_time : ladder) {
    Schedule schedule = make_schedule(total_time, time_steps);
    auto hamiltonian = [&](double t) {
      return quantize_quadratic(fock, ComplexStructure{j_at(t / total_time)}).matrix;
    };
    EvolutionResult result = evolve(schedule, ground, hamiltonian, nullptr);
    std::vector<double> energies(schedule.times.size());
    for (size_t j = 0; j < schedule.times.size(); ++j) {
      EigenBundleSample s = diagonalize_at(
          fock, ComplexStructure{j_at(schedule.times[j] / total_time)}, {level});
      energies[j] = s.energy.at(level);
    }
    AdiabaticSplit split = adiabatic_split(result, ground, energies);
    rows.push_back(EvolutionRow{total_time, level, std::arg(split.dynamical),
                                std::arg(split.remainder), split.leakage});
  }
  return ScenarioOutcome{evolution_csv(rows), "csv", resolve_path(config)};
}

ScenarioOutcome run_phases(const json& config) {
  SpaceSpec space = resolve_space(config);
  if (!space.triple)
    throw StructuralError("config field 'space.kind': phases task needs a structure triple");
  const StructureTriple& triple = *space.triple;
  JFamily family = triple.family();
  Bundle bundle = resolve_bundle(config, space);
  const int n = space.half_dim;
  const bool quaternionic = triple.kind == TripleKind::Quaternionic;
  bool metaplectic = config.value("metaplectic", true);

  json caps = config.value("caps", json::object());
  int count = caps.value("count", 8);
  double lo = caps.value(quaternionic ? "min_colatitude" : "min_radius", 0.35);
  double hi = caps.value(quaternionic ? "max_colatitude" : "max_radius", 1.4);
  int steps = config.value("steps", 10000);

  std::vector<PhaseRow> rows;
  for (int i = 0; i < count; ++i) {
    double size = lo + (hi - lo) * i / std::max(1, count - 1);
    ParameterPath loop = quaternionic ? spherical_cap_loop(size, steps)
                                      : hyperbolic_circle_loop(size, steps);
    double omega = quaternionic ? 2.0 * M_PI * (1.0 - std::cos(size))
                                : 2.0 * M_PI * (std::cosh(size) - 1.0);
    ParameterPath jpath = to_j_path(triple, loop);
    Frame start = standard_frame(family, ComplexStructure{jpath.jpoints.front()});
    HolonomyResult hol = loop_holonomy(family, jpath, start, bundle);

    double predicted = 0.0;
    if (metaplectic) predicted = quaternionic ? -0.25 * n * omega : 0.25 * n * omega;
    double predicted_arg = std::arg(std::polar(1.0, predicted));
    double measured_arg = std::arg(hol.phase);
    double diff = std::abs(hol.phase - std::polar(1.0, predicted));
    rows.push_back(PhaseRow{omega, measured_arg, predicted_arg, diff});
  }
  return ScenarioOutcome{phases_csv(rows), "csv", resolve_path(config)};
}

}  // namespace

ScenarioOutcome run_scenario(const json& config) {
  if (!config.is_object()) throw StructuralError("config: expected a JSON object");
  if (!config.contains("task")) throw StructuralError("config field 'task': missing");
  const std::string task = config.at("task").get<std::string>();
  if (task == "check") return run_check(config);
  if (task == "holonomy") return run_holonomy(config);
  if (task == "curvature") return run_curvature(config);
  if (task == "spectrum") return run_spectrum(config);
  if (task == "evolve") return run_evolve(config);
  if (task == "phases") return run_phases(config);
  throw StructuralError("config field 'task': unknown task '" + task + "'");
}

}  // namespace phasebundle
