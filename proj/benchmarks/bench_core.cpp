#include <benchmark/benchmark.h>

#include "phasebundle/fock_spaces.hpp"
#include "phasebundle/frame_transport.hpp"
#include "phasebundle/wavefunction_calculus.hpp"

using namespace phasebundle;

namespace {

Mat std_omega(int n) {
  Mat block(2, 2);
  block << 0, 1, -1, 0;
  Mat out = Mat::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) out.block(2 * i, 2 * i, 2, 2) = block;
  return out;
}

void bm_frame_transport_octant(benchmark::State& state) {
  StructureTriple t = standard_triple(TripleKind::Quaternionic, 2);
  JFamily family = t.family();
  ParameterPath loop = polygon_loop(
      ManifoldKind::Sphere, {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)},
      static_cast<int>(state.range(0)));
  ParameterPath jp{ManifoldKind::JSpace, {}, {}, true};
  for (const auto& xi : loop.points) jp.jpoints.push_back(j_xi(t, xi).components);
  Frame start = standard_frame(family, ComplexStructure{jp.jpoints.front()});
  for (auto _ : state) {
    TransportResult tr = transport_frame(family, jp, start);
    benchmark::DoNotOptimize(tr.det_phase);
  }
  state.SetItemsProcessed(state.iterations() * (jp.size() - 1));
}
BENCHMARK(bm_frame_transport_octant)->Arg(300)->Arg(1000);

void bm_boson_quantize(benchmark::State& state) {
  BosonFock fock = make_boson_fock(std_omega(1), static_cast<int>(state.range(0)));
  ComplexStructure j = fock.family.random_compatible(3);
  for (auto _ : state) {
    FockOperator h = quantize_quadratic(fock, j);
    benchmark::DoNotOptimize(h.matrix(0, 0));
  }
}
BENCHMARK(bm_boson_quantize)->Arg(20)->Arg(40);

void bm_boson_diagonalize(benchmark::State& state) {
  BosonFock fock = make_boson_fock(std_omega(1), static_cast<int>(state.range(0)));
  CMat h = quantize_quadratic(fock, fock.family.random_compatible(3)).matrix;
  for (auto _ : state) {
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    benchmark::DoNotOptimize(es.eigenvalues()(0));
  }
}
BENCHMARK(bm_boson_diagonalize)->Arg(20)->Arg(40);

void bm_fermion_quantize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  FermionFock fock = make_fermion_fock(Mat::Identity(2 * n, 2 * n));
  ComplexStructure j = fock.family.random_compatible(5);
  for (auto _ : state) {
    FockOperator h = quantize_quadratic(fock, j);
    benchmark::DoNotOptimize(h.matrix(0, 0));
  }
}
BENCHMARK(bm_fermion_quantize)->Arg(2)->Arg(4);

void bm_octant_quadrature(benchmark::State& state) {
  SurfacePatch patch = fan_patch(ManifoldKind::Sphere,
                                 {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)});
  for (auto _ : state) {
    QuadratureResult r = integrate_two_form(patch, sigma_sphere, 1e-6, 12);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(bm_octant_quadrature);

void bm_gaussian_moments(benchmark::State& state) {
  Mat g(4, 4);
  g << 1.5, 0.2, 0, 0.1, 0.2, 1.0, 0.1, 0, 0, 0.1, 2.0, 0.3, 0.1, 0, 0.3, 1.2;
  for (auto _ : state) {
    GaussianMoments table(g);
    benchmark::DoNotOptimize(table.moment({4, 2, 2, 4}));
  }
}
BENCHMARK(bm_gaussian_moments);

void bm_transport_state_step(benchmark::State& state) {
  Mat g = Mat::Identity(4, 4);
  JFamily family = JFamily::metric(g);
  ComplexStructure j = family.canonical();
  Frame frame = standard_frame(family, j);
  FrameCoordinates coords = frame_coordinates(g, frame);
  PolyGaussian psi = coordinate_state(g, coords, {1, 1});
  Mat delta = family.tangent_project(j.components, Mat::Random(4, 4));
  delta *= 1e-3 / max_abs(delta);
  for (auto _ : state) {
    PolyGaussian moved = transport_state(psi, family, frame, delta);
    benchmark::DoNotOptimize(moved.coeffs.size());
  }
}
BENCHMARK(bm_transport_state_step);

}  // namespace

BENCHMARK_MAIN();
