#include <doctest.h>

#include <random>

#include "phasebundle/linear_structures.hpp"

using namespace phasebundle;

namespace {

Mat std_j2() {
  Mat j(2, 2);
  j << 0, -1, 1, 0;
  return j;
}

Mat std_omega2() {
  Mat w(2, 2);
  w << 0, 1, -1, 0;
  return w;
}

Vec3 random_unit(std::mt19937& gen) {
  std::normal_distribution<double> dist;
  Vec3 v(dist(gen), dist(gen), dist(gen));
  while (v.norm() < 1e-3) v = Vec3(dist(gen), dist(gen), dist(gen));
  return v / v.norm();
}

}  // namespace

TEST_CASE("validate: standard pair passes, J=I fails") {
  auto g = BilinearForm::metric(Mat::Identity(2, 2));
  auto j = ComplexStructure::from_matrix(std_j2());
  CHECK(validate(g, j).empty());

  ComplexStructure bad{Mat::Identity(2, 2)};  // J^2 = +I
  auto report = validate(g, bad);
  REQUIRE(!report.empty());
  CHECK(report.front().what.find("J squared") != std::string::npos);
}

TEST_CASE("validate: random compatible J from make_random passes (seed 7)") {
  for (int dim : {2, 4, 6}) {
    Mat g = Mat::Identity(dim, dim);
    g(0, 0) = 2.0;  // anisotropic metric
    JFamily family = JFamily::metric(g);
    ComplexStructure j = family.random_compatible(7);
    CHECK(validate(family.form(), j).empty());
    CHECK(family.compatibility_residual(j.components) < 1e-12);
  }
}

TEST_CASE("validate: dimension mismatch is structural") {
  auto g = BilinearForm::metric(Mat::Identity(2, 2));
  ComplexStructure j{std_j2()};
  Mat big = Mat::Identity(4, 4);
  CHECK_THROWS_AS(validate(BilinearForm::metric(big), j), StructuralError);
}

TEST_CASE("derive_partner: g=I, J std gives omega(e1,e2)=1 and round-trips") {
  auto g = BilinearForm::metric(Mat::Identity(2, 2));
  auto j = ComplexStructure::from_matrix(std_j2());
  BilinearForm omega = derive_partner(g, j);
  CHECK(omega.kind == FormKind::Symplectic);
  CHECK(omega.components(0, 1) == doctest::Approx(1.0).epsilon(1e-14));

  BilinearForm back = derive_partner(omega, j);
  CHECK(back.kind == FormKind::Metric);
  CHECK(max_abs(Mat(back.components - g.components)) < 1e-12);
}

TEST_CASE("derive_partner: quaternionic block gives orthogonal symplectic matrix") {
  StructureTriple t = standard_triple(TripleKind::Quaternionic, 2);
  auto g = t.invariant_form();
  ComplexStructure j1{t.generators[0]};
  BilinearForm omega1 = derive_partner(g, j1);
  CHECK(max_abs(Mat(omega1.components + omega1.components.transpose())) < 1e-14);
  CHECK(max_abs(Mat(omega1.components * omega1.components.transpose() -
                    Mat::Identity(4, 4))) < 1e-14);
}

TEST_CASE("derive_partner round-trip on random pairs") {
  for (unsigned seed : {1u, 2u, 3u}) {
    JFamily family = JFamily::metric(Mat::Identity(4, 4));
    ComplexStructure j = family.random_compatible(seed);
    BilinearForm omega = derive_partner(family.form(), j);
    BilinearForm back = derive_partner(omega, j);
    CHECK(max_abs(Mat(back.components - family.form().components)) < 1e-12);
  }
}

TEST_CASE("derive_partner rejects incompatible input") {
  auto g = BilinearForm::metric(Mat::Identity(4, 4));
  JFamily other = JFamily::metric(Mat::Identity(4, 4) * 3.0);
  Mat j = other.random_compatible(5).components;
  j(0, 1) += 0.2;  // break it
  CHECK_THROWS_AS(derive_partner(g, ComplexStructure{j}), CompatibilityError);
}

TEST_CASE("standard_triple: quaternionic relations exact, J1 J2 = J3") {
  for (int n : {2, 4, 6}) {
    StructureTriple t = standard_triple(TripleKind::Quaternionic, n);
    CHECK(triple_relation_residual(t) == 0.0);  // integer entries
    CHECK(max_abs(Mat(t.generators[0] * t.generators[1] - t.generators[2])) == 0.0);
  }
  CHECK_THROWS_AS(standard_triple(TripleKind::Quaternionic, 3), DomainError);
}

TEST_CASE("standard_triple: paraquaternionic relations, J1^2 = +I, sigma1 sigma3 = -i sigma2") {
  for (int n : {1, 2, 3, 4}) {
    StructureTriple t = standard_triple(TripleKind::Paraquaternionic, n);
    CHECK(triple_relation_residual(t) == 0.0);
    CHECK(max_abs(Mat(t.generators[1] * t.generators[1] - Mat::Identity(2 * n, 2 * n))) == 0.0);
    // J1 J2 = J0 block-wise: sigma_1 sigma_3 = -i sigma_2
    CHECK(max_abs(Mat(t.generators[1] * t.generators[2] - t.generators[0])) == 0.0);
  }
}

TEST_CASE("j_xi: axis vectors recover generators; J_xi^2 = -I on the hyperboloid") {
  StructureTriple q = standard_triple(TripleKind::Quaternionic, 2);
  CHECK(max_abs(Mat(j_xi(q, Vec3(0, 0, 1)).components - q.generators[2])) == 0.0);

  StructureTriple p = standard_triple(TripleKind::Paraquaternionic, 1);
  double t = 0.5;
  Vec3 xi(std::cosh(t), std::sinh(t), 0);
  ComplexStructure jx = j_xi(p, xi);
  CHECK(max_abs(Mat(jx.components * jx.components + Mat::Identity(2, 2))) < 1e-12);

  CHECK_THROWS_AS(j_xi(q, Vec3(0, 0, 1.5)), DomainError);
  CHECK_THROWS_AS(j_xi(p, Vec3(-std::cosh(t), std::sinh(t), 0)), DomainError);
}

TEST_CASE("j_xi identity J_xi J_eta = -(xi.eta) I + (xi x eta)^a J_a over random pairs") {
  std::mt19937 gen(2024);
  StructureTriple q = standard_triple(TripleKind::Quaternionic, 2);
  const Mat id = Mat::Identity(q.dim, q.dim);
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 xi = random_unit(gen), eta = random_unit(gen);
    Mat lhs = j_xi(q, xi).components * j_xi(q, eta).components;
    Mat rhs = -signature_dot(q, xi, eta) * id + j_linear(q, signature_cross(q, xi, eta));
    CHECK(max_abs(Mat(lhs - rhs)) < 1e-12);
  }

  // the spec's concrete instance: xi = e1, eta = e2 gives J3
  Mat lhs = j_xi(q, Vec3(1, 0, 0)).components * j_xi(q, Vec3(0, 1, 0)).components;
  CHECK(max_abs(Mat(lhs - q.generators[2])) == 0.0);
}

TEST_CASE("j_xi identity on the hyperboloid") {
  std::mt19937 gen(99);
  std::normal_distribution<double> dist;
  StructureTriple p = standard_triple(TripleKind::Paraquaternionic, 2);
  const Mat id = Mat::Identity(p.dim, p.dim);
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 xi(0, dist(gen), dist(gen)), eta(0, dist(gen), dist(gen));
    xi(0) = std::sqrt(1.0 + xi(1) * xi(1) + xi(2) * xi(2));
    eta(0) = std::sqrt(1.0 + eta(1) * eta(1) + eta(2) * eta(2));
    Mat lhs = j_xi(p, xi).components * j_xi(p, eta).components;
    Mat rhs = -signature_dot(p, xi, eta) * id + j_linear(p, signature_cross(p, xi, eta));
    CHECK(max_abs(Mat(lhs - rhs)) < 1e-12);
  }
}

TEST_CASE("make_random: deterministic, compatible, positive (symplectic)") {
  JFamily mg = JFamily::metric(Mat::Identity(2, 2));
  ComplexStructure j1 = mg.random_compatible(1);
  CHECK(max_abs(Mat(j1.components.transpose() * j1.components - Mat::Identity(2, 2))) < 1e-12);
  CHECK(max_abs(Mat(j1.components * j1.components + Mat::Identity(2, 2))) < 1e-12);

  JFamily mg4 = JFamily::metric(Mat::Identity(4, 4));
  CHECK(max_abs(Mat(mg4.random_compatible(2).components -
                    mg4.random_compatible(2).components)) == 0.0);

  JFamily sf = JFamily::symplectic(std_omega2());
  ComplexStructure j3 = sf.random_compatible(3);
  Mat gj = sf.form().components * j3.components;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (gj + gj.transpose()));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(sf.compatibility_residual(j3.components) < 1e-12);
}

TEST_CASE("tangent variations: linearization of the compatibility conditions") {
  JFamily family = JFamily::metric(Mat::Identity(4, 4));
  ComplexStructure j = family.random_compatible(11);
  std::mt19937 gen(5);
  std::normal_distribution<double> dist;
  Mat y(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) y(r, c) = dist(gen);
  Mat delta = family.tangent_project(j.components, y);
  CHECK(family.tangency_residual(j.components, delta) < 1e-12);

  // polar-corrected J + t delta stays compatible with violations O(t^2)
  double prev = -1.0;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    Mat moved = j.components + t * delta;
    double raw = family.compatibility_residual(moved);
    CHECK(raw < 10.0 * t * t + 1e-12);  // linearized exactly
    ComplexStructure retracted = family.retract(moved);
    CHECK(family.compatibility_residual(retracted.components) < 1e-12);
    if (prev > 0) CHECK(raw < prev);
    prev = raw;
  }
}

TEST_CASE("tangent_basis dimensions match the symmetric spaces") {
  // dim SO(2n)/U(n) = n(n-1); dim Sp(2n,R)/U(n) = n(n+1)
  JFamily m2 = JFamily::metric(Mat::Identity(2, 2));
  CHECK(m2.tangent_basis(m2.canonical()).size() == 0);
  JFamily m4 = JFamily::metric(Mat::Identity(4, 4));
  CHECK(m4.tangent_basis(m4.canonical()).size() == 2);
  JFamily s2 = JFamily::symplectic(std_omega2());
  CHECK(s2.tangent_basis(s2.canonical()).size() == 2);
  Mat omega4 = Mat::Zero(4, 4);
  omega4.topRightCorner(2, 2) = Mat::Identity(2, 2);
  omega4.bottomLeftCorner(2, 2) = -Mat::Identity(2, 2);
  JFamily s4 = JFamily::symplectic(omega4);
  CHECK(s4.tangent_basis(s4.canonical()).size() == 6);
}

TEST_CASE("validate(CompatiblePair) detects a drifted derived form") {
  auto g = BilinearForm::metric(Mat::Identity(2, 2));
  auto j = ComplexStructure::from_matrix(std_j2());
  CompatiblePair pair = make_compatible_pair(g, j);
  CHECK(validate(pair).empty());

  CompatiblePair drifted = pair;
  drifted.derived.components(0, 1) += 1e-6;
  auto report = validate(drifted);
  REQUIRE(!report.empty());
  CHECK(report.front().what.find("derived partner") != std::string::npos);
}

TEST_CASE("retract is exact on the manifold") {
  JFamily family = JFamily::symplectic(std_omega2());
  ComplexStructure j = family.random_compatible(17);
  ComplexStructure back = family.retract(j.components);
  CHECK(max_abs(Mat(back.components - j.components)) < 1e-12);
}
