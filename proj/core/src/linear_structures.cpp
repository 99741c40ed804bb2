#include "phasebundle/linear_structures.hpp"

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

namespace phasebundle {

namespace {

void require_even_square(const Mat& m, const char* who) {
  if (m.rows() != m.cols()) throw StructuralError(std::string(who) + ": matrix not square");
  if (m.rows() < 2 || m.rows() % 2 != 0)
    throw StructuralError(std::string(who) + ": dimension must be even and >= 2");
}

Mat spd_power(const Mat& m, double exponent, const char* who) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw NumericalError(std::string(who) + ": eigensolver failed");
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NumericalError(std::string(who) + ": matrix not positive definite");
  Vec powered = es.eigenvalues().array().pow(exponent);
  return es.eigenvectors() * powered.asDiagonal() * es.eigenvectors().transpose();
}

// Orthogonal polar factor of an invertible antisymmetric matrix; antisymmetric
// and squaring to -I by construction.
Mat antisymmetric_polar(const Mat& s, const char* who) {
  return s * spd_power(s.transpose() * s, -0.5, who);
}

Mat standard_j(int dim) {
  const int n = dim / 2;
  Mat j = Mat::Zero(dim, dim);
  j.topRightCorner(n, n) = -Mat::Identity(n, n);
  j.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return j;
}

Mat block_diag(const Mat& block, int copies) {
  const int b = static_cast<int>(block.rows());
  Mat out = Mat::Zero(b * copies, b * copies);
  for (int i = 0; i < copies; ++i) out.block(i * b, i * b, b, b) = block;
  return out;
}

double min_sym_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace

BilinearForm BilinearForm::metric(Mat g, double tol) {
  require_even_square(g, "BilinearForm::metric");
  if (max_abs(Mat(g - g.transpose())) > tol)
    throw DomainError("BilinearForm::metric: components not symmetric");
  if (min_sym_eigenvalue(g) <= tol)
    throw DomainError("BilinearForm::metric: components not positive definite");
  return BilinearForm{FormKind::Metric, std::move(g)};
}

BilinearForm BilinearForm::symplectic(Mat omega, double tol) {
  require_even_square(omega, "BilinearForm::symplectic");
  if (max_abs(Mat(omega + omega.transpose())) > tol)
    throw DomainError("BilinearForm::symplectic: components not antisymmetric");
  if (std::abs(omega.determinant()) <= tol)
    throw DomainError("BilinearForm::symplectic: components degenerate");
  return BilinearForm{FormKind::Symplectic, std::move(omega)};
}

ComplexStructure ComplexStructure::from_matrix(Mat j, double tol) {
  require_even_square(j, "ComplexStructure");
  const int d = static_cast<int>(j.rows());
  if (max_abs(Mat(j * j + Mat::Identity(d, d))) > tol)
    throw DomainError("ComplexStructure: J*J != -I");
  return ComplexStructure{std::move(j)};
}

std::vector<Violation> validate(const BilinearForm& form, const ComplexStructure& j) {
  if (form.dim() != j.dim()) throw StructuralError("validate: dimension mismatch");
  std::vector<Violation> report;
  const int d = form.dim();
  const Mat& J = j.components;
  const Mat& B = form.components;

  double sq = max_abs(Mat(J * J + Mat::Identity(d, d)));
  if (sq > kInputTol) report.push_back({"J squared: ||J*J + I||", sq});

  double inv = max_abs(Mat(J.transpose() * B * J - B));
  if (inv > kInputTol) report.push_back({"form invariance: ||J^T B J - B||", inv});

  if (form.kind == FormKind::Symplectic) {
    double lmin = min_sym_eigenvalue(B * J);
    if (lmin <= kInputTol)
      report.push_back({"positivity: omega(.,J.) not positive definite", kInputTol - lmin});
  } else {
    double shape = max_abs(Mat(B - B.transpose()));
    if (shape > kInputTol) report.push_back({"metric symmetry", shape});
  }
  return report;
}

std::vector<Violation> validate(const CompatiblePair& pair) {
  auto report = validate(pair.form, pair.j);
  BilinearForm expected = derive_partner(pair.form, pair.j);
  double drift = max_abs(Mat(expected.components - pair.derived.components));
  if (drift > kInputTol) report.push_back({"derived partner mismatch", drift});
  return report;
}

BilinearForm derive_partner(const BilinearForm& form, const ComplexStructure& j) {
  if (form.dim() != j.dim()) throw StructuralError("derive_partner: dimension mismatch");
  auto report = validate(form, j);
  if (!report.empty())
    throw CompatibilityError("derive_partner: incompatible pair (" + report.front().what + ")");
  if (form.kind == FormKind::Metric) {
    // omega_J(u,v) = g(J u, v)
    return BilinearForm::symplectic(j.components.transpose() * form.components);
  }
  // g_J(u,v) = omega(u, J v)
  return BilinearForm::metric(form.components * j.components);
}

CompatiblePair make_compatible_pair(const BilinearForm& form, const ComplexStructure& j) {
  BilinearForm partner = derive_partner(form, j);
  return CompatiblePair{form, j, std::move(partner)};
}

JFamily::JFamily(BilinearForm fixed) : form_(std::move(fixed)) {
  form_inv_ = form_.components.inverse();
  if (form_.kind == FormKind::Metric) {
    sqrt_ = spd_power(form_.components, 0.5, "JFamily");
    sqrt_inv_ = spd_power(form_.components, -0.5, "JFamily");
  }
}

JFamily JFamily::metric(Mat g) { return JFamily(BilinearForm::metric(std::move(g))); }
JFamily JFamily::symplectic(Mat omega) {
  return JFamily(BilinearForm::symplectic(std::move(omega)));
}

std::vector<Violation> JFamily::violations(const Mat& j) const {
  ComplexStructure raw{j};  // bypass the J^2 factory check; validate reports it
  if (j.rows() != form_.dim() || j.cols() != form_.dim())
    throw StructuralError("JFamily: dimension mismatch");
  return validate(form_, raw);
}

double JFamily::compatibility_residual(const Mat& j) const {
  double worst = 0.0;
  for (const auto& v : violations(j)) worst = std::max(worst, v.magnitude);
  return worst;
}

void JFamily::require_compatible(const Mat& j, double tol) const {
  const int d = dim();
  const Mat& B = form_.components;
  double sq = max_abs(Mat(j * j + Mat::Identity(d, d)));
  double inv = max_abs(Mat(j.transpose() * B * j - B));
  if (sq > tol || inv > tol)
    throw CompatibilityError("JFamily: J not compatible with the fixed form");
  if (form_.kind == FormKind::Symplectic && min_sym_eigenvalue(B * j) <= 0.0)
    throw CompatibilityError("JFamily: omega(.,J.) not positive definite");
}

ComplexStructure JFamily::canonical() const {
  if (form_.kind == FormKind::Metric)
    return ComplexStructure::from_matrix(sqrt_inv_ * standard_j(dim()) * sqrt_, kConstructionTol);
  const Mat& omega = form_.components;
  Mat j = -omega * spd_power(omega.transpose() * omega, -0.5, "JFamily::canonical");
  return ComplexStructure::from_matrix(std::move(j), kConstructionTol);
}

ComplexStructure JFamily::random_compatible(unsigned seed) const {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  const int d = dim();
  Mat r(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) r(i, k) = dist(gen);
  r *= 0.4 / d;

  if (form_.kind == FormKind::Metric) {
    Mat a = 0.5 * (r - r.transpose());
    Mat o = a.exp();
    Mat jp = o * standard_j(d) * o.transpose();
    return retract(sqrt_inv_ * jp * sqrt_);
  }
  Mat a = form_inv_ * 0.5 * (r + r.transpose());  // omega * a symmetric
  Mat m = a.exp();
  Mat j0 = canonical().components;
  return retract(m * j0 * m.inverse());
}

ComplexStructure JFamily::retract(const Mat& near_j) const {
  if (form_.kind == FormKind::Metric) {
    Mat xp = sqrt_ * near_j * sqrt_inv_;
    Mat s = 0.5 * (xp - xp.transpose());
    Mat q = antisymmetric_polar(s, "JFamily::retract");
    return ComplexStructure::from_matrix(sqrt_inv_ * q * sqrt_, kConstructionTol);
  }
  const Mat& omega = form_.components;
  Mat g0 = 0.5 * (omega * near_j + (omega * near_j).transpose());
  Mat t = spd_power(g0, 0.5, "JFamily::retract");
  Mat tinv = spd_power(g0, -0.5, "JFamily::retract");
  Mat q = antisymmetric_polar(Mat(tinv * omega * tinv), "JFamily::retract");
  for (double sign : {1.0, -1.0}) {
    Mat j = tinv * (sign * q) * t;
    if (min_sym_eigenvalue(omega * j) > 0.0)
      return ComplexStructure::from_matrix(std::move(j), kConstructionTol);
  }
  throw NumericalError("JFamily::retract: no positively-oriented polar branch");
}

Mat JFamily::tangent_project(const Mat& j, const Mat& y) const {
  Mat anti = 0.5 * (y + j * y * j);
  return 0.5 * (anti - form_inv_ * anti.transpose() * form_.components);
}

double JFamily::tangency_residual(const Mat& j, const Mat& delta) const {
  double a = max_abs(Mat(delta * j + j * delta));
  Mat bd = form_.components * delta;
  double b = (form_.kind == FormKind::Metric) ? max_abs(Mat(bd + bd.transpose()))
                                              : max_abs(Mat(bd - bd.transpose()));
  return std::max(a, b);
}

TangentVariation JFamily::tangent(const ComplexStructure& j, const Mat& delta,
                                  double tol) const {
  if (delta.rows() != dim() || delta.cols() != dim())
    throw StructuralError("JFamily::tangent: dimension mismatch");
  if (tangency_residual(j.components, delta) > tol)
    throw DomainError("JFamily::tangent: delta not tangent to the family at J");
  return TangentVariation{j, delta};
}

CMat JFamily::hermitian_pairing() const {
  if (form_.kind == FormKind::Metric) return form_.components.cast<Cplx>();
  return Cplx(0.0, 1.0) * form_.components.cast<Cplx>();
}

std::vector<Mat> JFamily::tangent_basis(const ComplexStructure& j) const {
  const int d = dim();
  std::vector<Mat> basis;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      Mat cand = Mat::Zero(d, d);
      cand(r, c) = 1.0;
      cand = tangent_project(j.components, cand);
      for (const Mat& b : basis) cand -= (b.array() * cand.array()).sum() * b;
      double norm = cand.norm();
      if (norm > 1e-8) basis.push_back(cand / norm);
    }
  }
  return basis;
}

Vec3 StructureTriple::signature() const {
  return kind == TripleKind::Quaternionic ? Vec3(1, 1, 1) : Vec3(1, -1, -1);
}

BilinearForm StructureTriple::invariant_form() const {
  if (kind == TripleKind::Quaternionic) return BilinearForm::metric(Mat::Identity(dim, dim));
  Mat block(2, 2);
  block << 0, 1, -1, 0;
  return BilinearForm::symplectic(block_diag(block, dim / 2));
}

JFamily StructureTriple::family() const { return JFamily(invariant_form()); }

StructureTriple standard_triple(TripleKind kind, int half_dim) {
  if (half_dim < 1) throw DomainError("standard_triple: half_dim must be >= 1");
  if (kind == TripleKind::Quaternionic) {
    if (half_dim % 2 != 0)
      throw DomainError("standard_triple: quaternionic requires even half_dim");
    // Left multiplication by i, j, k on H = R^4 in the basis (1, i, j, k).
    Mat j1(4, 4), j2(4, 4), j3(4, 4);
    j1 << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
    j2 << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0;
    j3 << 0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
    const int copies = half_dim / 2;
    return StructureTriple{kind, 2 * half_dim,
                           {block_diag(j1, copies), block_diag(j2, copies),
                            block_diag(j3, copies)}};
  }
  // Split quaternions on R^2: J0 = -i sigma_2, J1 = sigma_1, J2 = sigma_3.
  Mat j0(2, 2), j1(2, 2), j2(2, 2);
  j0 << 0, -1, 1, 0;
  j1 << 0, 1, 1, 0;
  j2 << 1, 0, 0, -1;
  return StructureTriple{kind, 2 * half_dim,
                         {block_diag(j0, half_dim), block_diag(j1, half_dim),
                          block_diag(j2, half_dim)}};
}

namespace {

// eps_ab^c with the index raised by the signature metric; eps_{123} = 1
// (quaternionic, labels 1..3) and eps_{012} = 1 (paraquaternionic, labels 0..2).
double epsilon_raised(const StructureTriple& t, int a, int b, int c) {
  auto eps = [](int x, int y, int z) -> double {
    if (x == y || y == z || x == z) return 0.0;
    return ((y - x) * (z - y) * (z - x) > 0) ? 1.0 : -1.0;
  };
  return eps(a, b, c) * t.signature()(c);
}

}  // namespace

double triple_relation_residual(const StructureTriple& t) {
  const Mat id = Mat::Identity(t.dim, t.dim);
  const Vec3 gamma = t.signature();
  double worst = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      Mat r = t.generators[a] * t.generators[b];
      r += (a == b ? gamma(a) : 0.0) * id;
      for (int c = 0; c < 3; ++c) r -= epsilon_raised(t, a, b, c) * t.generators[c];
      worst = std::max(worst, max_abs(r));
    }
  }
  return worst;
}

double signature_dot(const StructureTriple& t, const Vec3& xi, const Vec3& eta) {
  const Vec3 gamma = t.signature();
  return gamma(0) * xi(0) * eta(0) + gamma(1) * xi(1) * eta(1) + gamma(2) * xi(2) * eta(2);
}

Vec3 signature_cross(const StructureTriple& t, const Vec3& xi, const Vec3& eta) {
  Vec3 lower = xi.cross(eta);  // eps_abc xi^a eta^b
  const Vec3 gamma = t.signature();
  return Vec3(lower(0) * gamma(0), lower(1) * gamma(1), lower(2) * gamma(2));
}

Mat j_linear(const StructureTriple& t, const Vec3& u) {
  return u(0) * t.generators[0] + u(1) * t.generators[1] + u(2) * t.generators[2];
}

ComplexStructure j_xi(const StructureTriple& t, const Vec3& xi) {
  const double norm = signature_dot(t, xi, xi);
  if (std::abs(norm - 1.0) > kInputTol)
    throw DomainError("j_xi: xi not on the unit sphere / hyperboloid");
  if (t.kind == TripleKind::Paraquaternionic && xi(0) <= 0.0)
    throw DomainError("j_xi: xi not on the upper hyperboloid sheet");
  return ComplexStructure::from_matrix(j_linear(t, xi), kConstructionTol);
}

}  // namespace phasebundle
