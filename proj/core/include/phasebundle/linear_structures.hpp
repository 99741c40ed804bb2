#pragma once

#include <array>

#include "phasebundle/common.hpp"

namespace phasebundle {

enum class FormKind { Metric, Symplectic };

// A translation-invariant bilinear form on R^{2n}, stored in the standard
// basis.  Convention used throughout: form(u, v) = u^T * components * v, and
// complex structures act on column vectors.
struct BilinearForm {
  FormKind kind;
  Mat components;

  int dim() const { return static_cast<int>(components.rows()); }

  static BilinearForm metric(Mat g, double tol = kInputTol);
  static BilinearForm symplectic(Mat omega, double tol = kInputTol);
};

struct ComplexStructure {
  Mat components;  // J with J*J = -I

  int dim() const { return static_cast<int>(components.rows()); }

  static ComplexStructure from_matrix(Mat j, double tol = kInputTol);
};

struct Violation {
  std::string what;
  double magnitude;
};

struct CompatiblePair {
  BilinearForm form;
  ComplexStructure j;
  BilinearForm derived;  // the partner form g(J.,.) or omega(.,J.)
};

// Diagnostic report: empty iff all compatibility invariants hold.
// Dimension mismatches are structural and throw instead.
std::vector<Violation> validate(const BilinearForm& form, const ComplexStructure& j);
std::vector<Violation> validate(const CompatiblePair& pair);

// metric g  ->  symplectic omega_J = g(J.,.)   (components J^T g)
// symplectic omega  ->  metric g_J = omega(.,J.)  (components omega J)
BilinearForm derive_partner(const BilinearForm& form, const ComplexStructure& j);

CompatiblePair make_compatible_pair(const BilinearForm& form, const ComplexStructure& j);

struct TangentVariation {
  ComplexStructure base;
  Mat delta;
};

// The manifold of complex structures compatible with one fixed form:
// J(V,g) when the form is a metric, J(V,omega) when it is symplectic.
class JFamily {
 public:
  explicit JFamily(BilinearForm fixed);
  static JFamily metric(Mat g);
  static JFamily symplectic(Mat omega);

  FormKind kind() const { return form_.kind; }
  const BilinearForm& form() const { return form_; }
  int dim() const { return form_.dim(); }

  std::vector<Violation> violations(const Mat& j) const;
  double compatibility_residual(const Mat& j) const;
  void require_compatible(const Mat& j, double tol = kInputTol) const;

  // Deterministic base point of the family.
  ComplexStructure canonical() const;

  // exp(A) J0 exp(-A) with A a compatible infinitesimal generator, then
  // polar-projected back onto the manifold.  Deterministic for fixed seed.
  ComplexStructure random_compatible(unsigned seed) const;

  // Polar retraction of a near-compatible matrix onto the manifold.
  ComplexStructure retract(const Mat& near_j) const;

  // Projection of an arbitrary matrix onto T_J of the family.
  Mat tangent_project(const Mat& j, const Mat& y) const;
  double tangency_residual(const Mat& j, const Mat& delta) const;
  TangentVariation tangent(const ComplexStructure& j, const Mat& delta,
                           double tol = kInputTol) const;

  // Fixed sesquilinear pairing <u,v> = u^* H v whose restriction to every
  // fibre V^{1,0}_J is Hermitian positive definite: H = g, or H = i*omega.
  CMat hermitian_pairing() const;

  // Deterministic Frobenius-orthonormal basis of T_J of the family.
  std::vector<Mat> tangent_basis(const ComplexStructure& j) const;

 private:
  BilinearForm form_;
  Mat form_inv_;
  Mat sqrt_;      // metric only: G^{1/2}
  Mat sqrt_inv_;  // metric only: G^{-1/2}
};

enum class TripleKind { Quaternionic, Paraquaternionic };

// Anticommuting generator triples: J_a J_b = -gamma_ab I + eps_ab^c J_c with
// gamma = diag(1,1,1) (quaternionic, generators J_1,J_2,J_3) or
// gamma = diag(1,-1,-1) (paraquaternionic, generators J_0,J_1,J_2).
struct StructureTriple {
  TripleKind kind;
  int dim;
  std::array<Mat, 3> generators;

  Vec3 signature() const;

  // The fixed invariant form: Euclidean metric (quaternionic) or symplectic
  // form (paraquaternionic); the form every J_xi is compatible with.
  BilinearForm invariant_form() const;
  JFamily family() const;
};

// half_dim n: dim V = 2n.  Quaternionic requires n even.  Built from block
// sums of the minimal realization; generator relations hold exactly.
StructureTriple standard_triple(TripleKind kind, int half_dim);

// max over ordered pairs (a,b) of || J_a J_b + gamma_ab I - eps_ab^c J_c ||_inf
double triple_relation_residual(const StructureTriple& t);

// J_xi = xi^a J_a for xi on the unit sphere (quaternionic) or on the upper
// hyperboloid xi^0 > 0, gamma(xi,xi) = 1 (paraquaternionic).
ComplexStructure j_xi(const StructureTriple& t, const Vec3& xi);

// sum u^a J_a without the on-manifold constraint; the differential of j_xi.
Mat j_linear(const StructureTriple& t, const Vec3& u);

// Cross product with indices raised by the triple's signature metric; the
// structure constants of the identity J_xi J_eta = -(xi.eta) I + (xi x eta)^a J_a.
Vec3 signature_cross(const StructureTriple& t, const Vec3& xi, const Vec3& eta);
double signature_dot(const StructureTriple& t, const Vec3& xi, const Vec3& eta);

}  // namespace phasebundle
