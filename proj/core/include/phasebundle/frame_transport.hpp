#pragma once

#include "phasebundle/common.hpp"
#include "phasebundle/linear_structures.hpp"
#include "phasebundle/parameter_geometry.hpp"

namespace phasebundle {

// Basis of V^{1,0}_J inside the complexified space; columns of `vectors`.
// gram(i,j) = g(e_i, conj(e_j)) for the metric attached to the family at J.
struct Frame {
  ComplexStructure base;
  CMat vectors;  // 2n x n
  CMat gram;     // n x n, Hermitian positive definite
};

// Deterministic h-orthonormal frame of V^{1,0}_J (gram = I).
Frame standard_frame(const JFamily& family, const ComplexStructure& j);

// Validates P_J e = e (1e-10) and linear independence.
Frame make_frame(const JFamily& family, const ComplexStructure& j, const CMat& vectors);

CMat holomorphic_projector(const ComplexStructure& j);  // (I - iJ)/2

// Bundles induced from the tautological bundle V = V^{1,0} and its dual.
struct Bundle {
  enum class Tag { V, VDual, Sym, Lambda, Det, SqrtDet, InvSqrtDet, Trivial };
  Tag tag = Tag::V;
  int k = 0;  // Sym / Lambda order

  static Bundle v() { return {Tag::V, 0}; }
  static Bundle v_dual() { return {Tag::VDual, 0}; }
  static Bundle sym(int k) { return {Tag::Sym, k}; }
  static Bundle lambda(int k) { return {Tag::Lambda, k}; }
  static Bundle det() { return {Tag::Det, 0}; }
  static Bundle sqrt_det() { return {Tag::SqrtDet, 0}; }
  static Bundle inv_sqrt_det() { return {Tag::InvSqrtDet, 0}; }
  static Bundle trivial() { return {Tag::Trivial, 0}; }

  std::string name() const;
  static Bundle from_name(const std::string& name, int k = 0);
};

struct TransportOptions {
  bool midpoint = false;         // second-order projection step (J_mid then J_next)
  double branch_guard = M_PI_2;  // max allowed per-step det-argument jump
};

struct TransportResult {
  Frame final_frame;
  // Final frame expressed in the one-hop reference P_{J_end} F_0; for closed
  // loops this is the V-holonomy.
  CMat transition;
  // Continuously tracked argument of the induced determinant line
  // K = Lambda^n V*; sqrt_branch = det_phase / 2.
  double det_phase = 0.0;
  double sqrt_branch = 0.0;
  double gram_drift = 0.0;
  int steps = 0;
  // per-step det_phase increments; feeds line-bundle connection providers
  std::vector<double> det_phase_increments;
};

TransportResult transport_frame(const JFamily& family, const ParameterPath& jpath,
                                const Frame& start, const TransportOptions& opts = {});

struct HolonomyResult {
  Bundle bundle;
  CMat op;     // operator on the fibre (1x1 for line bundles)
  Cplx phase;  // unit complex; det-normalized phase for higher-rank fibres
  int step_count = 0;
  double error_estimate = 0.0;
};

HolonomyResult loop_holonomy(const JFamily& family, const ParameterPath& loop,
                             const Frame& start, Bundle bundle,
                             const TransportOptions& opts = {});

// Functorial image of a V-holonomy on dual / Sym^k / Lambda^k / det fibres.
// Square roots need the transport-level branch and are rejected here.
HolonomyResult induced_holonomy(const HolonomyResult& base, Bundle target);

// log(holonomy of the parallelogram J -> J+eps A -> J+eps(A+B) -> J+eps B -> J)
// divided by eps^2; converges to minus the curvature pairing under the
// convention holonomy(boundary D) = exp(-integral F).  Line-type bundles only.
Cplx plaquette_curvature(const JFamily& family, const ComplexStructure& j,
                         const TangentVariation& a, const TangentVariation& b, double eps,
                         Bundle bundle, int substeps_per_edge = 256);

// Matrix of z_i -> sum_j s(i,j) z_j on degree-k monomials (graded-lex basis).
CMat polynomial_substitution_matrix(const CMat& s, int k);
// k-th compound (exterior power) matrix, index sets in lexicographic order.
CMat compound_matrix(const CMat& d, int k);

}  // namespace phasebundle
