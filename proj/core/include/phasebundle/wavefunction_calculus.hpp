#pragma once

#include <map>

#include "phasebundle/common.hpp"
#include "phasebundle/frame_transport.hpp"
#include "phasebundle/linear_structures.hpp"

namespace phasebundle {

// psi(x) = sum_alpha c_alpha x^alpha * exp(-H(x)/2) with H = g(x,x)/2.
// Coefficients live over monomials in the 2n real coordinates; the metric is
// fixed (the varying objects are J and the frame, never the Gaussian).
struct PolyGaussian {
  Mat metric;
  std::map<MultiIndex, Cplx> coeffs;

  int dim() const { return static_cast<int>(metric.rows()); }
  int degree() const;
  PolyGaussian& prune(double eps = 0.0);
  Cplx evaluate(const Vec& x) const;
};

PolyGaussian vacuum_state(const Mat& metric);
PolyGaussian poly_add(const PolyGaussian& a, const PolyGaussian& b);
PolyGaussian poly_scale(const PolyGaussian& a, Cplx s);
// multiply by the degree-one polynomial (coeff . x)
PolyGaussian poly_mul_linear(const PolyGaussian& a, const CVec& coeff);

// Holomorphic coordinate functionals z^i(x) attached to a frame, plus the
// gram data used for index raising.  z_rows is n x 2n with z^i = z_rows.row(i) x.
struct FrameCoordinates {
  CMat z_rows;
  CMat zbar_rows;
  CMat gram;  // g(e_i, conj e_j)
};
FrameCoordinates frame_coordinates(const Mat& metric, const Frame& frame);

// z^alpha * vacuum
PolyGaussian coordinate_state(const Mat& metric, const FrameCoordinates& coords,
                              const MultiIndex& alpha);

struct PrequantumData {
  ComplexStructure j;
  BilinearForm omega;  // omega_J = g(J.,.); theta_J(u)(x) = omega(x,u)/2
};
PrequantumData prequantum(const JFamily& metric_family, const ComplexStructure& j);

// nabla_u psi = d_u psi + (theta_J(u)/i) psi, closed on the PolyGaussian class.
PolyGaussian covariant_derivative(const PolyGaussian& psi, const CVec& direction,
                                  const PrequantumData& pre);

// Exact moments of the Gaussian weight exp(-g(x,x)/2): covariance g^{-1},
// Isserlis recursion with memoisation.
class GaussianMoments {
 public:
  explicit GaussianMoments(const Mat& metric);
  double moment(const MultiIndex& alpha);
  double normalization() const { return normalization_; }
  const Mat& metric() const { return metric_; }

 private:
  Mat metric_;
  Mat covariance_;
  double normalization_;  // (2 pi)^n det(g)^{-1/2}
  std::map<MultiIndex, double> memo_;
};

Cplx inner_product(const PolyGaussian& a, const PolyGaussian& b, GaussianMoments& table);
Cplx inner_product(const PolyGaussian& a, const PolyGaussian& b);
double state_norm(const PolyGaussian& a, GaussianMoments& table);

// sum_i || nabla_{conj e_i} psi ||^2; zero iff psi is holomorphic for the
// frame's J within the polynomial class.
double holomorphy_residual(const PolyGaussian& psi, const PrequantumData& pre,
                           const Frame& frame, GaussianMoments& table);

// psi + delta psi for an infinitesimal deformation delta_j of J in J(V,g):
// delta psi = -(i/2) (dJ)_{ibar}^{ j} zbar^{ibar} (nabla_j + g_{j kbar} zbar^{kbar}) psi
PolyGaussian transport_state(const PolyGaussian& psi, const JFamily& metric_family,
                             const Frame& frame, const Mat& delta_j);

// Expand the polynomial part in frame coordinates; keys are multi-indices over
// (z_1..z_n, zbar_1..zbar_n).
std::map<MultiIndex, Cplx> to_frame_monomials(const PolyGaussian& psi, const Frame& frame);

}  // namespace phasebundle
