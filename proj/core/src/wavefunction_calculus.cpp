#include "phasebundle/wavefunction_calculus.hpp"

#include <cmath>

namespace phasebundle {

int PolyGaussian::degree() const {
  int deg = 0;
  for (const auto& [alpha, c] : coeffs) {
    int total = 0;
    for (int a : alpha) total += a;
    deg = std::max(deg, total);
  }
  return deg;
}

PolyGaussian& PolyGaussian::prune(double eps) {
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    if (std::abs(it->second) <= eps)
      it = coeffs.erase(it);
    else
      ++it;
  }
  return *this;
}

Cplx PolyGaussian::evaluate(const Vec& x) const {
  if (x.size() != dim()) throw StructuralError("PolyGaussian::evaluate: dimension mismatch");
  Cplx poly(0, 0);
  for (const auto& [alpha, c] : coeffs) {
    double mono = 1.0;
    for (int mu = 0; mu < dim(); ++mu)
      for (int rep = 0; rep < alpha[mu]; ++rep) mono *= x(mu);
    poly += c * mono;
  }
  double h = 0.5 * x.dot(metric * x);  // H(x) = g(x,x)/2
  return poly * std::exp(-0.5 * h);
}

PolyGaussian vacuum_state(const Mat& metric) {
  PolyGaussian psi{metric, {}};
  psi.coeffs[MultiIndex(metric.rows(), 0)] = Cplx(1, 0);
  return psi;
}

namespace {

void require_same_metric(const PolyGaussian& a, const PolyGaussian& b, const char* who) {
  if (a.dim() != b.dim() || max_abs(Mat(a.metric - b.metric)) > 0.0)
    throw StructuralError(std::string(who) + ": metric mismatch");
}

}  // namespace

PolyGaussian poly_add(const PolyGaussian& a, const PolyGaussian& b) {
  require_same_metric(a, b, "poly_add");
  PolyGaussian out = a;
  for (const auto& [alpha, c] : b.coeffs) out.coeffs[alpha] += c;
  return out.prune();
}

PolyGaussian poly_scale(const PolyGaussian& a, Cplx s) {
  PolyGaussian out = a;
  for (auto& [alpha, c] : out.coeffs) c *= s;
  return out.prune();
}

PolyGaussian poly_mul_linear(const PolyGaussian& a, const CVec& coeff) {
  if (coeff.size() != a.dim()) throw StructuralError("poly_mul_linear: dimension mismatch");
  PolyGaussian out{a.metric, {}};
  for (const auto& [alpha, c] : a.coeffs) {
    for (int mu = 0; mu < a.dim(); ++mu) {
      if (coeff(mu) == Cplx(0, 0)) continue;
      MultiIndex beta = alpha;
      beta[mu] += 1;
      out.coeffs[beta] += c * coeff(mu);
    }
  }
  return out.prune();
}

namespace {

PolyGaussian directional_derivative_poly(const PolyGaussian& a, const CVec& u) {
  PolyGaussian out{a.metric, {}};
  for (const auto& [alpha, c] : a.coeffs) {
    for (int mu = 0; mu < a.dim(); ++mu) {
      if (alpha[mu] == 0 || u(mu) == Cplx(0, 0)) continue;
      MultiIndex beta = alpha;
      beta[mu] -= 1;
      out.coeffs[beta] += c * u(mu) * static_cast<double>(alpha[mu]);
    }
  }
  return out.prune();
}

}  // namespace

FrameCoordinates frame_coordinates(const Mat& metric, const Frame& frame) {
  const int d = static_cast<int>(metric.rows());
  const int n = d / 2;
  if (frame.vectors.rows() != d) throw StructuralError("frame_coordinates: dimension mismatch");
  CMat b(d, d);
  b.leftCols(n) = frame.vectors;
  b.rightCols(n) = frame.vectors.conjugate();
  CMat binv = b.inverse();
  FrameCoordinates out;
  out.z_rows = binv.topRows(n);
  out.zbar_rows = binv.bottomRows(n);
  out.gram = frame.vectors.transpose() * metric.cast<Cplx>() * frame.vectors.conjugate();
  return out;
}

PolyGaussian coordinate_state(const Mat& metric, const FrameCoordinates& coords,
                              const MultiIndex& alpha) {
  const int n = static_cast<int>(coords.z_rows.rows());
  if (static_cast<int>(alpha.size()) != n)
    throw StructuralError("coordinate_state: alpha has wrong length");
  PolyGaussian psi = vacuum_state(metric);
  for (int i = 0; i < n; ++i)
    for (int rep = 0; rep < alpha[i]; ++rep)
      psi = poly_mul_linear(psi, coords.z_rows.row(i).transpose());
  return psi;
}

PrequantumData prequantum(const JFamily& metric_family, const ComplexStructure& j) {
  if (metric_family.kind() != FormKind::Metric)
    throw StructuralError("prequantum: family must carry the fixed metric");
  metric_family.require_compatible(j.components);
  return PrequantumData{j, derive_partner(metric_family.form(), j)};
}

PolyGaussian covariant_derivative(const PolyGaussian& psi, const CVec& direction,
                                  const PrequantumData& pre) {
  if (direction.size() != psi.dim() || pre.omega.dim() != psi.dim())
    throw StructuralError("covariant_derivative: dimension mismatch");
  // d_u (p e^{-H/2}) = (d_u p) e^{-H/2} - p * (g(u,x)/2) e^{-H/2}
  PolyGaussian out = directional_derivative_poly(psi, direction);
  CVec gauss = -0.5 * (psi.metric.cast<Cplx>() * direction);
  out = poly_add(out, poly_mul_linear(psi, gauss));
  // theta_J(u)(x)/i = -(i/2) omega(x,u)
  CVec theta = Cplx(0, -0.5) * (pre.omega.components.cast<Cplx>() * direction);
  out = poly_add(out, poly_mul_linear(psi, theta));
  return out;
}

GaussianMoments::GaussianMoments(const Mat& metric) : metric_(metric) {
  covariance_ = metric.inverse();
  const int n = static_cast<int>(metric.rows()) / 2;
  normalization_ = std::pow(2.0 * M_PI, n) / std::sqrt(metric.determinant());
}

double GaussianMoments::moment(const MultiIndex& alpha) {
  int total = 0;
  for (int a : alpha) total += a;
  if (total == 0) return 1.0;
  if (total % 2 != 0) return 0.0;
  auto it = memo_.find(alpha);
  if (it != memo_.end()) return it->second;

  int i = 0;
  while (alpha[i] == 0) ++i;
  MultiIndex beta = alpha;
  beta[i] -= 1;
  double value = 0.0;
  for (int j = 0; j < static_cast<int>(alpha.size()); ++j) {
    if (beta[j] == 0) continue;
    MultiIndex gamma = beta;
    gamma[j] -= 1;
    value += covariance_(i, j) * beta[j] * moment(gamma);
  }
  memo_[alpha] = value;
  return value;
}

Cplx inner_product(const PolyGaussian& a, const PolyGaussian& b, GaussianMoments& table) {
  require_same_metric(a, b, "inner_product");
  if (max_abs(Mat(a.metric - table.metric())) > 0.0)
    throw StructuralError("inner_product: moment table metric mismatch");
  Cplx sum(0, 0);
  for (const auto& [alpha, ca] : a.coeffs) {
    for (const auto& [beta, cb] : b.coeffs) {
      MultiIndex gamma(alpha.size());
      for (size_t m = 0; m < alpha.size(); ++m) gamma[m] = alpha[m] + beta[m];
      sum += std::conj(ca) * cb * table.moment(gamma);
    }
  }
  return sum * table.normalization();
}

Cplx inner_product(const PolyGaussian& a, const PolyGaussian& b) {
  GaussianMoments table(a.metric);
  return inner_product(a, b, table);
}

double state_norm(const PolyGaussian& a, GaussianMoments& table) {
  return std::sqrt(std::max(0.0, inner_product(a, a, table).real()));
}

double holomorphy_residual(const PolyGaussian& psi, const PrequantumData& pre,
                           const Frame& frame, GaussianMoments& table) {
  if (max_abs(Mat(frame.base.components - pre.j.components)) > kInputTol)
    throw StructuralError("holomorphy_residual: frame does not match the prequantum J");
  double total = 0.0;
  const int n = static_cast<int>(frame.vectors.cols());
  for (int i = 0; i < n; ++i) {
    PolyGaussian d = covariant_derivative(psi, frame.vectors.col(i).conjugate(), pre);
    total += inner_product(d, d, table).real();
  }
  return total;
}

PolyGaussian transport_state(const PolyGaussian& psi, const JFamily& metric_family,
                             const Frame& frame, const Mat& delta_j) {
  const int d = psi.dim();
  const int n = d / 2;
  if (metric_family.kind() != FormKind::Metric)
    throw StructuralError("transport_state: family must carry the fixed metric");
  if (max_abs(Mat(metric_family.form().components - psi.metric)) > 0.0)
    throw StructuralError("transport_state: state metric differs from the family metric");
  if (delta_j.rows() != d) throw StructuralError("transport_state: dimension mismatch");

  FrameCoordinates coords = frame_coordinates(psi.metric, frame);
  PrequantumData pre = prequantum(metric_family, frame.base);

  // (dJ)_{ibar}^{ j}: e-components of dJ applied to the conjugate frame.
  CMat b(d, d);
  b.leftCols(n) = frame.vectors;
  b.rightCols(n) = frame.vectors.conjugate();
  CMat expanded = b.inverse() * delta_j.cast<Cplx>() * frame.vectors.conjugate();
  CMat t = expanded.topRows(n);  // t(j, ibar)

  // op_j psi = (nabla_j + g_{j kbar} zbar^k) psi, computed once per j
  std::vector<PolyGaussian> op(n, PolyGaussian{psi.metric, {}});
  for (int j = 0; j < n; ++j) {
    op[j] = covariant_derivative(psi, frame.vectors.col(j), pre);
    CVec w = coords.zbar_rows.transpose() * coords.gram.row(j).transpose();
    op[j] = poly_add(op[j], poly_mul_linear(psi, w));
  }

  PolyGaussian delta_psi{psi.metric, {}};
  for (int ibar = 0; ibar < n; ++ibar) {
    PolyGaussian combo{psi.metric, {}};
    for (int j = 0; j < n; ++j) {
      if (t(j, ibar) == Cplx(0, 0)) continue;
      combo = poly_add(combo, poly_scale(op[j], t(j, ibar)));
    }
    if (combo.coeffs.empty()) continue;
    combo = poly_mul_linear(combo, coords.zbar_rows.row(ibar).transpose());
    delta_psi = poly_add(delta_psi, poly_scale(combo, Cplx(0, -0.5)));
  }
  PolyGaussian out = poly_add(psi, delta_psi);
  // drop cancellation dust so iterated transports cannot grow the support
  double scale = 0.0;
  for (const auto& [alpha, c] : out.coeffs) scale = std::max(scale, std::abs(c));
  return out.prune(1e-14 * scale);
}

std::map<MultiIndex, Cplx> to_frame_monomials(const PolyGaussian& psi, const Frame& frame) {
  const int d = psi.dim();
  const int n = d / 2;
  CMat b(d, d);
  b.leftCols(n) = frame.vectors;
  b.rightCols(n) = frame.vectors.conjugate();

  std::map<MultiIndex, Cplx> out;
  for (const auto& [alpha, c] : psi.coeffs) {
    std::map<MultiIndex, Cplx> term;
    term[MultiIndex(d, 0)] = c;
    for (int mu = 0; mu < d; ++mu) {
      for (int rep = 0; rep < alpha[mu]; ++rep) {
        std::map<MultiIndex, Cplx> next;
        for (const auto& [g, tc] : term) {
          for (int v = 0; v < d; ++v) {
            if (b(mu, v) == Cplx(0, 0)) continue;
            MultiIndex h = g;
            h[v] += 1;
            next[h] += tc * b(mu, v);
          }
        }
        term.swap(next);
      }
    }
    for (const auto& [g, tc] : term) out[g] += tc;
  }
  for (auto it = out.begin(); it != out.end();) {
    if (std::abs(it->second) == 0.0)
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

}  // namespace phasebundle
