#include "phasebundle/frame_transport.hpp"

#include <cmath>
#include <map>

namespace phasebundle {

CMat holomorphic_projector(const ComplexStructure& j) {
  const int d = j.dim();
  return 0.5 * (CMat::Identity(d, d) - Cplx(0, 1) * j.components.cast<Cplx>());
}

namespace {

CMat frame_gram(const JFamily& family, const CMat& vectors) {
  // gram(i,j) = g(e_i, conj(e_j)) = (F^* H F)^T with the family pairing H
  CMat h = family.hermitian_pairing();
  return (vectors.adjoint() * h * vectors).transpose();
}

}  // namespace

Frame standard_frame(const JFamily& family, const ComplexStructure& j) {
  family.require_compatible(j.components);
  const int d = j.dim();
  const int n = d / 2;
  CMat p = holomorphic_projector(j);
  Eigen::ColPivHouseholderQR<CMat> qr(p);
  auto perm = qr.colsPermutation().indices();

  CMat h = family.hermitian_pairing();
  CMat frame(d, n);
  int filled = 0;
  for (int c = 0; c < d && filled < n; ++c) {
    CVec v = p.col(perm(c));
    // h-modified Gram-Schmidt
    for (int m = 0; m < filled; ++m) {
      Cplx coeff = (frame.col(m).adjoint() * h * v)(0, 0);
      v -= coeff * frame.col(m);
    }
    double norm2 = std::real((v.adjoint() * h * v)(0, 0));
    if (norm2 < 1e-20) continue;
    frame.col(filled++) = v / std::sqrt(norm2);
  }
  if (filled != n) throw NumericalError("standard_frame: projector rank deficient");
  return Frame{j, frame, frame_gram(family, frame)};
}

Frame make_frame(const JFamily& family, const ComplexStructure& j, const CMat& vectors) {
  const int d = j.dim();
  const int n = d / 2;
  if (vectors.rows() != d || vectors.cols() != n)
    throw StructuralError("make_frame: expected a 2n x n matrix of column vectors");
  CMat p = holomorphic_projector(j);
  if (max_abs(CMat(p * vectors - vectors)) > kInputTol)
    throw DomainError("make_frame: columns are not holomorphic for J");
  CMat gram = frame_gram(family, vectors);
  if (std::abs(gram.determinant()) < 1e-14)
    throw DomainError("make_frame: columns are not linearly independent");
  return Frame{j, vectors, gram};
}

std::string Bundle::name() const {
  switch (tag) {
    case Tag::V: return "V";
    case Tag::VDual: return "V_dual";
    case Tag::Sym: return "sym" + std::to_string(k);
    case Tag::Lambda: return "lambda" + std::to_string(k);
    case Tag::Det: return "det";
    case Tag::SqrtDet: return "sqrt_det";
    case Tag::InvSqrtDet: return "inv_sqrt_det";
    case Tag::Trivial: return "trivial";
  }
  return "?";
}

Bundle Bundle::from_name(const std::string& name, int k) {
  if (name == "V") return v();
  if (name == "V_dual") return v_dual();
  if (name == "sym") return sym(k);
  if (name == "lambda") return lambda(k);
  if (name == "det") return det();
  if (name == "sqrt_det") return sqrt_det();
  if (name == "inv_sqrt_det") return inv_sqrt_det();
  if (name == "trivial") return trivial();
  if (name.rfind("sym", 0) == 0) return sym(std::stoi(name.substr(3)));
  if (name.rfind("lambda", 0) == 0) return lambda(std::stoi(name.substr(6)));
  throw DomainError("Bundle: unknown tag '" + name + "'");
}

TransportResult transport_frame(const JFamily& family, const ParameterPath& jpath,
                                const Frame& start, const TransportOptions& opts) {
  if (jpath.kind != ManifoldKind::JSpace)
    throw StructuralError("transport_frame: path must be in J-space");
  validate_path(jpath, &family);
  const int count = jpath.size();
  if (max_abs(Mat(start.base.components - jpath.jpoints.front())) > kInputTol)
    throw StructuralError("transport_frame: start frame not based at the first sample");

  const CMat f0 = start.vectors;
  CMat f = f0;
  CMat h = family.hermitian_pairing();
  CMat gram0 = (f0.adjoint() * h * f0).eval();

  auto reference_coords = [&](const Mat& j, const CMat& frame) -> CMat {
    CMat r = holomorphic_projector(ComplexStructure{j}) * f0;
    Eigen::ColPivHouseholderQR<CMat> qr(r);
    if (qr.rank() < r.cols())
      throw NumericalError("transport_frame: reference frame degenerate; path leaves the chart");
    return qr.solve(frame);
  };

  double theta = std::arg(reference_coords(jpath.jpoints.front(), f).determinant());
  Cplx prev_det = reference_coords(jpath.jpoints.front(), f).determinant();
  double drift = 0.0;
  std::vector<double> increments;
  increments.reserve(count - 1);

  for (int k = 1; k < count; ++k) {
    const Mat& jn = jpath.jpoints[k];
    if (opts.midpoint) {
      Mat jm = family.retract(Mat(0.5 * (jpath.jpoints[k - 1] + jn))).components;
      f = holomorphic_projector(ComplexStructure{jm}) * f;
    }
    f = holomorphic_projector(ComplexStructure{jn}) * f;

    CMat coords = reference_coords(jn, f);
    Cplx d = coords.determinant();
    if (d == Cplx(0, 0)) throw NumericalError("transport_frame: transported frame degenerate");
    double inc = std::arg(d / prev_det);
    if (std::abs(inc) >= opts.branch_guard)
      throw NumericalError("transport_frame: branch guard tripped; refine the path");
    theta += inc;
    prev_det = d;
    increments.push_back(-inc);  // det line runs opposite to Lambda^n V

    drift = std::max(drift, max_abs(CMat(f.adjoint() * h * f - gram0)));
  }

  TransportResult out;
  out.final_frame = Frame{ComplexStructure{jpath.jpoints.back()}, f,
                          (f.adjoint() * h * f).transpose().eval()};
  out.transition = reference_coords(jpath.jpoints.back(), f);
  // K = Lambda^n V* accumulates the opposite argument of Lambda^n V.
  out.det_phase = -theta;
  out.sqrt_branch = out.det_phase / 2.0;
  out.gram_drift = drift;
  out.steps = count - 1;
  out.det_phase_increments = std::move(increments);
  return out;
}

namespace {

ParameterPath subsample_closed(const ParameterPath& loop) {
  ParameterPath half{ManifoldKind::JSpace, {}, {}, true};
  const int count = loop.size();
  for (int i = 0; i < count; i += 2) half.jpoints.push_back(loop.jpoints[i]);
  if (max_abs(Mat(half.jpoints.back() - loop.jpoints.back())) != 0.0)
    half.jpoints.push_back(loop.jpoints.back());
  return half;
}

HolonomyResult bundle_result(const TransportResult& t, Bundle bundle, int n) {
  HolonomyResult out;
  out.bundle = bundle;
  out.step_count = t.steps;
  using Tag = Bundle::Tag;
  switch (bundle.tag) {
    case Tag::V:
      out.op = t.transition;
      break;
    case Tag::VDual:
      out.op = t.transition.inverse().transpose();
      break;
    case Tag::Sym:
      if (bundle.k < 0) throw DomainError("loop_holonomy: sym order must be >= 0");
      out.op = polynomial_substitution_matrix(t.transition.inverse(), bundle.k);
      break;
    case Tag::Lambda:
      if (bundle.k < 0 || bundle.k > n)
        throw DomainError("loop_holonomy: lambda order out of range");
      out.op = compound_matrix(CMat(t.transition.inverse().transpose()), bundle.k);
      break;
    case Tag::Det:
      out.op = CMat::Constant(1, 1, std::polar(1.0, t.det_phase));
      break;
    case Tag::SqrtDet:
      out.op = CMat::Constant(1, 1, std::polar(1.0, t.sqrt_branch));
      break;
    case Tag::InvSqrtDet:
      out.op = CMat::Constant(1, 1, std::polar(1.0, -t.sqrt_branch));
      break;
    case Tag::Trivial:
      out.op = CMat::Constant(1, 1, Cplx(1, 0));
      break;
  }
  Cplx det = out.op.determinant();
  out.phase = (std::abs(det) == 0.0) ? Cplx(0, 0) : det / std::abs(det);
  return out;
}

}  // namespace

HolonomyResult loop_holonomy(const JFamily& family, const ParameterPath& loop,
                             const Frame& start, Bundle bundle, const TransportOptions& opts) {
  if (!loop.closed) throw StructuralError("loop_holonomy: path is not closed");
  const int n = family.dim() / 2;
  TransportResult fine = transport_frame(family, loop, start, opts);
  HolonomyResult out = bundle_result(fine, bundle, n);

  if (loop.size() > 4) {
    TransportResult coarse = transport_frame(family, subsample_closed(loop), start, opts);
    HolonomyResult ref = bundle_result(coarse, bundle, n);
    out.error_estimate =
        std::max(std::abs(out.phase - ref.phase),
                 (out.op.rows() == ref.op.rows()) ? max_abs(CMat(out.op - ref.op)) : 0.0);
  }
  return out;
}

HolonomyResult induced_holonomy(const HolonomyResult& base, Bundle target) {
  if (base.bundle.tag != Bundle::Tag::V)
    throw StructuralError("induced_holonomy: base must be a V-holonomy");
  const int n = static_cast<int>(base.op.rows());
  using Tag = Bundle::Tag;
  HolonomyResult out;
  out.bundle = target;
  out.step_count = base.step_count;
  out.error_estimate = base.error_estimate;
  switch (target.tag) {
    case Tag::V:
      out.op = base.op;
      break;
    case Tag::VDual:
      out.op = base.op.inverse().transpose();
      break;
    case Tag::Sym:
      if (target.k < 0) throw DomainError("induced_holonomy: k must be >= 0");
      out.op = polynomial_substitution_matrix(base.op.inverse(), target.k);
      break;
    case Tag::Lambda:
      if (target.k < 0 || target.k > n)
        throw DomainError("induced_holonomy: lambda order out of range");
      out.op = compound_matrix(CMat(base.op.inverse().transpose()), target.k);
      break;
    case Tag::Det:
      out.op = compound_matrix(CMat(base.op.inverse().transpose()), n);
      break;
    case Tag::Trivial:
      out.op = CMat::Constant(1, 1, Cplx(1, 0));
      break;
    case Tag::SqrtDet:
    case Tag::InvSqrtDet:
      throw DomainError("induced_holonomy: square roots need transport-level branch tracking");
  }
  Cplx det = out.op.determinant();
  out.phase = (std::abs(det) == 0.0) ? Cplx(0, 0) : det / std::abs(det);
  return out;
}

Cplx plaquette_curvature(const JFamily& family, const ComplexStructure& j,
                         const TangentVariation& a, const TangentVariation& b, double eps,
                         Bundle bundle, int substeps_per_edge) {
  using Tag = Bundle::Tag;
  const int n = family.dim() / 2;
  const bool line = bundle.tag == Tag::Det || bundle.tag == Tag::SqrtDet ||
                    bundle.tag == Tag::InvSqrtDet || bundle.tag == Tag::Trivial ||
                    (bundle.tag == Tag::Lambda && bundle.k == n) || n == 1;
  if (!line) throw DomainError("plaquette_curvature: line-type bundles only");
  if (family.tangency_residual(j.components, a.delta) > kInputTol ||
      family.tangency_residual(j.components, b.delta) > kInputTol)
    throw DomainError("plaquette_curvature: A or B not tangent at J");

  auto estimate = [&](double e) {
    std::array<Mat, 4> corners = {
        j.components, family.retract(Mat(j.components + e * a.delta)).components,
        family.retract(Mat(j.components + e * (a.delta + b.delta))).components,
        family.retract(Mat(j.components + e * b.delta)).components};
    ParameterPath loop{ManifoldKind::JSpace, {}, {}, true};
    for (int edge = 0; edge < 4; ++edge) {
      const Mat& p = corners[edge];
      const Mat& q = corners[(edge + 1) % 4];
      int start = (edge == 0) ? 0 : 1;
      for (int i = start; i <= substeps_per_edge; ++i) {
        double t = static_cast<double>(i) / substeps_per_edge;
        loop.jpoints.push_back(family.retract(Mat((1.0 - t) * p + t * q)).components);
      }
    }
    loop.jpoints.back() = loop.jpoints.front();
    TransportOptions opts;
    opts.midpoint = true;
    HolonomyResult hol =
        loop_holonomy(family, loop, standard_frame(family, j), bundle, opts);
    return Cplx(std::log(std::abs(hol.phase)), std::arg(hol.phase)) / (e * e);
  };

  Cplx full = estimate(eps);
  Cplx half = estimate(0.5 * eps);
  double scale = std::max({std::abs(full), std::abs(half), 1e-8});
  if (std::abs(full - half) > 0.25 * scale && std::abs(full - half) > 1e-8)
    throw NumericalError("plaquette_curvature: estimates do not converge");
  return half;
}

CMat polynomial_substitution_matrix(const CMat& s, int k) {
  const int n = static_cast<int>(s.rows());
  if (s.cols() != n) throw StructuralError("polynomial_substitution_matrix: square input");
  if (k < 0) throw DomainError("polynomial_substitution_matrix: k must be >= 0");
  auto basis = multiindices_of_degree(n, k);
  std::map<MultiIndex, int> index;
  for (size_t i = 0; i < basis.size(); ++i) index[basis[i]] = static_cast<int>(i);

  CMat out = CMat::Zero(basis.size(), basis.size());
  for (size_t col = 0; col < basis.size(); ++col) {
    std::map<MultiIndex, Cplx> poly;
    poly[MultiIndex(n, 0)] = Cplx(1, 0);
    for (int var = 0; var < n; ++var) {
      for (int rep = 0; rep < basis[col][var]; ++rep) {
        std::map<MultiIndex, Cplx> next;
        for (const auto& [alpha, coeff] : poly) {
          for (int jv = 0; jv < n; ++jv) {
            if (s(var, jv) == Cplx(0, 0)) continue;
            MultiIndex beta = alpha;
            beta[jv] += 1;
            next[beta] += coeff * s(var, jv);
          }
        }
        poly.swap(next);
      }
    }
    for (const auto& [beta, coeff] : poly) out(index.at(beta), col) = coeff;
  }
  return out;
}

namespace {

void subsets_rec(int n, int k, int start, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets_rec(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

CMat compound_matrix(const CMat& d, int k) {
  const int n = static_cast<int>(d.rows());
  if (d.cols() != n) throw StructuralError("compound_matrix: square input");
  if (k < 0 || k > n) throw DomainError("compound_matrix: k out of range");
  if (k == 0) return CMat::Constant(1, 1, Cplx(1, 0));
  std::vector<MultiIndex> subsets;
  MultiIndex cur;
  subsets_rec(n, k, 0, cur, subsets);
  CMat out(subsets.size(), subsets.size());
  for (size_t r = 0; r < subsets.size(); ++r) {
    for (size_t c = 0; c < subsets.size(); ++c) {
      CMat minor(k, k);
      for (int i = 0; i < k; ++i)
        for (int jv = 0; jv < k; ++jv) minor(i, jv) = d(subsets[r][i], subsets[c][jv]);
      out(r, c) = minor.determinant();
    }
  }
  return out;
}

}  // namespace phasebundle
