#include "phasebundle/parameter_geometry.hpp"

#include <cmath>

namespace phasebundle {

double minkowski_dot(const Vec3& a, const Vec3& b) {
  return a(0) * b(0) - a(1) * b(1) - a(2) * b(2);
}

namespace {

double manifold_residual(ManifoldKind kind, const Vec3& p) {
  if (kind == ManifoldKind::Sphere) return std::abs(p.norm() - 1.0);
  double r = std::abs(minkowski_dot(p, p) - 1.0);
  if (p(0) <= 0.0) return 1.0;  // wrong sheet
  return r;
}

void require_on_manifold(ManifoldKind kind, const Vec3& p, const char* who) {
  if (manifold_residual(kind, p) > kInputTol)
    throw DomainError(std::string(who) + ": point off the manifold");
}

Vec3 retract_point(ManifoldKind kind, const Vec3& p) {
  if (kind == ManifoldKind::Sphere) return p / p.norm();
  return p / std::sqrt(minkowski_dot(p, p));
}

}  // namespace

void validate_path(const ParameterPath& path, const JFamily* family) {
  const int m = path.size();
  if (m < 2) throw StructuralError("path: needs at least two samples");
  if (path.kind == ManifoldKind::JSpace) {
    if (family == nullptr) throw StructuralError("path: J-space validation needs the family");
    for (const auto& j : path.jpoints)
      if (family->compatibility_residual(j) > kInputTol)
        throw DomainError("path: J-space sample off the manifold");
    for (int i = 0; i + 1 < m; ++i)
      if (max_abs(Mat(path.jpoints[i + 1] - path.jpoints[i])) == 0.0)
        throw DomainError("path: consecutive samples coincide");
    if (path.closed && max_abs(Mat(path.jpoints.front() - path.jpoints.back())) > kConstructionTol)
      throw StructuralError("path: closed flag but endpoints differ");
    return;
  }
  for (const auto& p : path.points) require_on_manifold(path.kind, p, "path");
  for (int i = 0; i + 1 < m; ++i)
    if ((path.points[i + 1] - path.points[i]).cwiseAbs().maxCoeff() == 0.0)
      throw DomainError("path: consecutive samples coincide");
  if (path.closed &&
      (path.points.front() - path.points.back()).cwiseAbs().maxCoeff() > kConstructionTol)
    throw StructuralError("path: closed flag but endpoints differ");
}

ParameterPath geodesic_arc(ManifoldKind kind, const Vec3& a, const Vec3& b, int steps) {
  if (kind == ManifoldKind::JSpace) throw StructuralError("geodesic_arc: use J-space builders");
  if (steps < 1) throw DomainError("geodesic_arc: steps must be >= 1");
  require_on_manifold(kind, a, "geodesic_arc");
  require_on_manifold(kind, b, "geodesic_arc");

  ParameterPath path{kind, {}, {}, false};
  path.points.reserve(steps + 1);
  if (kind == ManifoldKind::Sphere) {
    const double c = a.dot(b);
    const double theta = std::atan2(a.cross(b).norm(), c);
    if (theta > M_PI - 1e-9)
      throw DomainError("geodesic_arc: antipodal endpoints are ambiguous");
    if (theta < 1e-14) throw DegenerateInputError("geodesic_arc: endpoints coincide");
    const double s = std::sin(theta);
    for (int i = 0; i <= steps; ++i) {
      double t = static_cast<double>(i) / steps;
      Vec3 p = (std::sin((1.0 - t) * theta) * a + std::sin(t * theta) * b) / s;
      path.points.push_back(i == 0 ? a : (i == steps ? b : p));
    }
    return path;
  }
  const double c = minkowski_dot(a, b);
  const double s = std::acosh(std::max(1.0, c));
  if (s < 1e-14) throw DegenerateInputError("geodesic_arc: endpoints coincide");
  const double sh = std::sinh(s);
  for (int i = 0; i <= steps; ++i) {
    double t = static_cast<double>(i) / steps;
    Vec3 p = (std::sinh((1.0 - t) * s) * a + std::sinh(t * s) * b) / sh;
    path.points.push_back(i == 0 ? a : (i == steps ? b : p));
  }
  return path;
}

ParameterPath polygon_loop(ManifoldKind kind, const std::vector<Vec3>& vertices,
                           int steps_per_edge) {
  if (vertices.size() < 3) throw StructuralError("polygon_loop: needs >= 3 vertices");
  ParameterPath out{kind, {}, {}, true};
  const int m = static_cast<int>(vertices.size());
  for (int e = 0; e < m; ++e) {
    ParameterPath arc = geodesic_arc(kind, vertices[e], vertices[(e + 1) % m], steps_per_edge);
    int start = (e == 0) ? 0 : 1;  // drop duplicated joints
    out.points.insert(out.points.end(), arc.points.begin() + start, arc.points.end());
  }
  out.points.back() = out.points.front();
  return out;
}

ParameterPath spherical_cap_loop(double colatitude, int segments) {
  if (segments < 3) throw DomainError("spherical_cap_loop: segments must be >= 3");
  if (colatitude <= 0.0 || colatitude >= M_PI)
    throw DomainError("spherical_cap_loop: colatitude must be in (0, pi)");
  ParameterPath path{ManifoldKind::Sphere, {}, {}, true};
  const double s = std::sin(colatitude), c = std::cos(colatitude);
  for (int i = 0; i < segments; ++i) {
    double phi = 2.0 * M_PI * i / segments;
    path.points.emplace_back(s * std::cos(phi), s * std::sin(phi), c);
  }
  path.points.push_back(path.points.front());
  return path;
}

ParameterPath hyperbolic_circle_loop(double radius, int segments) {
  if (segments < 3) throw DomainError("hyperbolic_circle_loop: segments must be >= 3");
  if (radius <= 0.0) throw DomainError("hyperbolic_circle_loop: radius must be positive");
  ParameterPath path{ManifoldKind::Hyperboloid, {}, {}, true};
  const double ch = std::cosh(radius), sh = std::sinh(radius);
  for (int i = 0; i < segments; ++i) {
    double phi = 2.0 * M_PI * i / segments;
    path.points.emplace_back(ch, sh * std::cos(phi), sh * std::sin(phi));
  }
  path.points.push_back(path.points.front());
  return path;
}

ParameterPath j_circle_loop(const JFamily& family, const ComplexStructure& j0, const Mat& d1,
                            const Mat& d2, double radius, int segments) {
  if (segments < 3) throw DomainError("j_circle_loop: segments must be >= 3");
  if (radius <= 0.0) throw DomainError("j_circle_loop: radius must be positive");
  ParameterPath path{ManifoldKind::JSpace, {}, {}, true};
  for (int i = 0; i < segments; ++i) {
    double phi = 2.0 * M_PI * i / segments;
    Mat step = j0.components + radius * (std::cos(phi) * d1 + std::sin(phi) * d2);
    path.jpoints.push_back(family.retract(step).components);
  }
  path.jpoints.push_back(path.jpoints.front());
  return path;
}

namespace {

// Signed solid angle of a spherical triangle (Van Oosterom-Strackee).
double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  double det = a.dot(b.cross(c));
  double denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  if (std::abs(det) < 1e-14 && std::abs(denom) < 1e-14)
    throw DegenerateInputError("polygon_area: degenerate spherical triangle");
  return 2.0 * std::atan2(det, denom);
}

// Interior angle of the hyperbolic triangle at vertex a, between b and c.
double hyperbolic_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  auto tangent_to = [&a](const Vec3& target) {
    double d = std::acosh(std::max(1.0, minkowski_dot(a, target)));
    if (d < 1e-14) throw DegenerateInputError("polygon_area: coincident hyperbolic vertices");
    return Vec3(((target - std::cosh(d) * a) / std::sinh(d)).eval());
  };
  Vec3 t1 = tangent_to(b), t2 = tangent_to(c);
  double cosang = -minkowski_dot(t1, t2);  // tangents are spacelike
  return std::acos(std::clamp(cosang, -1.0, 1.0));
}

double hyperbolic_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  double defect = M_PI - hyperbolic_angle(a, b, c) - hyperbolic_angle(b, c, a) -
                  hyperbolic_angle(c, a, b);
  double orient = a.dot(b.cross(c));  // Euclidean det of hyperboloid coordinates
  if (std::abs(orient) < 1e-14)
    throw DegenerateInputError("polygon_area: degenerate hyperbolic triangle");
  return orient > 0.0 ? defect : -defect;
}

}  // namespace

double polygon_area(ManifoldKind kind, const std::vector<Vec3>& vertices) {
  if (vertices.size() < 3) throw StructuralError("polygon_area: needs >= 3 vertices");
  if (kind == ManifoldKind::JSpace) throw StructuralError("polygon_area: sphere/hyperboloid only");
  for (const auto& v : vertices) require_on_manifold(kind, v, "polygon_area");
  double total = 0.0;
  for (size_t i = 1; i + 1 < vertices.size(); ++i) {
    total += (kind == ManifoldKind::Sphere)
                 ? spherical_triangle_area(vertices[0], vertices[i], vertices[i + 1])
                 : hyperbolic_triangle_area(vertices[0], vertices[i], vertices[i + 1]);
  }
  return total;
}

double sigma_sphere(const Vec3& p, const Vec3& u, const Vec3& v) { return p.dot(u.cross(v)); }

double sigma_hyperboloid(const Vec3& p, const Vec3& u, const Vec3& v) {
  Eigen::Matrix3d m;
  m.col(0) = p;
  m.col(1) = u;
  m.col(2) = v;
  return m.determinant();
}

double kaehler_form_value(const JFamily& family, const ComplexStructure& j, const Mat& a,
                          const Mat& b) {
  if (family.tangency_residual(j.components, a) > kInputTol ||
      family.tangency_residual(j.components, b) > kInputTol)
    throw DomainError("kaehler_form_value: A or B not tangent at J");
  const int d = j.dim();
  CMat p = 0.5 * (CMat::Identity(d, d) - Cplx(0, 1) * j.components.cast<Cplx>());
  CMat comm = (a * b - b * a).cast<Cplx>();
  Cplx val = Cplx(0, -0.25) * (p * comm).trace();
  if (std::abs(val.imag()) > 1e-12 * std::max(1.0, std::abs(val.real())))
    throw NumericalError("kaehler_form_value: non-real trace");
  return val.real();
}

SurfacePatch fan_patch(ManifoldKind kind, const std::vector<Vec3>& vertices) {
  if (vertices.size() < 3) throw StructuralError("fan_patch: needs >= 3 vertices");
  SurfacePatch patch{kind, {}, {}};
  for (size_t i = 1; i + 1 < vertices.size(); ++i)
    patch.triangles.push_back({vertices[0], vertices[i], vertices[i + 1]});
  return patch;
}

SurfacePatch fan_patch_about(ManifoldKind kind, const Vec3& center,
                             const std::vector<Vec3>& ring) {
  if (ring.size() < 3) throw StructuralError("fan_patch_about: needs >= 3 ring points");
  SurfacePatch patch{kind, {}, {}};
  const size_t m = ring.size();
  bool ring_closed = (ring.front() - ring.back()).norm() == 0.0;
  const size_t last = ring_closed ? m - 1 : m;
  for (size_t i = 0; i < last; ++i)
    patch.triangles.push_back({center, ring[i], ring[(i + 1) % last]});
  return patch;
}

SurfacePatch fan_patch_about_j(const Mat& center, const std::vector<Mat>& ring) {
  if (ring.size() < 3) throw StructuralError("fan_patch_about_j: needs >= 3 ring points");
  SurfacePatch patch{ManifoldKind::JSpace, {}, {}};
  const size_t m = ring.size();
  bool ring_closed = max_abs(Mat(ring.front() - ring.back())) == 0.0;
  const size_t last = ring_closed ? m - 1 : m;
  for (size_t i = 0; i < last; ++i)
    patch.jtriangles.push_back({center, ring[i], ring[(i + 1) % last]});
  return patch;
}

namespace {

double midpoint_sum(ManifoldKind kind, const Vec3& a, const Vec3& b, const Vec3& c,
                    const SurfaceTwoForm& form, int depth) {
  if (depth == 0) {
    Vec3 mid = retract_point(kind, Vec3((a + b + c) / 3.0));
    return 0.5 * form(mid, b - a, c - a);
  }
  Vec3 ab = retract_point(kind, Vec3(0.5 * (a + b)));
  Vec3 bc = retract_point(kind, Vec3(0.5 * (b + c)));
  Vec3 ca = retract_point(kind, Vec3(0.5 * (c + a)));
  return midpoint_sum(kind, a, ab, ca, form, depth - 1) +
         midpoint_sum(kind, ab, b, bc, form, depth - 1) +
         midpoint_sum(kind, ca, bc, c, form, depth - 1) +
         midpoint_sum(kind, ab, bc, ca, form, depth - 1);
}

double midpoint_sum_j(const JFamily& family, const Mat& a, const Mat& b, const Mat& c,
                      const JTwoForm& form, int depth) {
  if (depth == 0) {
    Mat mid = family.retract(Mat((a + b + c) / 3.0)).components;
    Mat u = family.tangent_project(mid, Mat(b - a));
    Mat v = family.tangent_project(mid, Mat(c - a));
    return 0.5 * form(mid, u, v);
  }
  Mat ab = family.retract(Mat(0.5 * (a + b))).components;
  Mat bc = family.retract(Mat(0.5 * (b + c))).components;
  Mat ca = family.retract(Mat(0.5 * (c + a))).components;
  return midpoint_sum_j(family, a, ab, ca, form, depth - 1) +
         midpoint_sum_j(family, ab, b, bc, form, depth - 1) +
         midpoint_sum_j(family, ca, bc, c, form, depth - 1) +
         midpoint_sum_j(family, ab, bc, ca, form, depth - 1);
}

QuadratureResult refine_until(const std::function<double(int)>& level_sum, double tol,
                              int max_refine) {
  // midpoint sums converge at 4x per level; track the Richardson-extrapolated
  // sequence and stop when it stabilizes
  double prev = level_sum(0);
  double prev_extrap = prev;
  bool have_extrap = false;
  for (int depth = 1; depth <= max_refine; ++depth) {
    double cur = level_sum(depth);
    double extrap = cur + (cur - prev) / 3.0;
    double err = have_extrap ? std::abs(extrap - prev_extrap) : std::abs(cur - prev) / 3.0;
    if (err < tol) return QuadratureResult{extrap, err, depth};
    prev = cur;
    prev_extrap = extrap;
    have_extrap = true;
  }
  throw NumericalError("integrate_two_form: quadrature did not converge");
}

}  // namespace

QuadratureResult integrate_two_form(const SurfacePatch& patch, const SurfaceTwoForm& form,
                                    double tol, int max_refine) {
  if (patch.kind == ManifoldKind::JSpace)
    throw StructuralError("integrate_two_form: use integrate_two_form_j");
  auto level_sum = [&](int depth) {
    double s = 0.0;
    for (const auto& t : patch.triangles)
      s += midpoint_sum(patch.kind, t[0], t[1], t[2], form, depth);
    return s;
  };
  return refine_until(level_sum, tol, max_refine);
}

QuadratureResult integrate_two_form_j(const JFamily& family, const SurfacePatch& patch,
                                      const JTwoForm& form, double tol, int max_refine) {
  if (patch.kind != ManifoldKind::JSpace)
    throw StructuralError("integrate_two_form_j: patch is not in J-space");
  auto level_sum = [&](int depth) {
    double s = 0.0;
    for (const auto& t : patch.jtriangles)
      s += midpoint_sum_j(family, t[0], t[1], t[2], form, depth);
    return s;
  };
  return refine_until(level_sum, tol, max_refine);
}

}  // namespace phasebundle
