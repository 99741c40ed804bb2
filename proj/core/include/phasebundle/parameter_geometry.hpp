#pragma once

#include <array>
#include <functional>

#include "phasebundle/common.hpp"
#include "phasebundle/linear_structures.hpp"

namespace phasebundle {

enum class ManifoldKind { Sphere, Hyperboloid, JSpace };

// Sampled path on S^2, H^2 (upper hyperboloid sheet in R^{1,2}, signature
// (+,-,-)) or in a space of complex structures.
struct ParameterPath {
  ManifoldKind kind;
  std::vector<Vec3> points;  // sphere / hyperboloid
  std::vector<Mat> jpoints;  // J-space
  bool closed = false;

  int size() const {
    return static_cast<int>(kind == ManifoldKind::JSpace ? jpoints.size() : points.size());
  }
};

// Checks manifold constraints (1e-10), consecutive-sample distinctness and
// first==last (1e-12) for closed paths.  J-space paths need the family.
void validate_path(const ParameterPath& path, const JFamily* family = nullptr);

double minkowski_dot(const Vec3& a, const Vec3& b);

// steps+1 samples on the great circle / hyperboloid geodesic; endpoints exact.
ParameterPath geodesic_arc(ManifoldKind kind, const Vec3& a, const Vec3& b, int steps);

// Closed polygon loop with geodesic edges.
ParameterPath polygon_loop(ManifoldKind kind, const std::vector<Vec3>& vertices,
                           int steps_per_edge);

// Circle of constant colatitude about +z, traversed counterclockwise seen
// from +z; encloses the cap of solid angle 2 pi (1 - cos colatitude).
ParameterPath spherical_cap_loop(double colatitude, int segments);

// Hyperbolic circle of radius r about (1,0,0), counterclockwise in (xi1,xi2);
// encloses area 2 pi (cosh r - 1).
ParameterPath hyperbolic_circle_loop(double radius, int segments);

// Closed loop retract(J0 + r (cos phi d1 + sin phi d2)) in the family.
ParameterPath j_circle_loop(const JFamily& family, const ComplexStructure& j0, const Mat& d1,
                            const Mat& d2, double radius, int segments);

// Signed solid angle (sphere) or signed hyperbolic area (angle defect) of the
// geodesic polygon fanned from vertex 0.  Counterclockwise loops positive.
double polygon_area(ManifoldKind kind, const std::vector<Vec3>& vertices);

// Standard area forms evaluated on ambient tangent pairs at p.
double sigma_sphere(const Vec3& p, const Vec3& u, const Vec3& v);
double sigma_hyperboloid(const Vec3& p, const Vec3& u, const Vec3& v);

// Kaehler form on the family: -(i/4) tr_{V^{1,0}}(dJ ^ dJ) evaluated on
// tangent directions A, B at J.  Throws if A or B fails tangency at 1e-10.
double kaehler_form_value(const JFamily& family, const ComplexStructure& j, const Mat& a,
                          const Mat& b);

struct SurfacePatch {
  ManifoldKind kind;
  std::vector<std::array<Vec3, 3>> triangles;
  std::vector<std::array<Mat, 3>> jtriangles;
};

// Fan triangulation (v0, vi, vi+1) of a simple polygon.
SurfacePatch fan_patch(ManifoldKind kind, const std::vector<Vec3>& vertices);
// Fan about an explicit center, e.g. a cap loop around its pole.
SurfacePatch fan_patch_about(ManifoldKind kind, const Vec3& center,
                             const std::vector<Vec3>& ring);
SurfacePatch fan_patch_about_j(const Mat& center, const std::vector<Mat>& ring);

struct QuadratureResult {
  double value;
  double error_estimate;
  int refinements;
};

using SurfaceTwoForm = std::function<double(const Vec3&, const Vec3&, const Vec3&)>;
using JTwoForm = std::function<double(const Mat&, const Mat&, const Mat&)>;

// Midpoint quadrature with uniform refinement and a Richardson error
// estimate; refines until the estimate drops below tol.
QuadratureResult integrate_two_form(const SurfacePatch& patch, const SurfaceTwoForm& form,
                                    double tol = 1e-6, int max_refine = 12);
QuadratureResult integrate_two_form_j(const JFamily& family, const SurfacePatch& patch,
                                      const JTwoForm& form, double tol = 1e-6,
                                      int max_refine = 12);

}  // namespace phasebundle
