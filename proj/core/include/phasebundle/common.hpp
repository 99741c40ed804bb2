#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasebundle {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Vec3 = Eigen::Vector3d;
using Cplx = std::complex<double>;

inline constexpr double kInputTol = 1e-10;        // tolerance for user-supplied data
inline constexpr double kConstructionTol = 1e-12; // tolerance for exact algebraic constructions

// Error taxonomy; the CLI maps these onto exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Malformed or mismatched inputs (wrong dimensions, open path where a loop is needed).
struct StructuralError : Error {
  using Error::Error;
};
// Inputs outside the operation's mathematical domain (off-manifold points, bad k).
struct DomainError : Error {
  using Error::Error;
};
// A (form, J) pair that fails the compatibility conditions.
struct CompatibilityError : Error {
  using Error::Error;
};
// Numerical breakdown: gap closure, branch guard, non-convergence.
struct NumericalError : Error {
  using Error::Error;
};
struct DegenerateInputError : Error {
  using Error::Error;
};
struct AdiabaticityError : Error {
  using Error::Error;
};

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

// Multi-indices over `n` variables, shared by the symmetric-power functor,
// the polynomial wavefunctions and the bosonic Fock basis.  Both enumerations
// are deterministic (graded lexicographic).
using MultiIndex = std::vector<int>;

std::vector<MultiIndex> multiindices_of_degree(int n, int degree);
std::vector<MultiIndex> multiindices_up_to(int n, int max_total);

long binomial(int n, int k);

}  // namespace phasebundle
