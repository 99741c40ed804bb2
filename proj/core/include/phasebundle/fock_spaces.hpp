#pragma once

#include <map>

#include "phasebundle/common.hpp"
#include "phasebundle/frame_transport.hpp"
#include "phasebundle/linear_structures.hpp"
#include "phasebundle/parameter_geometry.hpp"

namespace phasebundle {

// Truncated bosonic Fock space over a fixed (V, omega) with reference
// polarisation J0; basis = occupation multi-indices with total <= truncation.
struct BosonFock {
  int modes = 0;
  int truncation = 0;
  JFamily family;  // symplectic
  ComplexStructure j0;
  Frame frame0;  // h-orthonormal ladder frame
  std::vector<MultiIndex> basis;
  std::vector<CMat> lower;  // a_i

  int dim() const { return static_cast<int>(basis.size()); }
};

BosonFock make_boson_fock(const Mat& omega, int truncation);
BosonFock make_boson_fock(const Mat& omega, const ComplexStructure& j0, int truncation);

// Exact fermionic Fock space over a fixed (V, g); basis = 2^n bit patterns.
struct FermionFock {
  int modes = 0;
  JFamily family;  // metric
  ComplexStructure j0;
  Frame frame0;
  std::vector<CMat> lower;  // b_i

  int dim() const { return 1 << modes; }
};

FermionFock make_fermion_fock(const Mat& metric);
FermionFock make_fermion_fock(const Mat& metric, const ComplexStructure& j0);

struct FockOperator {
  CMat matrix;
};

// Bosonic: Weyl-ordered quadratic x^T (omega J) x / 2 in the reference ladder
// operators; spectrum k + n/2 at J = J0.  Fermionic: (i/2) W_{mu nu}
// psi^mu psi^nu with W = J^T g; spectrum k - n/2.
FockOperator quantize_quadratic(const BosonFock& space, const ComplexStructure& j);
FockOperator quantize_quadratic(const FermionFock& space, const ComplexStructure& j);

struct EigenBundleSample {
  int sample_index = 0;
  Vec eigenvalues;  // full sorted spectrum
  std::map<int, double> energy;
  std::map<int, double> gap;
  std::map<int, CMat> frame;  // level -> D x m eigenframe, gauge-aligned
};

struct SpectralOptions {
  double gap_floor = -1.0;      // < 0: 1e-6 * mean level spacing
  double cluster_width = 0.25;  // eigenvalues closer than this share a level
};

std::vector<EigenBundleSample> spectral_frames(const BosonFock& space,
                                               const ParameterPath& jpath,
                                               const std::vector<int>& levels,
                                               const SpectralOptions& opts = {});
std::vector<EigenBundleSample> spectral_frames(const FermionFock& space,
                                               const ParameterPath& jpath,
                                               const std::vector<int>& levels,
                                               const SpectralOptions& opts = {});

// Single-point diagnostics; empty `levels` selects every level.
EigenBundleSample diagonalize_at(const BosonFock& space, const ComplexStructure& j,
                                 const std::vector<int>& levels = {},
                                 const SpectralOptions& opts = {});
EigenBundleSample diagonalize_at(const FermionFock& space, const ComplexStructure& j,
                                 const std::vector<int>& levels = {},
                                 const SpectralOptions& opts = {});

// Discrete Wilczek-Zee product of eigenframe overlaps around a closed sample
// loop, polar-unitarized at the end.
HolonomyResult berry_holonomy(const std::vector<EigenBundleSample>& samples, int level);

}  // namespace phasebundle
