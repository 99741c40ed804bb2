#include "phasebundle/fock_spaces.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace phasebundle {

namespace {

std::vector<CMat> boson_lowering(const std::vector<MultiIndex>& basis, int modes) {
  std::map<MultiIndex, int> index;
  for (size_t i = 0; i < basis.size(); ++i) index[basis[i]] = static_cast<int>(i);
  const int d = static_cast<int>(basis.size());
  std::vector<CMat> a(modes, CMat::Zero(d, d));
  for (int col = 0; col < d; ++col) {
    for (int m = 0; m < modes; ++m) {
      if (basis[col][m] == 0) continue;
      MultiIndex target = basis[col];
      target[m] -= 1;
      a[m](index.at(target), col) = std::sqrt(static_cast<double>(basis[col][m]));
    }
  }
  return a;
}

std::vector<CMat> fermion_lowering(int modes) {
  const int d = 1 << modes;
  std::vector<CMat> b(modes, CMat::Zero(d, d));
  for (int col = 0; col < d; ++col) {
    for (int m = 0; m < modes; ++m) {
      if (((col >> m) & 1) == 0) continue;
      int row = col & ~(1 << m);
      int sign = 1;
      for (int lower_bit = 0; lower_bit < m; ++lower_bit)
        if ((col >> lower_bit) & 1) sign = -sign;
      b[m](row, col) = sign;
    }
  }
  return b;
}

void check_hermitian(const CMat& h, const char* who) {
  double scale = std::max(1.0, max_abs(h));
  if (max_abs(CMat(h - h.adjoint())) > 1e-12 * scale)
    throw NumericalError(std::string(who) + ": quantized Hamiltonian not Hermitian");
}

}  // namespace

BosonFock make_boson_fock(const Mat& omega, const ComplexStructure& j0, int truncation) {
  if (truncation < 1) throw DomainError("make_boson_fock: truncation must be >= 1");
  JFamily family = JFamily::symplectic(omega);
  family.require_compatible(j0.components);
  const int n = family.dim() / 2;
  BosonFock space{n, truncation, family, j0, standard_frame(family, j0),
                  multiindices_up_to(n, truncation), {}};
  space.lower = boson_lowering(space.basis, n);
  return space;
}

BosonFock make_boson_fock(const Mat& omega, int truncation) {
  JFamily family = JFamily::symplectic(omega);
  return make_boson_fock(omega, family.canonical(), truncation);
}

FermionFock make_fermion_fock(const Mat& metric, const ComplexStructure& j0) {
  JFamily family = JFamily::metric(metric);
  family.require_compatible(j0.components);
  const int n = family.dim() / 2;
  if (n > 16) throw DomainError("make_fermion_fock: dimension too large");
  FermionFock space{n, family, j0, standard_frame(family, j0), {}};
  space.lower = fermion_lowering(n);
  return space;
}

FermionFock make_fermion_fock(const Mat& metric) {
  JFamily family = JFamily::metric(metric);
  return make_fermion_fock(metric, family.canonical());
}

FockOperator quantize_quadratic(const BosonFock& space, const ComplexStructure& j) {
  space.family.require_compatible(j.components);
  const int n = space.modes;
  const int d = space.dim();
  const Mat gj = space.family.form().components * j.components;  // omega(. , J .)
  const CMat f = space.frame0.vectors;
  const CMat fb = f.conjugate();
  CMat a_coef = f.transpose() * gj.cast<Cplx>() * f;   // A_ik = e_i^T G_J e_k
  CMat b_coef = f.transpose() * gj.cast<Cplx>() * fb;  // B_ik = e_i^T G_J conj(e_k)

  std::map<MultiIndex, int> index;
  for (int col = 0; col < d; ++col) index[space.basis[col]] = col;

  // H = 1/2 A_ik a_i a_k + 1/2 conj(A_ik) a+_i a+_k + conj(B_ik) a+_i a_k
  //     + tr(B)/2, assembled column by column from the occupation rules
  CMat h = CMat::Zero(d, d);
  const double zero_point = 0.5 * b_coef.trace().real();
  for (int col = 0; col < d; ++col) {
    const MultiIndex& nu = space.basis[col];
    h(col, col) += zero_point;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (a_coef(i, k) != Cplx(0, 0)) {
          // a_i a_k: apply a_k first
          if (nu[k] > 0 && nu[i] - (i == k ? 1 : 0) > 0) {
            MultiIndex target = nu;
            target[k] -= 1;
            double amp = std::sqrt(static_cast<double>(nu[k]));
            amp *= std::sqrt(static_cast<double>(target[i]));
            target[i] -= 1;
            h(index.at(target), col) += 0.5 * a_coef(i, k) * amp;
          }
          // a+_i a+_k
          {
            MultiIndex target = nu;
            target[k] += 1;
            double amp = std::sqrt(static_cast<double>(target[k]));
            target[i] += 1;
            amp *= std::sqrt(static_cast<double>(target[i]));
            auto it = index.find(target);
            if (it != index.end())
              h(it->second, col) += 0.5 * std::conj(a_coef(i, k)) * amp;
          }
        }
        if (b_coef(i, k) != Cplx(0, 0) && nu[k] > 0) {
          MultiIndex target = nu;
          target[k] -= 1;
          double amp = std::sqrt(static_cast<double>(nu[k]));
          target[i] += 1;
          amp *= std::sqrt(static_cast<double>(target[i]));
          h(index.at(target), col) += std::conj(b_coef(i, k)) * amp;
        }
      }
    }
  }
  check_hermitian(h, "quantize_quadratic(boson)");
  return FockOperator{std::move(h)};
}

FockOperator quantize_quadratic(const FermionFock& space, const ComplexStructure& j) {
  space.family.require_compatible(j.components);
  const int n = space.modes;
  const int d = space.dim();
  const Mat w = j.components.transpose() * space.family.form().components;  // g(J.,.)
  const CMat f = space.frame0.vectors;
  const CMat fb = f.conjugate();
  CMat ee = f.transpose() * w.cast<Cplx>() * f;
  CMat eb = f.transpose() * w.cast<Cplx>() * fb;
  CMat be = fb.transpose() * w.cast<Cplx>() * f;
  CMat bb = fb.transpose() * w.cast<Cplx>() * fb;

  CMat h = CMat::Zero(d, d);
  const Cplx half_i(0, 0.5);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      CMat raise_i = space.lower[i].adjoint();
      CMat raise_k = space.lower[k].adjoint();
      if (ee(i, k) != Cplx(0, 0)) h += half_i * ee(i, k) * space.lower[i] * space.lower[k];
      if (eb(i, k) != Cplx(0, 0)) h += half_i * eb(i, k) * space.lower[i] * raise_k;
      if (be(i, k) != Cplx(0, 0)) h += half_i * be(i, k) * raise_i * space.lower[k];
      if (bb(i, k) != Cplx(0, 0)) h += half_i * bb(i, k) * raise_i * raise_k;
    }
  }
  check_hermitian(h, "quantize_quadratic(fermion)");
  return FockOperator{std::move(h)};
}

namespace {

struct LevelCluster {
  int first = 0;  // index into the sorted spectrum
  int count = 0;
  double energy = 0.0;
};

std::vector<LevelCluster> cluster_levels(const Vec& eigenvalues, double width) {
  std::vector<LevelCluster> clusters;
  const int d = static_cast<int>(eigenvalues.size());
  int start = 0;
  for (int i = 1; i <= d; ++i) {
    if (i == d || eigenvalues(i) - eigenvalues(i - 1) > width) {
      double mean = 0.0;
      for (int k = start; k < i; ++k) mean += eigenvalues(k);
      clusters.push_back({start, i - start, mean / (i - start)});
      start = i;
    }
  }
  return clusters;
}

CMat align_to(const CMat& prev, const CMat& cur) {
  // maximal-overlap gauge: cur * polar(cur^dagger prev)
  CMat overlap = cur.adjoint() * prev;
  Eigen::JacobiSVD<CMat> svd(overlap, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return cur * (svd.matrixU() * svd.matrixV().adjoint());
}

EigenBundleSample sample_from_hamiltonian(const CMat& h, std::vector<int> levels,
                                          const SpectralOptions& opts, int sample_index) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success)
    throw NumericalError("spectral_frames: diagonalization failed at sample " +
                         std::to_string(sample_index));
  EigenBundleSample sample;
  sample.sample_index = sample_index;
  sample.eigenvalues = es.eigenvalues();

  auto clusters = cluster_levels(sample.eigenvalues, opts.cluster_width);
  double gap_floor = opts.gap_floor;
  if (gap_floor < 0.0) {
    double spread = clusters.back().energy - clusters.front().energy;
    double mean_spacing =
        clusters.size() > 1 ? spread / static_cast<double>(clusters.size() - 1) : 1.0;
    gap_floor = 1e-6 * mean_spacing;
  }

  if (levels.empty())
    for (int l = 0; l < static_cast<int>(clusters.size()); ++l) levels.push_back(l);

  for (int level : levels) {
    if (level < 0 || level >= static_cast<int>(clusters.size()))
      throw DomainError("spectral_frames: level " + std::to_string(level) +
                        " out of range at sample " + std::to_string(sample_index));
    const auto& c = clusters[level];
    double gap = std::numeric_limits<double>::infinity();
    if (level > 0) gap = std::min(gap, c.energy - clusters[level - 1].energy);
    if (level + 1 < static_cast<int>(clusters.size()))
      gap = std::min(gap, clusters[level + 1].energy - c.energy);
    if (gap < gap_floor)
      throw NumericalError("spectral_frames: gap closure at sample " +
                           std::to_string(sample_index) + ", level " + std::to_string(level));
    sample.energy[level] = c.energy;
    sample.gap[level] = gap;
    sample.frame[level] = es.eigenvectors().middleCols(c.first, c.count);
  }
  return sample;
}

std::vector<EigenBundleSample> spectral_frames_impl(
    const std::function<CMat(const Mat&)>& hamiltonian, const ParameterPath& jpath,
    const std::vector<int>& levels, const SpectralOptions& opts, const JFamily& family) {
  validate_path(jpath, &family);
  std::vector<EigenBundleSample> samples;
  samples.reserve(jpath.size());
  for (int s = 0; s < jpath.size(); ++s) {
    EigenBundleSample sample =
        sample_from_hamiltonian(hamiltonian(jpath.jpoints[s]), levels, opts, s);
    if (!samples.empty()) {
      for (auto& [level, frame] : sample.frame) {
        const CMat& prev = samples.back().frame.at(level);
        if (prev.cols() != frame.cols())
          throw NumericalError("spectral_frames: level dimension changed at sample " +
                               std::to_string(s));
        frame = align_to(prev, frame);
      }
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace

std::vector<EigenBundleSample> spectral_frames(const BosonFock& space,
                                               const ParameterPath& jpath,
                                               const std::vector<int>& levels,
                                               const SpectralOptions& opts) {
  return spectral_frames_impl(
      [&space](const Mat& j) {
        return quantize_quadratic(space, ComplexStructure{j}).matrix;
      },
      jpath, levels, opts, space.family);
}

std::vector<EigenBundleSample> spectral_frames(const FermionFock& space,
                                               const ParameterPath& jpath,
                                               const std::vector<int>& levels,
                                               const SpectralOptions& opts) {
  return spectral_frames_impl(
      [&space](const Mat& j) {
        return quantize_quadratic(space, ComplexStructure{j}).matrix;
      },
      jpath, levels, opts, space.family);
}

EigenBundleSample diagonalize_at(const BosonFock& space, const ComplexStructure& j,
                                 const std::vector<int>& levels, const SpectralOptions& opts) {
  return sample_from_hamiltonian(quantize_quadratic(space, j).matrix, levels, opts, 0);
}

EigenBundleSample diagonalize_at(const FermionFock& space, const ComplexStructure& j,
                                 const std::vector<int>& levels, const SpectralOptions& opts) {
  return sample_from_hamiltonian(quantize_quadratic(space, j).matrix, levels, opts, 0);
}

namespace {

Cplx wilczek_zee_product(const std::vector<const CMat*>& frames, CMat& op_out) {
  // accumulate the projector sandwich, then close the loop on frame 0
  CMat accum = *frames.front();
  for (size_t s = 1; s + 1 < frames.size(); ++s) {
    const CMat& phi = *frames[s];
    accum = phi * (phi.adjoint() * accum);
  }
  CMat raw = frames.front()->adjoint() * accum;
  Eigen::JacobiSVD<CMat> svd(raw, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().minCoeff() < 1e-10)
    throw NumericalError("berry_holonomy: rank drop in the overlap product");
  op_out = svd.matrixU() * svd.matrixV().adjoint();
  Cplx det = op_out.determinant();
  return det / std::abs(det);
}

}  // namespace

HolonomyResult berry_holonomy(const std::vector<EigenBundleSample>& samples, int level) {
  if (samples.size() < 3) throw StructuralError("berry_holonomy: need a closed sample loop");
  std::vector<const CMat*> frames;
  frames.reserve(samples.size());
  for (const auto& s : samples) {
    auto it = s.frame.find(level);
    if (it == s.frame.end())
      throw StructuralError("berry_holonomy: level missing from samples");
    frames.push_back(&it->second);
  }
  // treat the final duplicate sample as the basepoint
  frames.back() = frames.front();

  HolonomyResult out;
  out.bundle = Bundle::v();  // eigenbundle of the requested level
  out.step_count = static_cast<int>(samples.size()) - 1;
  out.phase = wilczek_zee_product(frames, out.op);

  if (frames.size() > 4) {
    std::vector<const CMat*> coarse;
    for (size_t i = 0; i < frames.size(); i += 2) coarse.push_back(frames[i]);
    if (coarse.back() != frames.front()) coarse.push_back(frames.front());
    CMat op_coarse;
    Cplx phase_coarse = wilczek_zee_product(coarse, op_coarse);
    out.error_estimate = std::abs(out.phase - phase_coarse);
  }
  return out;
}

}  // namespace phasebundle
