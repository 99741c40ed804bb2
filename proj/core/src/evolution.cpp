#include "phasebundle/evolution.hpp"

#include <cmath>

namespace phasebundle {

Schedule make_schedule(double total_time, int steps) {
  if (total_time < 0.0) throw DomainError("make_schedule: negative total time");
  if (steps < 1) throw DomainError("make_schedule: steps must be >= 1");
  Schedule s;
  s.total_time = total_time;
  s.times.resize(steps + 1);
  for (int j = 0; j <= steps; ++j) s.times[j] = total_time * j / steps;
  s.times.back() = total_time;
  return s;
}

Schedule make_schedule(const ParameterPath& path, double total_time) {
  Schedule s = make_schedule(total_time, path.size() - 1);
  s.path = path;
  return s;
}

namespace {

CMat hermitian_exp_minus_i(const CMat& k) {
  Eigen::SelfAdjointEigenSolver<CMat> es(k);
  if (es.info() != Eigen::Success) throw NumericalError("evolve: eigensolver failed");
  CVec phases(es.eigenvalues().size());
  for (int i = 0; i < phases.size(); ++i)
    phases(i) = std::polar(1.0, -es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

EvolutionResult evolve(const Schedule& schedule, const CMat& initial,
                       const HamiltonianProvider& hamiltonian,
                       const ConnectionStepProvider& connection) {
  if (schedule.steps() < 1) throw StructuralError("evolve: schedule has no steps");
  CMat psi = initial;
  Vec norms0(initial.cols());
  for (int c = 0; c < initial.cols(); ++c) norms0(c) = psi.col(c).norm();
  if ((norms0.array() == 0.0).any()) throw StructuralError("evolve: zero initial state");

  const double gauss = 0.5 / std::sqrt(3.0);
  for (int j = 0; j < schedule.steps(); ++j) {
    const double t0 = schedule.times[j];
    const double t1 = schedule.times[j + 1];
    if (connection) {
      CMat step = connection(t0, t1);
      if (step.cols() != psi.rows())
        throw StructuralError("evolve: connection step has wrong fibre dimension");
      psi = step * psi;
    }
    if (hamiltonian) {
      const double dt = t1 - t0;
      const double tm = 0.5 * (t0 + t1);
      CMat h1 = hamiltonian(tm - gauss * dt);
      CMat h2 = hamiltonian(tm + gauss * dt);
      if (h1.rows() != psi.rows())
        throw StructuralError("evolve: Hamiltonian has wrong fibre dimension");
      // 4th-order Magnus: K = dt (H1+H2)/2 + i dt^2 sqrt(3)/12 [H1, H2]
      CMat k = 0.5 * dt * (h1 + h2) +
               Cplx(0, 1) * (std::sqrt(3.0) / 12.0) * dt * dt * (h1 * h2 - h2 * h1);
      psi = hermitian_exp_minus_i(k) * psi;
    }
  }

  double defect = 0.0;
  for (int c = 0; c < psi.cols(); ++c)
    defect = std::max(defect, std::abs(psi.col(c).norm() - norms0(c)));
  if (defect > 1e-8)
    throw NumericalError("evolve: unitarity defect " + std::to_string(defect) +
                         " above bound");
  return EvolutionResult{std::move(psi), defect, schedule};
}

AdiabaticSplit adiabatic_split(const EvolutionResult& result, const CMat& target_frame,
                               const std::vector<double>& energies) {
  const auto& times = result.schedule.times;
  if (energies.size() != times.size())
    throw StructuralError("adiabatic_split: energies must align with schedule samples");
  if (target_frame.rows() != result.final_states.rows())
    throw StructuralError("adiabatic_split: frame has wrong fibre dimension");

  double action = 0.0;  // int E dt, trapezoid on the schedule grid
  for (size_t j = 0; j + 1 < times.size(); ++j)
    action += 0.5 * (energies[j] + energies[j + 1]) * (times[j + 1] - times[j]);

  AdiabaticSplit out;
  out.dynamical = std::polar(1.0, -action);

  CMat proj = target_frame.adjoint() * result.final_states;
  double total2 = result.final_states.squaredNorm();
  out.leakage = 1.0 - proj.squaredNorm() / total2;
  if (out.leakage > 0.1)
    throw AdiabaticityError("adiabatic_split: leakage " + std::to_string(out.leakage));

  Eigen::JacobiSVD<CMat> svd(proj, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.remainder_op = svd.matrixU() * svd.matrixV().adjoint();
  out.remainder_op /= out.dynamical;
  Cplx det = out.remainder_op.determinant();
  out.remainder = det / std::abs(det);
  return out;
}

}  // namespace phasebundle
