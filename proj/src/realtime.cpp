#include "wickbench/realtime.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "wickbench/errors.hpp"

namespace wickbench {

namespace {

struct Eigensystem {
  Eigen::VectorXd values;
  Matrix vectors;

  explicit Eigensystem(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
    if (solver.info() != Eigen::Success) throw EigenFailure("propagate: eigensolver failed");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  Matrix to_eigenbasis(const Matrix& op) const { return vectors.adjoint() * op * vectors; }
  Matrix from_eigenbasis(const Matrix& op) const { return vectors * op * vectors.adjoint(); }

  // e^{i H t} O e^{-i H t} elementwise in the eigenbasis
  Matrix heisenberg(const Matrix& op_eig, double t) const {
    Matrix out(op_eig.rows(), op_eig.cols());
    for (Eigen::Index j = 0; j < op_eig.cols(); ++j)
      for (Eigen::Index i = 0; i < op_eig.rows(); ++i) {
        const double phase = t * (values(i) - values(j));
        out(i, j) = Complex(std::cos(phase), std::sin(phase)) * op_eig(i, j);
      }
    return out;
  }

  // diag(e^{-i E t}) as a vector
  Eigen::VectorXcd phase(double t) const {
    Eigen::VectorXcd out(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i)
      out(i) = Complex(std::cos(values(i) * t), -std::sin(values(i) * t));
    return out;
  }
};

Matrix hermitian_exp_minus_i(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  if (solver.info() != Eigen::Success) throw EigenFailure("propagate: step eigensolver failed");
  Eigen::VectorXcd ph(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < ph.size(); ++i)
    ph(i) = Complex(std::cos(solver.eigenvalues()(i)), -std::sin(solver.eigenvalues()(i)));
  return solver.eigenvectors() * ph.asDiagonal() * solver.eigenvectors().adjoint();
}

Matrix polar_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double drive_value(const DrivenHamiltonian& driven, const PropagationControls& controls,
                   const PeriodizedSwitch* periodized, double t) {
  if (controls.source == SwitchSource::periodized) {
    if (!periodized) throw std::invalid_argument("propagate: periodized source without coefficients");
    return eval_periodized(*periodized, std::complex<double>(std::min(t, 0.0), 0.0)).real();
  }
  return eval_switch(driven.switch_spec, driven.eta * std::min(t, 0.0));
}

}  // namespace

FockOperator propagate(const FockBasis& basis, const DrivenHamiltonian& driven,
                       const PropagationControls& controls, const PeriodizedSwitch* periodized) {
  validate(basis, driven);
  if (controls.t_start > controls.t_end)
    throw std::invalid_argument("propagate: t_start must be <= t_end");
  const Eigensystem h(driven.base.matrix);
  const Matrix p_eig = h.to_eigenbasis(driven.perturbation.matrix);
  const double h_norm =
      std::max(std::abs(h.values(0)), std::abs(h.values(h.values.size() - 1)));
  const double step =
      controls.step > 0.0 ? controls.step : std::min(0.05, 0.05 / std::max(1.0, h_norm));
  const Eigen::Index dim = basis.dimension;
  Matrix u_int = Matrix::Identity(dim, dim);  // interaction picture
  const double span = controls.t_end - controls.t_start;
  const long steps = std::max(1L, static_cast<long>(std::ceil(span / step)));
  const double dt = span / static_cast<double>(steps);
  // commutator-free 4th order with Gauss nodes
  const double node_lo = 0.5 - std::sqrt(3.0) / 6.0;
  const double node_hi = 0.5 + std::sqrt(3.0) / 6.0;
  const double x1 = 0.25 - std::sqrt(3.0) / 6.0;
  const double x2 = 0.25 + std::sqrt(3.0) / 6.0;
  for (long k = 0; k < steps; ++k) {
    const double t0 = controls.t_start + k * dt;
    const double ta = t0 + node_lo * dt;
    const double tb = t0 + node_hi * dt;
    const double fa = driven.epsilon * drive_value(driven, controls, periodized, ta);
    const double fb = driven.epsilon * drive_value(driven, controls, periodized, tb);
    if (fa == 0.0 && fb == 0.0) continue;
    const Matrix ba = fa * h.heisenberg(p_eig, ta);
    const Matrix bb = fb * h.heisenberg(p_eig, tb);
    // rightmost factor acts first and overweights the early node
    u_int = hermitian_exp_minus_i(dt * (x1 * ba + x2 * bb)) *
            hermitian_exp_minus_i(dt * (x2 * ba + x1 * bb)) * u_int;
    if (controls.reunitarize_every > 0 && (k + 1) % controls.reunitarize_every == 0)
      u_int = polar_unitary(u_int);
  }
  // U(t; s) = e^{-i H t} U_I(t; s) e^{i H s}
  Matrix u = h.phase(controls.t_end).asDiagonal() * u_int *
             h.phase(-controls.t_start).asDiagonal();
  FockOperator out;
  out.matrix = h.from_eigenbasis(u);
  out.support = merge_support(driven.base.support, driven.perturbation.support);
  out.gauge_invariant = driven.base.gauge_invariant && driven.perturbation.gauge_invariant;
  const double unitarity =
      (out.matrix.adjoint() * out.matrix - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (unitarity > controls.unitarity_tolerance)
    throw UnitarityLost("propagate: unitarity defect " + std::to_string(unitarity));
  return out;
}

void EvolvedState::validate(double tol) const {
  if (trace_error > tol) throw EigenFailure("EvolvedState: trace deviates from 1");
  if (hermiticity_error > tol) throw EigenFailure("EvolvedState: state not Hermitian");
  if (min_eigenvalue < -tol) throw EigenFailure("EvolvedState: negative eigenvalue");
}

EvolvedState evolve_gibbs(const FockBasis& basis, const DrivenHamiltonian& driven,
                          const GibbsEnsemble& ens, double t, PropagationControls controls,
                          const PeriodizedSwitch* periodized) {
  controls.t_end = t;
  const FockOperator u = propagate(basis, driven, controls, periodized);
  EvolvedState state;
  state.rho = u.matrix * ens.density_matrix() * u.matrix.adjoint();
  state.trace_error = std::abs(state.rho.trace() - Complex(1.0));
  state.hermiticity_error = (state.rho - state.rho.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(state.rho, Eigen::EigenvaluesOnly);
  state.min_eigenvalue = solver.eigenvalues().minCoeff();
  state.provenance = "evolve_gibbs t_start=" + std::to_string(controls.t_start) +
                     " step=" + std::to_string(controls.step) +
                     (controls.source == SwitchSource::periodized ? " source=periodized"
                                                              : " source=true");
  return state;
}

Complex duhamel_coefficient_real(const GibbsEnsemble& ens, const FockOperator& perturbation,
                                 const FockOperator& observable, int n, double t, double t_cutoff,
                                 const DrivenHamiltonian& driven, const QuadControls& controls,
                                 SwitchSource source, const PeriodizedSwitch* periodized) {
  if (n < 1 || n > 3)
    throw CumulantOrderExceeded("duhamel_coefficient_real: n must be in 1..3");
  if (!perturbation.gauge_invariant || !observable.gauge_invariant)
    throw OddOperatorUnsupported("duhamel_coefficient_real: operators must be gauge invariant");
  const auto f = [&](double s) {
    if (source == SwitchSource::periodized) {
      if (!periodized)
        throw std::invalid_argument("duhamel_coefficient_real: missing periodized switch");
      return eval_periodized(*periodized, std::complex<double>(s, 0.0)).real();
    }
    return eval_switch(driven.switch_spec, driven.eta * s);
  };
  const Eigen::Index dim = ens.basis().dimension;
  const Matrix p_eig = ens.to_eigenbasis(perturbation.matrix);
  const Matrix q_t = ens.heisenberg_eig(ens.to_eigenbasis(observable.matrix), t);
  const double panel =
      (controls.panel_width > 0.0 ? controls.panel_width
                                  : std::min(0.5, 1.0 / std::max(1.0, ens.spectral_spread()))) /
      controls.refine;
  const PanelGrid outer = composite_grid(-t_cutoff, t, panel, controls.points_per_panel);
  const std::size_t n_nodes = outer.nodes.size();
  if (n == 1) {
    // <[tau_t(O), tau_s(P)]> = tr([rho, Q] tau_s(P)) with [rho, Q]_ij = (w_i - w_j) Q_ij
    Matrix r(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
      for (Eigen::Index i = 0; i < dim; ++i)
        r(i, j) = (ens.weights()(i) - ens.weights()(j)) * q_t(i, j);
    Complex acc = 0.0;
    for (std::size_t a = 0; a < n_nodes; ++a) {
      const Matrix ps = ens.heisenberg_eig(p_eig, outer.nodes[a]);
      acc += outer.weights[a] * f(outer.nodes[a]) * (r * ps).trace();
    }
    return acc;
  }
  if (n_nodes * n_nodes > controls.max_evaluations)
    throw QuadratureBudgetExceeded("duhamel_coefficient_real: node budget exceeded");
  if (n == 2) {
    // prefix integrals M(s1) = int_{-T}^{s1} f(s2) tau_{s2}(P) ds2 accumulate
    // node by node; the integrand is f(s1) tr([rho, [Q, tau_{s1}(P)]] M(s1))
    Matrix prefix = Matrix::Zero(dim, dim);
    Complex acc = 0.0;
    const QuadRule rule = gauss_legendre(controls.points_per_panel);
    double segment_start = -t_cutoff;
    for (std::size_t a = 0; a < n_nodes; ++a) {
      const double s1 = outer.nodes[a];
      // extend the prefix over [segment_start, s1] with a small dedicated rule
      Matrix partial = Matrix::Zero(dim, dim);
      const double width = s1 - segment_start;
      if (width > 0) {
        for (int k = 0; k < controls.points_per_panel; ++k) {
          const double s2 = segment_start + 0.5 * width * (1.0 + rule.nodes[static_cast<std::size_t>(k)]);
          partial += 0.5 * width * rule.weights[static_cast<std::size_t>(k)] * f(s2) *
                     ens.heisenberg_eig(p_eig, s2);
        }
      }
      prefix += partial;
      segment_start = s1;
      const Matrix p1 = ens.heisenberg_eig(p_eig, s1);
      const Matrix inner_comm = q_t * p1 - p1 * q_t;
      Matrix r(dim, dim);
      for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i)
          r(i, j) = (ens.weights()(i) - ens.weights()(j)) * inner_comm(i, j);
      acc += outer.weights[a] * f(s1) * (r * prefix).trace();
    }
    return acc;
  }
  // n == 3: pair loop over (s1, s2 <= s1) with a prefix in s3
  Complex acc = 0.0;
  const QuadRule rule = gauss_legendre(controls.points_per_panel);
  Matrix prefix3 = Matrix::Zero(dim, dim);
  double segment_start = -t_cutoff;
  std::vector<Matrix> p_cache(n_nodes);
  for (std::size_t a = 0; a < n_nodes; ++a) p_cache[a] = ens.heisenberg_eig(p_eig, outer.nodes[a]);
  for (std::size_t b = 0; b < n_nodes; ++b) {
    const double s2 = outer.nodes[b];
    Matrix partial = Matrix::Zero(dim, dim);
    const double width = s2 - segment_start;
    if (width > 0) {
      for (int k = 0; k < controls.points_per_panel; ++k) {
        const double s3 = segment_start + 0.5 * width * (1.0 + rule.nodes[static_cast<std::size_t>(k)]);
        partial += 0.5 * width * rule.weights[static_cast<std::size_t>(k)] * f(s3) *
                   ens.heisenberg_eig(p_eig, s3);
      }
    }
    prefix3 += partial;
    segment_start = s2;
    const Matrix& p2 = p_cache[b];
    for (std::size_t a = b; a < n_nodes; ++a) {
      const double s1 = outer.nodes[a];
      if (s1 < s2) continue;
      const Matrix& p1 = p_cache[a];
      const Matrix c1 = q_t * p1 - p1 * q_t;
      const Matrix c2 = c1 * p2 - p2 * c1;
      Matrix r(dim, dim);
      for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i)
          r(i, j) = (ens.weights()(i) - ens.weights()(j)) * c2(i, j);
      acc += outer.weights[a] * outer.weights[b] * f(s1) * f(s2) * (r * prefix3).trace();
    }
  }
  return acc;
}

double support_distance(const LatticeGeometry& geometry, const std::vector<int>& a,
                        const std::vector<int>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int x : a)
    for (int y : b) best = std::min(best, geometry.torus_distance(x, y));
  return a.empty() || b.empty() ? 0.0 : best;
}

LiebRobinsonReport lieb_robinson_probe(const FockBasis& basis, const LatticeGeometry& geometry,
                                       const DrivenHamiltonian& driven,
                                       const FockOperator& observable,
                                       std::span<const FockOperator> probes,
                                       std::span<const double> times,
                                       const PropagationControls& base_controls) {
  LiebRobinsonReport report;
  for (double t : times) {
    PropagationControls controls = base_controls;
    controls.t_end = t;
    const FockOperator u = propagate(basis, driven, controls);
    const Matrix evolved = u.matrix.adjoint() * observable.matrix * u.matrix;
    for (const FockOperator& probe : probes) {
      LiebRobinsonRow row;
      row.distance = support_distance(geometry, observable.support, probe.support);
      row.time = t;
      row.commutator_norm = operator_norm(probe.matrix * evolved - evolved * probe.matrix);
      report.rows.push_back(row);
    }
  }
  // fit at the largest probed time
  if (!times.empty() && probes.size() >= 2) {
    const double t_last = times.back();
    std::vector<double> xs, ys;
    for (const LiebRobinsonRow& row : report.rows)
      if (row.time == t_last && row.commutator_norm > 1e-14) {
        xs.push_back(row.distance);
        ys.push_back(std::log(row.commutator_norm));
      }
    if (xs.size() >= 2) {
      const LineFit fit = fit_line(xs, ys);
      report.slope = fit.slope;
      report.r2 = fit.r2;
    }
  }
  return report;
}

}  // namespace wickbench
