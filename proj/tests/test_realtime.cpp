#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wickbench/equilibrium.hpp"
#include "wickbench/errors.hpp"
#include "wickbench/hamiltonian.hpp"
#include "wickbench/realtime.hpp"

using namespace wickbench;

namespace {

FockOperator density(const FockBasis& basis, int mode) {
  FockOperator n;
  n.matrix = creation(basis, mode).matrix * annihilation(basis, mode).matrix;
  n.support = {mode};
  n.gauge_invariant = true;
  return n;
}

Matrix exact_free_propagator(const FockOperator& h, double t0, double t1) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix);
  Eigen::VectorXcd phases(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    const double arg = -solver.eigenvalues()(i) * (t1 - t0);
    phases(i) = Complex(std::cos(arg), std::sin(arg));
  }
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

struct TestModel {
  LatticeGeometry geometry;
  FockBasis basis;
  DrivenHamiltonian driven;
};

TestModel make_model(int L, double epsilon, double eta) {
  TestModel m{{1, L, 1}, {}, {}};
  m.basis = build_fock_basis(m.geometry);
  m.driven.base = build_quadratic(m.geometry, m.basis, staggered_chain_kernel(m.geometry, 1.0, 0.5));
  m.driven.perturbation = density(m.basis, 0);
  m.driven.epsilon = epsilon;
  m.driven.eta = eta;
  m.driven.switch_spec = exponential_switch();
  return m;
}

}  // namespace

TEST_CASE("free propagation matches the exponential") {
  TestModel m = make_model(3, 0.0, 0.5);
  PropagationControls controls;
  controls.t_start = -4.0;
  controls.t_end = -1.0;
  const FockOperator u = propagate(m.basis, m.driven, controls);
  const Matrix exact = exact_free_propagator(m.driven.base, controls.t_start, controls.t_end);
  CHECK((u.matrix - exact).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("driven propagation stays unitary") {
  TestModel m = make_model(3, 0.3, 0.7);
  PropagationControls controls;
  controls.t_start = -30.0;
  controls.t_end = 0.0;
  const FockOperator u = propagate(m.basis, m.driven, controls);
  CHECK((u.matrix.adjoint() * u.matrix - Matrix::Identity(m.basis.dimension, m.basis.dimension))
            .cwiseAbs()
            .maxCoeff() <= 1e-9);
}

TEST_CASE("step halving confirms fourth order") {
  TestModel m = make_model(2, 0.6, 2.0);
  const auto run = [&](double step) {
    PropagationControls controls;
    controls.t_start = -3.0;
    controls.t_end = 0.0;
    controls.step = step;
    return propagate(m.basis, m.driven, controls).matrix;
  };
  const Matrix u1 = run(0.3);
  const Matrix u2 = run(0.15);
  const Matrix u4 = run(0.075);
  const double err1 = (u1 - u2).cwiseAbs().maxCoeff();
  const double err2 = (u2 - u4).cwiseAbs().maxCoeff();
  REQUIRE(err2 > 0.0);
  const double ratio = err1 / err2;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 26.0);
}

TEST_CASE("evolved gibbs state") {
  TestModel m = make_model(3, 0.0, 0.5);
  const GibbsEnsemble ens(m.basis, m.driven.base, 2.5, 0.1);
  PropagationControls controls;
  controls.t_start = -10.0;

  SUBCASE("invariant without a drive") {
    const EvolvedState state = evolve_gibbs(m.basis, m.driven, ens, 0.0, controls);
    state.validate();
    CHECK((state.rho - ens.density_matrix()).cwiseAbs().maxCoeff() <= 1e-10);
  }

  SUBCASE("real expectations and positivity under drive") {
    m.driven.epsilon = 0.2;
    controls.t_start = -switch_time_cutoff(m.driven.switch_spec, m.driven.eta);
    const EvolvedState state = evolve_gibbs(m.basis, m.driven, ens, 0.0, controls);
    state.validate();
    const Complex value = (density(m.basis, 1).matrix * state.rho).trace();
    CHECK(std::abs(value.imag()) <= 1e-10);
  }

  SUBCASE("doubling the cutoff obeys the switch-tail bound") {
    m.driven.epsilon = 0.2;
    const double t_short = 5.0 / m.driven.eta;
    PropagationControls a;
    a.t_start = -t_short;
    PropagationControls b;
    b.t_start = -2.0 * t_short;
    const FockOperator obs = density(m.basis, 1);
    const Complex v1 = (obs.matrix * evolve_gibbs(m.basis, m.driven, ens, 0.0, a).rho).trace();
    const Complex v2 = (obs.matrix * evolve_gibbs(m.basis, m.driven, ens, 0.0, b).rho).trace();
    // tail of the switch over the extra window
    const double tail = (std::exp(-m.driven.eta * t_short) - std::exp(-2.0 * m.driven.eta * t_short)) /
                        m.driven.eta;
    const double bound = std::abs(m.driven.epsilon) * tail * 2.0 *
                         operator_norm(obs.matrix) * operator_norm(m.driven.perturbation.matrix);
    CHECK(std::abs(v1 - v2) <= bound);
    CHECK(std::abs(v1 - v2) > 0.0);
  }
}

TEST_CASE("duhamel coefficients") {
  TestModel m = make_model(3, 0.0, 0.5);
  const double beta = 2.0, mu = 0.1;
  const GibbsEnsemble ens(m.basis, m.driven.base, beta, mu);
  const double t_cutoff = switch_time_cutoff(m.driven.switch_spec, m.driven.eta);
  QuadControls controls;

  SUBCASE("commuting perturbation gives zero at first order") {
    const FockOperator n_total = number_operator(m.basis);
    const FockOperator obs = density(m.basis, 0);
    const Complex c1 = duhamel_coefficient_real(ens, n_total, obs, 1, 0.0, t_cutoff, m.driven,
                                                controls, SwitchSource::true_switch);
    CHECK(std::abs(c1) <= 1e-12);
  }

  SUBCASE("first order matches an independent Kubo quadrature") {
    const FockOperator obs = density(m.basis, 1);
    const FockOperator pert = m.driven.perturbation;
    const double t = 0.0;
    const Complex c1 = duhamel_coefficient_real(ens, pert, obs, 1, t, t_cutoff, m.driven,
                                                controls, SwitchSource::true_switch);
    // trapezoid oracle with explicit Heisenberg matrices
    const Matrix rho = ens.density_matrix();
    const Matrix o_eig = ens.to_eigenbasis(obs.matrix);
    const Matrix p_eig = ens.to_eigenbasis(pert.matrix);
    const Matrix q_t = ens.from_eigenbasis(ens.heisenberg_eig(o_eig, t));
    Complex oracle = 0.0;
    const int steps = 40000;
    const double h = t_cutoff / steps;
    for (int k = 0; k <= steps; ++k) {
      const double s = -t_cutoff + k * h;
      const Matrix ps = ens.from_eigenbasis(ens.heisenberg_eig(p_eig, s));
      const Complex integrand = eval_switch(m.driven.switch_spec, m.driven.eta * s) *
                                (rho * (q_t * ps - ps * q_t)).trace();
      const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
      oracle += w * h * integrand;
    }
    CHECK(std::abs(c1 - oracle) <= 1e-6 * (1.0 + std::abs(oracle)));
  }

  SUBCASE("epsilon series reproduces the evolved expectation to third order") {
    TestModel small = make_model(2, 0.0, 0.5);
    const GibbsEnsemble ens2(small.basis, small.driven.base, 2.0, 0.0);
    const FockOperator obs = density(small.basis, 1);
    const double cutoff = switch_time_cutoff(small.driven.switch_spec, small.driven.eta);
    const Complex c1 = duhamel_coefficient_real(ens2, small.driven.perturbation, obs, 1, 0.0,
                                                cutoff, small.driven, controls,
                                                SwitchSource::true_switch);
    const Complex c2 = duhamel_coefficient_real(ens2, small.driven.perturbation, obs, 2, 0.0,
                                                cutoff, small.driven, controls,
                                                SwitchSource::true_switch);
    const Complex base = ens2.average(obs);
    std::vector<double> log_eps, log_rem;
    for (double eps : {0.02, 0.04, 0.08}) {
      small.driven.epsilon = eps;
      PropagationControls pc;
      pc.t_start = -cutoff;
      const EvolvedState state = evolve_gibbs(small.basis, small.driven, ens2, 0.0, pc);
      const Complex evolved = (obs.matrix * state.rho).trace();
      const Complex series = base + Complex(0.0, -eps) * c1 +
                             Complex(0.0, -eps) * Complex(0.0, -eps) * c2;
      log_eps.push_back(std::log(eps));
      log_rem.push_back(std::log(std::abs(evolved - series)));
    }
    const LineFit fit = fit_line(log_eps, log_rem);
    CHECK(fit.slope >= 2.7);
  }
}

TEST_CASE("lieb-robinson probe") {
  const LatticeGeometry g{1, 8, 1};
  const FockBasis basis = build_fock_basis(g, 12);
  DrivenHamiltonian driven;
  driven.base = build_quadratic(g, basis, uniform_chain_kernel(g, -1.0));
  driven.perturbation = density(basis, 0);
  driven.epsilon = 0.0;
  driven.eta = 0.5;
  driven.switch_spec = exponential_switch();
  const FockOperator obs = density(basis, 0);
  std::vector<FockOperator> probes;
  for (int x : {1, 2, 3, 4}) probes.push_back(density(basis, x));
  const std::vector<double> times{0.25, 0.5};
  PropagationControls controls;
  controls.t_start = 0.0;

  const LiebRobinsonReport report = lieb_robinson_probe(basis, g, driven, obs, probes, times,
                                                        controls);
  REQUIRE(report.rows.size() == 8);
  // norms bounded by 2 ||P|| ||O||
  for (const LiebRobinsonRow& row : report.rows)
    CHECK(row.commutator_norm <= 2.0 * operator_norm(obs.matrix) + 1e-9);
  CHECK(report.slope < 0.0);
  CHECK(report.r2 >= 0.9);

  // untouched disjoint supports commute at t = s
  const std::vector<double> zero_time{0.0};
  const LiebRobinsonReport still =
      lieb_robinson_probe(basis, g, driven, obs, probes, zero_time, controls);
  for (const LiebRobinsonRow& row : still.rows) CHECK(row.commutator_norm <= 1e-10);
}
