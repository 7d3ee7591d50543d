#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "wickbench/equilibrium.hpp"
#include "wickbench/errors.hpp"
#include "wickbench/freefermion.hpp"
#include "wickbench/hamiltonian.hpp"
#include "wickbench/wick.hpp"

using namespace wickbench;

namespace {

FockOperator density(const FockBasis& basis, int mode) {
  FockOperator n;
  n.matrix = creation(basis, mode).matrix * annihilation(basis, mode).matrix;
  n.support = {mode};
  n.gauge_invariant = true;
  return n;
}

SweepModel chain_model(int L, double hopping, double stagger, double mu) {
  SweepModel model;
  model.geometry = {1, L, 1};
  model.basis = build_fock_basis(model.geometry);
  model.hamiltonian = build_quadratic(model.geometry, model.basis,
                                      staggered_chain_kernel(model.geometry, hopping, stagger));
  model.perturbation = density(model.basis, 0);
  model.observable = density(model.basis, 1);
  model.mu = mu;
  model.switch_spec = exponential_switch();
  return model;
}

}  // namespace

TEST_CASE("euclidean coefficient vanishing cases") {
  SUBCASE("diagonal perturbation on a single mode") {
    SweepModel model;
    model.geometry = {1, 1, 1};
    model.basis = build_fock_basis(model.geometry);
    QuadraticKernel level;
    level.entries = Matrix::Constant(1, 1, 0.8);
    level.range = 0.0;
    model.hamiltonian = build_quadratic(model.geometry, model.basis, level);
    model.perturbation = density(model.basis, 0);
    model.observable = density(model.basis, 0);
    const GibbsEnsemble ens(model.basis, model.hamiltonian, 4.0, 0.2);
    const PeriodizedSwitch ps = periodize(exponential_switch(), 4.0, 0.5);
    const Complex i1 =
        euclidean_coefficient(ens, model.perturbation, model.observable, ps, 1, 0.0);
    CHECK(std::abs(i1) <= 1e-8);
  }
  SUBCASE("commuting perturbation and observable with g~(0) = 0") {
    // [P, H] = 0, [P, O] = 0: the cumulant is s-independent, the circle
    // integral of every kept frequency vanishes
    SweepModel model = chain_model(2, -1.0, 0.0, 0.1);
    model.perturbation = number_operator(model.basis);
    const GibbsEnsemble ens(model.basis, model.hamiltonian, 4.0, 0.1);
    const PeriodizedSwitch ps = periodize(exponential_switch(), 4.0, 0.5);
    const Complex i1 =
        euclidean_coefficient(ens, model.perturbation, model.observable, ps, 1, 0.0);
    CHECK(std::abs(i1) <= 1e-8);
  }
}

TEST_CASE("euclidean coefficient against a dense-grid oracle") {
  const SweepModel model = chain_model(2, -1.0, 0.0, 0.25);
  const double beta = 4.0, eta = 0.5, t = 0.0;
  const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
  const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
  const Complex i1 = euclidean_coefficient(ens, model.perturbation, model.observable, ps, 1, t);
  // trapezoid on a 2000-point grid of g(t - i s) <gamma_s(P); O>
  const Matrix p_eig = ens.to_eigenbasis(model.perturbation.matrix);
  const Matrix o_eig = ens.to_eigenbasis(model.observable.matrix);
  const int grid = 2000;
  Complex oracle = 0.0;
  for (int k = 0; k <= grid; ++k) {
    const double s = beta * k / grid;
    std::array<TimedMatrix, 2> items{{{&p_eig, std::min(s, beta * (1.0 - 1e-15))}, {&o_eig, 0.0}}};
    const Complex cum = ens.tcumulant_eig(items);
    const double w = (k == 0 || k == grid) ? 0.5 : 1.0;
    oracle += w * (beta / grid) * eval_periodized(ps, Complex(t, -s)) * cum;
  }
  CHECK(std::abs(i1 - oracle) <= 1e-6 * (1.0 + std::abs(oracle)));
}

TEST_CASE("simplex and torus forms agree") {
  const SweepModel model = chain_model(3, -1.0, 0.4, 0.1);
  const double beta = 3.0, eta = 0.6, t = -0.5;
  const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
  const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
  const Complex simplex_form =
      euclidean_coefficient(ens, model.perturbation, model.observable, ps, 2, t);
  // direct box quadrature over [0, beta)^2 of the time-ordered cumulant
  const Matrix p_eig = ens.to_eigenbasis(model.perturbation.matrix);
  const Matrix o_eig = ens.to_eigenbasis(model.observable.matrix);
  const PanelGrid grid = composite_grid(0.0, beta, ens.default_panel_width(), 8);
  Complex box = 0.0;
  for (std::size_t a = 0; a < grid.nodes.size(); ++a)
    for (std::size_t b = 0; b < grid.nodes.size(); ++b) {
      const double s1 = grid.nodes[a];
      const double s2 = grid.nodes[b] * (1.0 - 1e-12);  // break exact ties
      std::array<TimedMatrix, 3> items{{{&p_eig, s1}, {&p_eig, s2}, {&o_eig, 0.0}}};
      box += grid.weights[a] * grid.weights[b] * eval_periodized(ps, Complex(t, -s1)) *
             eval_periodized(ps, Complex(t, -s2)) * ens.tcumulant_eig(items);
    }
  CHECK(std::abs(simplex_form - box) <= 1e-6 * (1.0 + std::abs(box)));
}

TEST_CASE("wick rotation order by order") {
  const double beta = 4.0, eta = 0.5;
  const double t_cutoff = 12.0 * beta;
  QuadControls controls;

  SUBCASE("free chain at n = 1") {
    const SweepModel model = chain_model(2, -1.0, 0.0, 0.25);
    const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
    const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
    DrivenHamiltonian driven{model.hamiltonian, model.perturbation, 0.05, model.switch_spec, eta};
    const WickReport report =
        verify_wick_rotation(ens, driven, model.observable, 1, 0.0, ps, t_cutoff, controls);
    CHECK(report.abs_discrepancy <= 1e-4);
    CHECK(report.pass);
  }

  SUBCASE("gapped chain at n = 2") {
    const SweepModel model = chain_model(2, -1.0, 0.5, 0.0);
    const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
    const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
    DrivenHamiltonian driven{model.hamiltonian, model.perturbation, 0.05, model.switch_spec, eta};
    const WickReport report =
        verify_wick_rotation(ens, driven, model.observable, 2, 0.0, ps, t_cutoff, controls);
    CHECK(report.rel_discrepancy <= 1e-3);
    CHECK(report.pass);
  }

  SUBCASE("identity perturbation gives zero on both sides") {
    SweepModel model = chain_model(2, -1.0, 0.0, 0.1);
    model.perturbation = identity_operator(model.basis);
    const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
    const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
    DrivenHamiltonian driven{model.hamiltonian, model.perturbation, 0.05, model.switch_spec, eta};
    const WickReport report =
        verify_wick_rotation(ens, driven, model.observable, 1, 0.0, ps, t_cutoff, controls);
    CHECK(std::abs(report.real_time) <= 1e-10);
    CHECK(std::abs(report.euclidean) <= 1e-10);
  }

  SUBCASE("unattainable tolerance is reported") {
    const SweepModel model = chain_model(2, -1.0, 0.0, 0.25);
    const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
    const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
    DrivenHamiltonian driven{model.hamiltonian, model.perturbation, 0.05, model.switch_spec, eta};
    CHECK_THROWS_AS(verify_wick_rotation(ens, driven, model.observable, 1, 0.0, ps, t_cutoff,
                                         controls, 1e-30),
                    BudgetUnattainable);
  }
}

TEST_CASE("basic complex deformation") {
  const SweepModel model = chain_model(2, -1.0, 0.3, 0.1);
  const double beta = 4.0, eta = 0.5;
  const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
  const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
  const double t_cutoff = 12.0 * beta;

  SUBCASE("random local even operators") {
    const FockOperator b = density(model.basis, 0);
    FockOperator c;
    c.matrix = creation(model.basis, 0).matrix * annihilation(model.basis, 1).matrix +
               creation(model.basis, 1).matrix * annihilation(model.basis, 0).matrix;
    c.support = {0, 1};
    c.gauge_invariant = true;
    CHECK(verify_basic_deformation(ens, b, c, ps, 0.0, t_cutoff) <= 1e-5);
    CHECK(verify_basic_deformation(ens, b, c, ps, -0.7, t_cutoff) <= 1e-5);
  }

  SUBCASE("identity B gives zero on both sides") {
    const FockOperator one = identity_operator(model.basis);
    const FockOperator c = density(model.basis, 1);
    CHECK(verify_basic_deformation(ens, one, c, ps, 0.0, t_cutoff) <= 1e-12);
  }

  SUBCASE("empty switch gives zero") {
    PeriodizedSwitch zero;
    zero.beta = beta;
    zero.eta = eta;
    const FockOperator b = density(model.basis, 0);
    const FockOperator c = density(model.basis, 1);
    CHECK(verify_basic_deformation(ens, b, c, zero, 0.0, t_cutoff) == 0.0);
  }
}

TEST_CASE("factorization and connected reduction") {
  const SweepModel model = chain_model(2, -1.0, 0.0, 0.15);
  const double beta = 3.0, eta = 0.5;
  const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
  const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
  const FockOperator b = density(model.basis, 0);
  FockOperator hop;
  hop.matrix = creation(model.basis, 0).matrix * annihilation(model.basis, 1).matrix +
               creation(model.basis, 1).matrix * annihilation(model.basis, 0).matrix;
  hop.support = {0, 1};
  hop.gauge_invariant = true;
  const FactorizationReport report = factorization_check(ens, b, hop, ps, -0.2, 2, 77);
  CHECK(report.moment_residual <= 1e-10);
  CHECK(report.k1_residual <= 1e-12);
  CHECK(report.k2_residual <= 1e-6);
}

TEST_CASE("adiabatic point without a drive") {
  const SweepModel model = chain_model(3, -1.0, 0.4, 0.0);
  PropagationControls controls;
  for (double eta : {0.4, 0.2}) {
    const AdiabaticSweepRow row = adiabatic_point(model, {eta, 8.0, 0.0, 0.0}, controls);
    CHECK(row.gap <= 1e-9);
    CHECK(row.gap_periodized <= 1e-9);
    CHECK(row.imag_residual <= 1e-9);
  }
}

TEST_CASE("auxiliary dynamics approaches the true dynamics as beta grows") {
  const SweepModel model = chain_model(3, -1.0, 0.5, 0.0);
  std::vector<double> lx, ly;
  for (double beta : {10.0, 31.6, 100.0}) {
    DrivenHamiltonian driven{model.hamiltonian, model.perturbation, 0.05, model.switch_spec, 0.5};
    const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
    const PeriodizedSwitch ps = periodize(model.switch_spec, beta, 0.5);
    PropagationControls truth;
    truth.t_start = -switch_time_cutoff(model.switch_spec, 0.5);
    PropagationControls aux;
    aux.source = SwitchSource::periodized;
    aux.t_start = -switch_time_cutoff(ps);
    const EvolvedState rho = evolve_gibbs(model.basis, driven, ens, 0.0, truth);
    const EvolvedState rho_aux = evolve_gibbs(model.basis, driven, ens, 0.0, aux, &ps);
    const double gap = std::abs(((rho.rho - rho_aux.rho) * model.observable.matrix).trace());
    lx.push_back(std::log(beta));
    ly.push_back(std::log(gap));
  }
  const LineFit fit = fit_line(lx, ly);
  CHECK(fit.slope <= -0.7);
}

TEST_CASE("periodized-source truncation decays at the slowest kept frequency") {
  const SweepModel model = chain_model(3, -1.0, 0.5, 0.0);
  const double beta = 4.0, eta = 0.5;
  const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
  const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
  DrivenHamiltonian driven{model.hamiltonian, model.perturbation, 0.05, model.switch_spec, eta};
  QuadControls controls;
  const auto coefficient = [&](double T) {
    return duhamel_coefficient_real(ens, model.perturbation, model.observable, 1, 0.0, T, driven,
                                    controls, SwitchSource::periodized, &ps);
  };
  const Complex reference = coefficient(60.0);
  const double err_short = std::abs(coefficient(4.0) - reference);
  const double err_long = std::abs(coefficient(10.0) - reference);
  // decay at >= 75% of the e^{-(2pi/beta) T} rate over the window
  const double omega0 = ps.omegas.front();
  CHECK(err_long <= err_short * std::exp(-0.75 * omega0 * 6.0));
}

TEST_CASE("euclidean coefficients obey the mass-times-integrability bound") {
  const SweepModel model = chain_model(4, 1.0, 0.5, 0.0);
  const double beta = 6.0, eta = 0.5;
  const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
  const SwitchMoments mom = switch_moments(model.switch_spec, 1);
  const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
  Matrix pert_kernel = Matrix::Zero(4, 4);
  pert_kernel(0, 0) = 1.0;
  Matrix obs_kernel = Matrix::Zero(4, 4);
  obs_kernel(1, 1) = 1.0;
  QuadControls controls;
  controls.panel_width = 0.5;
  for (int n : {1, 2}) {
    std::vector<Matrix> kernels(static_cast<std::size_t>(n), pert_kernel);
    kernels.push_back(obs_kernel);
    const Assumption1Result integr =
        assumption1_integral_exact(ens, model.geometry, model.basis, kernels, n, 1, controls);
    const Complex coeff =
        euclidean_coefficient(ens, model.perturbation, model.observable, ps, n, 0.0, controls);
    CHECK(std::abs(coeff) <= std::pow(mom.l1, n) * integr.value + 1e-12);
  }
}

TEST_CASE("m = 0 improved check reduces to the adiabatic sweep") {
  SweepModel model = chain_model(2, 1.0, 0.6, 0.0);
  model.perturbation = density(model.basis, 0);
  const std::vector<double> etas{0.4, 0.2};
  PropagationControls controls;
  const SlopeReport improved = improved_adiabatic_check(model, 0, etas, 20.0, 0.05, controls);
  std::vector<AdiabaticGridPoint> grid;
  for (double eta : etas) grid.push_back({eta, 20.0, 0.05, 0.0});
  model.switch_spec = exponential_switch();
  const std::vector<AdiabaticSweepRow> rows = adiabatic_sweep(model, grid, controls);
  REQUIRE(improved.rows.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(improved.rows[i].gap_periodized ==
          doctest::Approx(rows[i].gap_periodized).epsilon(1e-12));
}

TEST_CASE("quadrature budget guard") {
  const SweepModel model = chain_model(3, -1.0, 0.5, 0.0);
  const GibbsEnsemble ens(model.basis, model.hamiltonian, 4.0, model.mu);
  DrivenHamiltonian driven{model.hamiltonian, model.perturbation, 0.05, model.switch_spec, 0.5};
  QuadControls tiny;
  tiny.max_evaluations = 10;
  CHECK_THROWS_AS(duhamel_coefficient_real(ens, model.perturbation, model.observable, 2, 0.0,
                                           20.0, driven, tiny, SwitchSource::true_switch),
                  QuadratureBudgetExceeded);
}

TEST_CASE("kubo check gap shrinks with beta") {
  const SweepModel model = chain_model(3, -1.0, 0.5, 0.0);
  QuadControls controls;
  const KuboReport a = kubo_check(model, 10.0, 0.3, 0.0, controls);
  const KuboReport b = kubo_check(model, 20.0, 0.3, 0.0, controls);
  CHECK(b.gap < a.gap);
  // self-adjoint operators give a real response
  CHECK(std::abs(a.euclidean.imag()) <= 1e-9);
  CHECK(std::abs(a.real_time.imag()) <= 1e-9);
}
