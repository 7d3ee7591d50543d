#include "wickbench/wick.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "wickbench/errors.hpp"

namespace wickbench {

namespace {

double euclid_panel(const GibbsEnsemble& ens, const QuadControls& controls) {
  return (controls.panel_width > 0.0 ? controls.panel_width : ens.default_panel_width()) /
         controls.refine;
}

}  // namespace

Complex euclidean_coefficient(const GibbsEnsemble& ens, const FockOperator& perturbation,
                              const FockOperator& observable, const PeriodizedSwitch& ps, int n,
                              double t, const QuadControls& controls) {
  if (n < 1 || n > 3) throw CumulantOrderExceeded("euclidean_coefficient: n must be in 1..3");
  if (t > 1e-12) throw std::invalid_argument("euclidean_coefficient: t must be <= 0");
  const Matrix p_eig = ens.to_eigenbasis(perturbation.matrix);
  const Matrix o_eig = ens.to_eigenbasis(observable.matrix);
  const double panel = euclid_panel(ens, controls);
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  // the integrand is symmetric in the s_j, so the torus power integral is n!
  // times the ordered simplex integral
  const Complex simplex = simplex_integrate_t<Complex>(
      n, 0.0, ens.beta(), panel, controls.points_per_panel, [&](const std::vector<double>& s) {
        Complex weight = 1.0;
        for (double sj : s) weight *= eval_periodized(ps, Complex(t, -sj));
        std::vector<TimedMatrix> items;
        items.reserve(s.size() + 1);
        for (double sj : s) items.push_back({&p_eig, sj});
        items.push_back({&o_eig, 0.0});
        return weight * ens.tcumulant_eig(items);
      });
  return factorial * simplex;
}

WickReport verify_wick_rotation(const GibbsEnsemble& ens, const DrivenHamiltonian& driven,
                                const FockOperator& observable, int n, double t,
                                const PeriodizedSwitch& ps, double t_cutoff,
                                const QuadControls& controls, double target_tolerance) {
  if (n < 1 || n > 2)
    throw CumulantOrderExceeded("verify_wick_rotation: full identity capped at n = 2");
  WickReport report;
  report.order = n;

  QuadControls coarse = controls;
  QuadControls fine = controls;
  fine.refine = controls.refine * 2.0;

  const Complex real_coarse = duhamel_coefficient_real(
      ens, driven.perturbation, observable, n, t, t_cutoff, driven, coarse,
      SwitchSource::periodized, &ps);
  const Complex real_fine = duhamel_coefficient_real(
      ens, driven.perturbation, observable, n, t, t_cutoff, driven, fine,
      SwitchSource::periodized, &ps);
  report.quad_budget_real = std::abs(real_fine - real_coarse);

  const Complex euclid_coarse =
      euclidean_coefficient(ens, driven.perturbation, observable, ps, n, t, coarse);
  const Complex euclid_fine =
      euclidean_coefficient(ens, driven.perturbation, observable, ps, n, t, fine);
  report.quad_budget_euclidean = std::abs(euclid_fine - euclid_coarse);

  // (-i)^n / n! I^(n)
  Complex phase = 1.0;
  double factorial = 1.0;
  for (int k = 0; k < n; ++k) phase *= Complex(0.0, -1.0);
  for (int k = 2; k <= n; ++k) factorial *= k;
  report.real_time = real_fine;
  report.euclidean = phase / factorial * euclid_fine;
  report.abs_discrepancy = std::abs(report.real_time - report.euclidean);
  const double scale = std::max(std::abs(report.real_time), std::abs(report.euclidean));
  report.rel_discrepancy = scale > 0.0 ? report.abs_discrepancy / scale : 0.0;

  // discarded simplex mass where the earliest time sits below -T
  double tail = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < ps.omegas.size(); ++i) {
    tail += std::abs(ps.coefficients[i]) * std::exp(-ps.omegas[i] * t_cutoff) / ps.omegas[i];
    total += std::abs(ps.coefficients[i]) / ps.omegas[i];
  }
  const double o_norm = operator_norm(observable.matrix);
  const double p_norm = operator_norm(driven.perturbation.matrix);
  double fact_nm1 = 1.0;
  for (int k = 2; k <= n - 1; ++k) fact_nm1 *= k;
  report.truncation_budget = std::pow(2.0, n) * o_norm * std::pow(p_norm, n) * tail *
                             std::pow(total, n - 1) / fact_nm1;
  report.budget = (report.truncation_budget + report.quad_budget_real +
                   report.quad_budget_euclidean) *
                  controls.budget_multiplier;
  if (target_tolerance > 0.0 && report.budget > target_tolerance)
    throw BudgetUnattainable("verify_wick_rotation: certified budget exceeds the target");
  report.pass = report.abs_discrepancy <= std::max(report.budget, 1e-14);
  return report;
}

double verify_basic_deformation(const GibbsEnsemble& ens, const FockOperator& b,
                                const FockOperator& c, const PeriodizedSwitch& ps, double t,
                                double t_cutoff, const QuadControls& controls) {
  if (!b.gauge_invariant)
    throw OddOperatorUnsupported("verify_basic_deformation: B must be gauge invariant");
  const Matrix b_eig = ens.to_eigenbasis(b.matrix);
  const Matrix c_eig = ens.to_eigenbasis(c.matrix);
  const Matrix rho_comm = [&] {
    // [C, rho] in the eigenbasis
    Matrix out(c_eig.rows(), c_eig.cols());
    for (Eigen::Index j = 0; j < c_eig.cols(); ++j)
      for (Eigen::Index i = 0; i < c_eig.rows(); ++i)
        out(i, j) = (ens.weights()(j) - ens.weights()(i)) * c_eig(i, j);
    return out;
  }();
  const double panel = std::min(0.5, 1.0 / std::max(1.0, ens.spectral_spread())) / controls.refine;
  const PanelGrid grid = composite_grid(-t_cutoff, t, panel, controls.points_per_panel);
  Complex lhs = 0.0;
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    const double r = grid.nodes[k];
    const double a_r = eval_periodized(ps, Complex(r, 0.0)).real();
    // <[tau_r(B), C]> = tr([C, rho] tau_r(B))
    lhs += grid.weights[k] * a_r * (rho_comm * ens.heisenberg_eig(b_eig, r)).trace();
  }
  // tau_{t-is}(B) = gamma_s(tau_t(B)); the ordered trace applies the
  // remaining imaginary-time conjugation itself
  const Matrix b_t = ens.heisenberg_eig(b_eig, t);
  const Complex rhs =
      Complex(0.0, 1.0) *
      simplex_integrate_t<Complex>(1, 0.0, ens.beta(), euclid_panel(ens, controls),
                                   controls.points_per_panel, [&](const std::vector<double>& s) {
                                     const Complex a_val =
                                         eval_periodized(ps, Complex(t, -s[0]));
                                     std::array<TimedMatrix, 2> items{
                                         {{&b_t, s[0]}, {&c_eig, 0.0}}};
                                     return a_val * ens.tmoment_eig(items);
                                   });
  return std::abs(lhs - rhs);
}

FactorizationReport factorization_check(const GibbsEnsemble& ens, const FockOperator& b,
                                        const FockOperator& a, const PeriodizedSwitch& ps,
                                        double t, int n, unsigned seed,
                                        const QuadControls& controls) {
  if (n < 1 || n > 3) throw CumulantOrderExceeded("factorization_check: n must be in 1..3");
  FactorizationReport report;
  const Matrix b_eig = ens.to_eigenbasis(b.matrix);
  const Matrix a_eig = ens.to_eigenbasis(a.matrix);

  // (a) ordered moment vs cumulant-times-moment resummation at fixed
  // descending times, exact at the operator level
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> tdist(0.0, ens.beta());
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> s(static_cast<std::size_t>(n));
    for (double& v : s) v = tdist(rng);
    std::sort(s.rbegin(), s.rend());
    std::vector<TimedMatrix> all;
    for (double v : s) all.push_back({&b_eig, v});
    all.push_back({&a_eig, 0.0});
    const Complex moment = ens.tmoment_eig(all);
    Complex resummed = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
      std::vector<TimedMatrix> with_a;
      std::vector<TimedMatrix> rest;
      for (int i = 0; i < n; ++i) {
        if (mask & (std::size_t(1) << i))
          with_a.push_back(all[static_cast<std::size_t>(i)]);
        else
          rest.push_back(all[static_cast<std::size_t>(i)]);
      }
      with_a.push_back({&a_eig, 0.0});
      resummed += ens.tcumulant_eig(with_a) * ens.tmoment_eig(rest);
    }
    report.moment_residual =
        std::max(report.moment_residual, std::abs(moment - resummed) / (1.0 + std::abs(moment)));
  }

  // (b) k = 1: per kept frequency the circle integral vanishes identically
  Complex k1 = 0.0;
  const Complex avg_b = ens.average_eig(b_eig);
  for (std::size_t i = 0; i < ps.omegas.size(); ++i) {
    const double omega = ps.omegas[i];
    const Complex circle =
        (std::exp(Complex(0.0, -omega * ens.beta())) - 1.0) / Complex(0.0, -omega);
    k1 += ps.coefficients[i] * std::exp(omega * t) * circle * avg_b;
  }
  report.k1_residual = std::abs(k1);

  // k = 2: quadrature over the ordered simplex
  const Complex k2 = simplex_integrate_t<Complex>(
      2, 0.0, ens.beta(), euclid_panel(ens, controls), controls.points_per_panel,
      [&](const std::vector<double>& s) {
        Complex weight = 1.0;
        for (double sj : s) weight *= eval_periodized(ps, Complex(t, -sj));
        std::array<TimedMatrix, 2> items{{{&b_eig, s[0]}, {&b_eig, s[1]}}};
        return weight * ens.tmoment_eig(items);
      });
  report.k2_residual = std::abs(k2);
  return report;
}

AdiabaticSweepRow adiabatic_point(const SweepModel& model, const AdiabaticGridPoint& point,
                                  const PropagationControls& base_controls) {
  AdiabaticSweepRow row;
  row.point = point;
  DrivenHamiltonian driven{model.hamiltonian, model.perturbation, point.epsilon,
                           model.switch_spec, point.eta};
  const GibbsEnsemble ens(model.basis, model.hamiltonian, point.beta, model.mu);
  const PeriodizedSwitch ps = periodize(model.switch_spec, point.beta, point.eta);

  PropagationControls truth = base_controls;
  truth.source = SwitchSource::true_switch;
  truth.t_start = point.t - switch_time_cutoff(model.switch_spec, point.eta);
  const EvolvedState rho = evolve_gibbs(model.basis, driven, ens, point.t, truth);

  PropagationControls aux = base_controls;
  aux.source = SwitchSource::periodized;
  aux.t_start = point.t - switch_time_cutoff(ps);
  const EvolvedState rho_aux = evolve_gibbs(model.basis, driven, ens, point.t, aux, &ps);

  const Complex tr_true = (model.observable.matrix * rho.rho).trace();
  const Complex tr_aux = (model.observable.matrix * rho_aux.rho).trace();
  const double g_true = eval_switch(model.switch_spec, point.eta * point.t);
  const double g_aux = eval_periodized(ps, Complex(point.t, 0.0)).real();
  const Complex inst_true =
      shifted_gibbs_expectation(model.basis, model.hamiltonian, model.perturbation,
                                point.epsilon * g_true, point.beta, model.mu, model.observable);
  const Complex inst_aux =
      shifted_gibbs_expectation(model.basis, model.hamiltonian, model.perturbation,
                                point.epsilon * g_aux, point.beta, model.mu, model.observable);
  row.evolved = tr_true.real();
  row.evolved_periodized = tr_aux.real();
  row.instantaneous = inst_true.real();
  row.instantaneous_periodized = inst_aux.real();
  row.gap = std::abs(tr_true.real() - inst_true.real());
  row.gap_periodized = std::abs(tr_aux.real() - inst_aux.real());
  row.imag_residual = std::max({std::abs(tr_true.imag()), std::abs(tr_aux.imag()),
                                std::abs(inst_true.imag()), std::abs(inst_aux.imag())});
  return row;
}

std::vector<AdiabaticSweepRow> adiabatic_sweep(const SweepModel& model,
                                               std::span<const AdiabaticGridPoint> grid,
                                               const PropagationControls& base_controls,
                                               int jobs) {
  std::vector<AdiabaticSweepRow> rows(grid.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      rows[i] = adiabatic_point(model, grid[i], base_controls);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const int count = std::min<int>(jobs, static_cast<int>(grid.size()));
  for (int w = 0; w < count; ++w)
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1))
        rows[i] = adiabatic_point(model, grid[i], base_controls);
    });
  for (std::thread& worker : workers) worker.join();
  return rows;
}

SlopeReport improved_adiabatic_check(SweepModel model, int m, std::span<const double> etas,
                                     double beta, double epsilon,
                                     const PropagationControls& base_controls, int jobs) {
  model.switch_spec = flat_switch(m);
  std::vector<AdiabaticGridPoint> grid;
  for (double eta : etas) grid.push_back({eta, beta, epsilon, 0.0});
  SlopeReport report;
  report.rows = adiabatic_sweep(model, grid, base_controls, jobs);
  std::vector<double> xs, ys;
  for (const AdiabaticSweepRow& row : report.rows) {
    if (row.gap_periodized <= 0.0) continue;
    xs.push_back(std::log(row.point.eta));
    ys.push_back(std::log(row.gap_periodized));
  }
  const LineFit fit = fit_line(xs, ys);
  report.slope = fit.slope;
  report.r2 = fit.r2;
  return report;
}

KuboReport kubo_check(const SweepModel& model, double beta, double eta, double t,
                      const QuadControls& controls) {
  KuboReport report;
  report.beta = beta;
  const GibbsEnsemble ens(model.basis, model.hamiltonian, beta, model.mu);
  const PeriodizedSwitch ps = periodize(model.switch_spec, beta, eta);
  report.euclidean =
      euclidean_coefficient(ens, model.perturbation, model.observable, ps, 1, t, controls);
  DrivenHamiltonian driven{model.hamiltonian, model.perturbation, 0.0, model.switch_spec, eta};
  const double t_cutoff = std::max(switch_time_cutoff(model.switch_spec, eta) + std::abs(t),
                                   switch_time_cutoff(ps) + std::abs(t));
  report.real_time = Complex(0.0, 1.0) *
                     duhamel_coefficient_real(ens, model.perturbation, model.observable, 1, t,
                                              t_cutoff, driven, controls,
                                              SwitchSource::true_switch);
  report.gap = std::abs(report.euclidean - report.real_time);
  return report;
}

}  // namespace wickbench
