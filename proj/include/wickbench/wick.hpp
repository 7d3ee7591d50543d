// wick.hpp - Euclidean expansion coefficients, order-by-order verification of
// the real-time <-> imaginary-time identity, adiabatic and linear-response
// experiments
#ifndef WICKBENCH_WICK_HPP
#define WICKBENCH_WICK_HPP

#include <span>
#include <vector>

#include "wickbench/equilibrium.hpp"
#include "wickbench/realtime.hpp"

namespace wickbench {

// I^(n)(eta, t): n-fold integral over [0, beta)^n of
// prod_j g_{beta,eta}(t - i s_j) times the connected correlation of n copies
// of the perturbation and the observable; evaluated as n! times the ordered
// simplex integral of the symmetric integrand.
Complex euclidean_coefficient(const GibbsEnsemble& ens, const FockOperator& perturbation,
                              const FockOperator& observable, const PeriodizedSwitch& ps, int n,
                              double t, const QuadControls& controls = {});

struct WickReport {
  int order = 0;
  Complex real_time;
  Complex euclidean;
  double abs_discrepancy = 0.0;
  double rel_discrepancy = 0.0;
  double truncation_budget = 0.0;
  double quad_budget_real = 0.0;
  double quad_budget_euclidean = 0.0;
  double budget = 0.0;
  bool pass = false;
};

// Order-n check of the rotation identity: the truncated real-time commutator
// integral with the periodized drive against (-i)^n / n! times the Euclidean
// coefficient, with a certified truncation + node-doubling budget.
WickReport verify_wick_rotation(const GibbsEnsemble& ens, const DrivenHamiltonian& driven,
                                const FockOperator& observable, int n, double t,
                                const PeriodizedSwitch& ps, double t_cutoff,
                                const QuadControls& controls = {}, double target_tolerance = 0.0);

// j = 0 deformation: int_{-inf}^t a(ir) <[tau_r(B), C]> dr against
// i int_0^beta a(it+s) <tau_{t-is}(B) C> ds.
double verify_basic_deformation(const GibbsEnsemble& ens, const FockOperator& b,
                                const FockOperator& c, const PeriodizedSwitch& ps, double t,
                                double t_cutoff, const QuadControls& controls = {});

struct FactorizationReport {
  double moment_residual = 0.0;  // ordered moment vs cumulant resummation
  double k1_residual = 0.0;      // frequency-exact simplex integral, k = 1
  double k2_residual = 0.0;      // quadrature simplex integral, k = 2
};

FactorizationReport factorization_check(const GibbsEnsemble& ens, const FockOperator& b,
                                        const FockOperator& a, const PeriodizedSwitch& ps,
                                        double t, int n, unsigned seed,
                                        const QuadControls& controls = {});

struct SweepModel {
  LatticeGeometry geometry;
  FockBasis basis;
  FockOperator hamiltonian;
  FockOperator perturbation;
  FockOperator observable;
  double mu = 0.0;
  SwitchSpec switch_spec;
};

struct AdiabaticGridPoint {
  double eta = 0.1;
  double beta = 10.0;
  double epsilon = 0.05;
  double t = 0.0;
};

struct AdiabaticSweepRow {
  AdiabaticGridPoint point;
  double evolved = 0.0;                  // Tr O rho(t), true switch
  double evolved_periodized = 0.0;       // Tr O rho~(t)
  double instantaneous = 0.0;            // <O>_t under eps g(eta t)
  double instantaneous_periodized = 0.0; // <O>_t under eps g_{beta,eta}(t)
  double gap = 0.0;
  double gap_periodized = 0.0;
  double imag_residual = 0.0;
};

AdiabaticSweepRow adiabatic_point(const SweepModel& model, const AdiabaticGridPoint& point,
                                  const PropagationControls& base_controls);

std::vector<AdiabaticSweepRow> adiabatic_sweep(const SweepModel& model,
                                               std::span<const AdiabaticGridPoint> grid,
                                               const PropagationControls& base_controls,
                                               int jobs = 1);

struct SlopeReport {
  std::vector<AdiabaticSweepRow> rows;
  double slope = 0.0;  // log gap_periodized vs log eta
  double r2 = 0.0;
};

// Flat-switch convergence: model's switch is replaced by flat_switch(m) and
// the periodized-state gap is fitted against eta at fixed beta, epsilon.
SlopeReport improved_adiabatic_check(SweepModel model, int m, std::span<const double> etas,
                                     double beta, double epsilon,
                                     const PropagationControls& base_controls, int jobs = 1);

struct KuboReport {
  double beta = 0.0;
  Complex euclidean;     // I^(1)
  Complex real_time;     // i C_1 with the true switch
  double gap = 0.0;
};

KuboReport kubo_check(const SweepModel& model, double beta, double eta, double t,
                      const QuadControls& controls = {});

}  // namespace wickbench

#endif
