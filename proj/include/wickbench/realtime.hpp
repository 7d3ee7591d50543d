// realtime.hpp - non-autonomous unitary propagation, evolved Gibbs states,
// Duhamel coefficients, Lieb-Robinson probing
#ifndef WICKBENCH_REALTIME_HPP
#define WICKBENCH_REALTIME_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wickbench/equilibrium.hpp"
#include "wickbench/hamiltonian.hpp"
#include "wickbench/quadrature.hpp"
#include "wickbench/switch_function.hpp"

namespace wickbench {

enum class SwitchSource { true_switch, periodized };

struct PropagationControls {
  double t_start = 0.0;  // -T
  double t_end = 0.0;
  double step = 0.0;     // 0 -> min(0.05, 0.05 / ||H||)
  double unitarity_tolerance = 1e-9;
  int reunitarize_every = 100;
  SwitchSource source = SwitchSource::true_switch;
};

// U(t_end; t_start) for i dU = (H + eps f(t) P) U with f from the chosen
// switch source; commutator-free 4th-order scheme in the interaction picture.
FockOperator propagate(const FockBasis& basis, const DrivenHamiltonian& driven,
                       const PropagationControls& controls,
                       const PeriodizedSwitch* periodized = nullptr);

struct EvolvedState {
  Matrix rho;
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  std::string provenance;

  void validate(double tol = 1e-10) const;
};

// rho(t) = U(t; -T) rho_eq U(t; -T)*
EvolvedState evolve_gibbs(const FockBasis& basis, const DrivenHamiltonian& driven,
                          const GibbsEnsemble& ens, double t, PropagationControls controls,
                          const PeriodizedSwitch* periodized = nullptr);

// n-fold simplex integral of prod_j f(s_j) <[..[tau_t(O), tau_{s_1}(P)]..,
// tau_{s_n}(P)]> over -T <= s_n <= ... <= s_1 <= t, with Heisenberg factors
// taken exactly from the ensemble eigenbasis; O and P must be gauge invariant.
Complex duhamel_coefficient_real(const GibbsEnsemble& ens, const FockOperator& perturbation,
                                 const FockOperator& observable, int n, double t, double t_cutoff,
                                 const DrivenHamiltonian& driven, const QuadControls& controls,
                                 SwitchSource source, const PeriodizedSwitch* periodized = nullptr);

struct LiebRobinsonRow {
  double distance = 0.0;
  double time = 0.0;
  double commutator_norm = 0.0;
};

struct LiebRobinsonReport {
  std::vector<LiebRobinsonRow> rows;
  double slope = 0.0;  // of log norm vs distance at the largest probed time
  double r2 = 0.0;
};

LiebRobinsonReport lieb_robinson_probe(const FockBasis& basis, const LatticeGeometry& geometry,
                                       const DrivenHamiltonian& driven,
                                       const FockOperator& observable,
                                       std::span<const FockOperator> probes,
                                       std::span<const double> times,
                                       const PropagationControls& base_controls);

double support_distance(const LatticeGeometry& geometry, const std::vector<int>& a,
                        const std::vector<int>& b);

}  // namespace wickbench

#endif
