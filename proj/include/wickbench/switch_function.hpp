// switch_function.hpp - switch functions as Laplace data, the (beta, eta)
// periodized approximant and its frequency coefficients, inverse Laplace
#ifndef WICKBENCH_SWITCH_FUNCTION_HPP
#define WICKBENCH_SWITCH_FUNCTION_HPP

#include <complex>
#include <optional>
#include <utility>
#include <vector>

namespace wickbench {

// g(t) = sum_k w_k e^{xi_k t} + int_0^inf e^{xi t} h(xi) dxi  for t <= 0,
// h sampled on a log-spaced grid with trapezoidal integration.
struct SwitchSpec {
  std::vector<std::pair<double, double>> atoms;  // (xi > 0, weight)
  std::vector<double> grid;                      // increasing xi samples
  std::vector<double> density;                   // h at the grid points

  bool has_density() const { return !grid.empty(); }
};

struct SwitchMoments {
  double l1 = 0.0;          // ||h||_1
  double over_xi = 0.0;     // ||h/xi||_1
  double xi_l1 = 0.0;       // ||xi h||_1
  double over_xi_d2 = 0.0;  // int_0^1 |h|/xi^{d+2}
  double xi_m1 = 0.0;       // int_1^inf xi^{m+1} |h|
  double signed_mass = 0.0;
};

SwitchMoments switch_moments(const SwitchSpec& spec, int dimension, int m = 0);

// Atoms of 1 - (1 - e^t)^M expanded by the binomial theorem.
std::vector<std::pair<double, double>> binomial_atoms(int exponent);

SwitchSpec exponential_switch();              // g(t) = e^t
SwitchSpec flat_switch(int m);                // m vanishing derivatives at 0
SwitchSpec atom_switch(std::vector<std::pair<double, double>> atoms);
SwitchSpec rational_switch(double a, int n);  // g(z) = 1/(z - a)^n via inverse Laplace

double eval_switch(const SwitchSpec& spec, double t);  // t <= 0

// Frequency coefficients of the periodized approximant on (2pi/beta) N.
// coefficient(0) = 0 by construction; kept until the certified l1 tail of
// the discarded coefficients drops below 1e-12 * ||h||_1.
struct PeriodizedSwitch {
  double beta = 0.0;
  double eta = 0.0;
  std::vector<double> omegas;
  std::vector<double> coefficients;
  double discarded_tail = 0.0;

  double coefficient_l1() const;
  double coefficient_weighted_l1() const;  // sum omega * |coeff|
};

PeriodizedSwitch periodize(const SwitchSpec& spec, double beta, double eta);

// Sum over kept frequencies of coeff * e^{omega z}; requires Re z <= 0.
std::complex<double> eval_periodized(const PeriodizedSwitch& ps, std::complex<double> z);

struct ApproximationGap {
  double gap = 0.0;    // |g_{beta,eta}(t) - g(eta t)|
  double bound = 0.0;  // (2 pi / (e beta eta)) ||h/xi||_1
  double pointwise_bound = 0.0;  // (2 pi |t| / beta) int |h| e^{xi eta t}
};

ApproximationGap approximation_gap(const SwitchSpec& spec, const PeriodizedSwitch& ps, double t);

// Vertical-line inverse Laplace of g(z) = 1/(z - a)^n at abscissa < a.
// Returns h(xi); *tail_estimate reports the truncated contour mass.
struct RationalSwitchDescriptor {
  double a = 2.0;
  int n = 5;
};

double inverse_laplace(const RationalSwitchDescriptor& gz, double xi, double contour_abscissa,
                       int node_count, double* tail_estimate = nullptr);

// Certified truncation time: smallest T with the tail mass of |g| below
// rel_tol times the total mass.
double switch_time_cutoff(const SwitchSpec& spec, double eta, double rel_tol = 1e-8);
double switch_time_cutoff(const PeriodizedSwitch& ps, double rel_tol = 1e-8);

}  // namespace wickbench

#endif
