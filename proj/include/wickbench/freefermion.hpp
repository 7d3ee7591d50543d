// freefermion.hpp - closed-form two-point functions of quasi-free states,
// ring-diagram cumulants, decay fits, cumulant-integrability diagnostics
#ifndef WICKBENCH_FREEFERMION_HPP
#define WICKBENCH_FREEFERMION_HPP

#include <span>
#include <vector>

#include "wickbench/equilibrium.hpp"
#include "wickbench/lattice.hpp"
#include "wickbench/quadrature.hpp"

namespace wickbench {

// Eigendecomposition of the one-body kernel with stable Fermi factors;
// evaluates g2(t, x; t', y) = <T gamma_t(a_x) gamma_t'(a*_y)> of the
// non-interacting Gibbs state, extended antiperiodically in both times.
class TwoPointCache {
 public:
  TwoPointCache(const Matrix& one_body_kernel, double beta, double mu);

  double beta() const { return beta_; }
  double mu() const { return mu_; }
  int modes() const { return static_cast<int>(values_.size()); }

  Complex two_point(double t, int x, double tp, int y) const;
  Matrix two_point_matrix(double t, double tp) const;

 private:
  double beta_;
  double mu_;
  Eigen::VectorXd values_;
  Matrix vectors_;

  // value and antiperiodic sign for the reduced time separation
  double branch_factor(double tau, bool upper, double delta) const;
};

// Connected correlation <T gamma_{t_1}(O_1); ...; gamma_{t_m}(O_m)> of
// quadratic observables O_i = sum O_i(x;y) a*_x a_y, via cyclic ring
// contractions anchored at the first observable.
Complex ring_cumulant(const TwoPointCache& cache, std::span<const Matrix> kernels,
                      std::span<const double> times);

struct DecaySample {
  double t = 0.0;
  double tp = 0.0;
  int x = 0;
  int y = 0;
};

struct DecayFit {
  double log_prefactor = 0.0;  // log C
  double rate = 0.0;           // c in C e^{-c r}
  double r2 = 0.0;
  int samples_used = 0;
};

DecayFit decay_fit(const TwoPointCache& cache, const LatticeGeometry& geometry,
                   std::span<const DecaySample> samples);

struct Assumption1Result {
  double value = 0.0;
  double implied_c = 0.0;
};

// Weighted integral over [0, beta]^n of the summed absolute cumulants with
// the first n observables translated over all lattice cells:
//   int dt (1 + |t|_beta^p) sum_{a_1..a_n} |<T gamma_{t_1}(O^1_{a_1}); ...; O^{n+1}>|.
// Kernels are one-body matrices; both paths share the same quadrature grid.
Assumption1Result assumption1_integral_exact(const GibbsEnsemble& ens,
                                             const LatticeGeometry& geometry,
                                             const FockBasis& basis,
                                             std::span<const Matrix> kernels, int n,
                                             int weight_power, const QuadControls& controls = {});

Assumption1Result assumption1_integral_ring(const TwoPointCache& cache,
                                            const LatticeGeometry& geometry,
                                            std::span<const Matrix> kernels, int n,
                                            int weight_power, const QuadControls& controls = {});

// Kernel of the observable translated by one lattice vector per cell shift.
Matrix translate_kernel(const LatticeGeometry& geometry, const Matrix& kernel,
                        const std::vector<int>& shift);

}  // namespace wickbench

#endif
