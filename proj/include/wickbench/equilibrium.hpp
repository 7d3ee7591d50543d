// equilibrium.hpp - Gibbs states, Euclidean evolution, KMS, time-ordered
// products and cumulants
#ifndef WICKBENCH_EQUILIBRIUM_HPP
#define WICKBENCH_EQUILIBRIUM_HPP

#include <span>
#include <vector>

#include "wickbench/hamiltonian.hpp"
#include "wickbench/lattice.hpp"
#include "wickbench/quadrature.hpp"

namespace wickbench {

struct TimedObservable {
  const FockOperator* op = nullptr;
  double time = 0.0;
};

// Timed matrix already expressed in the K eigenbasis (fast path for quadrature).
struct TimedMatrix {
  const Matrix* mat = nullptr;
  double time = 0.0;
};

// Eigendecomposition of K = H - mu N with the Boltzmann weights; queries are
// evaluated in the K eigenbasis with all exponents shifted to be <= 0.
class GibbsEnsemble {
 public:
  GibbsEnsemble(const FockBasis& basis, const FockOperator& hamiltonian, double beta, double mu);

  const FockBasis& basis() const { return basis_; }
  double beta() const { return beta_; }
  double mu() const { return mu_; }
  double log_partition() const { return log_z_; }
  const Eigen::VectorXd& spectrum() const { return energies_; }         // of K
  const Eigen::VectorXd& weights() const { return weights_; }          // normalized
  double spectral_spread() const { return energies_(energies_.size() - 1) - energies_(0); }

  Matrix to_eigenbasis(const Matrix& op) const;
  Matrix from_eigenbasis(const Matrix& op) const;
  Matrix density_matrix() const;  // in the original occupation basis

  Complex average(const FockOperator& op) const;
  Complex average_eig(const Matrix& op_eig) const;

  // gamma_t(O) = e^{tK} O e^{-tK}; throws OverflowRisk past the exponent budget.
  Matrix euclidean_eig(const Matrix& op_eig, double t) const;
  FockOperator euclidean_evolve(const FockOperator& op, double t) const;

  // Real-time Heisenberg conjugation by K; equals tau_t for gauge-invariant
  // operators since the extra number phases cancel.
  Matrix heisenberg_eig(const Matrix& op_eig, double t) const;

  double kms_residual(const FockOperator& o1, const FockOperator& o2, double t1, double t2) const;

  // <T gamma_{t_1}(O_1) ... gamma_{t_n}(O_n)>; even operators only, times are
  // reduced to [0, beta) periodically, equal times keep the given order.
  Complex time_ordered_expectation(std::span<const TimedObservable> items) const;
  Complex time_ordered_cumulant(std::span<const TimedObservable> items, int max_order = 4) const;

  // Fast path: matrices already rotated, no evenness validation.
  Complex tmoment_eig(std::span<const TimedMatrix> items) const;
  Complex tcumulant_eig(std::span<const TimedMatrix> items) const;

  double default_panel_width() const;

  double exponent_budget = 700.0;

 private:
  FockBasis basis_;
  double beta_;
  double mu_;
  Eigen::VectorXd energies_;
  Matrix vectors_;
  Eigen::VectorXd weights_;
  double log_z_;
};

double beta_seminorm(std::span<const double> times, double beta);

enum class GibbsMode { direct, series };

// Instantaneous Gibbs expectation of O under H + eps g(eta t) P at inverse
// temperature beta; series mode sums the cumulant expansion up to n_max.
Complex instantaneous_gibbs_expectation(const FockBasis& basis, const DrivenHamiltonian& driven,
                                        double beta, double mu, const FockOperator& observable,
                                        double t, GibbsMode mode, int n_max = 2,
                                        const QuadControls& controls = {});

// Same rho but for an externally supplied drive amplitude (used with the
// periodized switch value instead of g(eta t)).
Complex shifted_gibbs_expectation(const FockBasis& basis, const FockOperator& hamiltonian,
                                  const FockOperator& perturbation, double amplitude, double beta,
                                  double mu, const FockOperator& observable);

}  // namespace wickbench

#endif
