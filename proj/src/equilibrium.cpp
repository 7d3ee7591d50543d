#include "wickbench/equilibrium.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "wickbench/errors.hpp"
#include "wickbench/partitions.hpp"

namespace wickbench {

GibbsEnsemble::GibbsEnsemble(const FockBasis& basis, const FockOperator& hamiltonian, double beta,
                             double mu)
    : basis_(basis), beta_(beta), mu_(mu) {
  if (beta <= 0.0) throw std::invalid_argument("GibbsEnsemble: beta must be positive");
  if ((hamiltonian.matrix - hamiltonian.matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw KernelNotHermitian("GibbsEnsemble: Hamiltonian is not self-adjoint");
  if (!hamiltonian.gauge_invariant)
    throw RangeViolation("GibbsEnsemble: Hamiltonian must be gauge invariant");
  Matrix k = hamiltonian.matrix;
  for (Eigen::Index s = 0; s < basis.dimension; ++s)
    k(s, s) -= mu * static_cast<double>(std::popcount(static_cast<std::uint64_t>(s)));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(k);
  if (solver.info() != Eigen::Success) throw EigenFailure("GibbsEnsemble: eigensolver failed");
  energies_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
  const double e0 = energies_(0);
  weights_ = (-beta * (energies_.array() - e0)).exp();
  const double z_shifted = weights_.sum();
  weights_ /= z_shifted;
  log_z_ = std::log(z_shifted) - beta * e0;
}

Matrix GibbsEnsemble::to_eigenbasis(const Matrix& op) const {
  return vectors_.adjoint() * op * vectors_;
}

Matrix GibbsEnsemble::from_eigenbasis(const Matrix& op) const {
  return vectors_ * op * vectors_.adjoint();
}

Matrix GibbsEnsemble::density_matrix() const {
  return vectors_ * weights_.asDiagonal() * vectors_.adjoint();
}

Complex GibbsEnsemble::average(const FockOperator& op) const {
  return average_eig(to_eigenbasis(op.matrix));
}

Complex GibbsEnsemble::average_eig(const Matrix& op_eig) const {
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < op_eig.rows(); ++i) acc += weights_(i) * op_eig(i, i);
  return acc;
}

Matrix GibbsEnsemble::euclidean_eig(const Matrix& op_eig, double t) const {
  if (std::abs(t) * spectral_spread() > exponent_budget)
    throw OverflowRisk("euclidean_eig: |t| * spectral spread exceeds the exponent budget");
  Matrix out(op_eig.rows(), op_eig.cols());
  for (Eigen::Index j = 0; j < op_eig.cols(); ++j)
    for (Eigen::Index i = 0; i < op_eig.rows(); ++i)
      out(i, j) = std::exp(t * (energies_(i) - energies_(j))) * op_eig(i, j);
  return out;
}

FockOperator GibbsEnsemble::euclidean_evolve(const FockOperator& op, double t) const {
  FockOperator out;
  out.matrix = from_eigenbasis(euclidean_eig(to_eigenbasis(op.matrix), t));
  out.support = op.support;
  out.gauge_invariant = op.gauge_invariant;
  return out;
}

Matrix GibbsEnsemble::heisenberg_eig(const Matrix& op_eig, double t) const {
  Matrix out(op_eig.rows(), op_eig.cols());
  for (Eigen::Index j = 0; j < op_eig.cols(); ++j)
    for (Eigen::Index i = 0; i < op_eig.rows(); ++i) {
      const double phase = t * (energies_(i) - energies_(j));
      out(i, j) = Complex(std::cos(phase), std::sin(phase)) * op_eig(i, j);
    }
  return out;
}

double GibbsEnsemble::kms_residual(const FockOperator& o1, const FockOperator& o2, double t1,
                                   double t2) const {
  const Matrix a1 = euclidean_eig(to_eigenbasis(o1.matrix), t1);
  const Matrix a2 = euclidean_eig(to_eigenbasis(o2.matrix), t2);
  const Matrix b2 = euclidean_eig(to_eigenbasis(o2.matrix), t2 + beta_);
  const Complex lhs = average_eig(a1 * a2);
  const Complex rhs = average_eig(b2 * a1);
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

namespace {

double reduce_to_period(double t, double beta) {
  double r = std::fmod(t, beta);
  if (r < 0.0) r += beta;
  return r;
}

}  // namespace

Complex GibbsEnsemble::tmoment_eig(std::span<const TimedMatrix> items) const {
  if (items.empty()) return 1.0;
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> reduced(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) reduced[i] = reduce_to_period(items[i].time, beta_);
  // descending times; ties keep the given order (normal-order convention is
  // delegated to the caller's operator ordering)
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return reduced[a] > reduced[b]; });
  const Eigen::Index dim = items[0].mat->rows();
  const double e0 = energies_(0);
  // tr(e^{-(beta - s_1) K} A_1 e^{-(s_1 - s_2) K} A_2 ... A_n e^{-s_n K}) / Z,
  // every exponent gap nonnegative, spectrum shifted by its minimum.
  const auto gap_scale = [&](Matrix& m, double gap) {
    for (Eigen::Index i = 0; i < dim; ++i) m.row(i) *= std::exp(-gap * (energies_(i) - e0));
  };
  Matrix prod = *items[order[0]].mat;
  gap_scale(prod, beta_ - reduced[order[0]]);
  for (std::size_t k = 1; k < order.size(); ++k) {
    Matrix next = *items[order[k]].mat;
    gap_scale(next, reduced[order[k - 1]] - reduced[order[k]]);
    prod = prod * next;
  }
  Complex acc = 0.0;
  const double s_last = reduced[order.back()];
  for (Eigen::Index i = 0; i < dim; ++i)
    acc += prod(i, i) * std::exp(-s_last * (energies_(i) - e0));
  double z = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) z += std::exp(-beta_ * (energies_(i) - e0));
  return acc / z;
}

Complex GibbsEnsemble::tcumulant_eig(std::span<const TimedMatrix> items) const {
  const int n = static_cast<int>(items.size());
  if (n == 0) return 0.0;
  if (n == 1) return tmoment_eig(items);
  // moments of every nonempty subset, then partition inversion
  std::vector<Complex> subset_moment(std::size_t(1) << n);
  std::vector<TimedMatrix> scratch;
  scratch.reserve(static_cast<std::size_t>(n));
  for (std::size_t mask = 1; mask < subset_moment.size(); ++mask) {
    scratch.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (std::size_t(1) << i)) scratch.push_back(items[static_cast<std::size_t>(i)]);
    subset_moment[mask] = tmoment_eig(scratch);
  }
  Complex acc = 0.0;
  for (const SetPartition& partition : set_partitions(n)) {
    double coeff = (partition.size() % 2 == 1) ? 1.0 : -1.0;
    for (std::size_t b = 2; b < partition.size(); ++b) coeff *= static_cast<double>(b);
    Complex prod = coeff;
    for (const std::vector<int>& block : partition) {
      std::size_t mask = 0;
      for (int i : block) mask |= std::size_t(1) << i;
      prod *= subset_moment[mask];
    }
    acc += prod;
  }
  return acc;
}

Complex GibbsEnsemble::time_ordered_expectation(std::span<const TimedObservable> items) const {
  std::vector<Matrix> rotated;
  rotated.reserve(items.size());
  std::vector<TimedMatrix> timed;
  timed.reserve(items.size());
  for (const TimedObservable& item : items) {
    if (!is_parity_even(basis_, item.op->matrix))
      throw OddOperatorUnsupported("time_ordered_expectation: odd operator");
    rotated.push_back(to_eigenbasis(item.op->matrix));
    timed.push_back({&rotated.back(), item.time});
  }
  return tmoment_eig(timed);
}

Complex GibbsEnsemble::time_ordered_cumulant(std::span<const TimedObservable> items,
                                             int max_order) const {
  if (static_cast<int>(items.size()) > max_order)
    throw CumulantOrderExceeded("time_ordered_cumulant: order exceeds cap");
  std::vector<Matrix> rotated;
  rotated.reserve(items.size());
  std::vector<TimedMatrix> timed;
  timed.reserve(items.size());
  for (const TimedObservable& item : items) {
    if (!is_parity_even(basis_, item.op->matrix))
      throw OddOperatorUnsupported("time_ordered_cumulant: odd operator");
    rotated.push_back(to_eigenbasis(item.op->matrix));
    timed.push_back({&rotated.back(), item.time});
  }
  return tcumulant_eig(timed);
}

double GibbsEnsemble::default_panel_width() const {
  const double spread = std::max(1e-12, spectral_spread());
  return std::min(beta_ / 4.0, std::max(0.02, 1.0 / spread));
}

double beta_seminorm(std::span<const double> times, double beta) {
  double acc = 0.0;
  for (double t : times) {
    const double r = std::abs(std::remainder(t, beta));
    acc += r;
  }
  return acc;
}

Complex instantaneous_gibbs_expectation(const FockBasis& basis, const DrivenHamiltonian& driven,
                                        double beta, double mu, const FockOperator& observable,
                                        double t, GibbsMode mode, int n_max,
                                        const QuadControls& controls) {
  const double amplitude = driven.epsilon * eval_switch(driven.switch_spec, driven.eta * t);
  if (mode == GibbsMode::direct) {
    return shifted_gibbs_expectation(basis, driven.base, driven.perturbation, amplitude, beta, mu,
                                     observable);
  }
  const GibbsEnsemble ens(basis, driven.base, beta, mu);
  const Matrix p_eig = ens.to_eigenbasis(driven.perturbation.matrix);
  const Matrix o_eig = ens.to_eigenbasis(observable.matrix);
  const double panel = controls.panel_width > 0.0 ? controls.panel_width / controls.refine
                                                  : ens.default_panel_width() / controls.refine;
  Complex value = ens.average_eig(o_eig);
  std::vector<double> magnitudes;
  for (int n = 1; n <= n_max; ++n) {
    const Complex integral = simplex_integrate_t<Complex>(
        n, 0.0, beta, panel, controls.points_per_panel, [&](const std::vector<double>& s) {
          std::vector<TimedMatrix> items;
          items.reserve(s.size() + 1);
          for (double si : s) items.push_back({&p_eig, si});
          items.push_back({&o_eig, 0.0});
          return ens.tcumulant_eig(items);
        });
    const Complex term = std::pow(Complex(-amplitude), n) * integral;
    value += term;
    magnitudes.push_back(std::abs(term));
    const std::size_t m = magnitudes.size();
    if (m >= 3 && magnitudes[m - 1] > magnitudes[m - 2] && magnitudes[m - 2] > magnitudes[m - 3])
      throw SeriesDivergenceSuspected("instantaneous_gibbs_expectation: growing series terms");
  }
  return value;
}

Complex shifted_gibbs_expectation(const FockBasis& basis, const FockOperator& hamiltonian,
                                  const FockOperator& perturbation, double amplitude, double beta,
                                  double mu, const FockOperator& observable) {
  FockOperator shifted;
  shifted.matrix = hamiltonian.matrix + amplitude * perturbation.matrix;
  shifted.support = merge_support(hamiltonian.support, perturbation.support);
  shifted.gauge_invariant = hamiltonian.gauge_invariant && perturbation.gauge_invariant;
  const GibbsEnsemble ens(basis, shifted, beta, mu);
  return ens.average(observable);
}

}  // namespace wickbench
