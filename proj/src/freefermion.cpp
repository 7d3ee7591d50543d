#include "wickbench/freefermion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "wickbench/errors.hpp"
#include "wickbench/hamiltonian.hpp"

namespace wickbench {

TwoPointCache::TwoPointCache(const Matrix& one_body_kernel, double beta, double mu)
    : beta_(beta), mu_(mu) {
  if (beta <= 0.0) throw std::invalid_argument("TwoPointCache: beta must be positive");
  if ((one_body_kernel - one_body_kernel.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw KernelNotHermitian("TwoPointCache: kernel not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(one_body_kernel);
  if (solver.info() != Eigen::Success) throw EigenFailure("TwoPointCache: eigensolver failed");
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

double TwoPointCache::branch_factor(double tau, bool upper, double delta) const {
  if (upper) {
    // e^{-tau delta} / (1 + e^{-beta delta}), tau in (0, beta)
    if (delta >= 0.0) return std::exp(-tau * delta) / (1.0 + std::exp(-beta_ * delta));
    return std::exp((beta_ - tau) * delta) / (1.0 + std::exp(beta_ * delta));
  }
  // -e^{-tau delta} / (1 + e^{beta delta}), tau in (-beta, 0]
  if (delta <= 0.0) return -std::exp(-tau * delta) / (1.0 + std::exp(beta_ * delta));
  return -std::exp(-(tau + beta_) * delta) / (1.0 + std::exp(-beta_ * delta));
}

namespace {

// reduce to [0, beta) and count wraps for the antiperiodic sign
std::pair<double, long> reduce_antiperiodic(double t, double beta) {
  const double k = std::floor(t / beta);
  double r = t - k * beta;
  if (r >= beta) {  // guard the rounding edge
    r -= beta;
    return {r, static_cast<long>(k) + 1};
  }
  return {r, static_cast<long>(k)};
}

}  // namespace

Complex TwoPointCache::two_point(double t, int x, double tp, int y) const {
  const auto [tr, kt] = reduce_antiperiodic(t, beta_);
  const auto [tpr, ktp] = reduce_antiperiodic(tp, beta_);
  const double sign = ((kt + ktp) % 2 == 0) ? 1.0 : -1.0;
  const double tau = tr - tpr;
  const bool upper = tr > tpr;
  Complex acc = 0.0;
  for (int m = 0; m < modes(); ++m)
    acc += vectors_(x, m) * branch_factor(tau, upper, values_(m) - mu_) * std::conj(vectors_(y, m));
  return sign * acc;
}

Matrix TwoPointCache::two_point_matrix(double t, double tp) const {
  const auto [tr, kt] = reduce_antiperiodic(t, beta_);
  const auto [tpr, ktp] = reduce_antiperiodic(tp, beta_);
  const double sign = ((kt + ktp) % 2 == 0) ? 1.0 : -1.0;
  const double tau = tr - tpr;
  const bool upper = tr > tpr;
  Eigen::VectorXd factors(modes());
  for (int m = 0; m < modes(); ++m) factors(m) = sign * branch_factor(tau, upper, values_(m) - mu_);
  return vectors_ * factors.asDiagonal() * vectors_.adjoint();
}

Complex ring_cumulant(const TwoPointCache& cache, std::span<const Matrix> kernels,
                      std::span<const double> times) {
  const int m = static_cast<int>(kernels.size());
  if (m < 1 || static_cast<std::size_t>(m) != times.size())
    throw std::invalid_argument("ring_cumulant: kernels/times mismatch");
  if (m > 6) throw CumulantOrderExceeded("ring_cumulant: permutation sum capped at n+1 <= 6");
  for (const Matrix& k : kernels)
    if (k.rows() != cache.modes() || k.cols() != cache.modes())
      throw ObservableNotQuadratic("ring_cumulant: kernel size does not match the mode count");
  // propagator blocks for every ordered time pair
  std::vector<Matrix> g(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      g[static_cast<std::size_t>(i) * m + j] = cache.two_point_matrix(times[i], times[j]);
  if (m == 1) return -(kernels[0] * g[0]).trace();
  std::vector<int> perm(static_cast<std::size_t>(m - 1));
  std::iota(perm.begin(), perm.end(), 1);
  Complex acc = 0.0;
  do {
    Matrix chain = kernels[0];
    int prev = 0;
    for (int idx : perm) {
      chain = chain * g[static_cast<std::size_t>(prev) * m + idx] * kernels[static_cast<std::size_t>(idx)];
      prev = idx;
    }
    acc += (chain * g[static_cast<std::size_t>(prev) * m + 0]).trace();
  } while (std::next_permutation(perm.begin(), perm.end()));
  return -acc;
}

DecayFit decay_fit(const TwoPointCache& cache, const LatticeGeometry& geometry,
                   std::span<const DecaySample> samples) {
  std::vector<double> xs, ys;
  for (const DecaySample& s : samples) {
    const Complex v = cache.two_point(s.t, s.x, s.tp, s.y);
    if (std::abs(v) < 1e-14) continue;
    const double dt = std::abs(std::remainder(s.t - s.tp, cache.beta()));
    xs.push_back(geometry.torus_distance(s.x, s.y) + dt);
    ys.push_back(std::log(std::abs(v)));
  }
  if (xs.size() < 2) throw DegenerateFit("decay_fit: all samples below 1e-14");
  const LineFit fit = fit_line(xs, ys);
  DecayFit out;
  out.log_prefactor = fit.intercept;
  out.rate = -fit.slope;
  out.r2 = fit.r2;
  out.samples_used = static_cast<int>(xs.size());
  return out;
}

Matrix translate_kernel(const LatticeGeometry& geometry, const Matrix& kernel,
                        const std::vector<int>& shift) {
  const int n = geometry.mode_count();
  Matrix out = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    const int tx = geometry.translate_mode(x, shift);
    for (int y = 0; y < n; ++y)
      if (kernel(x, y) != Complex(0.0)) out(tx, geometry.translate_mode(y, shift)) = kernel(x, y);
  }
  return out;
}

namespace {

// shared quadrature grid on [0, beta]^n; dimension j nodes carry a tiny
// offset so coincident-time points never land exactly on a tie
std::vector<PanelGrid> box_grids(double beta, int n, const QuadControls& controls,
                                 double fallback_panel) {
  const double panel =
      (controls.panel_width > 0.0 ? controls.panel_width : fallback_panel) / controls.refine;
  std::vector<PanelGrid> grids;
  for (int j = 0; j < n; ++j) {
    PanelGrid grid = composite_grid(0.0, beta, panel, controls.points_per_panel);
    const double offset = static_cast<double>(j) * 1e-9 * beta;
    for (double& node : grid.nodes) node = std::min(node + offset, beta * (1.0 - 1e-15));
    grids.push_back(std::move(grid));
  }
  return grids;
}

std::vector<std::vector<int>> all_shifts(const LatticeGeometry& geometry) {
  std::vector<std::vector<int>> shifts;
  const int cells = geometry.cells();
  for (int c = 0; c < cells; ++c) {
    std::vector<int> shift(static_cast<std::size_t>(geometry.d));
    int rest = c;
    for (int i = 0; i < geometry.d; ++i) {
      shift[static_cast<std::size_t>(i)] = rest % geometry.L;
      rest /= geometry.L;
    }
    shifts.push_back(std::move(shift));
  }
  return shifts;
}

template <class CumulantAtPoint>
Assumption1Result weighted_box_integral(double beta, int n, int weight_power,
                                        const QuadControls& controls, double fallback_panel,
                                        std::size_t translation_count,
                                        CumulantAtPoint&& cumulant_sum) {
  const std::vector<PanelGrid> grids = box_grids(beta, n, controls, fallback_panel);
  std::size_t points = 1;
  for (const PanelGrid& g : grids) points *= g.nodes.size();
  if (points * translation_count > controls.max_evaluations)
    throw QuadratureBudgetExceeded("assumption1_integral: node/translation budget exceeded");
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> times(static_cast<std::size_t>(n));
  double value = 0.0;
  for (std::size_t flat = 0; flat < points; ++flat) {
    std::size_t rest = flat;
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      const std::size_t k = rest % grids[static_cast<std::size_t>(j)].nodes.size();
      rest /= grids[static_cast<std::size_t>(j)].nodes.size();
      times[static_cast<std::size_t>(j)] = grids[static_cast<std::size_t>(j)].nodes[k];
      w *= grids[static_cast<std::size_t>(j)].weights[k];
    }
    const double weight = 1.0 + std::pow(beta_seminorm(times, beta), weight_power);
    value += w * weight * cumulant_sum(times);
  }
  Assumption1Result out;
  out.value = value;
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  out.implied_c = std::pow(value / fact, 1.0 / n);
  return out;
}

}  // namespace

Assumption1Result assumption1_integral_exact(const GibbsEnsemble& ens,
                                             const LatticeGeometry& geometry,
                                             const FockBasis& basis,
                                             std::span<const Matrix> kernels, int n,
                                             int weight_power, const QuadControls& controls) {
  if (n < 1 || n > 3) throw CumulantOrderExceeded("assumption1_integral: n must be in 1..3");
  if (kernels.size() != static_cast<std::size_t>(n) + 1)
    throw std::invalid_argument("assumption1_integral: need n+1 kernels");
  const std::vector<std::vector<int>> shifts = all_shifts(geometry);
  // rotated Fock matrices of every translated moving observable
  std::vector<std::vector<Matrix>> translated(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (const std::vector<int>& shift : shifts) {
      QuadraticKernel k;
      k.entries = translate_kernel(geometry, kernels[static_cast<std::size_t>(i)], shift);
      k.range = 2.0 * geometry.L;  // support translation cannot violate the range
      translated[static_cast<std::size_t>(i)].push_back(
          ens.to_eigenbasis(build_quadratic(geometry, basis, k).matrix));
    }
  QuadraticKernel pinned;
  pinned.entries = kernels[static_cast<std::size_t>(n)];
  pinned.range = 2.0 * geometry.L;
  const Matrix pinned_eig = ens.to_eigenbasis(build_quadratic(geometry, basis, pinned).matrix);
  const std::size_t cells = shifts.size();
  std::size_t combos = 1;
  for (int i = 0; i < n; ++i) combos *= cells;
  return weighted_box_integral(
      ens.beta(), n, weight_power, controls, ens.default_panel_width(), combos,
      [&](const std::vector<double>& times) {
        double acc = 0.0;
        std::vector<TimedMatrix> items(static_cast<std::size_t>(n) + 1);
        items[static_cast<std::size_t>(n)] = {&pinned_eig, 0.0};
        std::vector<std::size_t> which(static_cast<std::size_t>(n), 0);
        for (std::size_t combo = 0; combo < combos; ++combo) {
          std::size_t rest = combo;
          for (int i = 0; i < n; ++i) {
            const std::size_t a = rest % cells;
            rest /= cells;
            items[static_cast<std::size_t>(i)] = {&translated[static_cast<std::size_t>(i)][a],
                                                  times[static_cast<std::size_t>(i)]};
          }
          acc += std::abs(ens.tcumulant_eig(items));
        }
        return acc;
      });
}

Assumption1Result assumption1_integral_ring(const TwoPointCache& cache,
                                            const LatticeGeometry& geometry,
                                            std::span<const Matrix> kernels, int n,
                                            int weight_power, const QuadControls& controls) {
  if (n < 1 || n > 3) throw CumulantOrderExceeded("assumption1_integral: n must be in 1..3");
  if (kernels.size() != static_cast<std::size_t>(n) + 1)
    throw std::invalid_argument("assumption1_integral: need n+1 kernels");
  const std::vector<std::vector<int>> shifts = all_shifts(geometry);
  std::vector<std::vector<Matrix>> translated(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (const std::vector<int>& shift : shifts)
      translated[static_cast<std::size_t>(i)].push_back(
          translate_kernel(geometry, kernels[static_cast<std::size_t>(i)], shift));
  const std::size_t cells = shifts.size();
  std::size_t combos = 1;
  for (int i = 0; i < n; ++i) combos *= cells;
  // pass an explicit panel_width when comparing against the exact path so
  // both sides share the same grid
  return weighted_box_integral(
      cache.beta(), n, weight_power, controls,
      std::min(cache.beta() / 4.0, 0.5), combos, [&](const std::vector<double>& times) {
        double acc = 0.0;
        std::vector<Matrix> ring_kernels(static_cast<std::size_t>(n) + 1);
        std::vector<double> ring_times(static_cast<std::size_t>(n) + 1);
        ring_kernels[static_cast<std::size_t>(n)] = kernels[static_cast<std::size_t>(n)];
        ring_times[static_cast<std::size_t>(n)] = 0.0;
        for (int i = 0; i < n; ++i) ring_times[static_cast<std::size_t>(i)] = times[static_cast<std::size_t>(i)];
        for (std::size_t combo = 0; combo < combos; ++combo) {
          std::size_t rest = combo;
          for (int i = 0; i < n; ++i) {
            const std::size_t a = rest % cells;
            rest /= cells;
            ring_kernels[static_cast<std::size_t>(i)] = translated[static_cast<std::size_t>(i)][a];
          }
          acc += std::abs(ring_cumulant(cache, ring_kernels, ring_times));
        }
        return acc;
      });
}

}  // namespace wickbench
