#include "wickbench/switch_function.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "wickbench/errors.hpp"
#include "wickbench/quadrature.hpp"

namespace wickbench {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Trapezoid of f(xi) * h(xi) over the sampled grid.
double density_integral(const SwitchSpec& spec, const std::function<double(double, double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < spec.grid.size(); ++i) {
    const double x0 = spec.grid[i], x1 = spec.grid[i + 1];
    acc += 0.5 * (x1 - x0) * (f(x0, spec.density[i]) + f(x1, spec.density[i + 1]));
  }
  return acc;
}

// Integral of the piecewise-linear interpolant of h over [a, b], clipped to the grid.
double density_integral_between(const SwitchSpec& spec, double a, double b) {
  if (!spec.has_density() || b <= a) return 0.0;
  const auto& x = spec.grid;
  const auto& h = spec.density;
  a = std::max(a, x.front());
  b = std::min(b, x.back());
  if (b <= a) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double lo = std::max(a, x[i]);
    const double hi = std::min(b, x[i + 1]);
    if (hi <= lo) continue;
    const double w = x[i + 1] - x[i];
    const auto interp = [&](double t) { return h[i] + (h[i + 1] - h[i]) * (t - x[i]) / w; };
    acc += 0.5 * (hi - lo) * (interp(lo) + interp(hi));
  }
  return acc;
}

}  // namespace

SwitchMoments switch_moments(const SwitchSpec& spec, int dimension, int m) {
  SwitchMoments mom;
  const double p = dimension + 2.0;
  for (const auto& [xi, w] : spec.atoms) {
    if (xi <= 0.0) throw std::invalid_argument("switch atoms must have xi > 0");
    mom.l1 += std::abs(w);
    mom.over_xi += std::abs(w) / xi;
    mom.xi_l1 += std::abs(w) * xi;
    if (xi <= 1.0) mom.over_xi_d2 += std::abs(w) * std::pow(xi, -p);
    if (xi >= 1.0) mom.xi_m1 += std::abs(w) * std::pow(xi, m + 1.0);
    mom.signed_mass += w;
  }
  if (spec.has_density()) {
    mom.l1 += density_integral(spec, [](double, double h) { return std::abs(h); });
    mom.over_xi += density_integral(spec, [](double x, double h) { return std::abs(h) / x; });
    mom.xi_l1 += density_integral(spec, [](double x, double h) { return std::abs(h) * x; });
    mom.over_xi_d2 += density_integral(spec, [&](double x, double h) {
      return x <= 1.0 ? std::abs(h) * std::pow(x, -p) : 0.0;
    });
    mom.xi_m1 += density_integral(spec, [&](double x, double h) {
      return x >= 1.0 ? std::abs(h) * std::pow(x, m + 1.0) : 0.0;
    });
    mom.signed_mass += density_integral(spec, [](double, double h) { return h; });
  }
  return mom;
}

std::vector<std::pair<double, double>> binomial_atoms(int exponent) {
  if (exponent < 1) throw std::invalid_argument("binomial_atoms: exponent must be >= 1");
  // 1 - (1 - e^t)^M = sum_{k=1}^{M} (-1)^{k+1} C(M,k) e^{k t}
  std::vector<std::pair<double, double>> atoms;
  double binom = 1.0;
  for (int k = 1; k <= exponent; ++k) {
    binom = binom * (exponent - k + 1) / k;
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    atoms.emplace_back(static_cast<double>(k), sign * binom);
  }
  return atoms;
}

SwitchSpec exponential_switch() {
  SwitchSpec spec;
  spec.atoms = {{1.0, 1.0}};
  return spec;
}

SwitchSpec flat_switch(int m) {
  if (m < 0) throw std::invalid_argument("flat_switch: m must be >= 0");
  SwitchSpec spec;
  spec.atoms = binomial_atoms(m + 1);
  return spec;
}

SwitchSpec atom_switch(std::vector<std::pair<double, double>> atoms) {
  SwitchSpec spec;
  spec.atoms = std::move(atoms);
  for (const auto& [xi, w] : spec.atoms)
    if (xi <= 0.0) throw std::invalid_argument("atom_switch: xi must be positive");
  return spec;
}

SwitchSpec rational_switch(double a, int n) {
  if (a <= 0.0 || n < 2) throw std::invalid_argument("rational_switch: need a > 0, n >= 2");
  SwitchSpec spec;
  const double xi_max = (n + 40.0) / a;
  const double xi_min = 1e-6;
  const int points = 4000;
  spec.grid.resize(points);
  spec.density.resize(points);
  const double step = std::log(xi_max / xi_min) / (points - 1);
  const RationalSwitchDescriptor gz{a, n};
  for (int i = 0; i < points; ++i) {
    const double xi = xi_min * std::exp(step * i);
    spec.grid[i] = xi;
    spec.density[i] = inverse_laplace(gz, xi, 0.25 * a, 64);
  }
  return spec;
}

double eval_switch(const SwitchSpec& spec, double t) {
  if (t > 0.0) throw PositiveTimeUnsupported("eval_switch: t must be <= 0");
  double value = 0.0;
  for (const auto& [xi, w] : spec.atoms) value += w * std::exp(xi * t);
  if (spec.has_density())
    value += density_integral(spec, [&](double x, double h) { return h * std::exp(x * t); });
  return value;
}

double PeriodizedSwitch::coefficient_l1() const {
  double acc = 0.0;
  for (double c : coefficients) acc += std::abs(c);
  return acc;
}

double PeriodizedSwitch::coefficient_weighted_l1() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < coefficients.size(); ++i) acc += omegas[i] * std::abs(coefficients[i]);
  return acc;
}

PeriodizedSwitch periodize(const SwitchSpec& spec, double beta, double eta) {
  if (beta <= 0.0 || eta <= 0.0) throw std::invalid_argument("periodize: beta, eta must be positive");
  PeriodizedSwitch ps;
  ps.beta = beta;
  ps.eta = eta;
  const double bin = kTwoPi / (beta * eta);  // xi-width of one frequency bin
  std::map<long, double> coeff;              // bin index m -> coefficient at omega=(2pi/beta)(m+1)
  for (const auto& [xi, w] : spec.atoms) {
    const long m = static_cast<long>(std::floor(xi / bin));
    coeff[m] += w;
  }
  const SwitchMoments mom = switch_moments(spec, 1);
  double tail = 0.0;
  if (spec.has_density()) {
    SwitchSpec abs_spec = spec;
    for (auto& h : abs_spec.density) h = std::abs(h);
    const double abs_tol = 1e-12 * mom.l1;
    // Suffix masses of |h| on bin boundaries certify the discarded tail.
    const long max_bins = static_cast<long>(std::ceil(spec.grid.back() / bin)) + 1;
    for (long m = 0; m < max_bins; ++m) {
      const double suffix = density_integral_between(abs_spec, m * bin, spec.grid.back());
      if (suffix < abs_tol) {
        tail = suffix;
        break;
      }
      const double c = density_integral_between(spec, m * bin, (m + 1) * bin);
      if (c != 0.0) coeff[m] += c;
    }
  }
  ps.discarded_tail = tail;
  ps.omegas.reserve(coeff.size());
  ps.coefficients.reserve(coeff.size());
  for (const auto& [m, c] : coeff) {
    if (c == 0.0) continue;
    ps.omegas.push_back(kTwoPi / beta * static_cast<double>(m + 1));
    ps.coefficients.push_back(c);
  }
  return ps;
}

std::complex<double> eval_periodized(const PeriodizedSwitch& ps, std::complex<double> z) {
  if (z.real() > 1e-12) throw std::invalid_argument("eval_periodized: Re z must be <= 0");
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < ps.omegas.size(); ++i)
    acc += ps.coefficients[i] * std::exp(ps.omegas[i] * z);
  return acc;
}

ApproximationGap approximation_gap(const SwitchSpec& spec, const PeriodizedSwitch& ps, double t) {
  if (t > 0.0) throw PositiveTimeUnsupported("approximation_gap: t must be <= 0");
  ApproximationGap out;
  out.gap = std::abs(eval_periodized(ps, t).real() - eval_switch(spec, ps.eta * t));
  const SwitchMoments mom = switch_moments(spec, 1);
  out.bound = kTwoPi / (std::numbers::e * ps.beta * ps.eta) * mom.over_xi;
  double damped = 0.0;
  for (const auto& [xi, w] : spec.atoms) damped += std::abs(w) * std::exp(xi * ps.eta * t);
  if (spec.has_density())
    damped += density_integral(
        spec, [&](double x, double h) { return std::abs(h) * std::exp(x * ps.eta * t); });
  out.pointwise_bound = kTwoPi * std::abs(t) / ps.beta * damped;
  return out;
}

double inverse_laplace(const RationalSwitchDescriptor& gz, double xi, double contour_abscissa,
                       int node_count, double* tail_estimate) {
  if (xi < 0.0) throw std::invalid_argument("inverse_laplace: xi must be >= 0");
  if (contour_abscissa >= gz.a)
    throw std::invalid_argument("inverse_laplace: contour must pass left of the pole");
  const double c = contour_abscissa;
  const double y_max = 1e3;
  // Resolve the oscillation e^{-i y xi} only where |g| is above the target
  // accuracy; the remainder is covered by coarse panels and the tail report.
  const double y_resolved =
      std::min(y_max, std::pow(1e9 / (gz.n - 1.0), 1.0 / (gz.n - 1.0)));
  // panels must resolve both the e^{-i y xi} oscillation and the integrand's
  // own peak of width |a - c| around y = 0
  const double osc_width = std::min(kTwoPi / (8.0 * std::max(xi, 0.25)), 0.5 * (gz.a - c));
  const auto g = [&](std::complex<double> z) {
    const std::complex<double> base = z - gz.a;
    std::complex<double> pw = 1.0;
    for (int k = 0; k < gz.n; ++k) pw *= base;
    return 1.0 / pw;
  };
  // integral over the ascending line c - i inf -> c + i inf, z = c + i y:
  // h(xi) = e^{-c xi} / (2 pi) * int dy e^{-i y xi} g(c + i y)
  std::complex<double> acc = 0.0;
  const QuadRule rule = gauss_legendre(8);
  const auto add_segment = [&](double lo, double hi, double width) {
    const int panels = std::max(node_count, static_cast<int>(std::ceil((hi - lo) / width)));
    const double w = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * w;
      for (int k = 0; k < 8; ++k) {
        const double y = mid + 0.5 * w * rule.nodes[k];
        const std::complex<double> phase(std::cos(y * xi), -std::sin(y * xi));
        acc += 0.5 * w * rule.weights[k] * phase * g({c, y});
      }
    }
  };
  add_segment(-y_resolved, y_resolved, osc_width);
  if (y_resolved < y_max) {
    add_segment(y_resolved, y_max, 10.0);
    add_segment(-y_max, -y_resolved, 10.0);
  }
  if (tail_estimate) {
    // bound: int_{y_max}^inf |g| dy <= y_max^{-(n-1)} / (n-1), both tails
    *tail_estimate =
        std::exp(-c * xi) / std::numbers::pi * std::pow(y_max, 1.0 - gz.n) / (gz.n - 1.0);
  }
  return std::exp(-c * xi) / kTwoPi * acc.real();
}

namespace {

double switch_tail_mass(const SwitchSpec& spec, double eta, double T) {
  double acc = 0.0;
  for (const auto& [xi, w] : spec.atoms) acc += std::abs(w) * std::exp(-xi * eta * T) / (xi * eta);
  if (spec.has_density()) {
    double dens = 0.0;
    for (std::size_t i = 0; i + 1 < spec.grid.size(); ++i) {
      const double x0 = spec.grid[i], x1 = spec.grid[i + 1];
      dens += 0.5 * (x1 - x0) *
              (std::abs(spec.density[i]) * std::exp(-x0 * eta * T) / (x0 * eta) +
               std::abs(spec.density[i + 1]) * std::exp(-x1 * eta * T) / (x1 * eta));
    }
    acc += dens;
  }
  return acc;
}

}  // namespace

double switch_time_cutoff(const SwitchSpec& spec, double eta, double rel_tol) {
  const double total = switch_tail_mass(spec, eta, 0.0);
  if (total <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (switch_tail_mass(spec, eta, hi) > rel_tol * total) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (switch_tail_mass(spec, eta, mid) > rel_tol * total)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-10 * (1.0 + hi)) break;
  }
  return hi;
}

double switch_time_cutoff(const PeriodizedSwitch& ps, double rel_tol) {
  const auto tail = [&](double T) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ps.omegas.size(); ++i)
      acc += std::abs(ps.coefficients[i]) * std::exp(-ps.omegas[i] * T) / ps.omegas[i];
    return acc;
  };
  const double total = tail(0.0);
  if (total <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (tail(hi) > rel_tol * total) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tail(mid) > rel_tol * total)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-10 * (1.0 + hi)) break;
  }
  return hi;
}

}  // namespace wickbench
