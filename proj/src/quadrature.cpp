#include "wickbench/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "wickbench/errors.hpp"

namespace wickbench {

QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

PanelGrid composite_grid(double a, double b, double max_panel_width, int points_per_panel) {
  PanelGrid grid;
  if (b <= a) return grid;
  if (max_panel_width <= 0.0) throw std::invalid_argument("composite_grid: panel width must be positive");
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel_width)));
  const double width = (b - a) / panels;
  const QuadRule rule = gauss_legendre(points_per_panel);
  grid.nodes.reserve(static_cast<std::size_t>(panels) * points_per_panel);
  grid.weights.reserve(grid.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    for (int k = 0; k < points_per_panel; ++k) {
      grid.nodes.push_back(mid + 0.5 * width * rule.nodes[k]);
      grid.weights.push_back(0.5 * width * rule.weights[k]);
    }
  }
  return grid;
}

double integrate(const PanelGrid& grid, const std::function<double(double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) acc += grid.weights[i] * f(grid.nodes[i]);
  return acc;
}

namespace {

double simplex_level(int level, int n, double lo, double hi, double max_panel_width,
                     int points_per_panel, std::vector<double>& coords,
                     const std::function<double(const std::vector<double>&)>& f) {
  const PanelGrid grid = composite_grid(lo, hi, max_panel_width, points_per_panel);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    coords[level] = grid.nodes[i];
    double inner;
    if (level + 1 == n) {
      inner = f(coords);
    } else {
      inner = simplex_level(level + 1, n, lo, grid.nodes[i], max_panel_width, points_per_panel,
                            coords, f);
    }
    acc += grid.weights[i] * inner;
  }
  return acc;
}

}  // namespace

double simplex_integrate(int n, double lo, double hi, double max_panel_width, int points_per_panel,
                         const std::function<double(const std::vector<double>&)>& f) {
  if (n < 1) throw std::invalid_argument("simplex_integrate: dimension must be >= 1");
  std::vector<double> coords(static_cast<std::size_t>(n));
  return simplex_level(0, n, lo, hi, max_panel_width, points_per_panel, coords, f);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DegenerateFit("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.slope * x[i] + fit.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace wickbench
