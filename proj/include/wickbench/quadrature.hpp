// quadrature.hpp - Gauss-Legendre rules, composite panels, iterated simplex integration
#ifndef WICKBENCH_QUADRATURE_HPP
#define WICKBENCH_QUADRATURE_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace wickbench {

struct QuadRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule of order n, Newton iteration on P_n.
QuadRule gauss_legendre(int n);

struct PanelGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Composite Gauss-Legendre on [a, b]: panels of width <= max_panel_width,
// points_per_panel nodes each. Nodes are strictly interior to [a, b].
PanelGrid composite_grid(double a, double b, double max_panel_width, int points_per_panel);

double integrate(const PanelGrid& grid, const std::function<double(double)>& f);

// Iterated integral over the ordered simplex  lo < s_n < ... < s_1 < hi
// of f(s_1, ..., s_n).  The callback receives the coordinates in descending
// order.  Each level uses a composite Gauss-Legendre grid with panels of
// width <= max_panel_width.
double simplex_integrate(int n, double lo, double hi, double max_panel_width,
                         int points_per_panel,
                         const std::function<double(const std::vector<double>&)>& f);

template <class Scalar, class F>
Scalar simplex_integrate_t(int n, double lo, double hi, double max_panel_width,
                           int points_per_panel, F&& f) {
  std::vector<double> coords(static_cast<std::size_t>(n));
  struct Rec {
    int n;
    double lo;
    double width;
    int ppp;
    F& f;
    std::vector<double>& coords;
    Scalar run(int level, double hi) {
      const PanelGrid grid = composite_grid(lo, hi, width, ppp);
      Scalar acc{};
      for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        coords[static_cast<std::size_t>(level)] = grid.nodes[i];
        const Scalar inner =
            (level + 1 == n) ? f(coords) : run(level + 1, grid.nodes[i]);
        acc += grid.weights[i] * inner;
      }
      return acc;
    }
  } rec{n, lo, max_panel_width, points_per_panel, f, coords};
  return rec.run(0, hi);
}

struct QuadControls {
  double panel_width = 0.0;     // 0 -> auto from the spectral width of the model
  int points_per_panel = 8;
  double refine = 1.0;          // panel width divided by this (node-doubling uses 2)
  std::size_t max_evaluations = 400000000;
  double budget_multiplier = 1.0;
};

// Least-squares line fit y = slope * x + intercept; returns {slope, intercept, r2}.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wickbench

#endif
