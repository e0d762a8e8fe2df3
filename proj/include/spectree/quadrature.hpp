#pragma once

#include <functional>
#include <span>
#include <vector>

namespace spectree::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evals = 0;
};

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, double rel_tol = 1e-10);

// Integrand with enough metadata to integrate over [0, inf): interior
// breakpoints (integration never crosses one inside a panel) and a bound on
// |f| valid for all arguments >= t, used to truncate the tail.
struct Integrand {
  std::function<double(double)> f;
  std::vector<double> breakpoints;          // ascending, may be empty
  std::function<double(double)> tail_bound; // sup_{s >= t} |f(s)|, may be null
};

// Integral of f over [lo, hi]; hi may be +inf, in which case the tail is
// truncated at T with tail_bound(T)*T_pad < tail_tol and T doubled until the
// added contribution is below the tolerance. Throws Error("divergent-moment")
// when no such T exists.
Result integrate_piecewise(const Integrand& f, double lo, double hi,
                           double abs_tol = 1e-12, double rel_tol = 1e-10);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

// Composite Gauss-Legendre grid over consecutive panels.
struct PanelGrid {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // positive
};
PanelGrid panel_grid(std::span<const double> panel_edges, int nodes_per_panel);

}  // namespace spectree::quad
