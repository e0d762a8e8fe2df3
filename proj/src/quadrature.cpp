#include "spectree/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spectree/common.hpp"

namespace spectree::quad {

namespace {

// 15-point Kronrod nodes (positive half) and weights, with the embedded
// 7-point Gauss weights on the shared nodes.
constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};

constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};

constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct PanelEstimate {
  double value;
  double error;
};

PanelEstimate gauss_kronrod(const std::function<double(double)>& f, double a,
                            double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double result_kronrod = fc * kKronrodWeights[7];
  double result_gauss = fc * kGaussWeights[3];
  double result_abs = std::abs(result_kronrod);
  for (int j = 0; j < 7; ++j) {
    const double x = h * kKronrodNodes[j];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    result_kronrod += kKronrodWeights[j] * (f1 + f2);
    result_abs += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) result_gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  // QUADPACK-style error model from the embedded Gauss rule.
  double err = std::abs((result_kronrod - result_gauss) * h);
  const double scale = std::abs(result_abs * h);
  if (scale > 0.0 && err > 0.0)
    err = scale * std::min(1.0, std::pow(200.0 * err / scale, 1.5));
  return {result_kronrod * h, std::max(err, std::numeric_limits<double>::epsilon() * 50.0 * scale)};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol) {
  if (!(b > a)) return {0.0, 0.0, 0};
  struct Segment {
    double a, b, value, error;
  };
  PanelEstimate first = gauss_kronrod(f, a, b);
  std::vector<Segment> segs{{a, b, first.value, first.error}};
  std::size_t evals = 15;
  for (int iter = 0; iter < 2000; ++iter) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].value;
      err += segs[i].error;
      if (segs[i].error > segs[worst].error) worst = i;
    }
    if (err <= std::max(abs_tol, rel_tol * std::abs(total)) ||
        segs[worst].b - segs[worst].a <
            std::numeric_limits<double>::epsilon() * 8.0 *
                std::max(std::abs(segs[worst].a), 1.0))
      return {total, err, evals};
    Segment s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    PanelEstimate left = gauss_kronrod(f, s.a, mid);
    PanelEstimate right = gauss_kronrod(f, mid, s.b);
    evals += 30;
    segs[worst] = {s.a, mid, left.value, left.error};
    segs.push_back({mid, s.b, right.value, right.error});
  }
  double total = 0.0, err = 0.0;
  for (const auto& s : segs) {
    total += s.value;
    err += s.error;
  }
  return {total, err, evals};
}

Result integrate_piecewise(const Integrand& f, double lo, double hi,
                           double abs_tol, double rel_tol) {
  Result out;
  auto add_range = [&](double a, double b) {
    if (b <= a) return;
    std::vector<double> edges{a};
    for (double brk : f.breakpoints)
      if (brk > a && brk < b) edges.push_back(brk);
    edges.push_back(b);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      Result r = integrate(f.f, edges[i], edges[i + 1], abs_tol, rel_tol);
      out.value += r.value;
      out.abs_error += r.abs_error;
      out.evals += r.evals;
    }
  };

  if (std::isfinite(hi)) {
    add_range(lo, hi);
    return out;
  }

  // Tail handling: find T with a negligible remaining contribution, then
  // keep doubling until the integral stops moving.
  double T = std::max(lo + 1.0, 1.0);
  if (!f.tail_bound && !f.breakpoints.empty())
    T = std::max(T, f.breakpoints.back());
  const double tail_tol = std::max(abs_tol, 1e-14);
  if (f.tail_bound) {
    int guard = 0;
    while (f.tail_bound(T) * std::max(T, 1.0) > tail_tol) {
      T *= 2.0;
      if (++guard > 400 || !std::isfinite(T))
        throw Error("divergent-moment",
                    "tail bound does not decay; integral over [" +
                        std::to_string(lo) + ", inf) diverges");
    }
  }
  add_range(lo, T);
  // Confirm stability under doubling T.
  for (int k = 0; k < 6; ++k) {
    Result extra;
    Integrand g = f;
    std::vector<double> edges{T};
    for (double brk : f.breakpoints)
      if (brk > T && brk < 2.0 * T) edges.push_back(brk);
    std::sort(edges.begin(), edges.end());
    edges.push_back(2.0 * T);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      Result r = integrate(g.f, edges[i], edges[i + 1], abs_tol, rel_tol);
      extra.value += r.value;
      extra.abs_error += r.abs_error;
      extra.evals += r.evals;
    }
    out.value += extra.value;
    out.abs_error += extra.abs_error;
    out.evals += extra.evals;
    T *= 2.0;
    if (std::abs(extra.value) <=
        std::max(abs_tol, rel_tol * std::abs(out.value)))
      return out;
  }
  throw Error("divergent-moment",
              "integral did not stabilize under tail doubling");
}

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
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
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

PanelGrid panel_grid(std::span<const double> panel_edges, int nodes_per_panel) {
  static thread_local std::vector<double> xs, ws;
  static thread_local int cached_n = -1;
  if (cached_n != nodes_per_panel) {
    gauss_legendre(nodes_per_panel, xs, ws);
    cached_n = nodes_per_panel;
  }
  PanelGrid g;
  for (std::size_t p = 0; p + 1 < panel_edges.size(); ++p) {
    const double a = panel_edges[p], b = panel_edges[p + 1];
    if (!(b > a)) continue;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < nodes_per_panel; ++i) {
      g.nodes.push_back(c + h * xs[i]);
      g.weights.push_back(h * ws[i]);
    }
  }
  return g;
}

}  // namespace spectree::quad
