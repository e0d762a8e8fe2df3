#include "spectree/halfline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spectree/common.hpp"

namespace spectree {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

Channel Channel::from_tree(const RegularTree& tree, const RadialPotential& V,
                           double lambda, int k) {
  Channel ch;
  ch.k = k;
  ch.start = k == 0 ? 0.0 : tree.vertex_distances().at(k - 1);
  ch.left_bc = k == 0 ? LeftBC::WeightedNeumann : LeftBC::Dirichlet;
  ch.coupling = lambda;
  ch.multiplicity = k == 0 ? 1 : tree.multiplicity(k);
  RegularTree tc = tree;
  ch.weight = [tc, k](double t) { return tc.gk(k, t); };
  ch.weight_breakpoints = tree.vertex_distances();
  RadialPotential Vc = V;
  ch.potential = [Vc](double t) { return Vc(t); };
  ch.potential_breakpoints = V.breakpoints();
  ch.potential_extent = V.extent(1e-14);
  return ch;
}

Channel Channel::power_weight(double alpha, const PotentialView& V,
                              double lambda, double start, LeftBC bc) {
  Channel ch;
  ch.k = 0;
  ch.start = start;
  ch.left_bc = bc;
  ch.coupling = lambda;
  ch.weight = [alpha](double t) { return std::pow(1.0 + t, alpha); };
  ch.potential = V.eval;
  ch.potential_breakpoints = V.breakpoints;
  double T = std::max(start + 1.0, 1.0);
  if (V.tail_abs_bound) {
    int guard = 0;
    while (V.tail_abs_bound(T) > 1e-14 && ++guard < 200) T *= 2.0;
  }
  ch.potential_extent = T;
  return ch;
}

Grid Grid::refined() const {
  Grid g;
  g.start = start;
  g.right_bc = right_bc;
  g.nodes.reserve(nodes.size() * 2 - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    g.nodes.push_back(nodes[i]);
    g.nodes.push_back(0.5 * (nodes[i] + nodes[i + 1]));
  }
  g.nodes.push_back(nodes.back());
  return g;
}

Grid Grid::with_right_bc(RightBC bc) const {
  Grid g = *this;
  g.right_bc = bc;
  return g;
}

Grid make_grid(double start, double L, double h0, double near_field_end,
               double h_max, double grading,
               std::span<const double> breakpoints, RightBC right_bc) {
  if (!(L > start)) throw Error("bad-grid", "make_grid needs L > start");
  if (!(h0 > 0.0)) throw Error("bad-grid", "make_grid needs h0 > 0");
  h_max = std::max(h_max, h0);
  grading = std::max(grading, 1.0);
  near_field_end = std::min(std::max(near_field_end, start), L);

  // Segment edges: breakpoints within (start, L).
  std::vector<double> edges{start};
  for (double b : breakpoints)
    if (b > start * (1.0 + 1e-15) + 1e-300 && b < L * (1.0 - 1e-15))
      edges.push_back(b);
  edges.push_back(L);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) {
                            return std::abs(a - b) <=
                                   1e-12 * std::max(std::abs(a), std::abs(b));
                          }),
              edges.end());

  Grid g;
  g.start = start;
  g.right_bc = right_bc;
  g.nodes.push_back(start);
  double h = h0;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    double pos = edges[s];
    const double end = edges[s + 1];
    while (pos < end) {
      double step = h;
      if (pos >= near_field_end) {
        // Geometric growth capped at h_max.
        step = std::min(h * grading, h_max);
      } else {
        step = std::min(h0, h_max);
      }
      h = step;
      double next = pos + step;
      if (next > end - 0.25 * step) next = end;  // avoid sliver cells
      g.nodes.push_back(next);
      pos = next;
      if (g.nodes.size() > 4000000)
        throw Error("bad-grid", "grid exceeds node cap; relax h or L");
    }
  }
  return g;
}

TridiagonalPencil discretize_form(const Channel& ch, const Grid& grid) {
  const auto& x = grid.nodes;
  const std::size_t n_nodes = x.size();
  if (n_nodes < 3) throw Error("bad-grid", "grid too small");

  // No breakpoint may sit strictly inside a cell.
  auto check_aligned = [&](const std::vector<double>& brks) {
    for (double b : brks) {
      if (b <= x.front() || b >= x.back()) continue;
      auto it = std::lower_bound(x.begin(), x.end(), b);
      const double nearest =
          (it == x.end()) ? x.back()
                          : std::min(std::abs(*it - b),
                                     it == x.begin()
                                         ? std::abs(*it - b)
                                         : std::abs(*(it - 1) - b));
      if (nearest > 1e-9 * std::max(1.0, std::abs(b)))
        throw Error("bad-grid", "breakpoint " + std::to_string(b) +
                                    " falls inside a cell; align the grid");
    }
  };
  check_aligned(ch.weight_breakpoints);
  check_aligned(ch.potential_breakpoints);

  std::vector<double> diag(n_nodes, 0.0), off(n_nodes - 1, 0.0),
      mass(n_nodes, 0.0);
  for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
    const double h = x[i + 1] - x[i];
    const double mid = 0.5 * (x[i] + x[i + 1]);
    const double w = ch.weight(mid);
    const double v = ch.potential ? ch.potential(mid) : 0.0;
    const double stiff = w / h;
    const double cell_mass = 0.5 * w * h;
    const double cell_pot = ch.coupling * v * cell_mass;
    diag[i] += stiff + cell_pot;
    diag[i + 1] += stiff + cell_pot;
    off[i] -= stiff;
    mass[i] += cell_mass;
    mass[i + 1] += cell_mass;
  }

  // Boundary handling by row elimination. The weighted-Neumann condition is
  // natural for the form: the first node keeps its half cell.
  std::size_t lo = (ch.left_bc == LeftBC::Dirichlet) ? 1 : 0;
  std::size_t hi = (grid.right_bc == RightBC::Dirichlet) ? n_nodes - 1
                                                         : n_nodes;
  TridiagonalPencil p;
  p.diag.assign(diag.begin() + lo, diag.begin() + hi);
  p.off.assign(off.begin() + lo, off.begin() + (hi - 1));
  p.mass.assign(mass.begin() + lo, mass.begin() + hi);
  for (double m : p.mass)
    if (!(m > 0.0)) throw Error("bad-grid", "mass matrix not positive");
  return p;
}

long long sturm_count(const TridiagonalPencil& p, double s) {
  // Negative pivots of the LDL^T factorization of A - s M.
  const std::size_t n = p.size();
  long long count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = p.diag[i] - s * p.mass[i];
    double e2 = 0.0;
    if (i > 0) {
      const double e = p.off[i - 1];
      e2 = e * e;
    }
    if (q == 0.0)
      q = d - std::abs(i > 0 ? p.off[i - 1] : 0.0) / kEps;
    else
      q = d - e2 / q;
    if (q < 0.0) ++count;
  }
  return count;
}

namespace {

// Gershgorin bounds of M^{-1/2} A M^{-1/2}.
void gershgorin(const TridiagonalPencil& p, double& lo, double& hi) {
  const std::size_t n = p.size();
  lo = std::numeric_limits<double>::max();
  hi = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = p.diag[i] / p.mass[i];
    double r = 0.0;
    if (i > 0)
      r += std::abs(p.off[i - 1]) / std::sqrt(p.mass[i] * p.mass[i - 1]);
    if (i + 1 < n)
      r += std::abs(p.off[i]) / std::sqrt(p.mass[i] * p.mass[i + 1]);
    lo = std::min(lo, d - r);
    hi = std::max(hi, d + r);
  }
}

// j-th (1-based) smallest eigenvalue via bisection on the Sturm count.
double bisect_eigenvalue(const TridiagonalPencil& p, int j, double lo,
                         double hi) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (sturm_count(p, mid) >= j)
      hi = mid;
    else
      lo = mid;
    const double tol = 1e-10 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
    if (hi - lo <= tol) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

EigResult lowest_eigenvalues(const TridiagonalPencil& p, int m) {
  EigResult out;
  double lo, hi;
  gershgorin(p, lo, hi);
  out.count = sturm_count(p, 0.0);
  const int n_extract = std::min<long long>(
      m, static_cast<long long>(p.size()));
  double left = lo;
  for (int j = 1; j <= n_extract; ++j) {
    const double ev = bisect_eigenvalue(p, j, left, hi);
    out.diagnostics.push_back(ev);
    if (ev < 0.0) out.eigenvalues.push_back(ev);
    left = std::max(lo, ev - std::abs(ev) * 1e-9);
    if (ev >= 0.0) break;  // diagnostics carry the first nonnegative one
  }
  return out;
}

long long count_negative(const Channel& ch, const Grid& grid, double s) {
  const long long c1 = sturm_count(discretize_form(ch, grid), s);
  const long long c2 = sturm_count(discretize_form(ch, grid.refined()), s);
  if (c1 != c2)
    throw Error("unconverged", "eigenvalue count changed under refinement (" +
                                   std::to_string(c1) + " vs " +
                                   std::to_string(c2) + "); refine h");
  return c2;
}

namespace {

Grid build_channel_grid(const Channel& ch, const Numerics& num, double L,
                        double kappa_est, RightBC bc) {
  std::vector<double> brks = ch.weight_breakpoints;
  brks.insert(brks.end(), ch.potential_breakpoints.begin(),
              ch.potential_breakpoints.end());
  std::sort(brks.begin(), brks.end());
  const double near_end = std::min(
      L, std::max(ch.potential_extent, ch.start + 10.0 * num.h));
  double h_max = (L - ch.start) / 64.0;
  if (kappa_est > 0.0)
    h_max = std::min(h_max, 1.0 / (num.kappa_cells * kappa_est));
  h_max = std::max(h_max, num.h);
  return make_grid(ch.start, L, num.h, near_end, h_max, num.grading, brks, bc);
}

}  // namespace

ChannelSolve solve_channel(const Channel& ch, const Numerics& num) {
  ChannelSolve out;

  // Coarse estimate of the binding scale.
  double L = num.L > 0.0
                 ? num.L
                 : ch.start +
                       std::max(4.0 * (ch.potential_extent - ch.start), 40.0);
  double kappa_est = 0.0;
  if (num.L <= 0.0 && num.auto_truncate) {
    Numerics coarse = num;
    coarse.h = num.h * 4.0;
    Grid cg = build_channel_grid(ch, coarse, L, 0.0, RightBC::Dirichlet);
    EigResult ce = lowest_eigenvalues(discretize_form(ch, cg), 2);
    if (!ce.eigenvalues.empty())
      kappa_est = std::sqrt(-ce.eigenvalues.front());
  }

  for (int attempt = 0;; ++attempt) {
    if (num.L <= 0.0 && kappa_est > 0.0)
      L = std::max(L, ch.start + num.L_kappa / kappa_est);
    Grid gd = build_channel_grid(ch, num, L, kappa_est, RightBC::Dirichlet);
    if (gd.nodes.size() > num.max_nodes)
      throw Error("bad-grid", "grid of " + std::to_string(gd.nodes.size()) +
                                  " nodes exceeds the configured cap");
    Grid gn = gd.with_right_bc(RightBC::Neumann);
    EigResult ed = lowest_eigenvalues(discretize_form(ch, gd),
                                      num.max_eigenvalues);
    EigResult en = lowest_eigenvalues(discretize_form(ch, gn),
                                      num.max_eigenvalues);

    // Bracket each Dirichlet eigenvalue with its Neumann partner.
    out.result = ed;
    out.result.bracket_hi = ed.eigenvalues;
    out.result.bracket_lo.clear();
    for (std::size_t i = 0; i < ed.eigenvalues.size(); ++i)
      out.result.bracket_lo.push_back(i < en.eigenvalues.size()
                                          ? en.eigenvalues[i]
                                          : ed.eigenvalues[i]);
    out.grid = gd;
    out.L = L;
    out.kappa_est = kappa_est;

    bool tight = true;
    for (std::size_t i = 0; i < ed.eigenvalues.size(); ++i) {
      const double width =
          std::abs(out.result.bracket_hi[i] - out.result.bracket_lo[i]);
      if (width > num.bracket_rel * std::abs(ed.eigenvalues[i])) tight = false;
    }
    // The Neumann count can exceed the Dirichlet count when a state is about
    // to detach; widen the box until both flavors agree.
    if (en.eigenvalues.size() != ed.eigenvalues.size()) tight = false;
    // Empty spectra get confirmed once on a domain twice as large.
    const bool fixed_L = num.L > 0.0 || !num.auto_truncate;
    if (ed.eigenvalues.empty() && en.eigenvalues.empty() && attempt == 0 &&
        !fixed_L)
      tight = false;

    if (!ed.eigenvalues.empty())
      kappa_est = std::sqrt(-ed.eigenvalues.front());

    if (tight || fixed_L || attempt >= num.max_doublings) {
      out.bracket_converged = tight || fixed_L;
      if (num.richardson) {
        EigResult fine = lowest_eigenvalues(discretize_form(ch, gd.refined()),
                                            num.max_eigenvalues);
        out.richardson.clear();
        for (std::size_t i = 0;
             i < ed.eigenvalues.size() && i < fine.eigenvalues.size(); ++i)
          out.richardson.push_back(
              (4.0 * fine.eigenvalues[i] - ed.eigenvalues[i]) / 3.0);
      }
      return out;
    }
    L = ch.start + 2.0 * (L - ch.start);
  }
}

}  // namespace spectree
