#include "spectree/birman_schwinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spectree/common.hpp"
#include "spectree/quadrature.hpp"
#include "spectree/special_functions.hpp"

namespace spectree::bs {

namespace {

double sign_sqrt(double v) {
  // f^{1/2} = sign(f) |f|^{1/2}
  return v >= 0.0 ? std::sqrt(v) : -std::sqrt(-v);
}

double weighted_fro(const BSGrid& g, const Eigen::MatrixXd& A) {
  double s = 0.0;
  const int n = static_cast<int>(g.nodes.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      s += g.weights[i] * g.weights[j] * A(i, j) * A(i, j);
  return std::sqrt(s);
}

// Operator norm of the Nystrom operator with kernel matrix A on grid g,
// estimated by power iteration on the symmetrized matrix.
double operator_norm(const BSGrid& g, const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(g.nodes.size());
  Eigen::VectorXd sq(n);
  for (int i = 0; i < n; ++i) sq[i] = std::sqrt(g.weights[i]);
  Eigen::MatrixXd S = sq.asDiagonal() * A * sq.asDiagonal();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(n));
  double norm = 0.0;
  for (int it = 0; it < 40; ++it) {
    v = S.transpose() * (S * v);
    const double nv = v.norm();
    if (nv == 0.0) return 0.0;
    v /= nv;
    norm = std::sqrt(nv);
  }
  return norm;
}

}  // namespace

BSGrid bs_quadrature(const RadialPotential& W, double nu, int nodes_per_panel,
                     int min_panels) {
  double T;
  if (W.compactly_supported()) {
    T = W.support_end();
  } else {
    T = 1.0;
    for (double b : W.breakpoints()) T = std::max(T, b);
    int guard = 0;
    while (std::pow(1.0 + T, 2.0 + 2.0 * nu) * W.tail_abs_bound(T) > 1e-12) {
      T *= 1.5;
      if (++guard > 400)
        throw Error("divergent-moment",
                    "potential tail too heavy for the BS quadrature");
    }
  }
  std::vector<double> edges{0.0};
  for (double b : W.breakpoints())
    if (b > 0.0 && b < T) edges.push_back(b);
  edges.push_back(T);
  std::sort(edges.begin(), edges.end());
  // Subdivide so panels stay short enough for the kernel kink.
  const double target = T / std::max(min_panels, 1);
  std::vector<double> fine{edges.front()};
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double len = edges[i + 1] - edges[i];
    const int parts = std::max(1, static_cast<int>(std::ceil(len / target)));
    for (int p = 1; p <= parts; ++p)
      fine.push_back(edges[i] + len * p / parts);
  }
  quad::PanelGrid pg = quad::panel_grid(fine, nodes_per_panel);
  if (pg.nodes.size() > 2000)
    throw Error("bad-grid", "BS quadrature grid exceeds 2000 nodes");
  return BSGrid{std::move(pg.nodes), std::move(pg.weights), T};
}

namespace {

BSKernelSet build_kernels_impl(const RadialPotential& W, double kappa,
                               double d, const BSGrid& grid) {
  const auto pc = sf::paper_constants(d);
  const double nu = 0.5 * (2.0 - d);
  const int n = static_cast<int>(grid.nodes.size());

  BSKernelSet S;
  S.grid = grid;
  S.kappa = kappa;
  S.nu = nu;

  Eigen::VectorXd s(n), wa(n), ws(n), iv(n), kv(n);
  for (int i = 0; i < n; ++i) {
    const double t = grid.nodes[i];
    s[i] = 1.0 + t;
    const double w = W(t);
    wa[i] = std::sqrt(std::abs(w));  // |W|^{1/2}
    ws[i] = sign_sqrt(w);            // W^{1/2}
    const sf::IK ik = sf::bessel_ik_scaled(nu, kappa * s[i]);
    iv[i] = ik.i;
    kv[i] = ik.k;
  }
  const auto ctx = sf::GreenRobinContext::make(kappa, d);

  S.K.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double G = ctx.eval(s[i], s[j], iv[i], kv[i], kv[j]);
      S.K(i, j) = wa[i] * G * ws[j];
      if (j != i) S.K(j, i) = wa[j] * G * ws[i];
    }
  }

  S.phi.resize(n);
  S.psi.resize(n);
  for (int i = 0; i < n; ++i) {
    const double pw = std::pow(s[i], -nu + 0.5);
    S.phi[i] = wa[i] * pw;
    S.psi[i] = ws[i] * pw;
  }
  const double pref = pc.C_nu * std::pow(kappa, -2.0 * nu);
  S.L = pref * S.phi * S.psi.transpose();
  S.M = S.K - S.L;

  S.M0.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double shi = std::max(s[i], s[j]), slo = std::min(s[i], s[j]);
      S.M0(i, j) = pc.C_M * wa[i] * ws[j] * std::sqrt(s[i] * s[j]) *
                   std::pow(shi / slo, nu);
    }
  return S;
}

}  // namespace

BSKernelSet build_bs_kernels(const RadialPotential& W, double kappa, double d,
                             const BSGrid& grid, bool check) {
  if (!(kappa > 0.0))
    throw Error("domain", "build_bs_kernels requires kappa > 0");
  BSKernelSet S = build_kernels_impl(W, kappa, d, grid);
  if (check) {
    // Doubling the quadrature density must leave ||K|| in place.
    const int per_panel = 24;
    BSGrid dense = bs_quadrature(W, S.nu, 2 * per_panel);
    BSKernelSet S2 = build_kernels_impl(W, kappa, d, dense);
    const double n1 = weighted_fro(grid, S.K);
    const double n2 = weighted_fro(dense, S2.K);
    if (std::abs(n1 - n2) > 1e-6 * std::max(1.0, n2))
      throw Error("quadrature-underresolved",
                  "||K|| moved by " + std::to_string(std::abs(n1 - n2)) +
                      " under node doubling");
  }
  return S;
}

namespace {

struct TraceContext {
  const RadialPotential* W;
  double lambda;
  double d;
  BSGrid grid;
  double C_nu;
  double nu;
  // Returns tr(lambda (I + lambda M(kappa))^{-1} L(kappa)) and the operator
  // norm of M(kappa).
  std::pair<double, double> trace(double kappa) const {
    BSKernelSet S = build_kernels_impl(*W, kappa, d, grid);
    const int n = static_cast<int>(grid.nodes.size());
    Eigen::MatrixXd Mw = S.M;
    for (int j = 0; j < n; ++j) Mw.col(j) *= grid.weights[j];
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) + lambda * Mw;
    Eigen::VectorXd x = A.partialPivLu().solve(S.psi);
    double ip = 0.0;
    for (int i = 0; i < n; ++i) ip += grid.weights[i] * S.phi[i] * x[i];
    const double tr =
        lambda * C_nu * std::pow(kappa, -2.0 * nu) * ip;
    return {tr, operator_norm(grid, S.M)};
  }
};

}  // namespace

WeakEigenvalue solve_weak_eigenvalue(const RadialPotential& W, double lambda,
                                     double d) {
  if (!(lambda > 0.0)) throw Error("domain", "lambda must be positive");
  const auto pc = sf::paper_constants(d);
  const double nu = 0.5 * (2.0 - d);

  const double mass = moment(W, MomentWeight::power_1pt(d - 1.0), false);
  const double scale = moment(W, MomentWeight::power_1pt(d - 1.0), true);
  if (!(mass < -1e-12 * std::max(scale, 1e-300)))
    throw Error("no-root",
                "int W (1+t)^{d-1} dt = " + std::to_string(mass) +
                    " is not negative; no weakly coupled eigenvalue");

  WeakEigenvalue out;
  out.attractive_mass = mass;
  out.E_first_order =
      -std::pow(lambda * pc.C_nu * std::abs(mass), 1.0 / nu);

  BSGrid grid = bs_quadrature(W, nu);
  // One resolution check up front; the root iteration reuses the grid.
  (void)build_bs_kernels(W, std::sqrt(-out.E_first_order), d, grid, true);

  TraceContext ctx{&W, lambda, d, grid, pc.C_nu, nu};

  const double kappa1 = std::sqrt(-out.E_first_order);
  double lo = kappa1 / 8.0, hi = kappa1 * 8.0;
  auto [f_lo, norm_lo] = ctx.trace(lo);
  auto [f_hi, norm_hi] = ctx.trace(hi);
  if (lambda * std::max(norm_lo, norm_hi) >= 1.0)
    throw Error("norm-condition-violated",
                "lambda ||M(kappa)|| >= 1 on the search bracket; coupling too "
                "large for the weak-coupling route");
  int guard = 0;
  while (!(f_lo < -1.0)) {
    lo /= 4.0;
    f_lo = ctx.trace(lo).first;
    if (++guard > 80)
      throw Error("no-root", "could not bracket the secular equation from "
                             "below");
  }
  guard = 0;
  while (!(f_hi > -1.0)) {
    hi *= 4.0;
    f_hi = ctx.trace(hi).first;
    if (++guard > 80)
      throw Error("no-root", "could not bracket the secular equation from "
                             "above");
  }

  // Bisection in log kappa; monotonicity is recorded, not assumed.
  std::vector<std::pair<double, double>> samples{{lo, f_lo}, {hi, f_hi}};
  double llo = std::log(lo), lhi = std::log(hi);
  for (int it = 0; it < 200 && lhi - llo > 1e-12; ++it) {
    const double lmid = 0.5 * (llo + lhi);
    const double kmid = std::exp(lmid);
    const double f_mid = ctx.trace(kmid).first;
    samples.emplace_back(kmid, f_mid);
    if (f_mid < -1.0)
      llo = lmid;
    else
      lhi = lmid;
  }
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    if (samples[i + 1].second < samples[i].second - 1e-10)
      out.trace_monotone = false;
  out.kappa = std::exp(0.5 * (llo + lhi));
  out.E = -out.kappa * out.kappa;
  return out;
}

CriticalPrediction critical_case_eigenvalue(const RadialPotential& W,
                                            double lambda, double d) {
  const auto pc = sf::paper_constants(d);
  const double nu = 0.5 * (2.0 - d);
  const double mass = moment(W, MomentWeight::power_1pt(d - 1.0), false);
  const double scale = moment(W, MomentWeight::power_1pt(d - 1.0), true);
  if (std::abs(mass) > 1e-8 * std::max(scale, 1e-300))
    throw Error("not-critical",
                "int W (1+t)^{d-1} dt = " + std::to_string(mass) +
                    " is not zero; use solve_weak_eigenvalue");

  // W0 = 2 int W(t) (1+t) F(t) dt with F(t) = int_0^t W(u) (1+u)^{d-1} du.
  PotentialView view(W);
  auto F = [&](double t) {
    quad::Integrand inner;
    inner.f = [&W, d](double u) { return W(u) * std::pow(1.0 + u, d - 1.0); };
    inner.breakpoints = view.breakpoints;
    return quad::integrate_piecewise(inner, 0.0, t, 1e-13, 1e-11).value;
  };
  quad::Integrand outer;
  outer.f = [&W, &F](double t) { return 2.0 * W(t) * (1.0 + t) * F(t); };
  outer.breakpoints = view.breakpoints;
  const double mass_abs = scale;
  outer.tail_bound = [&W, mass_abs](double t) {
    return 2.0 * W.tail_abs_bound(t) * (1.0 + t) * mass_abs;
  };
  CriticalPrediction out;
  out.W0 = quad::integrate_piecewise(outer, 0.0,
                                     std::numeric_limits<double>::infinity(),
                                     1e-12, 1e-9)
               .value;
  if (lambda == 0.0) {
    out.E_pred = 0.0;
    return out;
  }
  if (!(out.W0 < 0.0))
    throw Error("inconclusive",
                "W0 = " + std::to_string(out.W0) +
                    " >= 0: the critical-case criterion does not apply");
  // E^nu = C(nu) (-lambda^2 C_M W0); C_M < 0 and W0 < 0 make it negative.
  out.E_pred =
      -std::pow(pc.C_nu * lambda * lambda * (-pc.C_M) * (-out.W0), 1.0 / nu);

  // Root-find the true kappa with the same trace machinery.
  try {
    BSGrid grid = bs_quadrature(W, nu);
    TraceContext ctx{&W, lambda, d, grid, pc.C_nu, nu};
    double lo = std::sqrt(-out.E_pred) / 8.0, hi = std::sqrt(-out.E_pred) * 8.0;
    double f_lo = ctx.trace(lo).first, f_hi = ctx.trace(hi).first;
    int guard = 0;
    while (!(f_lo < -1.0) && ++guard <= 60) {
      lo /= 4.0;
      f_lo = ctx.trace(lo).first;
    }
    guard = 0;
    while (!(f_hi > -1.0) && ++guard <= 60) {
      hi *= 4.0;
      f_hi = ctx.trace(hi).first;
    }
    if (f_lo < -1.0 && f_hi > -1.0) {
      double llo = std::log(lo), lhi = std::log(hi);
      for (int it = 0; it < 200 && lhi - llo > 1e-12; ++it) {
        const double lmid = 0.5 * (llo + lhi);
        if (ctx.trace(std::exp(lmid)).first < -1.0)
          llo = lmid;
        else
          lhi = lmid;
      }
      const double kappa = std::exp(0.5 * (llo + lhi));
      out.E_root = -kappa * kappa;
    }
  } catch (const Error&) {
    // leave E_root unset
  }
  return out;
}

double bargmann_bound(const PotentialView& V, double d, double lambda) {
  const auto pc = sf::paper_constants(d);
  const double m = moment(V, MomentWeight::power_t(1.0), true);
  return lambda * pc.K_tilde * m;
}

double cor1_bound(const RadialPotential& V, const RegularTree& tree, double d,
                  double lambda, double* a_used) {
  const auto pc = sf::paper_constants(d);
  // Largest a with a t^{d-1} <= g_0(t) for all t > 0. Within a generation
  // interval the ratio g_0/t^{d-1} is monotone decreasing (d >= 1), so the
  // right endpoints carry the infimum.
  double a = std::numeric_limits<double>::max();
  const auto& ts = tree.vertex_distances();
  if (ts.empty()) {
    a = d > 1.0 ? 0.0 : 1.0;  // bare half line: g_0 = 1
    if (d > 1.0)
      throw Error("domain",
                  "no positive a with a t^{d-1} <= 1 on the half line for "
                  "d > 1");
  } else {
    for (std::size_t n = 0; n < ts.size(); ++n) {
      const double g = tree.gk_left(0, ts[n]);  // value on [t_{n-1}, t_n)
      a = std::min(a, g / std::pow(ts[n], d - 1.0));
    }
    if (tree.geometric_info() &&
        std::abs(tree.geometric_info()->d - d) < 1e-12) {
      a = std::min(a, 1.0 / tree.geometric_info()->b);
    } else {
      // Continue a few implicit generations: beyond the listed vertices the
      // tree stops branching, so the ratio keeps falling for d > 1. Guard by
      // evaluating at a far radius.
      const double far = ts.back() * 1e6;
      a = std::min(a, tree.g0(far) / std::pow(far, d - 1.0));
    }
  }
  if (a_used) *a_used = a;
  if (!(a > 0.0))
    throw Error("domain", "envelope constant a degenerated to zero");
  const double m =
      moment(V, MomentWeight::g0_tpow(tree, 2.0 - d), true);
  return 1.0 + lambda * (pc.K_tilde / a) * m;
}

double channel_threshold(const RegularTree& tree, const RadialPotential& V,
                         double d, int k) {
  if (k < 1) throw Error("domain", "channel_threshold needs k >= 1");
  const auto pc = sf::paper_constants(d);
  if (k > tree.generations() || tree.multiplicity(k) == 0)
    return std::numeric_limits<double>::infinity();
  const double tk = tree.vertex_distances()[k - 1];
  const double extent = V.extent(1e-14);
  if (tk >= extent) return std::numeric_limits<double>::infinity();
  const double L_check = std::max(4.0 * extent, 4.0 * tk);
  Envelope env = envelope_constants(tree, k, d, L_check);
  PotentialView Vk =
      modified_potential_shifted(V, tree, k, d, env, EnvelopeSide::Lower);
  const double m = moment(Vk, MomentWeight::power_t(1.0), true);
  if (m < 1e-300) return std::numeric_limits<double>::infinity();
  return 1.0 / (pc.K_tilde * m);
}

HSConvergence hs_convergence(const RadialPotential& W, double d,
                             std::span<const double> kappas,
                             int nodes_per_panel) {
  const double nu = 0.5 * (2.0 - d);
  // Lemma hypothesis: int (1+t)^{1+2nu} |W| < infinity.
  (void)moment(W, MomentWeight::power_1pt(1.0 + 2.0 * nu), true);
  BSGrid grid = bs_quadrature(W, nu, nodes_per_panel);
  HSConvergence out;
  bool first = true;
  for (double kappa : kappas) {
    BSKernelSet S = build_bs_kernels(W, kappa, d, grid, first);
    first = false;
    out.distances.push_back(weighted_fro(grid, S.M - S.M0));
    if (out.m0_norm == 0.0) out.m0_norm = weighted_fro(grid, S.M0);
  }
  return out;
}

long long bs_count(const BSKernelSet& S, double lambda) {
  const int n = static_cast<int>(S.grid.nodes.size());
  for (int i = 0; i < n; ++i)
    if (S.psi[i] > 1e-12)
      throw Error("domain", "bs_count requires W <= 0 on the grid");
  Eigen::VectorXd sq(n);
  for (int i = 0; i < n; ++i) sq[i] = std::sqrt(S.grid.weights[i]);
  Eigen::MatrixXd sym = sq.asDiagonal() * S.K * sq.asDiagonal();
  sym = 0.5 * (sym + sym.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                    Eigen::EigenvaluesOnly);
  long long count = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] <= -1.0 / lambda) ++count;
  return count;
}

}  // namespace spectree::bs
