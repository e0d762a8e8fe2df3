#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spectree/common.hpp"
#include "spectree/special_functions.hpp"

using namespace spectree;
namespace sf = spectree::sf;

namespace {
double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
}  // namespace

TEST_CASE("gamma: reference values") {
  CHECK(rel_err(sf::gamma_fn(0.5), 1.77245385090552) < 1e-12);
  CHECK(rel_err(sf::gamma_fn(1.0), 1.0) < 1e-13);
  CHECK(rel_err(sf::gamma_fn(1.5), 0.886226925452758) < 1e-12);
  CHECK(rel_err(sf::gamma_fn(5.0), 24.0) < 1e-13);
  // recurrence consistency across the small-argument branch
  for (double x : {0.05, 0.11, 0.31, 0.49}) {
    CHECK(rel_err(sf::gamma_fn(x + 1.0), x * sf::gamma_fn(x)) < 1e-13);
  }
  CHECK_THROWS_AS(sf::gamma_fn(0.0), Error);
}

TEST_CASE("bessel: half-integer closed forms to 1e-10 on [0.01, 20]") {
  for (double x = 0.01; x <= 20.0; x *= 1.37) {
    const auto ik = sf::bessel_ik(0.5, x);
    CHECK(rel_err(ik.i, oracles::i_half(x)) < 1e-10);
    CHECK(rel_err(ik.k, oracles::k_half(x)) < 1e-10);
  }
}

TEST_CASE("bessel: nu=0.25 against the series oracle on [0.01, 2]") {
  for (double x = 0.01; x <= 2.0; x *= 1.3) {
    const auto ik = sf::bessel_ik(0.25, x);
    const double i_ref =
        static_cast<double>(oracles::bessel_i_series(0.25L, x));
    const double k_ref =
        static_cast<double>(oracles::bessel_k_reflection(0.25L, x));
    CHECK(rel_err(ik.i, i_ref) < 1e-10);
    CHECK(rel_err(ik.k, k_ref) < 1e-10);
  }
}

TEST_CASE("bessel: frozen high-precision references, nu=0.25") {
  // Values computed with 30-digit arithmetic.
  struct Ref {
    double x, i, k;
  };
  const Ref refs[] = {
      {0.01, 0.29337972909844187, 6.1657412641392402},
      {0.1, 0.52274467871774867, 2.6851568718760593},
      {0.5, 0.81967596598872946, 0.96031632493188602},
      {1.0, 1.123851871670946, 0.43073977444858552},
      {2.0, 2.2033544516736299, 0.11537827684085676},
      {3.0, 4.8077591736907307, 0.035057056089413134},
      {5.0, 27.046461194155766, 0.0037123027320318406},
      {10.0, 2806.4358990731404, 1.7833184439806392e-5},
      {20.0, 43488477.762579141, 5.7500020724036826e-10},
  };
  for (const auto& r : refs) {
    const auto ik = sf::bessel_ik(0.25, r.x);
    CHECK(rel_err(ik.i, r.i) < 1e-10);
    CHECK(rel_err(ik.k, r.k) < 1e-10);
  }
}

TEST_CASE("bessel: order edge cases nu=0 and nu=1") {
  const auto i0k0 = sf::bessel_ik(0.0, 1.0);
  CHECK(rel_err(i0k0.i, 1.2660658777520083) < 1e-12);
  CHECK(rel_err(i0k0.k, 0.42102443824070833) < 1e-12);
  const auto i1k1 = sf::bessel_ik(1.0, 3.0);
  CHECK(rel_err(i1k1.i, 3.9533702174026094) < 1e-12);
  CHECK(rel_err(i1k1.k, 0.040156431128194184) < 1e-12);
  const auto m = sf::bessel_ik(0.9, 4.0);
  CHECK(rel_err(m.i, 10.031116782331592) < 1e-12);
  CHECK(rel_err(m.k, 0.012221094352070209) < 1e-12);
}

TEST_CASE("bessel: small-x limits x I K bounded, I K -> 1/(2 nu)") {
  for (double nu : {0.25, 0.4, 0.5}) {
    double prev = 0.0;
    for (double x : {1e-3, 1e-4, 1e-5}) {
      const auto ik = sf::bessel_ik(nu, x);
      const double prod = ik.i * ik.k;
      CHECK(std::isfinite(x * prod));
      prev = prod;
    }
    CHECK(rel_err(prev, 1.0 / (2.0 * nu)) < 1e-3);
  }
}

TEST_CASE("bessel: scaled variant consistency and overflow guard") {
  for (double nu : {0.1, 0.5, 0.75}) {
    for (double x : {0.5, 3.0, 17.0, 30.0}) {
      const auto plain = sf::bessel_ik(nu, x);
      const auto scaled = sf::bessel_ik_scaled(nu, x);
      CHECK(rel_err(scaled.i, plain.i * std::exp(-x)) < 1e-12);
      CHECK(rel_err(scaled.k, plain.k * std::exp(x)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(sf::bessel_ik(0.5, 800.0), Error);
  CHECK_NOTHROW(sf::bessel_ik_scaled(0.5, 800.0));
}

TEST_CASE("bessel: series/asymptotic branches agree on the overlap band") {
  // kSeriesAsymptoticSplit is 18; both I branches are exercised across it.
  for (double nu : {0.0, 0.25, 0.5, 1.0}) {
    const auto a = sf::bessel_ik_scaled(nu, 17.999);
    const auto b = sf::bessel_ik_scaled(nu, 18.001);
    CHECK(rel_err(a.i, b.i) < 1e-9);  // continuity across the split
  }
}

TEST_CASE("bessel: Wronskian identity I_0 K_1 + I_1 K_0 = 1/x") {
  for (double x : {0.05, 0.7, 4.0, 25.0, 60.0}) {
    const auto lo = sf::bessel_ik_scaled(0.0, x);
    const auto hi = sf::bessel_ik_scaled(1.0, x);
    const double w = lo.i * hi.k + hi.i * lo.k;  // scalings cancel
    CHECK(rel_err(w, 1.0 / x) < 1e-12);
  }
}

TEST_CASE("green kernels: Wronskian constancy via the diagonal jump") {
  // The derivative jump equals -1 at every diagonal point exactly when the
  // Wronskian of the two one-sided solutions is constant.
  const double eps = 1e-5;
  for (double tp : {0.4, 1.0, 3.7, 9.0}) {
    const double right = (sf::green_dirichlet(tp + 2 * eps, tp, 0.9, 0.25) -
                          sf::green_dirichlet(tp + eps, tp, 0.9, 0.25)) /
                         eps;
    const double left = (sf::green_dirichlet(tp - eps, tp, 0.9, 0.25) -
                         sf::green_dirichlet(tp - 2 * eps, tp, 0.9, 0.25)) /
                        eps;
    CHECK(std::abs((right - left) + 1.0) < 2e-4);
  }
}

TEST_CASE("paper constants: reflection identities") {
  for (double d : {1.0, 1.25, 1.5, 1.75}) {
    const auto pc = sf::paper_constants(d);
    const double nu = 0.5 * (2.0 - d);
    CHECK(std::abs(pc.K_tilde * (2.0 - d) - 1.0) < 1e-12);
    CHECK(std::abs(pc.C_M * (2.0 * nu) + 1.0) < 1e-12);
  }
  CHECK(rel_err(sf::paper_constants(1.0).K_tilde, 1.0) < 1e-12);
  CHECK(rel_err(sf::paper_constants(1.0).C_nu, 1.0) < 1e-12);
  CHECK(rel_err(sf::paper_constants(1.5).K_tilde, 2.0) < 1e-12);
  // d = 1.5: C(0.25) from 30-digit arithmetic.
  CHECK(rel_err(sf::paper_constants(1.5).C_nu, 2.0920992401062033) < 1e-12);
  CHECK_THROWS_AS(sf::paper_constants(2.0 - 1e-9), Error);
}

TEST_CASE("green_dirichlet: d=1 closed form and kappa->0 diagonal limit") {
  // nu = 1/2: free Dirichlet resolvent e^{-k t_>} sinh(k t_<) / k.
  for (double kappa : {0.2, 1.0, 3.0}) {
    for (double t : {0.3, 1.1}) {
      for (double tp : {0.5, 2.7}) {
        const double got = sf::green_dirichlet(t, tp, kappa, 0.5);
        const double lo = std::min(t, tp), hi = std::max(t, tp);
        const double want = std::exp(-kappa * hi) * std::sinh(kappa * lo) /
                            kappa;
        CHECK(rel_err(got, want) < 1e-11);
      }
    }
  }
  // diagonal limit t K_tilde(d)
  for (double d : {1.0, 1.3, 1.5, 1.9}) {
    const double nu = 0.5 * (2.0 - d);
    const double t = 0.8;
    const double g = sf::green_dirichlet(t, t, 1e-7, nu);
    CHECK(rel_err(g, t * sf::paper_constants(d).K_tilde) < 1e-5);
  }
  // frozen generic value
  CHECK(rel_err(sf::green_dirichlet(0.7, 1.3, 0.3, 0.25),
                0.71875292633629976) < 1e-12);
}

TEST_CASE("green_dirichlet: monotone decreasing in kappa") {
  for (double kappa : {0.1, 0.5, 1.0}) {
    const double a = sf::green_dirichlet(0.9, 1.7, kappa, 0.25);
    const double b = sf::green_dirichlet(0.9, 1.7, kappa * 1.5, 0.25);
    CHECK(a > b);
  }
}

TEST_CASE("green_dirichlet: FD boundary-value oracle, generic parameters") {
  const double d = 1.5, nu = 0.25, kappa = 0.8;
  oracles::FDGreen fd;
  fd.a = 1e-9;  // Dirichlet pinned just off the singular origin
  fd.T = 30.0;
  fd.n = 300000;
  fd.q = [nu](double t) { return (nu * nu - 0.25) / (t * t); };
  (void)d;
  for (double t : {0.6, 1.4}) {
    const double tp = 1.0;
    const double got = sf::green_dirichlet(t, tp, kappa, nu);
    const double ref = fd.eval(t, tp, kappa);
    CHECK(rel_err(got, ref) < 1e-4);
  }
}

TEST_CASE("green_robin: d=1 reduces to the Neumann half-line resolvent") {
  for (double kappa : {0.3, 1.2}) {
    for (double t : {0.0, 0.7, 2.0}) {
      for (double tp : {0.4, 1.3}) {
        const double got = sf::green_robin(t, tp, kappa, 1.0);
        const double lo = std::min(t, tp), hi = std::max(t, tp);
        const double want =
            std::exp(-kappa * hi) * std::cosh(kappa * lo) / kappa;
        CHECK(rel_err(got, want) < 1e-11);
      }
    }
  }
}

TEST_CASE("green_robin: boundary condition dG/dt(0) = (d-1)/2 G(0)") {
  const double kappa = 0.7;
  for (double d : {1.0, 1.5, 1.8}) {
    for (double tp : {0.5, 1.5, 4.0}) {
      const double eps = 1e-6;
      const double g0 = sf::green_robin(0.0, tp, kappa, d);
      const double g1 = sf::green_robin(eps, tp, kappa, d);
      const double g2 = sf::green_robin(2 * eps, tp, kappa, d);
      const double deriv = (-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * eps);
      CHECK(std::abs(deriv - 0.5 * (d - 1.0) * g0) < 1e-6 * std::abs(g0) +
                                                         1e-9);
    }
  }
}

TEST_CASE("green_robin: symmetry, decay, FD oracle at d=1.5") {
  const double d = 1.5, kappa = 0.3;
  CHECK(rel_err(sf::green_robin(0.7, 1.3, kappa, d),
                sf::green_robin(1.3, 0.7, kappa, d)) < 1e-13);
  // frozen reference from 30-digit arithmetic
  CHECK(rel_err(sf::green_robin(0.7, 1.3, 0.3, 1.5), 1.8664232198530279) <
        1e-12);
  // FD oracle
  oracles::FDGreen fd;
  fd.a = 0.0;
  fd.T = 60.0;
  fd.n = 400000;
  fd.q = [d](double t) {
    return (d - 1.0) * (d - 3.0) / (4.0 * (1.0 + t) * (1.0 + t));
  };
  fd.robin = true;
  fd.robin_c = 0.5 * (d - 1.0);
  for (double t : {0.4, 1.9}) {
    const double tp = 1.1;
    const double got = sf::green_robin(t, tp, kappa, d);
    const double ref = fd.eval(t, tp, kappa);
    CHECK(rel_err(got, ref) < 1e-4);
  }
}

TEST_CASE("green_robin: unit derivative jump across the diagonal") {
  const double d = 1.4, kappa = 0.6, tp = 1.0, eps = 1e-5;
  const double right =
      (sf::green_robin(tp + 2 * eps, tp, kappa, d) -
       sf::green_robin(tp + eps, tp, kappa, d)) /
      eps;
  const double left =
      (sf::green_robin(tp - eps, tp, kappa, d) -
       sf::green_robin(tp - 2 * eps, tp, kappa, d)) /
      eps;
  CHECK(std::abs((right - left) - (-1.0)) < 1e-4);
}
