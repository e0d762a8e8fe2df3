#pragma once

// Independent test oracles. Everything here is deliberately built on
// different algorithms than the library paths it checks.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// --- Modified Bessel functions by direct power series in long double. ---
// I_nu via its defining series; K_nu via the reflection formula
// K = pi/2 (I_{-nu} - I_nu)/sin(nu pi). Accurate for small/moderate x and
// nu away from integers; exactly the regime the unit tests probe.

inline long double gamma_ld(long double x) {
  // Lanczos in long double; plenty for oracle duty.
  static const long double coef[9] = {
      0.99999999999980993L,     676.5203681218851L,    -1259.1392167224028L,
      771.32342877765313L,      -176.61502916214059L,  12.507343278686905L,
      -0.13857109526572012L,    9.9843695780195716e-6L,
      1.5056327351493116e-7L};
  if (x < 0.5L) {
    const long double pi = 3.14159265358979323846264338L;
    return pi / (std::sin(pi * x) * gamma_ld(1.0L - x));
  }
  const long double z = x - 1.0L;
  long double a = coef[0];
  for (int i = 1; i < 9; ++i) a += coef[i] / (z + i);
  const long double t = z + 7.5L;
  return std::sqrt(2.0L * 3.14159265358979323846264338L) *
         std::pow(t, z + 0.5L) * std::exp(-t) * a;
}

inline long double bessel_i_series(long double nu, long double x,
                                   int terms = 60) {
  const long double x2 = x / 2.0L;
  long double term = std::pow(x2, nu) / gamma_ld(nu + 1.0L);
  long double sum = term;
  for (int m = 1; m <= terms; ++m) {
    term *= (x2 * x2) / (m * (m + nu));
    sum += term;
  }
  return sum;
}

inline long double bessel_k_reflection(long double nu, long double x,
                                       int terms = 60) {
  const long double pi = 3.14159265358979323846264338L;
  if (std::abs(nu - std::round(nu)) < 1e-6L)
    throw std::runtime_error("oracle K needs non-integer order");
  return pi / 2.0L * (bessel_i_series(-nu, x, terms) -
                      bessel_i_series(nu, x, terms)) /
         std::sin(nu * pi);
}

// --- Closed forms at nu = 1/2. ---
inline double i_half(double x) {
  return std::sqrt(2.0 / (M_PI * x)) * std::sinh(x);
}
inline double k_half(double x) {
  return std::sqrt(M_PI / (2.0 * x)) * std::exp(-x);
}

// --- Square-well transcendental oracles on the half line (V = -1 on
// [0, width], coupling lambda). Even (Neumann) states solve
// sqrt(lambda - k^2) tan(sqrt(lambda - k^2) w) = k; odd (Dirichlet) states
// solve q cot(q w) = -k with q = sqrt(lambda - k^2). Returns all kappas. ---
inline std::vector<double> well_kappas_neumann(double lambda, double width) {
  std::vector<double> out;
  auto f = [&](double k) {
    const double q = std::sqrt(lambda - k * k);
    return q * std::tan(q * width) - k;
  };
  // march over branches of tan
  const double qmax = std::sqrt(lambda);
  for (int n = 0;; ++n) {
    // q in ((n - 1/2) pi / w, (n + 1/2) pi / w), tan increasing branch
    const double qlo = std::max(1e-12, (n - 0.499999) * M_PI / width);
    const double qhi = (n + 0.499999) * M_PI / width;
    if (qlo >= qmax) break;
    // convert to a bracket in k (q decreasing in k)
    double klo = qhi >= qmax ? 1e-14 : std::sqrt(lambda - qhi * qhi);
    double khi = std::sqrt(std::max(0.0, lambda - qlo * qlo));
    if (khi <= klo) continue;
    khi = std::min(khi, qmax * (1 - 1e-15));
    double a = klo, b = khi;
    double fa = f(a), fb = f(b);
    if (fa * fb > 0) continue;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (f(m) * fa <= 0)
        b = m;
      else {
        a = m;
        fa = f(a);
      }
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

inline std::vector<double> well_kappas_dirichlet(double lambda, double width) {
  std::vector<double> out;
  auto f = [&](double k) {
    const double q = std::sqrt(lambda - k * k);
    return q * std::cos(q * width) / std::sin(q * width) + k;
  };
  const double qmax = std::sqrt(lambda);
  for (int n = 1;; ++n) {
    // cot branch: q in (n pi / w - pi, n pi / w), cot decreasing
    const double qlo = std::max(1e-12, (n - 0.999999) * M_PI / width);
    const double qhi = (n - 1e-9) * M_PI / width;
    if (qlo >= qmax) break;
    double klo = qhi >= qmax ? 1e-14 : std::sqrt(lambda - qhi * qhi);
    double khi = std::sqrt(std::max(0.0, lambda - qlo * qlo));
    if (khi <= klo) continue;
    double a = klo, b = khi;
    double fa = f(a), fb = f(b);
    if (fa * fb > 0) continue;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (f(m) * fa <= 0)
        b = m;
      else {
        a = m;
        fa = f(a);
      }
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

// --- Finite-difference boundary-value oracle for the Green functions:
// solves (-u'' + q(t) u + kappa^2 u) = delta_{t'} on [a, T] with the given
// boundary condition at a (Dirichlet: u(a)=0; Robin: u'(a) = c u(a)) and
// Dirichlet at large T, by a tridiagonal solve on a uniform grid. ---
struct FDGreen {
  double a = 0.0;
  double T = 40.0;
  int n = 200000;
  std::function<double(double)> q;  // potential, may be null
  bool robin = false;
  double robin_c = 0.0;

  // Value of G(t_query, t_source, kappa).
  double eval(double t_query, double t_source, double kappa) const {
    const double h = (T - a) / n;
    const int n_in = n - 1;  // interior nodes (Dirichlet at T), node 0 kept
    const int size = robin ? n_in + 1 : n_in;
    std::vector<double> d(size), e(size - 1), rhs(size, 0.0);
    auto pos = [&](int idx) { return robin ? a + idx * h : a + (idx + 1) * h; };
    for (int i = 0; i < size; ++i) {
      const double t = pos(i);
      d[i] = 2.0 / (h * h) + (q ? q(t) : 0.0) + kappa * kappa;
    }
    if (robin) {
      // Ghost elimination: u'(a) = c u(a) with a centered ghost point.
      d[0] = 2.0 / (h * h) + (q ? q(a) : 0.0) + kappa * kappa +
             2.0 * robin_c / h;
      // row 0 couples to node 1 with weight -2/h^2
    }
    for (int i = 0; i + 1 < size; ++i) e[i] = -1.0 / (h * h);
    if (robin) e[0] = -2.0 / (h * h);
    // delta at the node closest to t_source
    const int js = static_cast<int>(std::round((t_source - pos(0)) / h));
    rhs[js] = 1.0 / h;
    // Thomas algorithm (non-symmetric first row handled by plain LU).
    std::vector<double> c1(size - 1), dp(size), rp(size);
    dp[0] = d[0];
    rp[0] = rhs[0];
    for (int i = 1; i < size; ++i) {
      const double lower = (i - 1 == 0 && robin) ? -1.0 / (h * h) : e[i - 1];
      const double upper = e[i - 1];
      const double m = lower / dp[i - 1];
      dp[i] = d[i] - m * upper;
      rp[i] = rhs[i] - m * rp[i - 1];
    }
    std::vector<double> u(size);
    u[size - 1] = rp[size - 1] / dp[size - 1];
    for (int i = size - 2; i >= 0; --i)
      u[i] = (rp[i] - e[i] * u[i + 1]) / dp[i];
    const int jq = static_cast<int>(std::round((t_query - pos(0)) / h));
    return u[jq];
  }
};

}  // namespace oracles
