#include "spectree/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spectree/common.hpp"

namespace spectree::sf {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Taylor coefficients of 1/Gamma(z) = sum a_k z^k (Abramowitz & Stegun
// 6.1.34), enough terms for full double precision at |z| <= 1.5.
constexpr double kRecipGamma[25] = {
    0.0,
    1.0,
    0.577215664901532860607,
    -0.655878071520253881077,
    -0.042002635034095235529,
    0.166538611382291489502,
    -0.0421977345555443367482,
    -0.00962197152787697356211,
    0.0072189432466630995424,
    -0.00116516759185906511211,
    -0.000215241674114950972816,
    0.000128050282388116186153,
    -0.0000201348547807882386557,
    -0.00000125049348214267065735,
    0.00000113302723198169588237,
    -2.05633841697760710345e-7,
    6.11609510448141581786e-9,
    5.00200764446922293006e-9,
    -1.18127457048702014459e-9,
    1.04342671169110051049e-10,
    7.78226343990507125405e-12,
    -3.69680561864220570819e-12,
    5.10037028745447597902e-13,
    -2.05832605356650678322e-14,
    -5.34812253942301798237e-15,
};

double recip_gamma_1p(double z) {
  // 1/Gamma(1+z) for |z| <= 0.5 via the series above (1/Gamma(1+z) equals
  // the series with indices shifted by one).
  double sum = 0.0;
  double zp = 1.0;
  for (int k = 1; k <= 24; ++k) {
    sum += kRecipGamma[k] * zp;
    zp *= z;
  }
  return sum;
}

// Temme auxiliary coefficients:
//   gam1(mu) = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
//   gam2(mu) = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
// computed from the same Taylor series so mu -> 0 is exact.
void temme_gammas(double mu, double& gam1, double& gam2, double& one_over_gamma_1p,
                  double& one_over_gamma_1m) {
  double odd = 0.0, even = 0.0;
  double mp = 1.0;  // mu^{2j-2}
  const double mu2 = mu * mu;
  for (int k = 2; k <= 24; k += 2) {
    even += kRecipGamma[k] * mp;      // a2, a4, ... -> gam1
    odd += kRecipGamma[k - 1] * mp;   // a1, a3, ... -> gam2
    mp *= mu2;
  }
  gam1 = -even;
  gam2 = odd;
  one_over_gamma_1p = recip_gamma_1p(mu);
  one_over_gamma_1m = recip_gamma_1p(-mu);
}

// K_mu(x), K_{mu+1}(x) for |mu| <= 1/2, x <= 2 via Temme's series.
void bessel_k_temme(double mu, double x, double& kmu, double& kmup1) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double x2 = 0.5 * x;
  const double pimu = kPi * mu;
  const double fact =
      std::abs(pimu) < 1e-15 ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::abs(e) < 1e-15 ? 1.0 : std::sinh(e) / e;
  double gam1, gam2, gampl, gammi;
  temme_gammas(mu, gam1, gam2, gampl, gammi);
  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  // gampl = 1/Gamma(1+mu), gammi = 1/Gamma(1-mu).
  double p = 0.5 * e / gampl;
  double q = 0.5 / (e * gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i <= 500; ++i) {
    ff = (i * ff + p + q) / (i * i - mu2);
    c *= d / i;
    p /= (i - mu);
    q /= (i + mu);
    const double del = c * ff;
    sum += del;
    const double del1 = c * (p - i * ff);
    sum1 += del1;
    if (std::abs(del) < std::abs(sum) * eps) break;
  }
  kmu = sum;
  kmup1 = sum1 * (2.0 / x);
}

// K_mu(x), K_{mu+1}(x), exponentially scaled by e^{x}, for x > 2 via the
// Thompson-Barnett continued fraction (CF2).
void bessel_k_cf2_scaled(double mu, double x, double& kmu_hat,
                         double& kmup1_hat) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= 20000; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) <= eps) break;
  }
  h = a1 * h;
  kmu_hat = std::sqrt(kPi / (2.0 * x)) / s;
  kmup1_hat = kmu_hat * (mu + x + 0.5 - h) / x;
}

// Power series for I_nu(x); safe for any nu >= 0 and moderate x (all the
// terms are positive, so there is no cancellation).
double bessel_i_series(double nu, double x) {
  const double x2 = 0.5 * x;
  double term = std::pow(x2, nu) / gamma_fn(nu + 1.0);
  double sum = term;
  const double q = x2 * x2;
  for (int m = 1; m <= 600; ++m) {
    term *= q / (m * (m + nu));
    sum += term;
    if (term < sum * std::numeric_limits<double>::epsilon()) break;
  }
  return sum;
}

// Asymptotic expansion of e^{-x} I_nu(x) for large x, truncated at the
// smallest term.
double bessel_i_asymptotic_scaled(double nu, double x) {
  const double mu4 = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  double prev = std::numeric_limits<double>::max();
  for (int k = 1; k <= 60; ++k) {
    const double num = mu4 - (2.0 * k - 1.0) * (2.0 * k - 1.0);
    term *= -num / (8.0 * k * x);
    if (std::abs(term) > prev) break;
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < std::abs(sum) * std::numeric_limits<double>::epsilon())
      break;
  }
  return sum / std::sqrt(2.0 * kPi * x);
}

constexpr double kSeriesAsymptoticSplit = 18.0;

void check_ik_args(double nu, double x) {
  if (!(x > 0.0))
    throw Error("domain", "bessel_ik requires x > 0, got x=" + std::to_string(x));
  if (!(nu >= 0.0 && nu <= 1.0))
    throw Error("domain",
                "bessel_ik requires nu in [0,1], got nu=" + std::to_string(nu));
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0))
    throw Error("domain", "gamma_fn requires x > 0, got " + std::to_string(x));
  // Lanczos, g = 7, 9 coefficients.
  static const double g = 7.0;
  static const double coef[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // One recurrence step keeps the argument in the well-conditioned range.
    return gamma_fn(x + 1.0) / x;
  }
  const double z = x - 1.0;
  double a = coef[0];
  for (int i = 1; i < 9; ++i) a += coef[i] / (z + i);
  const double t = z + g + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

IK bessel_ik(double nu, double x) {
  check_ik_args(nu, x);
  if (x > 700.0)
    throw Error("overflow", "bessel_ik: I_nu overflows for x=" + std::to_string(x));
  IK scaled = bessel_ik_scaled(nu, x);
  return {scaled.i * std::exp(x), scaled.k * std::exp(-x)};
}

IK bessel_ik_scaled(double nu, double x) {
  check_ik_args(nu, x);
  // Reduce the K order to |mu| <= 1/2; K is even in its order.
  const bool shift = nu > 0.5;
  const double mu = shift ? nu - 1.0 : nu;

  double khat;  // e^{x} K_nu(x)
  if (x <= 2.0) {
    double kmu, kmup1;
    bessel_k_temme(mu, x, kmu, kmup1);
    khat = (shift ? kmup1 : kmu) * std::exp(x);
  } else {
    double kmu_hat, kmup1_hat;
    bessel_k_cf2_scaled(mu, x, kmu_hat, kmup1_hat);
    khat = shift ? kmup1_hat : kmu_hat;
  }

  double ihat;  // e^{-x} I_nu(x)
  if (x <= kSeriesAsymptoticSplit)
    ihat = bessel_i_series(nu, x) * std::exp(-x);
  else
    ihat = bessel_i_asymptotic_scaled(nu, x);

  return {ihat, khat};
}

PaperConstants paper_constants(double d) {
  if (!(d >= 1.0 && d < 2.0))
    throw Error("domain",
                "paper_constants requires 1 <= d < 2, got " + std::to_string(d));
  if (d > 2.0 - 1e-6)
    throw Error("near-singular",
                "constants diverge as d -> 2-; got d=" + std::to_string(d));
  const double nu = 0.5 * (2.0 - d);
  const double s = std::sin(nu * kPi);
  const double g1m = gamma_fn(1.0 - nu);
  const double g1p = gamma_fn(1.0 + nu);
  PaperConstants pc;
  pc.K_tilde = kPi / (2.0 * s * g1m * g1p);
  pc.C_nu = kPi * std::pow(2.0, 2.0 * nu - 1.0) / (g1m * g1m * s);
  pc.C_M = -pc.K_tilde;
  // Reflection-formula simplifications; disagreement means a broken Gamma.
  const double k_simple = 1.0 / (2.0 - d);
  const double cm_simple = -1.0 / (2.0 * nu);
  if (std::abs(pc.K_tilde - k_simple) > 1e-12 * std::abs(k_simple) ||
      std::abs(pc.C_M - cm_simple) > 1e-12 * std::abs(cm_simple))
    throw Error("inconsistent-constants",
                "gamma evaluation disagrees with the reflection formula");
  return pc;
}

double green_dirichlet(double t, double tp, double kappa, double nu) {
  if (!(t > 0.0 && tp > 0.0 && kappa > 0.0))
    throw Error("domain", "green_dirichlet requires t, t', kappa > 0");
  const double lo = std::min(t, tp), hi = std::max(t, tp);
  const IK a = bessel_ik_scaled(nu, kappa * lo);
  const IK b = bessel_ik_scaled(nu, kappa * hi);
  return std::sqrt(t * tp) * a.i * b.k * std::exp(-kappa * (hi - lo));
}

GreenRobinContext GreenRobinContext::make(double kappa, double d) {
  if (!(kappa > 0.0))
    throw Error("domain", "green_robin requires kappa > 0");
  if (!(d >= 1.0 && d < 2.0))
    throw Error("domain",
                "green_robin requires 1 <= d < 2, got " + std::to_string(d));
  const double nu = 0.5 * (2.0 - d);
  // I_{nu-1} = I_{1-nu} + (2/pi) sin(nu pi) K_{1-nu}; K_{nu-1} = K_{1-nu}.
  const IK m = bessel_ik_scaled(1.0 - nu, kappa);
  const double i_minus_scaled =
      m.i + (2.0 / kPi) * std::sin(nu * kPi) * m.k * std::exp(-2.0 * kappa);
  GreenRobinContext ctx;
  ctx.kappa = kappa;
  ctx.nu = nu;
  ctx.rho_scaled = i_minus_scaled / m.k;
  return ctx;
}

double GreenRobinContext::eval(double s_lo, double s_hi, double iv_lo,
                               double kv_lo, double kv_hi) const {
  // Both exponents are <= 0 because s >= 1 on the half line.
  const double direct = iv_lo * kv_hi * std::exp(-kappa * (s_hi - s_lo));
  const double reflected =
      rho_scaled * kv_lo * kv_hi * std::exp(-kappa * (s_lo + s_hi - 2.0));
  return std::sqrt(s_lo * s_hi) * (direct + reflected);
}

double green_robin(double t, double tp, double kappa, double d) {
  if (!(t >= 0.0 && tp >= 0.0))
    throw Error("domain", "green_robin requires t, t' >= 0");
  const GreenRobinContext ctx = GreenRobinContext::make(kappa, d);
  const double s_lo = 1.0 + std::min(t, tp);
  const double s_hi = 1.0 + std::max(t, tp);
  const IK lo = bessel_ik_scaled(ctx.nu, kappa * s_lo);
  const IK hi = bessel_ik_scaled(ctx.nu, kappa * s_hi);
  return ctx.eval(s_lo, s_hi, lo.i, lo.k, hi.k);
}

}  // namespace spectree::sf
