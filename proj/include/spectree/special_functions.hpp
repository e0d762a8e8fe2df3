#pragma once

namespace spectree::sf {

// Order bookkeeping for the d-dependent Bessel machinery:
// nu = (2-d)/2, alpha = d-1.
struct Order {
  double nu;
  double alpha;
  static Order from_dimension(double d) { return {0.5 * (2.0 - d), d - 1.0}; }
};

// Gamma function for x > 0 (Lanczos approximation, relative error well below
// 1e-12 across (0, 30] and beyond up to the overflow edge).
double gamma_fn(double x);

struct IK {
  double i;  // I_nu(x)
  double k;  // K_nu(x)
};

// Modified Bessel functions of order nu in [0, 1] at x > 0.
IK bessel_ik(double nu, double x);

// Exponentially scaled pair { e^{-x} I_nu(x), e^{x} K_nu(x) }.
IK bessel_ik_scaled(double nu, double x);

struct PaperConstants {
  double K_tilde;  // pi / (2 sin(nu pi) Gamma(1-nu) Gamma(1+nu)) = 1/(2-d)
  double C_nu;     // pi 2^{2nu-1} / (Gamma(1-nu)^2 sin(nu pi))
  double C_M;      // -pi / (2 sin(nu pi) Gamma(1-nu) Gamma(1+nu)) = -1/(2nu)
};

// The three weak-coupling constants for 1 <= d < 2. Verifies the
// reflection-formula simplifications K_tilde = 1/(2-d), C_M = -1/(2nu)
// against the Gamma-based evaluation to 1e-12 and throws "near-singular"
// as d -> 2- where all of them blow up.
PaperConstants paper_constants(double d);

// Resolvent kernel of the Dirichlet half-line operator
//   -u'' + (nu^2 - 1/4)/t^2 u  on (0, inf), u(0) = 0,
// at spectral parameter -kappa^2, normalized so the derivative jump across
// the diagonal is -1:
//   G(t,t') = sqrt(t t') I_nu(kappa t_<) K_nu(kappa t_>).
double green_dirichlet(double t, double tp, double kappa, double nu);

// Resolvent kernel of
//   B_0 = -u'' + (d-1)(d-3) / (4 (1+t)^2) u   on (0, inf),
//   u'(0) = (d-1)/2 u(0),
// at -kappa^2, same jump normalization. Real Bessel form (s = 1+t):
//   G(t,t') = sqrt(s s') [ I_nu(k s_<) + rho(k) K_nu(k s_<) ] K_nu(k s_>),
//   rho(k)  = I_{nu-1}(k) / K_{nu-1}(k).
double green_robin(double t, double tp, double kappa, double d);

// Per-kappa state for assembling green_robin over many point pairs without
// re-deriving the boundary ratio.
struct GreenRobinContext {
  double kappa;
  double nu;
  double rho_scaled;  // Ihat_{nu-1}(kappa) / Khat_{nu-1}(kappa)
  static GreenRobinContext make(double kappa, double d);
  // Evaluate from precomputed scaled Bessel values at s = 1+t:
  // iv = e^{-k s} I_nu(k s), kv = e^{k s} K_nu(k s) for the two points.
  double eval(double s_lo, double s_hi, double iv_lo, double kv_lo,
              double kv_hi) const;
};

}  // namespace spectree::sf
