#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "spectree/quadrature.hpp"
#include "spectree/tree_model.hpp"

namespace spectree {

// One additive closed-form term of a radial potential, active on [a, b)
// (b may be +inf). Closed forms only, so runs reproduce bit-for-bit from
// config files.
struct PotentialPiece {
  enum class Kind { Constant, ExpPoly, Gaussian };
  Kind kind = Kind::Constant;
  double a = 0.0;
  double b = 0.0;       // may be +inf
  double c = 0.0;       // amplitude
  int m = 0;            // ExpPoly: c t^m e^{-r t}
  double r = 0.0;       // ExpPoly decay rate (r = 0 means pure polynomial)
  double sigma = 1.0;   // Gaussian: c e^{-(t/sigma)^2}

  double eval(double t) const;
  double sup_abs() const;             // sup over [a,b) of |piece|
  double tail_abs_bound(double t) const;  // sup over [max(t,a), b) of |piece|
};

// Bounded radial potential V(t), t >= 0, vanishing at infinity, stored as a
// sum of closed-form pieces (pieces may overlap; they add).
class RadialPotential {
public:
  RadialPotential() = default;
  explicit RadialPotential(std::vector<PotentialPiece> pieces);

  static RadialPotential square_well(double depth, double a, double b);
  static RadialPotential gaussian(double amplitude, double sigma = 1.0);
  static RadialPotential exp_poly(double coeff, int power, double rate,
                                  double from = 0.0);
  RadialPotential plus(const RadialPotential& other) const;
  RadialPotential scaled(double factor) const;

  double operator()(double t) const;
  const std::vector<PotentialPiece>& pieces() const { return pieces_; }
  double bound() const;                  // sup |V|
  double tail_abs_bound(double t) const; // sup_{s>=t} |V(s)|
  std::vector<double> breakpoints() const;
  bool compactly_supported() const;
  double support_end() const;            // +inf when not compact
  // Smallest T with tail_abs_bound(T) <= eps (clamped to support_end).
  double extent(double eps = 1e-14) const;

private:
  std::vector<PotentialPiece> pieces_;
};

// Weight applied inside moment integrals.
struct MomentWeight {
  enum class Kind {
    PowerT,         // t^p
    PowerOnePlusT,  // (1+t)^p
    G0,             // g_0(t)
    G0PowT,         // g_0(t) * t^p
  };
  Kind kind = Kind::PowerOnePlusT;
  double p = 0.0;
  const RegularTree* tree = nullptr;  // required for the g_0 kinds

  double eval(double t) const;
  static MomentWeight power_t(double p) { return {Kind::PowerT, p, nullptr}; }
  static MomentWeight power_1pt(double p) {
    return {Kind::PowerOnePlusT, p, nullptr};
  }
  static MomentWeight g0(const RegularTree& tr) {
    return {Kind::G0, 0.0, &tr};
  }
  static MomentWeight g0_tpow(const RegularTree& tr, double p) {
    return {Kind::G0PowT, p, &tr};
  }
};

// Type-erased nonnegative-decay integrand view shared by RadialPotential and
// the envelope-modified potentials.
struct PotentialView {
  std::function<double(double)> eval;
  std::vector<double> breakpoints;
  std::function<double(double)> tail_abs_bound;  // sup_{s>=t} |eval(s)|

  PotentialView() = default;
  PotentialView(const RadialPotential& V);  // implicit on purpose
};

// Adaptive quadrature of weight(t) * V(t) (signed) or weight(t) * |V(t)|
// over [lo, inf); absolute error <= 1e-9 (1 + |value|).
// Throws Error("divergent-moment") when the decay witness cannot dominate
// the weight growth.
double moment(const PotentialView& V, const MomentWeight& weight,
              bool absolute_value, double lo = 0.0);

// Convenience overload matching the common signed/absolute pairs.
double moment(const RadialPotential& V, const MomentWeight& weight,
              bool absolute_value, double lo = 0.0);

// Envelope-modified potential V_k^{s}(t) = g_k(t) / (a^{s} (1+t)^{d-1}) V(t)
// for s in {-,+}; bounded, preserves the sign of V pointwise.
enum class EnvelopeSide { Lower, Upper };  // a^- resp. a^+
PotentialView modified_potential(const RadialPotential& V,
                                 const RegularTree& tree, int k, double d,
                                 const Envelope& envelope, EnvelopeSide side);

// Same modification, shifted to the origin: s -> V_k^-(s + t_k); used by the
// translated Bargmann certificates.
PotentialView modified_potential_shifted(const RadialPotential& V,
                                         const RegularTree& tree, int k,
                                         double d, const Envelope& envelope,
                                         EnvelopeSide side);

}  // namespace spectree
