#include "spectree/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spectree/common.hpp"

namespace spectree {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double PotentialPiece::eval(double t) const {
  if (t < a || t >= b) return 0.0;
  switch (kind) {
    case Kind::Constant:
      return c;
    case Kind::ExpPoly:
      return c * std::pow(t, m) * std::exp(-r * t);
    case Kind::Gaussian:
      return c * std::exp(-(t / sigma) * (t / sigma));
  }
  return 0.0;
}

double PotentialPiece::sup_abs() const {
  switch (kind) {
    case Kind::Constant:
      return std::abs(c);
    case Kind::ExpPoly: {
      if (m == 0) return std::abs(c) * std::exp(-r * a);
      if (r <= 0.0) {
        if (!std::isfinite(b))
          throw Error("invalid-potential",
                      "polynomial piece without decay must live on a finite "
                      "interval to stay bounded");
        return std::abs(c) * std::max(std::pow(std::abs(a), m),
                                      std::pow(std::abs(b), m));
      }
      const double t_star = std::clamp(m / r, a, std::isfinite(b) ? b : m / r);
      return std::abs(eval(std::max(t_star, a)));
    }
    case Kind::Gaussian:
      return std::abs(c) * std::exp(-(a / sigma) * (a / sigma));
  }
  return 0.0;
}

double PotentialPiece::tail_abs_bound(double t) const {
  const double lo = std::max(t, a);
  if (lo >= b) return 0.0;
  switch (kind) {
    case Kind::Constant:
      return std::abs(c);
    case Kind::ExpPoly: {
      if (r <= 0.0) {
        if (!std::isfinite(b))
          return kInf;  // no decay: the tail never dies
        return std::abs(c) * std::max(std::pow(std::abs(lo), m),
                                      std::pow(std::abs(b), m));
      }
      const double peak = m / r;
      const double t_eval = std::max(lo, peak);
      if (std::isfinite(b) && t_eval >= b)
        return std::abs(c * std::pow(lo, m) * std::exp(-r * lo));
      return std::abs(c * std::pow(t_eval, m) * std::exp(-r * t_eval));
    }
    case Kind::Gaussian:
      return std::abs(c) * std::exp(-(lo / sigma) * (lo / sigma));
  }
  return 0.0;
}

RadialPotential::RadialPotential(std::vector<PotentialPiece> pieces)
    : pieces_(std::move(pieces)) {
  for (const auto& p : pieces_) {
    if (!(p.b > p.a))
      throw Error("invalid-potential", "piece interval must be nonempty");
    if (p.a < 0.0)
      throw Error("invalid-potential", "pieces live on t >= 0");
    if (p.kind == PotentialPiece::Kind::Gaussian && !(p.sigma > 0.0))
      throw Error("invalid-potential", "gaussian sigma must be positive");
  }
}

RadialPotential RadialPotential::square_well(double depth, double a,
                                             double b) {
  PotentialPiece p;
  p.kind = PotentialPiece::Kind::Constant;
  p.a = a;
  p.b = b;
  p.c = depth;
  return RadialPotential({p});
}

RadialPotential RadialPotential::gaussian(double amplitude, double sigma) {
  PotentialPiece p;
  p.kind = PotentialPiece::Kind::Gaussian;
  p.a = 0.0;
  p.b = kInf;
  p.c = amplitude;
  p.sigma = sigma;
  return RadialPotential({p});
}

RadialPotential RadialPotential::exp_poly(double coeff, int power, double rate,
                                          double from) {
  PotentialPiece p;
  p.kind = PotentialPiece::Kind::ExpPoly;
  p.a = from;
  p.b = kInf;
  p.c = coeff;
  p.m = power;
  p.r = rate;
  return RadialPotential({p});
}

RadialPotential RadialPotential::plus(const RadialPotential& other) const {
  std::vector<PotentialPiece> all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return RadialPotential(std::move(all));
}

RadialPotential RadialPotential::scaled(double factor) const {
  std::vector<PotentialPiece> all = pieces_;
  for (auto& p : all) p.c *= factor;
  return RadialPotential(std::move(all));
}

double RadialPotential::operator()(double t) const {
  double v = 0.0;
  for (const auto& p : pieces_) v += p.eval(t);
  return v;
}

double RadialPotential::bound() const {
  double s = 0.0;
  for (const auto& p : pieces_) s += p.sup_abs();
  return s;
}

double RadialPotential::tail_abs_bound(double t) const {
  double s = 0.0;
  for (const auto& p : pieces_) s += p.tail_abs_bound(t);
  return s;
}

std::vector<double> RadialPotential::breakpoints() const {
  std::vector<double> out;
  for (const auto& p : pieces_) {
    if (p.a > 0.0) out.push_back(p.a);
    if (std::isfinite(p.b)) out.push_back(p.b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool RadialPotential::compactly_supported() const {
  for (const auto& p : pieces_)
    if (!std::isfinite(p.b)) return false;
  return true;
}

double RadialPotential::support_end() const {
  double end = 0.0;
  for (const auto& p : pieces_) end = std::max(end, p.b);
  return end;
}

double RadialPotential::extent(double eps) const {
  if (compactly_supported()) return support_end();
  double T = 1.0;
  for (const auto& p : pieces_) T = std::max(T, p.a + 1.0);
  int guard = 0;
  while (tail_abs_bound(T) > eps) {
    T *= 2.0;
    if (++guard > 200)
      throw Error("divergent-moment", "potential tail does not decay");
  }
  return T;
}

double MomentWeight::eval(double t) const {
  switch (kind) {
    case Kind::PowerT:
      return std::pow(t, p);
    case Kind::PowerOnePlusT:
      return std::pow(1.0 + t, p);
    case Kind::G0:
      return tree->g0(t);
    case Kind::G0PowT:
      return tree->g0(t) * std::pow(t, p);
  }
  return 0.0;
}

PotentialView::PotentialView(const RadialPotential& V)
    : eval([V](double t) { return V(t); }),
      breakpoints(V.breakpoints()),
      tail_abs_bound([V](double t) { return V.tail_abs_bound(t); }) {}

double moment(const PotentialView& V, const MomentWeight& weight,
              bool absolute_value, double lo) {
  quad::Integrand f;
  const bool abs = absolute_value;
  auto veval = V.eval;
  auto w = weight;
  f.f = [veval, w, abs](double t) {
    const double v = veval(t);
    return w.eval(t) * (abs ? std::abs(v) : v);
  };
  f.breakpoints = V.breakpoints;
  if (weight.tree) {
    // Weight jumps at the vertices; panels must not straddle them. Points
    // beyond the truncation radius are filtered out downstream.
    for (double t : weight.tree->vertex_distances())
      if (t > lo) f.breakpoints.push_back(t);
    std::sort(f.breakpoints.begin(), f.breakpoints.end());
    f.breakpoints.erase(
        std::unique(f.breakpoints.begin(), f.breakpoints.end()),
        f.breakpoints.end());
  }
  // Tail bound for weight * |V|: the weight grows at most polynomially with
  // known exponent; fold it in so the truncation logic sees true decay.
  auto vtail = V.tail_abs_bound;
  if (vtail) {
    const MomentWeight wcopy = weight;
    f.tail_bound = [vtail, wcopy](double t) {
      double wv;
      switch (wcopy.kind) {
        case MomentWeight::Kind::PowerT:
        case MomentWeight::Kind::PowerOnePlusT:
          wv = std::pow(1.0 + t, std::max(wcopy.p, 0.0));
          break;
        case MomentWeight::Kind::G0:
          wv = wcopy.tree->g0(t);
          break;
        case MomentWeight::Kind::G0PowT:
          wv = wcopy.tree->g0(t) * std::pow(1.0 + t, std::max(wcopy.p, 0.0));
          break;
        default:
          wv = 1.0;
      }
      // g_0 grows polynomially but is evaluated exactly; multiplying the
      // monotone tail bound of V by the local weight overestimates the true
      // sup only mildly for our decaying pieces.
      const double vb = vtail(t);
      if (vb == 0.0) return 0.0;
      if (!std::isfinite(vb)) return vb;
      return wv * vb;
    };
  }
  quad::Result r = quad::integrate_piecewise(f, lo, kInf, 1e-12, 1e-10);
  if (r.abs_error > 1e-9 * (1.0 + std::abs(r.value)))
    throw Error("quadrature-underresolved",
                "moment error estimate " + std::to_string(r.abs_error) +
                    " exceeds tolerance");
  return r.value;
}

double moment(const RadialPotential& V, const MomentWeight& weight,
              bool absolute_value, double lo) {
  return moment(PotentialView(V), weight, absolute_value, lo);
}

PotentialView modified_potential(const RadialPotential& V,
                                 const RegularTree& tree, int k, double d,
                                 const Envelope& envelope, EnvelopeSide side) {
  const double a = side == EnvelopeSide::Lower ? envelope.lower
                                               : envelope.upper;
  if (!(a > 0.0))
    throw Error("domain", "modified_potential needs a positive envelope");
  const double alpha = d - 1.0;
  PotentialView out;
  RadialPotential Vc = V;
  RegularTree tc = tree;
  out.eval = [Vc, tc, k, a, alpha](double t) {
    return tc.gk(k, t) / (a * std::pow(1.0 + t, alpha)) * Vc(t);
  };
  out.breakpoints = V.breakpoints();
  const double T = V.extent(1e-300) * 2.0;
  for (double t : tree.vertex_distances()) {
    if (t > T) break;
    out.breakpoints.push_back(t);
  }
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  out.breakpoints.erase(
      std::unique(out.breakpoints.begin(), out.breakpoints.end()),
      out.breakpoints.end());
  // |g_k / (a (1+t)^alpha)| is globally bounded by envelope validity,
  // with ratio bound upper/lower relative to the chosen side.
  const double ratio_bound =
      (side == EnvelopeSide::Lower ? envelope.upper / envelope.lower : 1.0) *
      1.0000000001;
  RadialPotential Vb = V;
  out.tail_abs_bound = [Vb, ratio_bound](double t) {
    return ratio_bound * Vb.tail_abs_bound(t);
  };
  return out;
}

PotentialView modified_potential_shifted(const RadialPotential& V,
                                         const RegularTree& tree, int k,
                                         double d, const Envelope& envelope,
                                         EnvelopeSide side) {
  if (k < 1)
    throw Error("domain", "shifted modification is defined for k >= 1");
  const double tk = tree.vertex_distances().at(k - 1);
  PotentialView base = modified_potential(V, tree, k, d, envelope, side);
  PotentialView out;
  auto beval = base.eval;
  out.eval = [beval, tk](double s) { return beval(s + tk); };
  for (double brk : base.breakpoints)
    if (brk > tk) out.breakpoints.push_back(brk - tk);
  auto btail = base.tail_abs_bound;
  out.tail_abs_bound = [btail, tk](double s) { return btail(s + tk); };
  return out;
}

}  // namespace spectree
