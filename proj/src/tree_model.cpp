#include "spectree/tree_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spectree/common.hpp"

namespace spectree {

RegularTree::RegularTree(std::vector<double> vertex_distances,
                         std::vector<int> branching_numbers,
                         std::optional<double> declared_dimension)
    : t_(std::move(vertex_distances)),
      b_(std::move(branching_numbers)),
      declared_d_(declared_dimension) {
  finish_init();
}

void RegularTree::finish_init() {
  if (t_.size() != b_.size())
    throw Error("invalid-tree", "vertex_distances and branching_numbers must "
                                "have equal length");
  double prev = 0.0;
  for (double t : t_) {
    if (!(t > prev))
      throw Error("invalid-tree", "vertex distances must be strictly "
                                  "increasing and positive");
    prev = t;
  }
  for (int b : b_)
    if (b < 1) throw Error("invalid-tree", "branching numbers must be >= 1");
  cumprod_.assign(t_.size() + 1, 1.0);
  for (std::size_t n = 0; n < b_.size(); ++n)
    cumprod_[n + 1] = cumprod_[n] * b_[n];
}

RegularTree RegularTree::geometric(double d, int b, int generations) {
  if (!(d > 1.0))
    throw Error("invalid-tree",
                "geometric trees need d > 1 (use terminal for d = 1), got d=" +
                    std::to_string(d));
  if (b < 2) throw Error("invalid-tree", "geometric trees need b >= 2");
  const double beta = std::pow(static_cast<double>(b), 1.0 / (d - 1.0));
  std::vector<double> t(generations);
  std::vector<int> bs(generations, b);
  double tk = 1.0;
  for (int k = 0; k < generations; ++k) {
    tk *= beta;
    t[k] = tk;
    if (!std::isfinite(tk))
      throw Error("invalid-tree", "geometric tree overflows double range; "
                                  "reduce generations");
  }
  RegularTree tree(std::move(t), std::move(bs), d);
  tree.geom_ = GeometricInfo{d, b, beta};
  return tree;
}

RegularTree RegularTree::terminal(std::vector<int> branching,
                                  std::vector<double> distances) {
  return RegularTree(std::move(distances), std::move(branching), 1.0);
}

RegularTree RegularTree::half_line() {
  return RegularTree({}, {}, 1.0);
}

int RegularTree::generation_of(double t) const {
  // Largest n with t_n <= t; 0 when t < t_1.
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  return static_cast<int>(it - t_.begin());
}

double RegularTree::gk(int k, double t) const {
  if (k < 0) throw Error("domain", "gk: generation index must be >= 0");
  if (k > 0) {
    if (k > generations())
      throw Error("domain", "gk: generation " + std::to_string(k) +
                                " beyond the listed vertices");
    if (t < t_[k - 1]) return 0.0;
  }
  if (t < 0.0) throw Error("domain", "gk: t must be >= 0");
  const int n = generation_of(t);
  if (n <= k) return 1.0;
  return cumprod_[n] / cumprod_[k];
}

double RegularTree::gk_left(int k, double t) const {
  const int n = generation_of(t);
  if (n >= 1 && t_[n - 1] == t) {
    // Exactly on a breakpoint: use the previous generation's value.
    if (k > 0 && (k > generations() || t <= t_[k - 1])) return 0.0;
    const int nm = n - 1;
    if (nm <= k) return 1.0;
    return cumprod_[nm] / cumprod_[k];
  }
  return gk(k, t);
}

long long RegularTree::multiplicity(int k) const {
  if (k < 1) throw Error("domain", "multiplicity: k must be >= 1");
  if (k > generations()) return 0;  // implicit b_k = 1 beyond the list
  const int bk = b_[k - 1];
  if (bk == 1) return 0;
  double m = cumprod_[k - 1] * (bk - 1);
  if (m > 9.0e18)
    throw Error("overflow", "multiplicity exceeds integer range");
  long long out = 1;
  for (int j = 0; j < k - 1; ++j) out *= b_[j];
  return out * (bk - 1);
}

long long RegularTree::cumulative_branches(int k) const {
  if (k < 0 || k > generations())
    throw Error("domain", "cumulative_branches: k out of range");
  if (cumprod_[k] > 9.0e18)
    throw Error("overflow", "branch count exceeds integer range");
  long long out = 1;
  for (int j = 0; j < k; ++j) out *= b_[j];
  return out;
}

std::vector<double> RegularTree::breakpoints_between(double lo,
                                                     double hi) const {
  std::vector<double> out;
  for (double t : t_) {
    if (t <= lo) continue;
    if (t >= hi) break;
    out.push_back(t);
  }
  return out;
}

double dimension_estimate(const RegularTree& tree, double t_min,
                          double t_max) {
  if (tree.generations() == 0) return 1.0;  // bare half line
  if (!(t_max > t_min) || !(t_min >= tree.vertex_distances().front()))
    throw Error("domain", "dimension_estimate requires t_max > t_min >= t_1");
  int gens_inside = 0;
  for (double t : tree.vertex_distances())
    if (t >= t_min && t <= t_max) ++gens_inside;
  if (gens_inside < 4)
    throw Error("degenerate-range",
                "need at least 4 generations in [t_min, t_max], found " +
                    std::to_string(gens_inside));
  const int samples = 200;
  const double llo = std::log(t_min), lhi = std::log(t_max);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < samples; ++i) {
    const double lt = llo + (lhi - llo) * (i + 0.5) / samples;
    const double t = std::exp(lt);
    const double y = std::log(tree.g0(t));
    sx += lt;
    sy += y;
    sxx += lt * lt;
    sxy += lt * y;
  }
  const double slope =
      (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
  return slope + 1.0;
}

Envelope envelope_constants(const RegularTree& tree, int k, double d,
                            double L_check) {
  const double alpha = d - 1.0;
  const double start = k == 0 ? 0.0
                              : (k <= tree.generations()
                                     ? tree.vertex_distances()[k - 1]
                                     : throw Error("domain",
                                                   "envelope_constants: no "
                                                   "such generation"));
  if (!(L_check > start))
    throw Error("domain", "envelope_constants needs L_check > t_k");
  auto ratio = [&](double t, bool left) {
    const double g = left ? tree.gk_left(k, t) : tree.gk(k, t);
    return g / std::pow(1.0 + t, alpha);
  };

  // Within one generation interval the ratio is monotone (g constant), so
  // interval endpoints carry the extremes. Enumerate a couple of
  // generations past L_check as a safety margin.
  double lo = ratio(start, false), hi = lo;
  std::vector<double> left_endpoint_ratios;
  left_endpoint_ratios.push_back(lo);
  int enumerated = 0;
  for (int n = std::max(1, k); n <= tree.generations(); ++n) {
    const double tn = tree.vertex_distances()[n - 1];
    if (tn <= start) continue;
    if (tn > L_check && enumerated >= 2) break;
    if (tn > L_check) ++enumerated;
    const double r_before = ratio(tn, true);   // end of previous interval
    const double r_after = ratio(tn, false);   // start of next interval
    lo = std::min(lo, std::min(r_before, r_after));
    hi = std::max(hi, std::max(r_before, r_after));
    left_endpoint_ratios.push_back(r_after);
  }
  lo = std::min(lo, ratio(std::min(L_check, 0.5 * (L_check + start)), false));
  lo = std::min(lo, ratio(L_check, false));
  hi = std::max(hi, ratio(L_check, false));

  if (tree.geometric_info() &&
      std::abs(tree.geometric_info()->d - d) < 1e-12) {
    // Exact tail behavior: on [t_n, t_{n+1}) the ratio runs between
    // b^{n-k}/(1+t_n)^alpha (-> b^{-k}) and b^{n-k}/(1+t_{n+1})^alpha
    // (-> b^{-k-1}).
    const double b = tree.geometric_info()->b;
    hi = std::max(hi, std::pow(b, -static_cast<double>(k)));
    lo = std::min(lo, std::pow(b, -static_cast<double>(k + 1)));
  } else if (left_endpoint_ratios.size() >= 4) {
    // Detect a ratio that keeps growing near L_check: wrong d supplied.
    const std::size_t m = left_endpoint_ratios.size();
    const double r1 = left_endpoint_ratios[m - 3];
    const double r2 = left_endpoint_ratios[m - 2];
    const double r3 = left_endpoint_ratios[m - 1];
    if (r3 > r2 && r2 > r1 && r3 > 1.1 * r2 && r2 > 1.1 * r1)
      throw Error("unbounded-ratio",
                  "g_k(t)/(1+t)^{d-1} grows by more than 10% per generation "
                  "near L_check; check the supplied dimension d=" +
                      std::to_string(d));
  }

  if (!(lo > 0.0) || !(hi >= lo))
    throw Error("unbounded-ratio", "degenerate envelope constants");
  return Envelope{lo, hi, alpha, start};
}

}  // namespace spectree
