#pragma once

#include <optional>
#include <vector>

namespace spectree {

// Regular rooted metric tree: generation-k vertices all sit at distance t_k
// from the root and share the branching number b_k. Branching functions are
// stored as breakpoints plus cumulative products and evaluated by binary
// search; beyond the last listed generation the tree continues without
// branching (b = 1), which also models finite star-like trees.
class RegularTree {
public:
  RegularTree() = default;
  RegularTree(std::vector<double> vertex_distances,
              std::vector<int> branching_numbers,
              std::optional<double> declared_dimension = std::nullopt);

  // b_k = b, t_k = beta^k with beta = b^{1/(d-1)}, so g_0(t_k) = t_k^{d-1}.
  static RegularTree geometric(double d, int b, int generations = 48);
  // Branching stops after the listed generations.
  static RegularTree terminal(std::vector<int> branching,
                              std::vector<double> distances);
  static RegularTree half_line();

  const std::vector<double>& vertex_distances() const { return t_; }
  const std::vector<int>& branching_numbers() const { return b_; }
  std::optional<double> declared_dimension() const { return declared_d_; }
  int generations() const { return static_cast<int>(t_.size()); }

  struct GeometricInfo {
    double d;
    int b;
    double beta;
  };
  const std::optional<GeometricInfo>& geometric_info() const { return geom_; }

  // Branching function g_k(t): 0 for t < t_k (k >= 1), then the product
  // b_{k+1} ... b_n on [t_n, t_{n+1}); right-continuous at breakpoints.
  double gk(int k, double t) const;
  double g0(double t) const { return gk(0, t); }
  // Left limit g_k(t-0); differs from gk only at breakpoints.
  double gk_left(int k, double t) const;

  // b_1 ... b_{k-1} (b_k - 1); 0 when b_k = 1 (channel absent).
  long long multiplicity(int k) const;
  // b_1 ... b_k as an exact integer (throws on overflow).
  long long cumulative_branches(int k) const;

  // Largest n with t_n <= t (0 when t < t_1).
  int generation_of(double t) const;
  // Breakpoints t_k in (lo, hi), ascending.
  std::vector<double> breakpoints_between(double lo, double hi) const;

private:
  std::vector<double> t_;
  std::vector<int> b_;
  std::vector<double> cumprod_;  // cumprod_[n] = b_1 ... b_n, cumprod_[0] = 1
  std::optional<double> declared_d_;
  std::optional<GeometricInfo> geom_;
  void finish_init();
};

// Least-squares slope of log g_0 vs log t over log-spaced samples, plus one.
// Throws "degenerate-range" when fewer than 4 generations lie in range.
double dimension_estimate(const RegularTree& tree, double t_min, double t_max);

// Power-law envelope a^- (1+t)^{d-1} <= g_k(t) <= a^+ (1+t)^{d-1}.
struct Envelope {
  double lower = 0.0;     // a^-_k
  double upper = 0.0;     // a^+_k
  double exponent = 0.0;  // alpha = d - 1
  double valid_from = 0.0;
};

// Extremes of g_k(t) / (1+t)^{d-1} over [t_k, L_check], extended by the exact
// tail ratios b^{-k}, b^{-k-1} for geometric trees so the envelope holds for
// all t >= t_k. Throws "unbounded-ratio" when the ratio keeps growing by more
// than 10% per generation near L_check (wrong d supplied).
Envelope envelope_constants(const RegularTree& tree, int k, double d,
                            double L_check);

}  // namespace spectree
