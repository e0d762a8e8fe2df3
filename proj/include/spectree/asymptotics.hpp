#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spectree/decomposition.hpp"
#include "spectree/halfline.hpp"
#include "spectree/potentials.hpp"
#include "spectree/tree_model.hpp"

namespace spectree::asymp {

struct SweepRecord {
  double lambda = 0.0;
  double E1 = 0.0;             // lowest eigenvalue (0 when empty)
  bool has_eigenvalue = false;
  double E_minus = 0.0;        // sandwich lower eigenvalue (d in [1,2))
  double E_plus = 0.0;
  long long N_minus = 0;
  double bound_cor1 = 0.0;
  int certified_channels = 0;  // channel cutoff K
  double bracket_width = 0.0;
  bool reliable = false;       // truncation bracket < 1e-3 |E|
  double C1 = 0.0;             // |E_plus| / |lambda int V g_0|^{2/(2-d)}
  double C2 = 0.0;             // |E_minus| / same
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 0.0;
  int n_used = 0;
};

struct SweepReport {
  std::vector<SweepRecord> records;  // ascending lambda
  FitResult fit;
  double expected_slope = 0.0;
  std::string regime;
  bool pass = false;
  std::string verdict;
  double mass_g0 = 0.0;  // int V g_0 dt
};

std::vector<double> log_grid(double lo, double hi, int points_per_decade);

struct SandwichResult {
  double E_minus = 0.0;
  double E = 0.0;
  double E_plus = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
};

// E^{\pm} as the lowest eigenvalues of the comparison operators with exact
// power weights and the envelope-modified potentials; verifies
// E^- <= E <= E^+ and reports the empirical constants of the two-sided
// power-law bound. Throws Error("sandwich-violation") on failure.
SandwichResult sandwich_check(const RegularTree& tree,
                              const RadialPotential& V, double d,
                              double lambda, const Numerics& num,
                              const Envelope& env0, double E_actual,
                              double mass_g0);

// Weak-coupling sweep for d in [1,2): per-lambda eigenvalues through the
// decomposition, sandwich verification, and the log-log slope fit against
// 2/(2-d) with a 5% verdict.
SweepReport weak_sweep_fit(const RegularTree& tree, const RadialPotential& V,
                           double d, const std::vector<double>& lambdas,
                           const Numerics& num, int threads = 1);

// d = 2 regime: linear fit of ln |E_1| against 1/lambda; pass when the slope
// is negative with R^2 >= 0.99.
SweepReport d2_fit(const RegularTree& tree, const RadialPotential& V,
                   const std::vector<double>& lambdas, const Numerics& num,
                   int threads = 1);

struct SupercriticalReport {
  double lambda_star = 0.0;      // largest grid lambda with empty spectrum
  bool empty_below = false;      // all grid lambdas <= lambda_star empty
  std::optional<double> first_nonempty;  // some grid lambda > lambda_star
  bool pass = false;
  std::string verdict;
  std::vector<std::pair<double, long long>> counts;  // (lambda, N_-)
};

// d > 2: certifies a positive lambda window with empty negative spectrum
// (channel 0). Requires int |V|^{d/2} g_0 < infinity.
SupercriticalReport supercritical_check(const RegularTree& tree,
                                        const RadialPotential& V, double d,
                                        const std::vector<double>& lambdas,
                                        const Numerics& num);

struct WeylReport {
  double lambda = 0.0;
  long long count = 0;
  double classical = 0.0;  // lambda^{1/2} (1/pi) int |V|^{1/2} g_0 dt
  double ratio = 0.0;
  double L = 0.0;
  double h = 0.0;
};

// Strong-coupling count on the direct truncated tree against the classical
// gamma = 0 Weyl term.
WeylReport weyl_check(const RegularTree& tree, const RadialPotential& V,
                      double lambda, const Numerics& num);

}  // namespace spectree::asymp
