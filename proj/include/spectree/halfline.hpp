#pragma once

#include <functional>
#include <span>
#include <vector>

#include "spectree/potentials.hpp"
#include "spectree/tree_model.hpp"

namespace spectree {

enum class LeftBC { WeightedNeumann, Dirichlet };
enum class RightBC { Dirichlet, Neumann };

// One weighted half-line operator from the decomposition: the form
//   Q[f] = int_{start}^{inf} (|f'|^2 + lambda V |f|^2) w(t) dt
// on H^1(w) (k = 0, natural boundary at the origin) or H^1_0 (k >= 1,
// Dirichlet at t_k).
struct Channel {
  int k = 0;
  double start = 0.0;
  std::function<double(double)> weight;  // g_k or (1+t)^alpha
  std::vector<double> weight_breakpoints;
  LeftBC left_bc = LeftBC::WeightedNeumann;
  double coupling = 0.0;  // lambda
  std::function<double(double)> potential;
  std::vector<double> potential_breakpoints;
  long long multiplicity = 1;
  double potential_extent = 0.0;  // where lambda*V has died out

  static Channel from_tree(const RegularTree& tree, const RadialPotential& V,
                           double lambda, int k);
  // Weight (1+t)^alpha with an arbitrary potential evaluator; used for the
  // sandwich operators B^{\pm} and the transformed Birman-Schwinger checks.
  static Channel power_weight(double alpha, const PotentialView& V,
                              double lambda, double start = 0.0,
                              LeftBC bc = LeftBC::WeightedNeumann);
};

struct Grid {
  double start = 0.0;
  std::vector<double> nodes;  // ascending; nodes.front() == start
  RightBC right_bc = RightBC::Dirichlet;

  double L() const { return nodes.back(); }
  std::size_t cells() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  Grid refined() const;  // every cell split in two
  Grid with_right_bc(RightBC bc) const;
};

// Graded grid on [start, L]: uniform step h0 through the near field, then
// cells growing geometrically by `grading` up to h_max. All breakpoints are
// grid nodes, so no cell straddles a weight or potential jump.
Grid make_grid(double start, double L, double h0, double near_field_end,
               double h_max, double grading,
               std::span<const double> breakpoints,
               RightBC right_bc = RightBC::Dirichlet);

// Symmetric tridiagonal pencil (A, M): A = stiffness + coupling*potential,
// M = lumped weighted mass (diagonal, positive).
struct TridiagonalPencil {
  std::vector<double> diag;  // A diagonal
  std::vector<double> off;   // A off-diagonal (size n-1)
  std::vector<double> mass;  // M diagonal
  std::size_t size() const { return diag.size(); }
};

// Three-point finite element assembly: stiffness from the weight at cell
// midpoints, mass and potential lumped per cell. Throws "bad-grid" if a
// breakpoint falls strictly inside a cell.
TridiagonalPencil discretize_form(const Channel& ch, const Grid& grid);

struct EigResult {
  std::vector<double> eigenvalues;    // negatives only, ascending
  long long count = 0;                // N_-(.; 0)
  std::vector<double> diagnostics;    // lowest eigenvalues incl. nonnegative
  std::vector<double> bracket_lo;     // Neumann-at-L value per eigenvalue
  std::vector<double> bracket_hi;     // Dirichlet-at-L value per eigenvalue
};

// Number of pencil eigenvalues < s by the Sturm sequence count.
long long sturm_count(const TridiagonalPencil& p, double s);

// m algebraically smallest eigenvalues by bisection with Sturm counts, each
// to relative tolerance 1e-10; only negatives are kept in `eigenvalues`.
EigResult lowest_eigenvalues(const TridiagonalPencil& p, int m);

// Eigenvalue count below s with an h vs h/2 stability check; throws
// Error("unconverged") when the two grids disagree.
long long count_negative(const Channel& ch, const Grid& grid, double s = 0.0);

// Numerical policy shared by the channel drivers.
struct Numerics {
  double h = 0.01;          // base step through the near field
  double L = 0.0;           // 0 = auto truncation
  bool auto_truncate = true;
  bool richardson = false;
  double grading = 1.06;
  double kappa_cells = 25.0;   // h_max = 1 / (kappa_cells * kappa_est)
  double L_kappa = 45.0;       // L = start + L_kappa / kappa_est
  double bracket_rel = 1e-4;   // Dirichlet/Neumann agreement target
  int max_doublings = 24;
  std::size_t max_nodes = 600000;
  int max_eigenvalues = 64;
};

struct ChannelSolve {
  EigResult result;        // Dirichlet-at-L values, brackets attached
  Grid grid;
  double L = 0.0;
  double kappa_est = 0.0;
  bool bracket_converged = true;
  std::vector<double> richardson;  // extrapolated eigenvalues when enabled
};

// End-to-end solve of one channel: estimate kappa on a coarse grid, extend
// the domain until the Dirichlet/Neumann bracket is tight, optionally
// Richardson-extrapolate.
ChannelSolve solve_channel(const Channel& ch, const Numerics& num);

}  // namespace spectree
