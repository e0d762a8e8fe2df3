#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "spectree/potentials.hpp"
#include "spectree/tree_model.hpp"

namespace spectree::bs {

// Quadrature grid for the Birman-Schwinger kernels: composite Gauss-Legendre
// panels aligned with the potential's pieces on [0, T_bs], T_bs chosen so the
// omitted tail of int (1+t)^{1+2nu} |W| stays below 1e-12.
struct BSGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double T_bs = 0.0;
};
BSGrid bs_quadrature(const RadialPotential& W, double nu,
                     int nodes_per_panel = 24, int min_panels = 6);

// Discretized kernels at spectral parameter kappa. The shorthand
// f^{1/2} = sign(f) |f|^{1/2} applies to the right-hand factors throughout.
struct BSKernelSet {
  BSGrid grid;
  double kappa = 0.0;
  double nu = 0.0;
  Eigen::MatrixXd K;   // |W|^{1/2} G_robin W^{1/2}
  Eigen::MatrixXd L;   // rank one: C(nu) kappa^{-2nu} phi psi^T
  Eigen::MatrixXd M;   // K - L
  Eigen::MatrixXd M0;  // closed-form kappa -> 0 limit of M
  Eigen::VectorXd phi;  // |W|^{1/2} (1+t)^{-nu+1/2}
  Eigen::VectorXd psi;  // W^{1/2}  (1+t)^{-nu+1/2}
};

// Builds K from green_robin, L from its explicit rank-one formula, M = K-L
// and M(0) from the closed form. With `check` set, doubling the quadrature
// density must move ||K||_F by less than 1e-6 or "quadrature-underresolved"
// is thrown.
BSKernelSet build_bs_kernels(const RadialPotential& W, double kappa, double d,
                             const BSGrid& grid, bool check = true);

struct WeakEigenvalue {
  double kappa = 0.0;
  double E = 0.0;
  double E_first_order = 0.0;  // from E^nu = C(nu) lambda int W (1+t)^{d-1}
  double attractive_mass = 0.0;
  bool trace_monotone = true;
};

// Solves the secular equation tr(lambda (I + lambda M(kappa))^{-1} L(kappa))
// = -1 by bracketed bisection in log kappa. Throws "no-root" when the
// attractive-mass precondition fails and "norm-condition-violated" when
// lambda ||M|| >= 1 on the bracket.
WeakEigenvalue solve_weak_eigenvalue(const RadialPotential& W, double lambda,
                                     double d);

struct CriticalPrediction {
  double W0 = 0.0;      // the second-order double integral
  double E_pred = 0.0;  // from E^nu = C(nu)(-lambda^2 C_M W0)
  std::optional<double> E_root;  // root-found eigenvalue, when bracketable
};

// Critical case int W (1+t)^{d-1} = 0: prediction from the second-order
// coefficient. Throws "inconclusive" when W0 >= 0 and "not-critical" when
// the first moment is not actually zero.
CriticalPrediction critical_case_eigenvalue(const RadialPotential& W,
                                            double lambda, double d);

// lambda K(d) int t |V(t)| dt: the trace bound on N_- of the Dirichlet
// pure-power operator.
double bargmann_bound(const PotentialView& V, double d, double lambda);

// 1 + lambda (K(d)/a) int |V| g_0 t^{2-d} dt with the largest certified a
// such that a t^{d-1} <= g_0 on (0, L_check]; `a_used` reports it.
double cor1_bound(const RadialPotential& V, const RegularTree& tree, double d,
                  double lambda, double* a_used = nullptr);

// lambda_c = 1 / (K(d) int s |V_k^-(s + t_k)| ds): channel k is certified
// empty for lambda < lambda_c. Returns +inf when the integrand vanishes.
double channel_threshold(const RegularTree& tree, const RadialPotential& V,
                         double d, int k);

struct HSConvergence {
  std::vector<double> distances;  // ||M(kappa) - M(0)||_HS per kappa
  double m0_norm = 0.0;           // ||M(0)||_HS
};
HSConvergence hs_convergence(const RadialPotential& W, double d,
                             std::span<const double> kappas,
                             int nodes_per_panel = 24);

// Number of eigenvalues of the discretized K(kappa) at or below -1/lambda;
// the Birman-Schwinger count N_-(B_0 + lambda W; -kappa^2) for W <= 0.
long long bs_count(const BSKernelSet& S, double lambda);

}  // namespace spectree::bs
