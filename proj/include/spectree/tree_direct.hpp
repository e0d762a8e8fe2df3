#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <vector>

#include "spectree/halfline.hpp"
#include "spectree/potentials.hpp"
#include "spectree/tree_model.hpp"

namespace spectree::direct {

// Explicitly assembled Schrodinger operator on the truncated tree: edge-wise
// P1 elements with shared vertex unknowns (continuity), flux balance arising
// from the assembly, Neumann at the root, Dirichlet (or Neumann, for
// bracketing) at the cut radius L.
struct TreeGraphMatrix {
  Eigen::SparseMatrix<double> stiffness_potential;  // symmetric
  Eigen::VectorXd mass;                             // lumped, positive

  struct EdgeInfo {
    int generation = 0;            // edge spans [t_gen, t_{gen+1} ^ L]
    std::vector<int> node_ids;     // global ids along the edge, root-to-leaf
    std::vector<double> positions; // radial positions of those nodes
  };
  std::vector<EdgeInfo> edges;

  struct VertexInfo {
    int node_id = 0;
    int generation = 0;  // 0 is the root
    int parent_edge = -1;
    std::vector<int> child_edges;
  };
  std::vector<VertexInfo> vertices;

  double potential_floor = 0.0;  // min(0, lambda V) over cell midpoints

  std::size_t dimension() const {
    return static_cast<std::size_t>(mass.size());
  }
};

// Radial node positions shared by this assembly and the matched channel
// grids: breakpoints of the tree and the potential, subdivided to step <= h.
std::vector<double> radial_master_grid(const RegularTree& tree,
                                       const RadialPotential& V, double L,
                                       double h);

TreeGraphMatrix build_graph_matrix(const RegularTree& tree,
                                   const RadialPotential& V, double lambda,
                                   double L, double h,
                                   RightBC cut_bc = RightBC::Dirichlet,
                                   std::size_t node_cap = 200000);

// m lowest eigenvalues of the generalized problem A x = E M x: dense solve
// for dimension <= 3000, otherwise shift-invert Lanczos on a sparse
// factorization. Negatives are kept; throws Error("unconverged") when a
// Ritz pair fails the residual test.
EigResult direct_negative_spectrum(const TreeGraphMatrix& M, int m);

// Eigenvalue count below s via the inertia of the LDL^T factorization.
long long direct_count_below(const TreeGraphMatrix& M, double s);

// Lowest eigenpair by the dense path (diagnostics / oracle use).
std::pair<double, Eigen::VectorXd> lowest_eigenpair(const TreeGraphMatrix& M);

// Max-norm flux imbalance of the Kirchhoff condition at the internal
// vertices for a discrete eigenvector, relative to the largest edge
// derivative; O(h) for converged eigenpairs.
double kirchhoff_residual(const TreeGraphMatrix& M, const Eigen::VectorXd& v);

// Coordinate text dump (1-based "i j value" lines) for external inspection.
void dump_coordinate_text(const TreeGraphMatrix& M, std::ostream& os);

}  // namespace spectree::direct
