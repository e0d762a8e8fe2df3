#include "spectree/tree_direct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/SparseCholesky>

#include "spectree/common.hpp"

namespace spectree::direct {

std::vector<double> radial_master_grid(const RegularTree& tree,
                                       const RadialPotential& V, double L,
                                       double h) {
  std::vector<double> edges{0.0};
  for (double t : tree.vertex_distances()) {
    if (t >= L) break;
    edges.push_back(t);
  }
  for (double t : V.breakpoints())
    if (t > 0.0 && t < L) edges.push_back(t);
  edges.push_back(L);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) {
                            return std::abs(a - b) <=
                                   1e-12 * std::max(1.0, std::abs(b));
                          }),
              edges.end());
  std::vector<double> nodes{0.0};
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double a = edges[s], b = edges[s + 1];
    const int cells = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    for (int i = 1; i <= cells; ++i)
      nodes.push_back(i == cells ? b : a + (b - a) * i / cells);
  }
  return nodes;
}

TreeGraphMatrix build_graph_matrix(const RegularTree& tree,
                                   const RadialPotential& V, double lambda,
                                   double L, double h, RightBC cut_bc,
                                   std::size_t node_cap) {
  const std::vector<double> radial = radial_master_grid(tree, V, L, h);

  // Segment the radial grid at the tree vertices below L.
  std::vector<std::size_t> seg_start{0};  // indices into `radial`
  std::vector<int> seg_branch;            // b at the segment's inner vertex
  for (int k = 1; k <= tree.generations(); ++k) {
    const double tk = tree.vertex_distances()[k - 1];
    if (tk >= L) break;
    auto it = std::lower_bound(radial.begin(), radial.end(),
                               tk - 1e-12 * std::max(1.0, tk));
    seg_start.push_back(static_cast<std::size_t>(it - radial.begin()));
    seg_branch.push_back(tree.branching_numbers()[k - 1]);
  }
  seg_start.push_back(radial.size() - 1);

  struct Cell {
    int a, b;
    double h, mid;
  };
  std::vector<Cell> cells;  // global
  TreeGraphMatrix M;

  int next_id = 0;
  auto new_node = [&]() { return next_id++; };

  const int root = new_node();
  M.vertices.push_back({root, 0, -1, {}});

  // Front of open vertex node ids entering the current segment.
  std::vector<std::pair<int, int>> front{{root, 0}};  // (node id, vertex idx)

  for (std::size_t seg = 0; seg + 1 < seg_start.size(); ++seg) {
    const std::size_t i0 = seg_start[seg], i1 = seg_start[seg + 1];
    const bool last = seg + 2 == seg_start.size();
    const int copies = seg == 0 ? 1 : seg_branch[seg - 1];
    std::vector<std::pair<int, int>> next_front;
    for (auto [vnode, vidx] : front) {
      for (int c = 0; c < copies; ++c) {
        TreeGraphMatrix::EdgeInfo e;
        e.generation = static_cast<int>(seg);
        e.node_ids.push_back(vnode);
        e.positions.push_back(radial[i0]);
        int prev = vnode;
        for (std::size_t i = i0 + 1; i <= i1; ++i) {
          const int id = new_node();
          if (static_cast<std::size_t>(id) > node_cap)
            throw Error("size-cap-exceeded",
                        "tree discretization exceeds " +
                            std::to_string(node_cap) + " nodes");
          cells.push_back({prev, id, radial[i] - radial[i - 1],
                           0.5 * (radial[i] + radial[i - 1])});
          e.node_ids.push_back(id);
          e.positions.push_back(radial[i]);
          prev = id;
        }
        const int edge_idx = static_cast<int>(M.edges.size());
        M.vertices[vidx].child_edges.push_back(edge_idx);
        if (!last) {
          const int new_vidx = static_cast<int>(M.vertices.size());
          M.vertices.push_back(
              {prev, static_cast<int>(seg) + 1, edge_idx, {}});
          next_front.push_back({prev, new_vidx});
        }
        M.edges.push_back(std::move(e));
      }
    }
    front = std::move(next_front);
  }

  const int n_all = next_id;

  // Leaf nodes at radius L: the far endpoint of every last-segment edge.
  std::vector<char> eliminate(n_all, 0);
  if (cut_bc == RightBC::Dirichlet) {
    for (const auto& e : M.edges)
      if (std::abs(e.positions.back() - L) <= 1e-12 * std::max(1.0, L))
        eliminate[e.node_ids.back()] = 1;
  }

  std::vector<int> remap(n_all, -1);
  int n = 0;
  for (int i = 0; i < n_all; ++i)
    if (!eliminate[i]) remap[i] = n++;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(cells.size() * 4);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
  for (const auto& c : cells) {
    const double stiff = 1.0 / c.h;
    const double cell_mass = 0.5 * c.h;
    const double vmid = lambda * V(c.mid);
    M.potential_floor = std::min(M.potential_floor, vmid);
    const double cell_pot = vmid * cell_mass;
    const int ra = remap[c.a], rb = remap[c.b];
    if (ra >= 0) {
      trips.emplace_back(ra, ra, stiff + cell_pot);
      mass[ra] += cell_mass;
    }
    if (rb >= 0) {
      trips.emplace_back(rb, rb, stiff + cell_pot);
      mass[rb] += cell_mass;
    }
    if (ra >= 0 && rb >= 0) {
      trips.emplace_back(ra, rb, -stiff);
      trips.emplace_back(rb, ra, -stiff);
    }
  }
  M.stiffness_potential.resize(n, n);
  M.stiffness_potential.setFromTriplets(trips.begin(), trips.end());
  M.mass = std::move(mass);

  // Remap stored ids so diagnostics refer to matrix rows (-1 = eliminated).
  for (auto& e : M.edges)
    for (auto& id : e.node_ids) id = remap[id];
  for (auto& v : M.vertices) v.node_id = remap[v.node_id];
  return M;
}

long long direct_count_below(const TreeGraphMatrix& M, double s) {
  Eigen::SparseMatrix<double> A = M.stiffness_potential;
  for (int i = 0; i < A.rows(); ++i) A.coeffRef(i, i) -= s * M.mass[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw Error("unconverged", "LDLT factorization failed for inertia count");
  long long count = 0;
  const auto& D = ldlt.vectorD();
  for (int i = 0; i < D.size(); ++i) {
    if (!std::isfinite(D[i]))
      throw Error("unconverged", "LDLT produced a non-finite pivot");
    if (D[i] < 0.0) ++count;
  }
  return count;
}

namespace {

EigResult dense_lowest(const TreeGraphMatrix& M, int m) {
  const int n = static_cast<int>(M.dimension());
  Eigen::MatrixXd C = Eigen::MatrixXd(M.stiffness_potential);
  Eigen::VectorXd inv_sqrt_m = M.mass.cwiseSqrt().cwiseInverse();
  C = inv_sqrt_m.asDiagonal() * C * inv_sqrt_m.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("unconverged", "dense eigensolver failed");
  EigResult out;
  out.count = 0;
  for (int i = 0; i < n; ++i)
    if (es.eigenvalues()[i] < 0.0) ++out.count;
  for (int i = 0; i < std::min(n, m); ++i) {
    const double ev = es.eigenvalues()[i];
    out.diagnostics.push_back(ev);
    if (ev < 0.0) {
      out.eigenvalues.push_back(ev);
      out.bracket_lo.push_back(ev);
      out.bracket_hi.push_back(ev);
    }
  }
  return out;
}

EigResult lanczos_lowest(const TreeGraphMatrix& M, int m) {
  // Shift-invert Lanczos in the mass inner product:
  //   op(x) = (A - sigma M)^{-1} M x,  E = sigma + 1/theta.
  const int n = static_cast<int>(M.dimension());
  const long long inertia = direct_count_below(M, 0.0);
  const long long want = std::min<long long>(m, inertia);

  // Every Rayleigh quotient is bounded below by the potential floor.
  const double sigma = 1.25 * M.potential_floor - 1.0;

  Eigen::SparseMatrix<double> A = M.stiffness_potential;
  for (int i = 0; i < n; ++i) A.coeffRef(i, i) -= sigma * M.mass[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw Error("unconverged", "shift-invert factorization failed");

  const int max_dim = std::min(n, 240);
  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha, beta;
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = uni(rng);
  v /= std::sqrt(v.dot(M.mass.asDiagonal() * v));

  EigResult out;
  out.count = inertia;
  for (int j = 0; j < max_dim; ++j) {
    basis.push_back(v);
    Eigen::VectorXd w = ldlt.solve(M.mass.asDiagonal() * v);
    const double a = w.dot(M.mass.asDiagonal() * v);
    alpha.push_back(a);
    w -= a * v;
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    // Full reorthogonalization in the M inner product.
    for (const auto& b : basis)
      w -= (w.dot(M.mass.asDiagonal() * b)) * b;
    const double bnorm = std::sqrt(w.dot(M.mass.asDiagonal() * w));
    if (j + 1 >= 8 && (j + 1) % 8 == 0) {
      // Check Ritz convergence on the current subspace.
      const int dim = j + 1;
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
      for (int i = 0; i < dim; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < dim) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      std::vector<std::pair<double, int>> ritz;  // (E, column)
      for (int i = 0; i < dim; ++i) {
        const double theta = es.eigenvalues()[i];
        if (theta <= 0.0) continue;
        ritz.push_back({sigma + 1.0 / theta, i});
      }
      std::sort(ritz.begin(), ritz.end());
      bool done = static_cast<long long>(ritz.size()) >= want;
      std::vector<double> found;
      for (long long r = 0; r < want && done; ++r) {
        const auto [E, col] = ritz[r];
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < dim; ++i) y += es.eigenvectors()(i, col) * basis[i];
        const Eigen::VectorXd res =
            M.stiffness_potential * y - E * (M.mass.asDiagonal() * y);
        if (res.norm() > 1e-8 * y.norm() * std::max(1.0, std::abs(E)))
          done = false;
        else
          found.push_back(E);
      }
      if (done) {
        for (double e : found)
          if (e < 0.0) {
            out.eigenvalues.push_back(e);
            out.bracket_lo.push_back(e);
            out.bracket_hi.push_back(e);
          }
        out.diagnostics = found;
        return out;
      }
    }
    if (bnorm < 1e-14) break;  // invariant subspace exhausted
    beta.push_back(bnorm);
    v = w / bnorm;
  }
  throw Error("unconverged",
              "shift-invert Lanczos did not converge for the requested "
              "eigenvalues");
}

}  // namespace

EigResult direct_negative_spectrum(const TreeGraphMatrix& M, int m) {
  if (M.dimension() <= 3000) return dense_lowest(M, m);
  return lanczos_lowest(M, m);
}

std::pair<double, Eigen::VectorXd> lowest_eigenpair(const TreeGraphMatrix& M) {
  Eigen::MatrixXd C = Eigen::MatrixXd(M.stiffness_potential);
  Eigen::VectorXd inv_sqrt_m = M.mass.cwiseSqrt().cwiseInverse();
  C = inv_sqrt_m.asDiagonal() * C * inv_sqrt_m.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success)
    throw Error("unconverged", "dense eigensolver failed");
  Eigen::VectorXd y = inv_sqrt_m.asDiagonal() * es.eigenvectors().col(0);
  return {es.eigenvalues()[0], y};
}

double kirchhoff_residual(const TreeGraphMatrix& M, const Eigen::VectorXd& v) {
  double worst = 0.0;
  double deriv_scale = 1e-300;
  for (const auto& e : M.edges) {
    for (std::size_t i = 0; i + 1 < e.node_ids.size(); ++i) {
      const int a = e.node_ids[i], b = e.node_ids[i + 1];
      const double ua = a >= 0 ? v[a] : 0.0;
      const double ub = b >= 0 ? v[b] : 0.0;
      deriv_scale = std::max(deriv_scale,
                             std::abs(ub - ua) / (e.positions[i + 1] -
                                                  e.positions[i]));
    }
  }
  for (const auto& vert : M.vertices) {
    if (vert.generation == 0) continue;  // root handled by the Neumann row
    const int vn = vert.node_id;
    if (vn < 0) continue;
    double flux = 0.0;
    // Incoming derivative from the parent edge.
    const auto& pe = M.edges[vert.parent_edge];
    {
      const std::size_t last = pe.node_ids.size() - 1;
      const int prev = pe.node_ids[last - 1];
      const double h = pe.positions[last] - pe.positions[last - 1];
      flux -= (v[vn] - (prev >= 0 ? v[prev] : 0.0)) / h;
    }
    for (int ce : vert.child_edges) {
      const auto& e = M.edges[ce];
      const int nxt = e.node_ids[1];
      const double h = e.positions[1] - e.positions[0];
      flux += ((nxt >= 0 ? v[nxt] : 0.0) - v[vn]) / h;
    }
    worst = std::max(worst, std::abs(flux));
  }
  return worst / deriv_scale;
}

void dump_coordinate_text(const TreeGraphMatrix& M, std::ostream& os) {
  const auto& A = M.stiffness_potential;
  os << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      os << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
  os << "mass\n";
  for (int i = 0; i < M.mass.size(); ++i) os << M.mass[i] << "\n";
}

}  // namespace spectree::direct
