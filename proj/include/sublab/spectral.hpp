#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sublab/frames.hpp"

namespace sublab {

/// Cell-centered tensor grid with Dirichlet boundary. Nodes sit at
/// lo + (i + 1/2) h per axis, so no node hits the gauge origin.
struct GridSpec {
  Domain box;
  std::array<int, 3> n{8, 8, 8};
  Eigen::Vector3d h = Eigen::Vector3d::Zero();

  int size() const { return n[0] * n[1] * n[2]; }
  int index(int ix, int iy, int iz) const {
    return ix + n[0] * (iy + n[1] * iz);
  }
  Eigen::Vector3d node(int ix, int iy, int iz) const {
    return Eigen::Vector3d(box.lo[0] + (ix + 0.5) * h[0],
                           box.lo[1] + (iy + 0.5) * h[1],
                           box.lo[2] + (iz + 0.5) * h[2]);
  }
};

/// Box with Dirichlet walls where e^{-N^p} drops below 1e-12 of its peak.
Domain default_grid_box(const FrameSpec& frame, double p);

GridSpec make_grid(const FrameSpec& frame, double p, int n1, int n2, int n3);
GridSpec make_grid(const Domain& box, int n1, int n2, int n3);

/// Row-compressed symmetric-capable sparse matrix.
struct SparseOperator {
  int dim = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;
  bool symmetric = false;

  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd diagonal() const;
  double max_asymmetry() const;

  static SparseOperator from_triplets(
      int dim, std::vector<std::array<double, 3>>& triplets, bool symmetric);
};

/// Centered-difference realization of the generating fields X_i on the grid
/// (H¹ only). Dirichlet: stencil legs leaving the grid are dropped.
std::vector<SparseOperator> discretize_fields(const FrameSpec& frame,
                                              const GridSpec& grid);

struct AssembledOperators {
  SparseOperator H;  ///< Schrödinger: sum D_i^T D_i + diag(V)
  SparseOperator A;  ///< Dirichlet form: sum D_i^T W D_i
  SparseOperator M;  ///< mass: diag(e^{-N^p} cell volume)
};

/// One-sided difference factors D_i (so D^T D is the classical second-order
/// stencil), weight W sampled at nodes, V from the Schrödinger potential.
AssembledOperators assemble_operators(const FrameSpec& frame, double p,
                                      const GridSpec& grid);

struct EigenResult {
  std::vector<double> eigenvalues;   ///< ascending, length k
  std::vector<double> residuals;    ///< ||Mv - lambda v|| / ||v||
  int iterations = 0;
  std::array<int, 3> grid_n{0, 0, 0};
  bool converged = true;
};

/// k smallest eigenvalues by blocked preconditioned (Jacobi) Krylov
/// iteration with full basis reorthogonalization; generalized pencils with
/// diagonal mass are handled by symmetric diagonal scaling.
EigenResult lowest_eigenvalues(const SparseOperator& op, int k,
                               const SparseOperator* mass = nullptr,
                               double tol = 5e-9, int max_iters = 0);

struct ModeGap {
  double lambda_schrodinger = 0.0;
  double lambda_dirichlet = 0.0;
  double rel_gap = 0.0;
};

struct EquivalenceReport {
  std::array<int, 3> coarse_n{0, 0, 0};
  std::array<int, 3> fine_n{0, 0, 0};
  std::vector<ModeGap> coarse;
  std::vector<ModeGap> fine;
  bool gaps_shrink = false;  ///< every fine-grid gap <= coarse-grid gap
};

/// Spectra of H and of the pencil (A, M) on one grid.
std::pair<EigenResult, EigenResult> spectrum_pair(const FrameSpec& frame,
                                                  double p,
                                                  const GridSpec& grid, int k);

std::vector<ModeGap> mode_gaps(const EigenResult& schrodinger,
                               const EigenResult& dirichlet);

EquivalenceReport equivalence_report(const FrameSpec& frame, double p,
                                     const GridSpec& grid, int k,
                                     double refine_factor = 2.0);

/// #{lambda_i <= threshold}, inclusive.
int counting_function(const EigenResult& result, double threshold);

}  // namespace sublab
