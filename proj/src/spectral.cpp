#include "sublab/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace sublab {

Domain default_grid_box(const FrameSpec& frame, double p) {
  const double R = std::pow(12.0 * std::log(10.0), 1.0 / p);
  const int hd = frame.horizontal_dim();
  const int cd = frame.center_dim();
  Eigen::VectorXd half(frame.dim);
  half.head(hd).setConstant(R);
  half.tail(cd).setConstant(std::pow(R, frame.gauge_power() / 2.0) /
                            std::sqrt(frame.center_coeff));
  return Domain::centered_box(half);
}

namespace {

void require_h1(const FrameSpec& frame) {
  if (frame.kind != FrameKind::Metivier || frame.n != 1 || frame.m != 1)
    fail(ErrorCode::KindMismatch,
         "grid discretization supports only the H1 frame (n = m = 1)");
}

}  // namespace

GridSpec make_grid(const Domain& box, int n1, int n2, int n3) {
  if (box.dim() != 3)
    fail(ErrorCode::BadDimension, "grids are three-dimensional");
  if (n1 < 8 || n2 < 8 || n3 < 8)
    fail(ErrorCode::BadDimension, "need at least 8 points per axis");
  GridSpec g;
  g.box = box;
  g.n = {n1, n2, n3};
  for (int a = 0; a < 3; ++a)
    g.h[a] = (box.hi[a] - box.lo[a]) / g.n[a];
  return g;
}

GridSpec make_grid(const FrameSpec& frame, double p, int n1, int n2, int n3) {
  require_h1(frame);
  return make_grid(default_grid_box(frame, p), n1, n2, n3);
}

void SparseOperator::multiply(const Eigen::VectorXd& x,
                              Eigen::VectorXd& y) const {
  y.resize(dim);
  for (int i = 0; i < dim; ++i) {
    double acc = 0.0;
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      acc += values[k] * x[col_idx[k]];
    y[i] = acc;
  }
}

Eigen::VectorXd SparseOperator::diagonal() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < dim; ++i)
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (col_idx[k] == i) d[i] += values[k];
  return d;
}

double SparseOperator::max_asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < dim; ++i)
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const int j = col_idx[k];
      double vt = 0.0;
      for (std::int64_t l = row_ptr[j]; l < row_ptr[j + 1]; ++l)
        if (col_idx[l] == i) {
          vt = values[l];
          break;
        }
      worst = std::max(worst, std::abs(values[k] - vt));
    }
  return worst;
}

SparseOperator SparseOperator::from_triplets(
    int dim, std::vector<std::array<double, 3>>& triplets, bool symmetric) {
  std::sort(triplets.begin(), triplets.end(),
            [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
              if (a[0] != b[0]) return a[0] < b[0];
              return a[1] < b[1];
            });
  SparseOperator op;
  op.dim = dim;
  op.symmetric = symmetric;
  op.row_ptr.assign(dim + 1, 0);
  op.col_idx.reserve(triplets.size());
  op.values.reserve(triplets.size());
  std::size_t i = 0;
  while (i < triplets.size()) {
    const int r = static_cast<int>(triplets[i][0]);
    const int c = static_cast<int>(triplets[i][1]);
    double v = triplets[i][2];
    std::size_t j = i + 1;
    while (j < triplets.size() &&
           static_cast<int>(triplets[j][0]) == r &&
           static_cast<int>(triplets[j][1]) == c) {
      v += triplets[j][2];
      ++j;
    }
    op.col_idx.push_back(c);
    op.values.push_back(v);
    ++op.row_ptr[r + 1];
    i = j;
  }
  for (int r = 0; r < dim; ++r) op.row_ptr[r + 1] += op.row_ptr[r];
  return op;
}

namespace {

/// z-coefficients of the two H1 fields at a node: X_1 = d_x + (x2/2) d_z,
/// X_2 = d_y - (x1/2) d_z.
inline void h1_coeffs(const Eigen::Vector3d& v, double& c1, double& c2) {
  c1 = 0.5 * v[1];
  c2 = -0.5 * v[0];
}

struct DifferenceRow {
  // Up to three entries: (col, val).
  int cols[3];
  double vals[3];
  int count = 0;
  void add(int c, double v) {
    cols[count] = c;
    vals[count] = v;
    ++count;
  }
};

/// Forward-difference factor rows for field i at every node; the Gram
/// D^T D is then the classical 3-point stencil per direction plus the
/// mixed terms.
std::vector<DifferenceRow> forward_factor(const GridSpec& grid, int field) {
  std::vector<DifferenceRow> rows(grid.size());
  const double hx = grid.h[field];  // field 0 differentiates x1, field 1 x2
  const double hz = grid.h[2];
  for (int iz = 0; iz < grid.n[2]; ++iz)
    for (int iy = 0; iy < grid.n[1]; ++iy)
      for (int ix = 0; ix < grid.n[0]; ++ix) {
        const int e = grid.index(ix, iy, iz);
        const Eigen::Vector3d v = grid.node(ix, iy, iz);
        double c1, c2;
        h1_coeffs(v, c1, c2);
        const double c = field == 0 ? c1 : c2;
        DifferenceRow& row = rows[e];
        double self = 0.0;
        const bool has_x = field == 0 ? ix + 1 < grid.n[0] : iy + 1 < grid.n[1];
        const int xn = field == 0 ? grid.index(ix + 1, iy, iz)
                                  : grid.index(ix, iy + 1, iz);
        self -= 1.0 / hx;
        if (has_x) row.add(xn, 1.0 / hx);
        self -= c / hz;
        if (iz + 1 < grid.n[2]) row.add(grid.index(ix, iy, iz + 1), c / hz);
        row.add(e, self);
      }
  return rows;
}

void add_gram(std::vector<std::array<double, 3>>& trips,
              const std::vector<DifferenceRow>& rows,
              const std::vector<double>* weight) {
  for (std::size_t e = 0; e < rows.size(); ++e) {
    const DifferenceRow& r = rows[e];
    const double w = weight ? (*weight)[e] : 1.0;
    for (int a = 0; a < r.count; ++a)
      for (int b = 0; b < r.count; ++b)
        trips.push_back({static_cast<double>(r.cols[a]),
                         static_cast<double>(r.cols[b]),
                         w * r.vals[a] * r.vals[b]});
  }
}

}  // namespace

std::vector<SparseOperator> discretize_fields(const FrameSpec& frame,
                                              const GridSpec& grid) {
  require_h1(frame);
  std::vector<SparseOperator> ops;
  for (int field = 0; field < 2; ++field) {
    std::vector<std::array<double, 3>> trips;
    trips.reserve(static_cast<std::size_t>(grid.size()) * 4);
    const double hx = grid.h[field];
    const double hz = grid.h[2];
    for (int iz = 0; iz < grid.n[2]; ++iz)
      for (int iy = 0; iy < grid.n[1]; ++iy)
        for (int ix = 0; ix < grid.n[0]; ++ix) {
          const int e = grid.index(ix, iy, iz);
          const Eigen::Vector3d v = grid.node(ix, iy, iz);
          double c1, c2;
          h1_coeffs(v, c1, c2);
          const double c = field == 0 ? c1 : c2;
          // Centered differences; Dirichlet drops out-of-grid legs.
          auto push = [&](int col, double val) {
            trips.push_back({static_cast<double>(e),
                             static_cast<double>(col), val});
          };
          if (field == 0) {
            if (ix + 1 < grid.n[0]) push(grid.index(ix + 1, iy, iz),
                                         0.5 / hx);
            if (ix > 0) push(grid.index(ix - 1, iy, iz), -0.5 / hx);
          } else {
            if (iy + 1 < grid.n[1]) push(grid.index(ix, iy + 1, iz),
                                         0.5 / hx);
            if (iy > 0) push(grid.index(ix, iy - 1, iz), -0.5 / hx);
          }
          if (iz + 1 < grid.n[2])
            push(grid.index(ix, iy, iz + 1), 0.5 * c / hz);
          if (iz > 0) push(grid.index(ix, iy, iz - 1), -0.5 * c / hz);
        }
    ops.push_back(SparseOperator::from_triplets(grid.size(), trips, false));
  }
  return ops;
}

AssembledOperators assemble_operators(const FrameSpec& frame, double p,
                                      const GridSpec& grid) {
  require_h1(frame);
  const int n = grid.size();
  const double cellvol = grid.h[0] * grid.h[1] * grid.h[2];

  std::vector<double> weight(n);
  std::vector<double> potential(n);
  for (int iz = 0; iz < grid.n[2]; ++iz)
    for (int iy = 0; iy < grid.n[1]; ++iy)
      for (int ix = 0; ix < grid.n[0]; ++ix) {
        const int e = grid.index(ix, iy, iz);
        const Eigen::Vector3d v = grid.node(ix, iy, iz);
        const double N = kaplan_norm(frame, v);
        if (N == 0.0)
          fail(ErrorCode::OriginSingularity,
               "grid node at the gauge origin; use a half-cell offset box");
        weight[e] = std::exp(-std::pow(N, p)) * cellvol;
        potential[e] = schrodinger_potential(frame, p, v);
      }

  const std::vector<DifferenceRow> d1 = forward_factor(grid, 0);
  const std::vector<DifferenceRow> d2 = forward_factor(grid, 1);

  AssembledOperators out;
  {
    std::vector<std::array<double, 3>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 20);
    add_gram(trips, d1, nullptr);
    add_gram(trips, d2, nullptr);
    for (int e = 0; e < n; ++e)
      trips.push_back({static_cast<double>(e), static_cast<double>(e),
                       potential[e]});
    out.H = SparseOperator::from_triplets(n, trips, true);
  }
  {
    std::vector<std::array<double, 3>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 20);
    add_gram(trips, d1, &weight);
    add_gram(trips, d2, &weight);
    out.A = SparseOperator::from_triplets(n, trips, true);
  }
  {
    std::vector<std::array<double, 3>> trips;
    trips.reserve(n);
    for (int e = 0; e < n; ++e)
      trips.push_back({static_cast<double>(e), static_cast<double>(e),
                       weight[e]});
    out.M = SparseOperator::from_triplets(n, trips, true);
  }
  return out;
}

namespace {

/// Blocked preconditioned iteration (LOBPCG-style): subspace [X, W, P] with
/// full reorthogonalization through an SVQB basis cleanup each step.
struct Lobpcg {
  const SparseOperator& op;
  Eigen::VectorXd precond;  // inverse diagonal

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd Y(X.rows(), X.cols());
    Eigen::VectorXd yi;
    for (int c = 0; c < X.cols(); ++c) {
      op.multiply(X.col(c), yi);
      Y.col(c) = yi;
    }
    return Y;
  }
};

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& S) {
  const Eigen::MatrixXd G = S.transpose() * S;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double cutoff = std::max(1e-12 * es.eigenvalues().maxCoeff(), 1e-300);
  int keep = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > cutoff) ++keep;
  Eigen::MatrixXd T(G.rows(), keep);
  int at = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > cutoff)
      T.col(at++) =
          es.eigenvectors().col(i) / std::sqrt(es.eigenvalues()[i]);
  return S * T;
}

}  // namespace

EigenResult lowest_eigenvalues(const SparseOperator& op, int k,
                               const SparseOperator* mass, double tol,
                               int max_iters) {
  if (!op.symmetric)
    fail(ErrorCode::RangeError, "eigensolver requires a symmetric operator");
  const int n = op.dim;
  if (k < 1 || k > n)
    fail(ErrorCode::RangeError, "need 1 <= k <= dim");

  // Generalized pencil with diagonal mass: symmetric diagonal scaling
  // T = M^{-1/2} A M^{-1/2}.
  SparseOperator scaled;
  const SparseOperator* work = &op;
  if (mass) {
    Eigen::VectorXd d = mass->diagonal();
    for (int i = 0; i < n; ++i)
      if (!(d[i] > 0.0))
        fail(ErrorCode::RangeError, "mass matrix must be positive diagonal");
    scaled = op;
    for (int i = 0; i < n; ++i)
      for (std::int64_t kk = scaled.row_ptr[i]; kk < scaled.row_ptr[i + 1];
           ++kk)
        scaled.values[kk] /=
            std::sqrt(d[i]) * std::sqrt(d[scaled.col_idx[kk]]);
    work = &scaled;
  }

  const int block = std::min(n, k + 4);
  if (max_iters <= 0)
    max_iters = std::max(200, 10 * static_cast<int>(std::sqrt(n)));

  Lobpcg ctx{*work, Eigen::VectorXd()};
  Eigen::VectorXd diag = work->diagonal();
  ctx.precond.resize(n);
  for (int i = 0; i < n; ++i)
    ctx.precond[i] = std::abs(diag[i]) > 1e-300 ? 1.0 / diag[i] : 1.0;

  std::mt19937_64 rng(0xe16e5eedULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd X(n, block);
  for (int c = 0; c < block; ++c)
    for (int i = 0; i < n; ++i) X(i, c) = unif(rng);
  X = orthonormalize(X);

  Eigen::MatrixXd P(n, 0);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(block);
  EigenResult res;
  res.converged = false;

  int it = 0;
  for (; it < max_iters; ++it) {
    Eigen::MatrixXd AX = ctx.apply(X);
    const Eigen::MatrixXd Xt_AX = X.transpose() * AX;
    // Rayleigh quotients along current block (X orthonormal).
    for (int c = 0; c < X.cols() && c < block; ++c) theta[c] = Xt_AX(c, c);

    Eigen::MatrixXd R = AX - X * Xt_AX;
    // Convergence on the k lowest pairs.
    bool done = true;
    for (int c = 0; c < k; ++c)
      if (R.col(c).norm() > tol) {
        done = false;
        break;
      }
    if (done) {
      res.converged = true;
      break;
    }

    Eigen::MatrixXd W = R;
    for (int c = 0; c < W.cols(); ++c)
      W.col(c) = ctx.precond.asDiagonal() * W.col(c);

    Eigen::MatrixXd S(n, X.cols() + W.cols() + P.cols());
    S << X, W, P;
    S = orthonormalize(S);
    const Eigen::MatrixXd AS = ctx.apply(S);
    const Eigen::MatrixXd G = S.transpose() * AS;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (G + G.transpose()));
    const int take = std::min<int>(block, es.eigenvalues().size());
    const Eigen::MatrixXd C = es.eigenvectors().leftCols(take);
    Eigen::MatrixXd Xnew = S * C;
    // Direction block: the component of the new X outside the old one.
    Eigen::MatrixXd Pnew = Xnew - X * (X.transpose() * Xnew);
    X = Xnew;
    if (Pnew.norm() > 1e-14) {
      P = orthonormalize(Pnew);
      if (P.cols() > block) P = P.leftCols(block);
    } else {
      P.resize(n, 0);
    }
    for (int c = 0; c < take; ++c) theta[c] = es.eigenvalues()[c];
  }

  // Final Rayleigh-Ritz and residuals.
  Eigen::MatrixXd AX = ctx.apply(X);
  Eigen::MatrixXd G = X.transpose() * AX;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
  Eigen::MatrixXd V = X * es.eigenvectors();
  Eigen::MatrixXd AV = ctx.apply(V);
  res.eigenvalues.resize(k);
  res.residuals.resize(k);
  for (int c = 0; c < k; ++c) {
    res.eigenvalues[c] = es.eigenvalues()[c];
    res.residuals[c] =
        (AV.col(c) - es.eigenvalues()[c] * V.col(c)).norm() / V.col(c).norm();
  }
  res.iterations = it;
  if (!res.converged) {
    bool ok = true;
    for (int c = 0; c < k; ++c)
      if (res.residuals[c] > tol * 2.0) ok = false;
    res.converged = ok;
  }
  if (!res.converged)
    fail(ErrorCode::NoConvergence,
         "eigensolver hit the iteration cap with residual above tolerance");
  return res;
}

std::pair<EigenResult, EigenResult> spectrum_pair(const FrameSpec& frame,
                                                  double p,
                                                  const GridSpec& grid,
                                                  int k) {
  AssembledOperators ops = assemble_operators(frame, p, grid);
  EigenResult h = lowest_eigenvalues(ops.H, k);
  EigenResult d = lowest_eigenvalues(ops.A, k, &ops.M);
  h.grid_n = grid.n;
  d.grid_n = grid.n;
  return {h, d};
}

std::vector<ModeGap> mode_gaps(const EigenResult& schrodinger,
                               const EigenResult& dirichlet) {
  std::vector<ModeGap> gaps;
  const std::size_t k =
      std::min(schrodinger.eigenvalues.size(), dirichlet.eigenvalues.size());
  for (std::size_t i = 0; i < k; ++i) {
    ModeGap g;
    g.lambda_schrodinger = schrodinger.eigenvalues[i];
    g.lambda_dirichlet = dirichlet.eigenvalues[i];
    const double denom = std::max(std::abs(g.lambda_dirichlet), 1e-300);
    g.rel_gap = std::abs(g.lambda_schrodinger - g.lambda_dirichlet) / denom;
    gaps.push_back(g);
  }
  return gaps;
}

EquivalenceReport equivalence_report(const FrameSpec& frame, double p,
                                     const GridSpec& grid, int k,
                                     double refine_factor) {
  EquivalenceReport rep;
  rep.coarse_n = grid.n;
  auto coarse = spectrum_pair(frame, p, grid, k);
  rep.coarse = mode_gaps(coarse.first, coarse.second);

  GridSpec fine = make_grid(
      grid.box, static_cast<int>(std::lround(grid.n[0] * refine_factor)),
      static_cast<int>(std::lround(grid.n[1] * refine_factor)),
      static_cast<int>(std::lround(grid.n[2] * refine_factor)));
  rep.fine_n = fine.n;
  auto fpair = spectrum_pair(frame, p, fine, k);
  rep.fine = mode_gaps(fpair.first, fpair.second);

  rep.gaps_shrink = true;
  for (std::size_t i = 0; i < rep.fine.size(); ++i)
    if (rep.fine[i].rel_gap > rep.coarse[i].rel_gap) rep.gaps_shrink = false;
  return rep;
}

int counting_function(const EigenResult& result, double threshold) {
  int count = 0;
  for (double lambda : result.eigenvalues)
    if (lambda <= threshold) ++count;
  return count;
}

}  // namespace sublab
