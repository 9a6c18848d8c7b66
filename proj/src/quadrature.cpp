#include "sublab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <vector>

#include "sublab/numerics.hpp"
#include "sublab/parallel.hpp"

namespace sublab {

const char* estimate_method_name(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::AdaptiveQuad: return "AdaptiveQuad";
    case EstimateMethod::MonteCarlo: return "MonteCarlo";
    case EstimateMethod::MCMCRatio: return "MCMCRatio";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Gauss-Kronrod 15(7) on [-1, 1].

constexpr int kGkPoints = 15;
const double kGkNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
const double kGkWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
const double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

// ---------------------------------------------------------------------------
// Genz-Malik degree 7(5) rule on [-1, 1]^d, d = 2 or 3.

struct GenzMalik {
  int d;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> w7;
  std::vector<double> w5;
  int lambda2_start = 0;  // 4 points per axis: +l2, -l2, +l3, -l3

  explicit GenzMalik(int dim) : d(dim) {
    const double l2 = std::sqrt(9.0 / 70.0);
    const double l3 = std::sqrt(9.0 / 10.0);
    const double l4 = std::sqrt(9.0 / 10.0);
    const double l5 = std::sqrt(9.0 / 19.0);
    const double n = static_cast<double>(d);
    const double tp = std::pow(2.0, n);
    const double w1 = tp * (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0;
    const double w2 = tp * 980.0 / 6561.0;
    const double w3 = tp * (1820.0 - 400.0 * n) / 19683.0;
    const double w4 = tp * 200.0 / 19683.0;
    const double w5c = 6859.0 / 19683.0;
    const double e1 = tp * (729.0 - 950.0 * n + 50.0 * n * n) / 729.0;
    const double e2 = tp * 245.0 / 486.0;
    const double e3 = tp * (265.0 - 100.0 * n) / 1458.0;
    const double e4 = tp * 25.0 / 729.0;

    auto push = [&](const Eigen::VectorXd& u, double a, double b) {
      points.push_back(u);
      w7.push_back(a);
      w5.push_back(b);
    };
    push(Eigen::VectorXd::Zero(d), w1, e1);
    lambda2_start = 1;
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
      u[i] = l2;  push(u, w2, e2);
      u[i] = -l2; push(u, w2, e2);
      u[i] = l3;  push(u, w3, e3);
      u[i] = -l3; push(u, w3, e3);
    }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (int si = -1; si <= 1; si += 2)
          for (int sj = -1; sj <= 1; sj += 2) {
            Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
            u[i] = si * l4;
            u[j] = sj * l4;
            push(u, w4, e4);
          }
    for (int mask = 0; mask < (1 << d); ++mask) {
      Eigen::VectorXd u(d);
      for (int i = 0; i < d; ++i) u[i] = (mask >> i & 1) ? l5 : -l5;
      push(u, w5c, 0.0);
    }
  }
};

struct RuleResult {
  double value = 0.0;
  double error = 0.0;
  int split_axis = 0;
  std::int64_t evals = 0;
};

RuleResult eval_cell(const Integrand& f, const GenzMalik& rule,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const int d = rule.d;
  const Eigen::VectorXd c = 0.5 * (lo + hi);
  const Eigen::VectorXd h = 0.5 * (hi - lo);
  const double vol = (hi - lo).prod();
  const double scale = vol / std::pow(2.0, d);

  std::vector<double> vals(rule.points.size());
  Eigen::VectorXd p(d);
  for (std::size_t k = 0; k < rule.points.size(); ++k) {
    p = c + h.cwiseProduct(rule.points[k]);
    vals[k] = f(p);
  }

  double i7 = 0.0, i5 = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    i7 += rule.w7[k] * vals[k];
    i5 += rule.w5[k] * vals[k];
  }
  RuleResult out;
  out.value = scale * i7;
  out.error = std::abs(scale * (i7 - i5));
  out.evals = static_cast<std::int64_t>(vals.size());

  // Fourth-difference indicator per axis for the split choice.
  const double ratio = (9.0 / 70.0) / (9.0 / 10.0);
  const double f0 = vals[0];
  double best = -1.0;
  for (int i = 0; i < d; ++i) {
    const int base = rule.lambda2_start + 4 * i;
    const double d2 = vals[base] + vals[base + 1] - 2.0 * f0;
    const double d3 = vals[base + 2] + vals[base + 3] - 2.0 * f0;
    // Prefer the geometrically longest axis on ties by weighting with h.
    const double diff = std::abs(d2 - ratio * d3) * h[i];
    if (diff > best) {
      best = diff;
      out.split_axis = i;
    }
  }
  return out;
}

RuleResult eval_cell_1d(const Integrand& f, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  const double c = 0.5 * (lo[0] + hi[0]);
  const double h = 0.5 * (hi[0] - lo[0]);
  double ik = 0.0, ig = 0.0;
  Eigen::VectorXd p(1);
  for (int i = 0; i < 8; ++i) {
    p[0] = c + h * kGkNodes[i];
    const double fp = f(p);
    double fm = fp;
    if (i < 7) {
      p[0] = c - h * kGkNodes[i];
      fm = f(p);
    }
    const double pair = (i < 7) ? fp + fm : fp;
    ik += kGkWeights[i] * pair;
    if (i % 2 == 1) ig += kGaussWeights[i / 2] * pair;
  }
  RuleResult out;
  out.value = h * ik;
  out.error = std::abs(h * (ik - ig));
  out.evals = kGkPoints;
  out.split_axis = 0;
  return out;
}

struct Cell {
  Eigen::VectorXd lo, hi;
  double value = 0.0;
  double error = 0.0;
  int split_axis = 0;
  std::uint64_t id = 0;
};

struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const {
    if (a.error != b.error) return a.error < b.error;  // max-heap on error
    return a.id > b.id;
  }
};

}  // namespace

IntegralEstimate integrate_box(const Integrand& f, const Domain& domain,
                               const QuadOptions& opts) {
  domain.validate();
  const int d = domain.dim();
  if (d > 3)
    fail(ErrorCode::BadDimension,
         "adaptive quadrature supports dimension <= 3");

  const GenzMalik* rule = nullptr;
  static const GenzMalik rule2(2), rule3(3);
  if (d == 2) rule = &rule2;
  if (d == 3) rule = &rule3;

  auto run_rule = [&](const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    return d == 1 ? eval_cell_1d(f, lo, hi) : eval_cell(f, *rule, lo, hi);
  };

  std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
  std::uint64_t next_id = 0;
  std::int64_t evals = 0;

  RuleResult r0 = run_rule(domain.lo, domain.hi);
  evals += r0.evals;
  heap.push(Cell{domain.lo, domain.hi, r0.value, r0.error, r0.split_axis,
                 next_id++});
  double total_value = r0.value;
  double total_error = r0.error;

  IntegralEstimate out;
  out.method = EstimateMethod::AdaptiveQuad;

  const int batch = 16;
  std::vector<Cell> popped;
  std::vector<Cell> children;
  while (true) {
    const double goal =
        std::max(opts.abs_tol, opts.rel_tol * std::abs(total_value));
    if (total_error <= goal) break;
    if (evals >= opts.max_evals) {
      out.budget_exhausted = true;
      break;
    }
    popped.clear();
    for (int b = 0; b < batch && !heap.empty(); ++b) {
      popped.push_back(heap.top());
      heap.pop();
    }
    if (popped.empty()) break;

    children.assign(2 * popped.size(), Cell{});
    parallel_for(popped.size(), opts.threads, [&](std::size_t i) {
      const Cell& parent = popped[i];
      const int ax = parent.split_axis;
      const double mid = 0.5 * (parent.lo[ax] + parent.hi[ax]);
      for (int side = 0; side < 2; ++side) {
        Cell child;
        child.lo = parent.lo;
        child.hi = parent.hi;
        if (side == 0)
          child.hi[ax] = mid;
        else
          child.lo[ax] = mid;
        RuleResult r = run_rule(child.lo, child.hi);
        child.value = r.value;
        child.error = r.error;
        child.split_axis = r.split_axis;
        children[2 * i + side] = child;
      }
    });

    for (std::size_t i = 0; i < popped.size(); ++i) {
      total_value -= popped[i].value;
      total_error -= popped[i].error;
    }
    for (Cell& child : children) {
      child.id = next_id++;
      total_value += child.value;
      total_error += child.error;
      evals += (d == 1) ? kGkPoints
                        : static_cast<std::int64_t>(rule->points.size());
      heap.push(std::move(child));
    }
  }

  // Recompute the totals from the leaves in id order with pairwise
  // summation: reproducible regardless of the refinement bookkeeping.
  std::vector<Cell> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  std::sort(leaves.begin(), leaves.end(),
            [](const Cell& a, const Cell& b) { return a.id < b.id; });
  std::vector<double> vals(leaves.size()), errs(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    vals[i] = leaves[i].value;
    errs[i] = leaves[i].error;
  }
  out.value = pairwise_sum(vals);
  out.error = pairwise_sum(errs);
  out.evals = evals;
  return out;
}

IntegralEstimate integrate_mc(const Integrand& f, const Domain& domain,
                              std::int64_t n, std::uint64_t seed) {
  domain.validate();
  if (n < 1) fail(ErrorCode::BadDimension, "need n >= 1 samples");
  const int d = domain.dim();
  const double vol = domain.volume();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Chunked accumulation keeps the reduction order fixed.
  std::vector<double> chunk_sums, chunk_sq;
  double acc = 0.0, acc_sq = 0.0;
  std::int64_t in_chunk = 0;
  Eigen::VectorXd p(d);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k)
      p[k] = domain.lo[k] + (domain.hi[k] - domain.lo[k]) * unif(rng);
    const double v = f(p);
    acc += v;
    acc_sq += v * v;
    if (++in_chunk == 4096) {
      chunk_sums.push_back(acc);
      chunk_sq.push_back(acc_sq);
      acc = acc_sq = 0.0;
      in_chunk = 0;
    }
  }
  if (in_chunk > 0) {
    chunk_sums.push_back(acc);
    chunk_sq.push_back(acc_sq);
  }
  const double sum = pairwise_sum(chunk_sums);
  const double sum_sq = pairwise_sum(chunk_sq);
  const double mean = sum / static_cast<double>(n);
  const double var =
      std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);

  IntegralEstimate out;
  out.method = EstimateMethod::MonteCarlo;
  out.value = vol * mean;
  out.error = vol * std::sqrt(var / static_cast<double>(n));
  out.evals = n;
  return out;
}

}  // namespace sublab
