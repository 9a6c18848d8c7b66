#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

#include "sublab/domain.hpp"

namespace sublab {

enum class EstimateMethod { AdaptiveQuad, MonteCarlo, MCMCRatio };

const char* estimate_method_name(EstimateMethod m);

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;  ///< estimated absolute error (quad) or standard error (MC)
  EstimateMethod method = EstimateMethod::AdaptiveQuad;
  std::int64_t evals = 0;
  bool budget_exhausted = false;
};

using Integrand = std::function<double(const Eigen::VectorXd&)>;

struct QuadOptions {
  double abs_tol = 1e-9;
  double rel_tol = 0.0;
  std::int64_t max_evals = 40000000;
  int threads = 1;
};

/// Adaptive tensor quadrature (Gauss-Kronrod 15 in 1D, Genz-Malik 7/5 in
/// dimension 2 and 3). Dyadic bisection of the worst cell by the embedded
/// error indicator; deterministic refinement order.
IntegralEstimate integrate_box(const Integrand& f, const Domain& domain,
                               const QuadOptions& opts);

inline IntegralEstimate integrate_box(const Integrand& f, const Domain& domain,
                                      double tol) {
  QuadOptions opts;
  opts.abs_tol = tol;
  return integrate_box(f, domain, opts);
}

/// Plain Monte Carlo over the box; the independent cross-check estimator.
IntegralEstimate integrate_mc(const Integrand& f, const Domain& domain,
                              std::int64_t n, std::uint64_t seed);

}  // namespace sublab
