#pragma once

#include <memory>
#include <optional>

#include "sublab/frames.hpp"
#include "sublab/quadrature.hpp"

namespace sublab {

struct SampleSet;

/// frame + exponent p + normalization Z defining dmu = Z^-1 e^{-N^p} dxi.
struct MeasureSpec {
  FrameSpec frame;
  double p = 0.0;
  IntegralEstimate Z;
  Domain truncation_box;
  double gauge_radius = 0.0;  ///< R with e^{-R^p} below the truncation cut
  double tail_bound = 0.0;    ///< bound on the mass outside the box
  std::shared_ptr<const SampleSet> samples;  ///< optional attached MCMC set
};

void check_measure_exponent(const FrameSpec& frame, double p);

/// Coordinate box containing the gauge ball {N <= R} with e^{-R^p} < 1e-18.
Domain default_truncation_box(const FrameSpec& frame, double p);

/// Z = int e^{-N^p} dxi. Quadrature for D <= 3; for larger D, Monte Carlo on
/// the unit gauge ball volume combined with the exact radial profile
/// Q |B_1| int r^{Q-1} e^{-r^p} dr.
IntegralEstimate normalization_Z(const FrameSpec& frame, double p, double tol,
                                 int threads = 1);

MeasureSpec make_measure(const FrameSpec& frame, double p, double tol = 1e-7,
                         int threads = 1);

/// Unnormalized density e^{-N(v)^p}.
double measure_density(const MeasureSpec& measure, const Eigen::VectorXd& v);

/// int g dmu for a raw integrand g. Quadrature path integrates g e^{-U} over
/// `window` (default: the truncation box) and divides by Z with first-order
/// error propagation; MCMC path averages g over the attached sample set.
IntegralEstimate expect_integrand(const MeasureSpec& measure,
                                  const Integrand& g, EstimateMethod method,
                                  const QuadOptions& opts = {},
                                  const std::optional<Domain>& window = {});

IntegralEstimate expect_mu(const ScalarField& f, const MeasureSpec& measure,
                           EstimateMethod method, const QuadOptions& opts = {});

}  // namespace sublab
