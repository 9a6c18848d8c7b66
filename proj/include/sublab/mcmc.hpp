#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "sublab/measure.hpp"

namespace sublab {

struct SampleDiagnostics {
  double acceptance = 0.0;       ///< post-adaptation acceptance rate
  Eigen::VectorXd ess;           ///< effective sample size per coordinate
  double split_ratio = 0.0;      ///< split-chain convergence ratio (R-hat)
};

/// Seeded random-walk Metropolis output. Identical (measure, n, seed) gives
/// bit-identical points.
struct SampleSet {
  Eigen::MatrixXd points;        ///< stored samples, one row per point
  std::vector<double> weights;   ///< importance weights; empty = unweighted
  std::uint64_t seed = 0;
  std::int64_t n_requested = 0;
  double p = 0.0;                ///< exponent the chain targeted
  std::string frame_hash;
  SampleDiagnostics diag;
  bool usable = false;

  std::int64_t stored() const { return points.rows(); }
};

/// Random-walk Metropolis targeting e^{-N^p}. Per-coordinate proposal scales
/// adapt toward acceptance ~0.3 during the first 20% of n (discarded), with
/// center coordinates started at the square of the horizontal scale; frozen
/// afterwards. At most 10^6 points are stored (thinned).
SampleSet mcmc_sample(const MeasureSpec& measure, std::int64_t n,
                      std::uint64_t seed);

/// One-line JSON header followed by raw little-endian doubles, point-major.
void save_samples(const std::string& path, const SampleSet& set);
SampleSet load_samples(const std::string& path);

/// Effective sample size of a scalar series (Geyer-truncated autocorrelation).
double series_ess(const std::vector<double>& series);

}  // namespace sublab
