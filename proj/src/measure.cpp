#include "sublab/measure.hpp"

#include <cmath>

#include "sublab/mcmc.hpp"
#include "sublab/numerics.hpp"

namespace sublab {

void check_measure_exponent(const FrameSpec& frame, double p) {
  switch (frame.kind) {
    case FrameKind::Metivier:
      if (!(p > 2.0))
        fail(ErrorCode::ExponentOutOfRange,
             "the Métivier measure theory requires p > 2");
      break;
    case FrameKind::Grushin:
      if (!(p > frame.gamma + 1.0))
        fail(ErrorCode::ExponentOutOfRange,
             "the Grushin measure theory requires p > gamma + 1");
      break;
    case FrameKind::HeisenbergGreiner:
      if (!(p > 2.0 * frame.zeta))
        fail(ErrorCode::ExponentOutOfRange,
             "the Heisenberg-Greiner measure theory requires p > 2 zeta");
      break;
  }
}

Domain default_truncation_box(const FrameSpec& frame, double p) {
  // e^{-R^p} < 1e-18 so that the pointwise tail bound e^{-N^p} <=
  // e^{-R^p/2} e^{-N^p/2} stays below 1e-8 Z.
  const double R = std::pow(18.0 * std::log(10.0), 1.0 / p);
  const int hd = frame.horizontal_dim();
  const int cd = frame.center_dim();
  Eigen::VectorXd half(frame.dim);
  double center_half = 0.0;
  switch (frame.kind) {
    case FrameKind::Metivier:
      center_half = R * R / 4.0;
      break;
    case FrameKind::Grushin:
      center_half = std::pow(R, 1.0 + frame.gamma) / (1.0 + frame.gamma);
      break;
    case FrameKind::HeisenbergGreiner:
      center_half = std::pow(R, 2.0 * frame.zeta) /
                    std::sqrt(frame.center_coeff);
      break;
  }
  half.head(hd).setConstant(R);
  half.tail(cd).setConstant(center_half);
  return Domain::centered_box(half);
}

namespace {

double truncation_radius(const FrameSpec&, double p) {
  return std::pow(18.0 * std::log(10.0), 1.0 / p);
}

/// Lebesgue volume of the unit gauge ball {N <= 1} by indicator Monte Carlo
/// over its bounding box.
IntegralEstimate unit_ball_volume_mc(const FrameSpec& frame,
                                     std::int64_t n, std::uint64_t seed) {
  const int hd = frame.horizontal_dim();
  const int cd = frame.center_dim();
  Eigen::VectorXd half(frame.dim);
  half.head(hd).setConstant(1.0);
  half.tail(cd).setConstant(1.0 / std::sqrt(frame.center_coeff));
  const Domain box = Domain::centered_box(half);
  const FrameSpec f = frame;
  return integrate_mc(
      [f](const Eigen::VectorXd& v) {
        return kaplan_norm(f, v) <= 1.0 ? 1.0 : 0.0;
      },
      box, n, seed);
}

}  // namespace

IntegralEstimate normalization_Z(const FrameSpec& frame, double p, double tol,
                                 int threads) {
  check_measure_exponent(frame, p);
  if (frame.dim <= 3) {
    const Domain box = default_truncation_box(frame, p);
    const FrameSpec f = frame;
    QuadOptions opts;
    opts.abs_tol = 0.0;
    opts.rel_tol = tol;
    opts.threads = threads;
    return integrate_box(
        [f, p](const Eigen::VectorXd& v) {
          return std::exp(-std::pow(kaplan_norm(f, v), p));
        },
        box, opts);
  }
  // Radial reduction: Z = Q |B_1| int_0^inf r^{Q-1} e^{-r^p} dr
  //                     = |B_1| (Q/p) Gamma(Q/p); |B_1| by Monte Carlo.
  const std::int64_t n = 2000000;
  IntegralEstimate ball = unit_ball_volume_mc(frame, n, /*seed=*/0x5eedba11);
  const double Q = frame.qdim;
  const double radial = (Q / p) * std::exp(std::lgamma(Q / p));
  IntegralEstimate out;
  out.method = EstimateMethod::MonteCarlo;
  out.value = ball.value * radial;
  out.error = ball.error * radial;
  out.evals = ball.evals;
  return out;
}

MeasureSpec make_measure(const FrameSpec& frame, double p, double tol,
                         int threads) {
  MeasureSpec m;
  m.frame = frame;
  m.p = p;
  m.truncation_box = default_truncation_box(frame, p);
  m.gauge_radius = truncation_radius(frame, p);
  m.Z = normalization_Z(frame, p, tol, threads);
  if (!(m.Z.value > 0.0))
    fail(ErrorCode::RangeError, "normalization Z must be positive");

  if (frame.dim <= 3) {
    // Tail bound: mass outside the box <= e^{-R^p/2} int e^{-N^p/2} dxi.
    const FrameSpec f = frame;
    QuadOptions loose;
    loose.abs_tol = 0.0;
    loose.rel_tol = 1e-3;
    loose.threads = threads;
    const double half_mass =
        integrate_box(
            [f, p](const Eigen::VectorXd& v) {
              return std::exp(-0.5 * std::pow(kaplan_norm(f, v), p));
            },
            m.truncation_box, loose)
            .value;
    m.tail_bound = std::exp(-0.5 * std::pow(m.gauge_radius, p)) * half_mass;
    if (!(m.tail_bound < 1e-8 * m.Z.value))
      fail(ErrorCode::RangeError,
           "truncation box too small: tail bound " +
               format_double(m.tail_bound) + " vs Z " +
               format_double(m.Z.value));
  }
  return m;
}

double measure_density(const MeasureSpec& measure, const Eigen::VectorXd& v) {
  return std::exp(-std::pow(kaplan_norm(measure.frame, v), measure.p));
}

IntegralEstimate expect_integrand(const MeasureSpec& measure,
                                  const Integrand& g, EstimateMethod method,
                                  const QuadOptions& opts,
                                  const std::optional<Domain>& window) {
  if (method == EstimateMethod::MCMCRatio) {
    if (!measure.samples || !measure.samples->usable)
      fail(ErrorCode::UnusableSamples,
           "no converged sample set is attached to the measure");
    const SampleSet& s = *measure.samples;
    const std::int64_t K = s.stored();
    std::vector<double> vals(K);
    const bool weighted = !s.weights.empty();
    double wsum = 0.0, wsq = 0.0;
    std::vector<double> wvals(weighted ? K : 0);
    for (std::int64_t i = 0; i < K; ++i) {
      const double v = g(s.points.row(i).transpose());
      vals[i] = v;
      if (weighted) {
        wvals[i] = s.weights[i] * v;
        wsum += s.weights[i];
        wsq += s.weights[i] * s.weights[i];
      }
    }
    IntegralEstimate out;
    out.method = EstimateMethod::MCMCRatio;
    out.evals = K;
    if (!weighted) {
      const double mean = pairwise_sum(vals) / static_cast<double>(K);
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      var /= static_cast<double>(K);
      const double ess = std::max(1.0, series_ess(vals));
      out.value = mean;
      out.error = std::sqrt(var / ess);
    } else {
      const double mean = pairwise_sum(wvals) / wsum;
      double var = 0.0;
      for (std::int64_t i = 0; i < K; ++i)
        var += s.weights[i] * (vals[i] - mean) * (vals[i] - mean);
      var /= wsum;
      const double ess_w = wsum * wsum / std::max(wsq, 1e-300);
      out.value = mean;
      out.error = std::sqrt(var / std::max(1.0, ess_w));
    }
    return out;
  }

  // Quadrature ratio (int g e^{-U}) / Z over the window.
  const Domain dom = window ? *window : measure.truncation_box;
  const MeasureSpec& m = measure;
  IntegralEstimate num = integrate_box(
      [&](const Eigen::VectorXd& v) { return g(v) * measure_density(m, v); },
      dom, opts);
  IntegralEstimate out;
  out.method = EstimateMethod::AdaptiveQuad;
  out.evals = num.evals;
  out.budget_exhausted = num.budget_exhausted || measure.Z.budget_exhausted;
  out.value = num.value / measure.Z.value;
  out.error = num.error / measure.Z.value +
              std::abs(num.value) * measure.Z.error /
                  (measure.Z.value * measure.Z.value);
  return out;
}

IntegralEstimate expect_mu(const ScalarField& f, const MeasureSpec& measure,
                           EstimateMethod method, const QuadOptions& opts) {
  return expect_integrand(
      measure, [&f](const Eigen::VectorXd& v) { return f.eval(v); }, method,
      opts, f.support);
}

}  // namespace sublab
