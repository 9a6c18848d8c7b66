#include <algorithm>
#include <cmath>

#include "sublab/inequalities.hpp"

namespace sublab {

namespace {

struct MemberIntegrals {
  std::string id;
  IntegralEstimate mass;  ///< int |f|^q dmu
  IntegralEstimate grad;  ///< int |grad_G f|^q dmu
  IntegralEstimate half;  ///< int |f|^{q/2} dmu
};

std::vector<MemberIntegrals> member_integrals(const MeasureSpec& measure,
                                              double q,
                                              const TestFamily& family,
                                              const QuadOptions& opts) {
  const FrameSpec& frame = measure.frame;
  std::vector<MemberIntegrals> out;
  out.reserve(family.members.size());
  for (const FamilyMember& member : family.members) {
    const ScalarField& f = member.field;
    MemberIntegrals mi;
    mi.id = member.id;
    mi.mass = expect_integrand(
        measure,
        [&](const Eigen::VectorXd& v) {
          const double fv = std::abs(f.eval(v));
          return fv == 0.0 ? 0.0 : std::pow(fv, q);
        },
        EstimateMethod::AdaptiveQuad, opts, f.support);
    mi.grad = expect_integrand(
        measure,
        [&](const Eigen::VectorXd& v) {
          const double g = subgradient(frame, f, v).norm();
          return g == 0.0 ? 0.0 : std::pow(g, q);
        },
        EstimateMethod::AdaptiveQuad, opts, f.support);
    mi.half = expect_integrand(
        measure,
        [&](const Eigen::VectorXd& v) {
          const double fv = std::abs(f.eval(v));
          return fv == 0.0 ? 0.0 : std::pow(fv, q / 2.0);
        },
        EstimateMethod::AdaptiveQuad, opts, f.support);
    if (!(mi.half.value > 0.0))
      fail(ErrorCode::DegenerateFamily,
           "member '" + member.id + "' has vanishing int |f|^{q/2} dmu");
    out.push_back(std::move(mi));
  }
  return out;
}

BetaPoint beta_from_integrals(const std::vector<MemberIntegrals>& mis,
                              double eps) {
  BetaPoint pt;
  pt.eps = eps;
  pt.beta = 0.0;
  for (const auto& mi : mis) {
    const double num = mi.mass.value - eps * mi.grad.value;
    const double den = mi.half.value * mi.half.value;
    const double val = num / den;
    if (val > pt.beta) {
      pt.beta = val;
      pt.argmax_member = mi.id;
      const double num_err = mi.mass.error + eps * mi.grad.error;
      pt.error = num_err / den +
                 2.0 * std::abs(num) * mi.half.error /
                     (den * mi.half.value);
    }
  }
  return pt;
}

}  // namespace

BetaPoint beta_hat(const MeasureSpec& measure, double q, double eps,
                   const TestFamily& family, const QuadOptions& opts) {
  if (!(eps > 0.0))
    fail(ErrorCode::RangeError, "beta_hat requires eps > 0");
  if (family.members.empty())
    fail(ErrorCode::DegenerateFamily, "empty family");
  return beta_from_integrals(member_integrals(measure, q, family, opts), eps);
}

BetaCurve beta_curve(const MeasureSpec& measure, double q,
                     const std::vector<double>& eps_grid,
                     const TestFamily& family, const QuadOptions& opts) {
  if (family.members.empty())
    fail(ErrorCode::DegenerateFamily, "empty family");
  std::vector<double> grid = eps_grid;
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  const auto mis = member_integrals(measure, q, family, opts);
  BetaCurve curve;
  curve.q = q;
  curve.family = family.id;
  for (double eps : grid) curve.points.push_back(beta_from_integrals(mis, eps));
  return curve;
}

ExponentFit fit_growth_exponent(const BetaCurve& curve) {
  std::vector<double> xs, ys;
  for (const BetaPoint& pt : curve.points) {
    if (pt.beta > 1.0) {
      xs.push_back(std::log(1.0 / pt.eps));
      ys.push_back(std::log(std::log(pt.beta)));
    }
  }
  const int n = static_cast<int>(xs.size());
  if (n < 5)
    fail(ErrorCode::InsufficientCurve,
         "growth fit needs >= 5 curve points with beta > 1, got " +
             std::to_string(n));
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  ExponentFit fit;
  fit.points_used = n;
  fit.sigma = sxy / sxx;
  fit.log_c = my - fit.sigma * mx;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.log_c + fit.sigma * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  const double se =
      n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
  fit.half_width = 1.96 * se;
  return fit;
}

EnvelopeFit fit_growth_envelope(const BetaCurve& curve,
                                const std::vector<int>& train_idx,
                                double sigma) {
  EnvelopeFit fit;
  fit.sigma = sigma;
  for (int idx : train_idx) {
    const BetaPoint& pt = curve.points.at(idx);
    fit.k_hat = std::max(fit.k_hat, pt.beta);
    if (pt.beta > 1.0)
      fit.c_hat = std::max(
          fit.c_hat, std::pow(pt.eps, sigma) * std::log(pt.beta));
  }
  return fit;
}

}  // namespace sublab
