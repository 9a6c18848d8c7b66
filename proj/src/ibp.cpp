#include <cmath>

#include "sublab/inequalities.hpp"

namespace sublab {

namespace {

double signed_power(double f, double e) {
  if (f == 0.0) return 0.0;
  return (f < 0.0 ? -1.0 : 1.0) * std::pow(std::abs(f), e);
}

/// |f| must be negligible on the boundary of the integration window.
void check_support(const ScalarField& f, const Domain& window) {
  const int d = window.dim();
  Eigen::VectorXd v(d);
  // Face-center grid probes: for each face, a small deterministic lattice.
  for (int ax = 0; ax < d; ++ax) {
    for (int side = 0; side < 2; ++side) {
      for (int probe = 0; probe < 9; ++probe) {
        for (int k = 0; k < d; ++k) {
          const double t =
              0.5 + 0.4 * std::sin(1.7 * (probe + 1) * (k + 1));  // in (0,1)
          v[k] = window.lo[k] + t * (window.hi[k] - window.lo[k]);
        }
        v[ax] = side == 0 ? window.lo[ax] : window.hi[ax];
        if (std::abs(f.eval(v)) > 1e-12)
          fail(ErrorCode::SupportLeak,
               "test function is not negligible at the integration boundary");
      }
    }
  }
}

}  // namespace

HorizontalField h_coordinate(const FrameSpec& frame) {
  const int hd = frame.horizontal_dim();
  HorizontalField h;
  h.id = "x";
  h.coeffs = [hd](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(v.head(hd));
  };
  h.divergence = [hd](const Eigen::VectorXd&) {
    return static_cast<double>(hd);
  };
  return h;
}

HorizontalField h_grad_log_norm(const FrameSpec& frame) {
  const int hd = frame.horizontal_dim();
  HorizontalField h;
  h.id = "grad-log-x";
  h.coeffs = [hd](const Eigen::VectorXd& v) {
    const double r2 = v.head(hd).squaredNorm();
    return Eigen::VectorXd(v.head(hd) / r2);
  };
  h.divergence = [hd](const Eigen::VectorXd& v) {
    return (hd - 2.0) / v.head(hd).squaredNorm();
  };
  return h;
}

IbpResult ibp_residual(const MeasureSpec& measure, const ScalarField& f,
                       const HorizontalField& h, const ScalarField& omega,
                       double r, const QuadOptions& opts) {
  if (!(r > 1.0 && r <= 2.0))
    fail(ErrorCode::ExponentOutOfRange, "ibp_residual requires r in (1, 2]");
  const Domain window = f.support ? *f.support : measure.truncation_box;
  check_support(f, window);

  const FrameSpec& frame = measure.frame;
  const ScalarField N = gauge_field(frame);
  const double p = measure.p;

  // Term integrands against mu (the shared factor e^{-U} is applied by
  // expect_integrand; Z cancels in residual/scale).
  Integrand t_div = [&](const Eigen::VectorXd& v) {
    const double fv = f.eval(v);
    if (fv == 0.0) return 0.0;
    return std::pow(std::abs(fv), r) * h.divergence(v) * omega.eval(v);
  };
  Integrand t_grad = [&](const Eigen::VectorXd& v) {
    const double fv = f.eval(v);
    if (fv == 0.0) return 0.0;
    const Eigen::VectorXd gf = subgradient(frame, f, v);
    return r * signed_power(fv, r - 1.0) * gf.dot(h.coeffs(v)) * omega.eval(v);
  };
  Integrand t_drift = [&](const Eigen::VectorXd& v) {
    const double fv = f.eval(v);
    if (fv == 0.0) return 0.0;
    const double Nv = N.eval(v);
    const Eigen::VectorXd gU =
        p * std::pow(Nv, p - 1.0) * subgradient(frame, N, v);
    return -std::pow(std::abs(fv), r) * gU.dot(h.coeffs(v)) * omega.eval(v);
  };
  Integrand t_weight = [&](const Eigen::VectorXd& v) {
    const double fv = f.eval(v);
    if (fv == 0.0) return 0.0;
    const Eigen::VectorXd gw = subgradient(frame, omega, v);
    return std::pow(std::abs(fv), r) * gw.dot(h.coeffs(v));
  };

  IbpResult out;
  const Integrand* integrands[4] = {&t_div, &t_grad, &t_drift, &t_weight};
  for (int k = 0; k < 4; ++k) {
    IntegralEstimate est =
        expect_integrand(measure, *integrands[k],
                         EstimateMethod::AdaptiveQuad, opts, window);
    out.terms[k] = est.value;
    out.error += est.error;
    out.evals += est.evals;
  }
  out.residual =
      out.terms[0] + out.terms[1] + out.terms[2] + out.terms[3];
  out.scale = std::abs(out.terms[0]) + std::abs(out.terms[1]) +
              std::abs(out.terms[2]) + std::abs(out.terms[3]);
  return out;
}

std::vector<IbpCase> standard_ibp_suite(const MeasureSpec& measure) {
  const FrameSpec& frame = measure.frame;
  const int hd = frame.horizontal_dim();
  const int D = frame.dim;
  const double q = measure.p / (measure.p - 1.0);

  // Bumps centered away from the |x| = 0 axis so that the |x|-singular
  // choices of h and omega stay smooth on the support.
  auto offset_bump = [&](double cx, double radius) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(D);
    c[0] = cx;
    c[D - 1] = 0.2;
    auto eval = [c, radius](const Eigen::VectorXd& v) {
      double u2 = 0.0;
      for (int k = 0; k < v.size(); ++k) {
        const double d = (v[k] - c[k]) / radius;
        u2 += d * d;
      }
      if (u2 >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - u2));
    };
    auto grad = [c, radius](const Eigen::VectorXd& v) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
      double u2 = 0.0;
      for (int k = 0; k < v.size(); ++k) {
        const double d = (v[k] - c[k]) / radius;
        u2 += d * d;
      }
      if (u2 >= 1.0) return g;
      const double w = 1.0 - u2;
      const double val = std::exp(1.0 - 1.0 / w);
      for (int k = 0; k < v.size(); ++k)
        g[k] = val * (-2.0 * (v[k] - c[k]) / (radius * radius)) / (w * w);
      return g;
    };
    ScalarField f = ScalarField::analytic(eval, grad);
    f.support = Domain(Eigen::VectorXd(c.array() - radius),
                       Eigen::VectorXd(c.array() + radius));
    return f;
  };

  ScalarField one = ScalarField::analytic(
      [](const Eigen::VectorXd&) { return 1.0; },
      [](const Eigen::VectorXd& v) {
        return Eigen::VectorXd(Eigen::VectorXd::Zero(v.size()));
      });
  ScalarField xpow = ScalarField::analytic(
      [hd, q](const Eigen::VectorXd& v) {
        return std::pow(v.head(hd).norm(), q - 2.0);
      },
      [hd, q](const Eigen::VectorXd& v) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
        const double rho = v.head(hd).norm();
        g.head(hd) = (q - 2.0) * std::pow(rho, q - 4.0) * v.head(hd);
        return g;
      });

  const ScalarField bump_a = offset_bump(1.05, 0.55);
  const ScalarField bump_b = offset_bump(1.45, 0.70);

  std::vector<IbpCase> suite;
  int idx = 0;
  for (double r : {1.5, 2.0})
    for (int hsel = 0; hsel < 2; ++hsel)
      for (int wsel = 0; wsel < 2; ++wsel) {
        if (idx >= 12) break;
        const bool second_bump = (idx % 2) == 1;
        IbpCase c;
        c.id = "r" + std::to_string(r).substr(0, 3) +
               (hsel ? "-hlog" : "-hx") + (wsel ? "-wxq" : "-w1") +
               (second_bump ? "-b2" : "-b1");
        c.f = second_bump ? bump_b : bump_a;
        c.h = hsel ? h_grad_log_norm(frame) : h_coordinate(frame);
        c.omega = wsel ? xpow : one;
        c.r = r;
        suite.push_back(std::move(c));
        ++idx;
      }
  // 2 x 2 x 2 grid gives 8; add the remaining 4 with the alternate bump.
  for (double r : {1.5, 2.0})
    for (int hsel = 0; hsel < 2; ++hsel) {
      IbpCase c;
      c.id = "r" + std::to_string(r).substr(0, 3) +
             (hsel ? "-hlog" : "-hx") + "-w1-b2x";
      c.f = offset_bump(hsel ? 1.25 : 0.95, 0.5);
      c.h = hsel ? h_grad_log_norm(frame) : h_coordinate(frame);
      c.omega = one;
      c.r = r;
      suite.push_back(std::move(c));
    }
  return suite;
}

}  // namespace sublab
