#include <cmath>

#include "sublab/inequalities.hpp"

namespace sublab {

namespace {

Rational conjugate(const Rational& p) { return p / (p - 1); }

void require(bool cond, const std::string& msg) {
  if (!cond) fail(ErrorCode::ExponentOutOfRange, msg);
}

double ipow10(long long e) {
  double r = 1.0;
  for (long long i = 0; i < std::llabs(e); ++i) r *= 10.0;
  return e >= 0 ? r : 1.0 / r;
}

/// eps = 10^{-k} exactly (as doubles) for small k, else 0.
long long power_of_ten_exponent(double eps) {
  for (long long k = 0; k <= 18; ++k)
    if (eps == std::pow(10.0, -static_cast<double>(k))) return k;
  return -1;
}

}  // namespace

const char* spi_setting_name(SpiSetting s) {
  switch (s) {
    case SpiSetting::MetivierL2: return "metivier-l2";
    case SpiSetting::MetivierLq: return "metivier-lq";
    case SpiSetting::GrushinLq: return "grushin-lq";
    case SpiSetting::GrushinL2: return "grushin-l2";
    case SpiSetting::HeisenbergGreinerLq: return "heisenberg-greiner-lq";
  }
  return "?";
}

Rational exponent_table(SpiSetting setting, const Rational& p,
                        const Rational& q, const Rational& gamma,
                        const Rational& zeta) {
  switch (setting) {
    case SpiSetting::MetivierL2:
      require(p > 2, "Métivier L2 growth requires p > 2");
      return p / (p - 2);
    case SpiSetting::MetivierLq:
      require(p > 2, "Métivier Lq growth requires p > 2");
      require(q == conjugate(p), "q must be the Hölder conjugate of p");
      return Rational(2) * (p - 1) / (p - 2);
    case SpiSetting::GrushinLq:
      require(gamma >= 0, "Grushin requires gamma >= 0");
      require(p > gamma + 1, "Grushin Lq growth requires p > gamma + 1");
      require(q == conjugate(p), "q must be the Hölder conjugate of p");
      return (gamma + 1) * (p - 1) / (p - gamma - 1);
    case SpiSetting::GrushinL2:
      require(gamma >= 0, "Grushin requires gamma >= 0");
      require(p > gamma + 1, "Grushin L2 growth requires p > gamma + 1");
      return p * (gamma + 1) / (Rational(2) * (p - gamma - 1));
    case SpiSetting::HeisenbergGreinerLq:
      require(zeta >= 1, "Heisenberg-Greiner requires zeta >= 1");
      require(p > Rational(2) * zeta,
              "Heisenberg-Greiner growth requires p > 2 zeta");
      require(q == conjugate(p), "q must be the Hölder conjugate of p");
      return Rational(2) * zeta * (p - 1) / (p - Rational(2) * zeta);
  }
  fail(ErrorCode::ExponentOutOfRange, "unknown setting");
}

Certificate certificate(const FrameSpec& frame, double p, double q, double eps,
                        CertificateRoute route) {
  if (!(eps > 0.0)) fail(ErrorCode::RangeError, "eps must be positive");
  const Rational rp = rational_from_double(p);
  const Rational rq = rational_from_double(q);
  const Rational rgamma = rational_from_double(frame.gamma);
  const Rational rzeta = rational_from_double(frame.zeta);

  Certificate cert;
  cert.p = p;
  cert.q = q;
  cert.eps = eps;
  cert.route = route;

  switch (frame.kind) {
    case FrameKind::Metivier:
      if (rq == Rational(2)) {
        cert.setting = SpiSetting::MetivierL2;
        require(rp > 2, "Métivier certificate requires p > 2");
        cert.R_exponent = Rational(1) / (rp - 2);
      } else {
        cert.setting = SpiSetting::MetivierLq;
        require(rp > 2, "Métivier certificate requires p > 2");
        require(rq == conjugate(rp), "q must be the Hölder conjugate of p");
        cert.R_exponent = Rational(2) / (rp - rq);
      }
      break;
    case FrameKind::Grushin:
      if (rq == Rational(2)) {
        cert.setting = SpiSetting::GrushinL2;
        require(rp > rgamma + 1, "Grushin certificate requires p > gamma + 1");
        cert.R_exponent = (rgamma + 1) / (Rational(2) * (rp - rgamma - 1));
      } else {
        cert.setting = SpiSetting::GrushinLq;
        require(rp > rgamma + 1, "Grushin certificate requires p > gamma + 1");
        require(rq == conjugate(rp), "q must be the Hölder conjugate of p");
        cert.R_exponent = (rgamma + 1) / (rp - rgamma * rq);
      }
      break;
    case FrameKind::HeisenbergGreiner: {
      cert.setting = SpiSetting::HeisenbergGreinerLq;
      require(rp > Rational(2) * rzeta,
              "Heisenberg-Greiner certificate requires p > 2 zeta");
      require(rq == conjugate(rp), "q must be the Hölder conjugate of p");
      const Rational g = Rational(2) * rzeta - 1;
      cert.R_exponent = (g + 1) / (rp - g * rq);
      break;
    }
  }

  cert.sigma = exponent_table(cert.setting, rp, rq, rgamma, rzeta);
  cert.beta_form = "exp(C*eps^(-" + rational_to_string(cert.sigma) + "))";

  // R = eps^{-R_exponent}; exact when eps is a power of ten and the combined
  // exponent is an integer.
  const long long k = power_of_ten_exponent(eps);
  if (k >= 0) {
    const Rational e = Rational(k) * cert.R_exponent;
    if (e.denominator() == 1)
      cert.R = ipow10(e.numerator());
    else
      cert.R = std::pow(10.0, rational_to_double(e));
  } else {
    cert.R = std::pow(eps, -rational_to_double(cert.R_exponent));
  }

  if (route == CertificateRoute::Hoelder) {
    const bool l2 = rq == Rational(2);
    const Rational ball_power = l2 ? Rational(2) * (rp - 1) : rp;
    cert.delta_exponent = Rational(1) + ball_power * cert.R_exponent;
    cert.delta = std::pow(eps, rational_to_double(*cert.delta_exponent));
  }
  return cert;
}

DecompositionReport certificate_decomposition(const Certificate& cert,
                                              const MeasureSpec& measure,
                                              const TestFamily& family,
                                              const QuadOptions& opts) {
  DecompositionReport rep;
  rep.cert = cert;
  const FrameSpec& frame = measure.frame;
  const double q = cert.q;
  const double p = measure.p;
  const double R = cert.R;
  const double eps = cert.eps;
  const double delta = cert.delta.value_or(eps);
  const ScalarField N = gauge_field(frame);

  // U-bound constants for the complement estimate.
  InequalityId ub_id;
  switch (frame.kind) {
    case FrameKind::Metivier:
      ub_id = q == 2.0 ? InequalityId::UBOUND_L2 : InequalityId::UBOUND_LQ;
      break;
    case FrameKind::Grushin:
      ub_id = q == 2.0 ? InequalityId::GRUSHIN_UBOUND_L2
                       : InequalityId::GRUSHIN_UBOUND_LQ;
      break;
    case FrameKind::HeisenbergGreiner:
      ub_id = InequalityId::HG_UBOUND_LQ;
      break;
  }
  InequalitySpec ub = make_inequality(ub_id, frame, p, q);
  FittedConstants ub_fit =
      fit_constants(ub, family, measure, EstimateMethod::AdaptiveQuad, opts);

  // Exponent of N in the eta comparison on the complement: eta >= R^w |x|-part.
  double eta_gap;  // eta / |x|^{..} = N^{eta_gap}
  switch (frame.kind) {
    case FrameKind::Metivier: eta_gap = q == 2.0 ? 2.0 * (p - 2.0) : p - q; break;
    case FrameKind::Grushin:
      eta_gap = q == 2.0 ? 2.0 * (p - frame.gamma - 1.0)
                         : p - frame.gamma * q;
      break;
    case FrameKind::HeisenbergGreiner:
      eta_gap = p - (2.0 * frame.zeta - 1.0) * q;
      break;
    default: eta_gap = p - q; break;
  }

  struct Collected {
    std::string id;
    double lhs_ball, lhs_comp, grad, mass, half, grad_ground, l1_ball;
  };
  std::vector<Collected> cols;
  for (const FamilyMember& member : family.members) {
    const ScalarField& f = member.field;
    auto E = [&](const Integrand& g) {
      return expect_integrand(measure, g, EstimateMethod::AdaptiveQuad, opts,
                              f.support)
          .value;
    };
    Collected c;
    c.id = member.id;
    c.lhs_ball = E([&](const Eigen::VectorXd& v) {
      const double fv = std::abs(f.eval(v));
      return kaplan_norm(frame, v) <= R ? std::pow(fv, q) : 0.0;
    });
    c.lhs_comp = E([&](const Eigen::VectorXd& v) {
      const double fv = std::abs(f.eval(v));
      return kaplan_norm(frame, v) > R ? std::pow(fv, q) : 0.0;
    });
    c.grad = E([&](const Eigen::VectorXd& v) {
      const double g = subgradient(frame, f, v).norm();
      return g == 0.0 ? 0.0 : std::pow(g, q);
    });
    c.mass = E([&](const Eigen::VectorXd& v) {
      const double fv = std::abs(f.eval(v));
      return fv == 0.0 ? 0.0 : std::pow(fv, q);
    });
    c.half = E([&](const Eigen::VectorXd& v) {
      const double fv = std::abs(f.eval(v));
      return fv == 0.0 ? 0.0 : std::pow(fv, q / 2.0);
    });
    // Ground-state gradient |grad(f e^{-U/q})|^q e^{U} against mu equals the
    // Lebesgue integral of |grad(f e^{-U/q})|^q over the support.
    c.grad_ground = E([&](const Eigen::VectorXd& v) {
      const Eigen::VectorXd gf = subgradient(frame, f, v);
      const double Nv = N.eval(v);
      const Eigen::VectorXd gU =
          p * std::pow(Nv, p - 1.0) * subgradient(frame, N, v);
      const Eigen::VectorXd g = gf - (f.eval(v) / q) * gU;
      const double gn = g.norm();
      return gn == 0.0 ? 0.0 : std::pow(gn, q);
    });
    c.l1_ball = E([&](const Eigen::VectorXd& v) {
      const double fv = std::abs(f.eval(v));
      return kaplan_norm(frame, v) <= R ? std::pow(fv, q / 2.0) : 0.0;
    });
    cols.push_back(std::move(c));
  }

  const double A = ub_fit.A.value_or(0.0);
  const double B = ub_fit.B.value_or(0.0);
  const double Q = frame.qdim;
  const double rp_ball = std::pow(R, p);
  const double shape = 1.0 + std::pow(delta, -Q / q);

  double c_ball = 0.0, c_comp = 0.0;
  std::vector<DecompositionRow> rows;
  for (const Collected& c : cols) {
    DecompositionRow row;
    row.member = c.id;
    row.ball_lhs = c.lhs_ball;
    // Lebesgue SPI applied to f e^{-U/q}, multiplied back by e^{R^p}.
    const double l1_sq = c.l1_ball * c.l1_ball * measure.Z.value;
    row.ball_rhs =
        delta * c.grad_ground +
        (rp_ball > 600.0 ? std::numeric_limits<double>::infinity()
                         : std::exp(rp_ball) * shape * l1_sq);
    row.comp_lhs = c.lhs_comp;
    row.comp_rhs = eps * c.grad +
                   std::pow(R, -eta_gap) / eps * (A * c.grad + B * c.mass);
    if (row.ball_rhs > 0.0 && std::isfinite(row.ball_rhs))
      c_ball = std::max(c_ball, row.ball_lhs / row.ball_rhs);
    if (row.comp_rhs > 0.0)
      c_comp = std::max(c_comp, row.comp_lhs / row.comp_rhs);
    rows.push_back(row);
  }
  rep.c_ball = c_ball * 1.05;
  rep.c_comp = c_comp * 1.05;
  for (DecompositionRow& row : rows) {
    row.ball_margin = rep.c_ball * row.ball_rhs - row.ball_lhs;
    row.comp_margin = rep.c_comp * row.comp_rhs - row.comp_lhs;
  }
  rep.rows = std::move(rows);
  return rep;
}

}  // namespace sublab
