#include <algorithm>
#include <cmath>
#include <limits>

#include "sublab/inequalities.hpp"

namespace sublab {

namespace {

constexpr double kFitSlack = 1.05;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_single_constant(InequalityId id) {
  switch (id) {
    case InequalityId::UBOUND_L2:
    case InequalityId::UBOUND_LQ:
    case InequalityId::GRUSHIN_UBOUND_LQ:
    case InequalityId::GRUSHIN_UBOUND_L2:
    case InequalityId::HG_UBOUND_LQ:
      return false;
    default:
      return true;
  }
}

bool is_ubound(InequalityId id) { return !is_single_constant(id); }

bool uses_eps(InequalityId id) {
  switch (id) {
    case InequalityId::HARDY_DIMFREE_L2:
    case InequalityId::HARDY_DIMFREE_LQ:
    case InequalityId::LEBESGUE_SPI:
    case InequalityId::SPI_L2:
    case InequalityId::SPI_LQ:
      return true;
    default:
      return false;
  }
}

void require_conjugate(double p, double q) {
  if (std::abs(q - p / (p - 1.0)) > 1e-9)
    fail(ErrorCode::ExponentOutOfRange,
         "q must be the Hölder conjugate of p");
}

double norm_pow(double base, double e) {
  if (base <= 0.0) return e == 0.0 ? 1.0 : 0.0;
  return std::pow(base, e);
}

}  // namespace

const char* inequality_id_name(InequalityId id) {
  switch (id) {
    case InequalityId::UBOUND_L2: return "UBOUND_L2";
    case InequalityId::UBOUND_LQ: return "UBOUND_LQ";
    case InequalityId::HARDY_GENERAL: return "HARDY_GENERAL";
    case InequalityId::HARDY_DIMFREE_L2: return "HARDY_DIMFREE_L2";
    case InequalityId::HARDY_DIMFREE_LQ: return "HARDY_DIMFREE_LQ";
    case InequalityId::LEBESGUE_SPI: return "LEBESGUE_SPI";
    case InequalityId::SPI_L2: return "SPI_L2";
    case InequalityId::SPI_LQ: return "SPI_LQ";
    case InequalityId::GRUSHIN_UBOUND_LQ: return "GRUSHIN_UBOUND_LQ";
    case InequalityId::GRUSHIN_UBOUND_L2: return "GRUSHIN_UBOUND_L2";
    case InequalityId::HG_UBOUND_LQ: return "HG_UBOUND_LQ";
  }
  return "?";
}

InequalityId inequality_id_from_string(const std::string& name) {
  for (auto id :
       {InequalityId::UBOUND_L2, InequalityId::UBOUND_LQ,
        InequalityId::HARDY_GENERAL, InequalityId::HARDY_DIMFREE_L2,
        InequalityId::HARDY_DIMFREE_LQ, InequalityId::LEBESGUE_SPI,
        InequalityId::SPI_L2, InequalityId::SPI_LQ,
        InequalityId::GRUSHIN_UBOUND_LQ, InequalityId::GRUSHIN_UBOUND_L2,
        InequalityId::HG_UBOUND_LQ})
    if (name == inequality_id_name(id)) return id;
  fail(ErrorCode::ParseError, "unknown inequality id '" + name + "'");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::HoldsWithinError: return "HoldsWithinError";
    case Verdict::Violated: return "Violated";
  }
  return "?";
}

InequalitySpec make_inequality(InequalityId id, const FrameSpec& frame,
                               double p, double q, double r,
                               std::vector<double> eps_grid) {
  InequalitySpec spec;
  spec.id = id;
  spec.p = p;
  spec.q = q;
  spec.r = r;
  spec.eps_grid = std::move(eps_grid);
  spec.qdim_hint = frame.qdim;

  auto require_kind = [&](FrameKind kind, const char* what) {
    if (frame.kind != kind)
      fail(ErrorCode::KindMismatch,
           std::string(what) + " requires a " +
               frame_kind_name(kind) + " frame");
  };

  switch (id) {
    case InequalityId::UBOUND_L2:
      require_kind(FrameKind::Metivier, "UBOUND_L2");
      if (!(p > 2.0))
        fail(ErrorCode::ExponentOutOfRange, "UBOUND_L2 requires p > 2");
      spec.q = 2.0;
      break;
    case InequalityId::UBOUND_LQ:
      require_kind(FrameKind::Metivier, "UBOUND_LQ");
      if (!(p > 2.0))
        fail(ErrorCode::ExponentOutOfRange, "UBOUND_LQ requires p > 2");
      spec.q = p / (p - 1.0);
      if (q != 2.0 && q != 0.0) require_conjugate(p, q);
      break;
    case InequalityId::GRUSHIN_UBOUND_LQ:
      require_kind(FrameKind::Grushin, "GRUSHIN_UBOUND_LQ");
      if (!(p > frame.gamma + 1.0))
        fail(ErrorCode::ExponentOutOfRange,
             "GRUSHIN_UBOUND_LQ requires p > gamma + 1");
      spec.q = p / (p - 1.0);
      break;
    case InequalityId::GRUSHIN_UBOUND_L2:
      require_kind(FrameKind::Grushin, "GRUSHIN_UBOUND_L2");
      if (!(frame.gamma < 1.0))
        fail(ErrorCode::ExponentOutOfRange,
             "GRUSHIN_UBOUND_L2 requires gamma < 1");
      if (!(p > frame.gamma + 1.0))
        fail(ErrorCode::ExponentOutOfRange,
             "GRUSHIN_UBOUND_L2 requires p > gamma + 1");
      spec.q = 2.0;
      break;
    case InequalityId::HG_UBOUND_LQ:
      require_kind(FrameKind::HeisenbergGreiner, "HG_UBOUND_LQ");
      if (!(p > 2.0 * frame.zeta))
        fail(ErrorCode::ExponentOutOfRange,
             "HG_UBOUND_LQ requires p > 2 zeta");
      spec.q = p / (p - 1.0);
      break;
    case InequalityId::HARDY_GENERAL:
      if (!(r > 1.0 && r <= 2.0))
        fail(ErrorCode::ExponentOutOfRange,
             "HARDY_GENERAL requires r in (1, 2]");
      break;
    case InequalityId::HARDY_DIMFREE_L2:
      if (!(p > 2.0))
        fail(ErrorCode::ExponentOutOfRange,
             "HARDY_DIMFREE_L2 requires p > 2");
      spec.q = 2.0;
      break;
    case InequalityId::HARDY_DIMFREE_LQ:
      if (!(p > 2.0))
        fail(ErrorCode::ExponentOutOfRange,
             "HARDY_DIMFREE_LQ requires p > 2");
      spec.q = p / (p - 1.0);
      break;
    case InequalityId::LEBESGUE_SPI:
      if (!(spec.q > 1.0 && spec.q <= 2.0))
        fail(ErrorCode::ExponentOutOfRange,
             "LEBESGUE_SPI requires q in (1, 2]");
      break;
    case InequalityId::SPI_L2:
      if (!(p > 2.0))
        fail(ErrorCode::ExponentOutOfRange, "SPI_L2 requires p > 2");
      spec.q = 2.0;
      break;
    case InequalityId::SPI_LQ:
      if (!(p > 2.0))
        fail(ErrorCode::ExponentOutOfRange, "SPI_LQ requires p > 2");
      spec.q = p / (p - 1.0);
      break;
  }
  if (uses_eps(id) && spec.eps_grid.empty())
    spec.eps_grid = {0.5, 0.1, 0.02};
  return spec;
}

std::vector<RawTerms> evaluate_raw_terms(const InequalitySpec& spec,
                                         const TestFamily& family,
                                         const MeasureSpec& measure,
                                         EstimateMethod method,
                                         const QuadOptions& opts) {
  const FrameSpec& frame = measure.frame;
  const int hd = frame.horizontal_dim();
  const double q = spec.q;
  const double r = spec.r;
  const double p = measure.p;
  const bool lebesgue = spec.id == InequalityId::LEBESGUE_SPI;
  const ScalarField N = gauge_field(frame);

  const bool hardy_general_refused =
      spec.id == InequalityId::HARDY_GENERAL && hd <= 2;

  auto integrate = [&](const Integrand& g, const std::optional<Domain>& win) {
    if (lebesgue)
      return integrate_box(g, win ? *win : measure.truncation_box, opts);
    return expect_integrand(measure, g, method, opts, win);
  };

  std::vector<RawTerms> out;
  out.reserve(family.members.size());
  for (const FamilyMember& member : family.members) {
    RawTerms raw;
    raw.member = member.id;
    if (hardy_general_refused) {
      raw.skipped = true;
      out.push_back(std::move(raw));
      continue;
    }
    const ScalarField& f = member.field;
    const auto& win = f.support;

    Integrand mass_q = [&](const Eigen::VectorXd& v) {
      return norm_pow(std::abs(f.eval(v)), q);
    };
    Integrand grad_q = [&](const Eigen::VectorXd& v) {
      return norm_pow(subgradient(frame, f, v).norm(), q);
    };
    Integrand half_q = [&](const Eigen::VectorXd& v) {
      return norm_pow(std::abs(f.eval(v)), q / 2.0);
    };

    switch (spec.id) {
      case InequalityId::UBOUND_L2:
      case InequalityId::UBOUND_LQ:
      case InequalityId::GRUSHIN_UBOUND_LQ:
      case InequalityId::GRUSHIN_UBOUND_L2:
      case InequalityId::HG_UBOUND_LQ: {
        Integrand lhs = [&](const Eigen::VectorXd& v) {
          const double fv = std::abs(f.eval(v));
          if (fv == 0.0) return 0.0;
          return eta_weight(frame, p, q, v) * norm_pow(fv, q);
        };
        raw.lhs = integrate(lhs, win);
        raw.terms["grad"] = integrate(grad_q, win);
        raw.terms["mass"] = integrate(mass_q, win);
        break;
      }
      case InequalityId::HARDY_GENERAL: {
        // V = log|x|: Delta_G V = (hd-2)/|x|^2 >= 0 for hd > 2.
        const double dvc = static_cast<double>(hd - 2);
        Integrand lhs = [&](const Eigen::VectorXd& v) {
          const double fv = std::abs(f.eval(v));
          if (fv == 0.0) return 0.0;
          return dvc / v.head(hd).squaredNorm() * norm_pow(fv, r);
        };
        Integrand hardy1 = [&](const Eigen::VectorXd& v) {
          const double g = subgradient(frame, f, v).norm();
          if (g == 0.0) return 0.0;
          const double rho = v.head(hd).norm();
          return norm_pow(rho, r - 2.0) / norm_pow(dvc, r - 1.0) *
                 norm_pow(g, r);
        };
        Integrand hardy2 = [&](const Eigen::VectorXd& v) {
          const double fv = std::abs(f.eval(v));
          if (fv == 0.0) return 0.0;
          const double rho = v.head(hd).norm();
          const Eigen::MatrixXd A = field_coefficients(frame, v);
          Eigen::VectorXd grad_logx = Eigen::VectorXd::Zero(frame.dim);
          grad_logx.head(hd) = v.head(hd) / (rho * rho);
          const double mix = (A * N.grad(v)).dot(A * grad_logx);
          const double gUgV =
              p * std::pow(N.eval(v), p - 1.0) * mix;
          return norm_pow(std::abs(gUgV), r) *
                 norm_pow(rho, 2.0 * (r - 1.0)) / norm_pow(dvc, r - 1.0) *
                 norm_pow(fv, r);
        };
        raw.lhs = integrate(lhs, win);
        raw.terms["hardy1"] = integrate(hardy1, win);
        raw.terms["hardy2"] = integrate(hardy2, win);
        break;
      }
      case InequalityId::HARDY_DIMFREE_L2:
      case InequalityId::HARDY_DIMFREE_LQ: {
        Integrand xweight = [&](const Eigen::VectorXd& v) {
          const double fv = std::abs(f.eval(v));
          if (fv == 0.0) return 0.0;
          return norm_pow(v.head(hd).norm(), q) * norm_pow(fv, q);
        };
        raw.lhs = integrate(mass_q, win);
        raw.terms["grad"] = integrate(grad_q, win);
        raw.terms["xweight"] = integrate(xweight, win);
        break;
      }
      case InequalityId::LEBESGUE_SPI:
      case InequalityId::SPI_L2:
      case InequalityId::SPI_LQ: {
        raw.lhs = integrate(mass_q, win);
        raw.terms["grad"] = integrate(grad_q, win);
        IntegralEstimate h = integrate(half_q, win);
        IntegralEstimate hsq;
        hsq.method = h.method;
        hsq.evals = h.evals;
        hsq.value = h.value * h.value;
        hsq.error = 2.0 * std::abs(h.value) * h.error;
        raw.terms["half_sq"] = hsq;
        break;
      }
    }
    out.push_back(std::move(raw));
  }
  return out;
}

namespace {

struct AssembledRow {
  double fixed = 0.0;       ///< RHS part not multiplied by the fitted constant
  double fixed_err = 0.0;
  double scaled = 0.0;      ///< RHS part multiplied by C (or split into A, B)
  double scaled_err = 0.0;
};

AssembledRow assemble_single(const InequalitySpec& spec, const RawTerms& raw,
                             double eps, double qdim) {
  AssembledRow row;
  switch (spec.id) {
    case InequalityId::HARDY_GENERAL: {
      const auto& t1 = raw.terms.at("hardy1");
      const auto& t2 = raw.terms.at("hardy2");
      row.scaled = t1.value + t2.value;
      row.scaled_err = t1.error + t2.error;
      break;
    }
    case InequalityId::HARDY_DIMFREE_L2:
    case InequalityId::HARDY_DIMFREE_LQ: {
      const auto& g = raw.terms.at("grad");
      const auto& x = raw.terms.at("xweight");
      row.scaled = eps * g.value + x.value / eps;
      row.scaled_err = eps * g.error + x.error / eps;
      break;
    }
    case InequalityId::LEBESGUE_SPI: {
      const auto& g = raw.terms.at("grad");
      const auto& h = raw.terms.at("half_sq");
      row.fixed = eps * g.value;
      row.fixed_err = eps * g.error;
      const double shape = 1.0 + std::pow(eps, -qdim / spec.q);
      row.scaled = shape * h.value;
      row.scaled_err = shape * h.error;
      break;
    }
    case InequalityId::SPI_L2:
    case InequalityId::SPI_LQ: {
      const auto& g = raw.terms.at("grad");
      const auto& h = raw.terms.at("half_sq");
      row.fixed = eps * g.value;
      row.fixed_err = eps * g.error;
      row.scaled = h.value;
      row.scaled_err = h.error;
      break;
    }
    default:
      fail(ErrorCode::RangeError, "assemble_single on a U-bound spec");
  }
  return row;
}

}  // namespace

FittedConstants fit_constants_from_raw(const InequalitySpec& spec,
                                       const std::vector<RawTerms>& raw) {
  FittedConstants fit;
  std::vector<const RawTerms*> rows;
  for (const auto& r : raw)
    if (!r.skipped) rows.push_back(&r);
  if (rows.empty())
    fail(ErrorCode::DegenerateFamily, "no usable members to fit on");

  if (is_ubound(spec.id)) {
    // Two-constant feasibility sweep: B(A) = max_i (L_i - A G_i)/F_i.
    double rho_max = 0.0;
    double mean_g = 0.0, mean_f = 0.0;
    bool any_pos = false;
    for (const auto* r : rows) {
      const double G = r->terms.at("grad").value;
      const double F = r->terms.at("mass").value;
      if (G > 0.0) rho_max = std::max(rho_max, r->lhs.value / G);
      if (F > 0.0 || G > 0.0) any_pos = true;
      mean_g += G;
      mean_f += F;
    }
    if (!any_pos)
      fail(ErrorCode::DegenerateFamily,
           "all members have vanishing right-hand sides");
    mean_g /= static_cast<double>(rows.size());
    mean_f /= static_cast<double>(rows.size());

    std::vector<double> candidates;
    candidates.push_back(0.0);
    if (rho_max > 0.0)
      for (int j = 0; j <= 96; ++j)
        candidates.push_back(rho_max *
                             std::pow(10.0, -4.0 + 4.5 * j / 96.0));
    double best_obj = std::numeric_limits<double>::infinity();
    double best_a = 0.0, best_b = 0.0;
    std::string best_member;
    for (double A : candidates) {
      double B = 0.0;
      std::string extremal;
      bool feasible = true;
      for (const auto* r : rows) {
        const double G = r->terms.at("grad").value;
        const double F = r->terms.at("mass").value;
        const double need = r->lhs.value - A * G;
        if (need <= 0.0) continue;
        if (F <= 0.0) {
          feasible = false;
          break;
        }
        if (need / F > B) {
          B = need / F;
          extremal = r->member;
        }
      }
      if (!feasible) continue;
      const double obj = A * mean_g + B * mean_f;
      if (obj < best_obj) {
        best_obj = obj;
        best_a = A;
        best_b = B;
        best_member = extremal;
      }
    }
    fit.A = best_a * kFitSlack;
    fit.B = best_b * kFitSlack;
    fit.extremal_member = best_member;
    return fit;
  }

  // Single multiplicative constant over the (member, eps) grid.
  const std::vector<double> grid =
      uses_eps(spec.id) ? spec.eps_grid : std::vector<double>{kNaN};
  double c = 0.0;
  std::string extremal;
  bool any = false;
  for (const auto* r : rows) {
    for (double eps : grid) {
      const AssembledRow a = assemble_single(spec, *r, eps, spec.qdim_hint);
      if (a.scaled <= 0.0) continue;
      any = true;
      const double need = (r->lhs.value - a.fixed) / a.scaled;
      if (need > c) {
        c = need;
        extremal = r->member;
      }
    }
  }
  if (!any)
    fail(ErrorCode::DegenerateFamily,
         "all members have vanishing constant terms");
  fit.C = c * kFitSlack;
  fit.extremal_member = extremal;
  return fit;
}

FittedConstants fit_constants(const InequalitySpec& spec,
                              const TestFamily& family,
                              const MeasureSpec& measure,
                              EstimateMethod method, const QuadOptions& opts) {
  if (family.members.size() < 1)
    fail(ErrorCode::DegenerateFamily, "empty family");
  InequalitySpec local = spec;
  local.qdim_hint = measure.frame.qdim;
  return fit_constants_from_raw(
      local, evaluate_raw_terms(local, family, measure, method, opts));
}

CheckReport check_from_raw(const InequalitySpec& spec,
                           const std::vector<RawTerms>& raw,
                           const FittedConstants& constants,
                           FamilyId family_id, const std::string& frame_desc) {
  CheckReport rep;
  rep.id = spec.id;
  rep.family = family_id;
  rep.frame = frame_desc;
  rep.constants = constants;

  const std::vector<double> grid =
      uses_eps(spec.id) ? spec.eps_grid : std::vector<double>{kNaN};

  bool any_violated = false;
  bool all_clear = true;
  double worst = std::numeric_limits<double>::infinity();

  for (const RawTerms& r : raw) {
    if (r.skipped) {
      MemberRow row;
      row.member = r.member;
      row.eps = kNaN;
      row.skipped = true;
      rep.rows.push_back(row);
      continue;
    }
    for (double eps : grid) {
      MemberRow row;
      row.member = r.member;
      row.eps = eps;
      row.lhs = r.lhs.value;
      row.lhs_err = r.lhs.error;
      if (is_ubound(spec.id)) {
        const auto& g = r.terms.at("grad");
        const auto& m = r.terms.at("mass");
        row.rhs = *constants.A * g.value + *constants.B * m.value;
        row.rhs_err = *constants.A * g.error + *constants.B * m.error;
      } else {
        const AssembledRow a = assemble_single(spec, r, eps, spec.qdim_hint);
        row.rhs = a.fixed + *constants.C * a.scaled;
        row.rhs_err = a.fixed_err + *constants.C * a.scaled_err;
      }
      const double denom = std::max(std::abs(row.lhs), 1e-300);
      row.margin = (row.rhs - row.lhs) / denom;
      const double sigma3 = 3.0 * (row.lhs_err + row.rhs_err);
      if (row.lhs - row.rhs > sigma3) any_violated = true;
      if (!(row.rhs - row.lhs > sigma3)) all_clear = false;
      if (row.margin < worst) {
        worst = row.margin;
        rep.worst_member = row.member;
      }
      rep.rows.push_back(row);
    }
  }
  rep.worst_margin = worst;
  rep.verdict = any_violated ? Verdict::Violated
               : all_clear  ? Verdict::Holds
                            : Verdict::HoldsWithinError;
  return rep;
}

CheckReport check_inequality(const InequalitySpec& spec,
                             const TestFamily& family,
                             const MeasureSpec& measure,
                             std::optional<FittedConstants> constants,
                             EstimateMethod method, const QuadOptions& opts) {
  InequalitySpec local = spec;
  local.qdim_hint = measure.frame.qdim;

  if (spec.id == InequalityId::HARDY_GENERAL &&
      measure.frame.horizontal_dim() <= 2) {
    CheckReport rep;
    rep.id = spec.id;
    rep.family = family.id;
    rep.frame = measure.frame.describe();
    rep.note =
        "precondition unmet: V = log|x| requires horizontal dimension > 2; "
        "all members skipped";
    for (const auto& m : family.members) {
      MemberRow row;
      row.member = m.id;
      row.eps = kNaN;
      row.skipped = true;
      rep.rows.push_back(row);
    }
    rep.verdict = Verdict::HoldsWithinError;
    rep.worst_margin = kNaN;
    return rep;
  }

  if (constants) {
    auto raw = evaluate_raw_terms(local, family, measure, method, opts);
    return check_from_raw(local, raw, *constants, family.id,
                          measure.frame.describe());
  }
  // Fit on the even half, evaluate on the held-out odd half.
  TestFamily train = split_family(family, 0);
  TestFamily test = split_family(family, 1);
  if (test.members.empty()) test = train;
  auto raw_train = evaluate_raw_terms(local, train, measure, method, opts);
  FittedConstants fitted = fit_constants_from_raw(local, raw_train);
  auto raw_test = evaluate_raw_terms(local, test, measure, method, opts);
  CheckReport rep = check_from_raw(local, raw_test, fitted, family.id,
                                   measure.frame.describe());
  rep.note = "constants fitted on the even-index half of the family";
  return rep;
}

}  // namespace sublab
