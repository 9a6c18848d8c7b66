#include "sublab/frames.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "sublab/numerics.hpp"

namespace sublab {

namespace {

constexpr double kNearOriginCut = 1e-3;

Eigen::VectorXd normal_unit_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd t(dim);
  do {
    for (int i = 0; i < dim; ++i) t[i] = gauss(rng);
  } while (t.norm() < 1e-12);
  return t / t.norm();
}

double fd_step(double base, const Eigen::VectorXd& v) {
  return base * std::max(1.0, v.norm());
}

void check_fd_step(double h, const Eigen::VectorXd& v) {
  const double floor =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, v.norm());
  if (h < floor)
    fail(ErrorCode::FDStepUnderflow,
         "finite-difference step " + std::to_string(h) +
             " is below the safe bound at this point");
}

}  // namespace

const char* frame_kind_name(FrameKind kind) {
  switch (kind) {
    case FrameKind::Metivier: return "metivier";
    case FrameKind::Grushin: return "grushin";
    case FrameKind::HeisenbergGreiner: return "heisenberg-greiner";
  }
  return "?";
}

FrameKind frame_kind_from_string(const std::string& name) {
  if (name == "metivier") return FrameKind::Metivier;
  if (name == "grushin") return FrameKind::Grushin;
  if (name == "heisenberg-greiner" || name == "heisenberg_greiner")
    return FrameKind::HeisenbergGreiner;
  fail(ErrorCode::ParseError, "unknown frame kind '" + name + "'");
}

double FrameSpec::gauge_power() const {
  switch (kind) {
    case FrameKind::Metivier: return 4.0;
    case FrameKind::Grushin: return 2.0 + 2.0 * gamma;
    case FrameKind::HeisenbergGreiner: return 4.0 * zeta;
  }
  return 4.0;
}

std::string FrameSpec::describe() const {
  std::ostringstream os;
  os << "kind=" << frame_kind_name(kind) << ";n=" << n << ";m=" << m;
  if (kind == FrameKind::Grushin) os << ";gamma=" << format_double(gamma);
  if (kind == FrameKind::HeisenbergGreiner)
    os << ";zeta=" << format_double(zeta);
  if (kind == FrameKind::Metivier) {
    for (std::size_t k = 0; k < J.size(); ++k) {
      os << ";J" << (k + 1) << "=";
      const auto& Jk = J[k];
      for (int r = 0; r < Jk.rows(); ++r)
        for (int c = 0; c < Jk.cols(); ++c) {
          if (r + c > 0) os << ",";
          os << format_double(Jk(r, c));
        }
    }
  }
  return os.str();
}

GroupPoint GroupPoint::from_flat(const FrameSpec& frame,
                                 const Eigen::VectorXd& v) {
  if (v.size() != frame.dim)
    fail(ErrorCode::BadDimension, "flat point has wrong length");
  GroupPoint p;
  p.x = frame.horizontal(v);
  p.z = frame.center(v);
  return p;
}

ScalarField ScalarField::analytic(
    std::function<double(const Eigen::VectorXd&)> eval,
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad,
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess) {
  ScalarField f;
  f.eval = std::move(eval);
  f.grad = std::move(grad);
  f.hess = std::move(hess);
  f.mode = GradMode::Analytic;
  return f;
}

ScalarField ScalarField::numeric(
    std::function<double(const Eigen::VectorXd&)> eval, double h_fd) {
  ScalarField f;
  f.eval = std::move(eval);
  f.mode = GradMode::CentralFD;
  f.h_fd = h_fd;
  return f;
}

FrameSpec build_frame(const FrameInput& input) {
  FrameSpec f;
  f.kind = input.kind;
  f.n = input.n;
  f.m = input.m;
  f.gamma = input.gamma;
  f.zeta = input.zeta;
  f.J = input.J;

  if (f.n < 1) fail(ErrorCode::BadDimension, "n must be a positive integer");

  switch (f.kind) {
    case FrameKind::Metivier: {
      if (f.m < 1)
        fail(ErrorCode::BadDimension, "m must be a positive integer");
      if (static_cast<int>(f.J.size()) != f.m)
        fail(ErrorCode::BadDimension,
             "expected " + std::to_string(f.m) + " J matrices, got " +
                 std::to_string(f.J.size()));
      const int d = 2 * f.n;
      for (int k = 0; k < f.m; ++k) {
        if (f.J[k].rows() != d || f.J[k].cols() != d)
          fail(ErrorCode::BadDimension,
               "J" + std::to_string(k + 1) + " must be " + std::to_string(d) +
                   "x" + std::to_string(d));
        if (((f.J[k].transpose() + f.J[k]).array() != 0.0).any())
          fail(ErrorCode::NonSkewMatrix,
               "J" + std::to_string(k + 1) + " is not skew-symmetric");
      }
      f.dim = 2 * f.n + f.m;
      f.ell = 2 * f.n;
      f.qdim = 2.0 * f.n + 2.0 * f.m;
      f.center_coeff = 16.0;

      // Probabilistic nondegeneracy / H-type probe over 64 unit directions.
      std::mt19937_64 rng(0x5b1a6f00dULL);
      bool h_type = true;
      double smin_all = std::numeric_limits<double>::infinity();
      double smax_all = 0.0;
      for (int probe = 0; probe < 64; ++probe) {
        const Eigen::VectorXd t = normal_unit_vector(rng, f.m);
        Eigen::MatrixXd Jt = Eigen::MatrixXd::Zero(d, d);
        for (int k = 0; k < f.m; ++k) Jt += t[k] * f.J[k];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jt);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        if (smin <= 1e-9)
          fail(ErrorCode::DegenerateJ,
               "J_t is nearly singular for some unit direction t (smallest "
               "singular value " +
                   std::to_string(smin) + ")");
        smin_all = std::min(smin_all, smin);
        smax_all = std::max(smax_all, smax);
        const Eigen::MatrixXd gram = Jt.transpose() * Jt;
        if ((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() >
            1e-12)
          h_type = false;
      }
      f.is_h_type = h_type;
      f.comparability_band =
          std::max(smax_all * smax_all, 1.0 / (smin_all * smin_all));
      break;
    }
    case FrameKind::Grushin: {
      if (f.m < 1)
        fail(ErrorCode::BadDimension, "m must be a positive integer");
      if (f.gamma < 0.0)
        fail(ErrorCode::BadExponent, "gamma must be >= 0");
      f.dim = f.n + f.m;
      f.ell = f.n + f.m;
      f.qdim = f.n + (1.0 + f.gamma) * f.m;
      f.center_coeff = (1.0 + f.gamma) * (1.0 + f.gamma);
      f.is_h_type = false;
      break;
    }
    case FrameKind::HeisenbergGreiner: {
      if (f.zeta < 1.0)
        fail(ErrorCode::BadExponent, "zeta must be >= 1");
      f.m = 1;
      f.dim = 2 * f.n + 1;
      f.ell = 2 * f.n;
      f.qdim = 2.0 * f.n + 2.0 * f.zeta;
      f.is_h_type = false;
      // Calibrate the t^2 coefficient in N so that |grad_G N| =
      // |x|^{2z-1}/N^{2z-1} holds; bisection on a probe point.
      Eigen::VectorXd probe = Eigen::VectorXd::Zero(f.dim);
      probe[0] = 1.0;
      if (f.n > 1) probe[1] = 0.37;
      probe[f.dim - 1] = 0.8;
      auto mismatch = [&](double c) {
        FrameSpec trial = f;
        trial.center_coeff = c;
        double gsq, slap;
        gauge_quantities(trial, probe, gsq, slap);
        const double rho = trial.horizontal(probe).norm();
        const double N = kaplan_norm(trial, probe);
        const double target =
            std::pow(rho / N, 2.0 * (2.0 * trial.zeta - 1.0));
        return gsq - target;
      };
      double lo = 0.5, hi = 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mismatch(mid) > 0.0)
          hi = mid;
        else
          lo = mid;
      }
      f.center_coeff = 0.5 * (lo + hi);
      break;
    }
  }
  return f;
}

FrameSpec make_h1() {
  FrameInput in;
  in.kind = FrameKind::Metivier;
  in.n = 1;
  in.m = 1;
  Eigen::MatrixXd J(2, 2);
  J << 0, 1, -1, 0;
  in.J = {J};
  return build_frame(in);
}

FrameSpec make_quaternionic() {
  // Left multiplication by i, j, k on R^4 identified with the quaternions.
  FrameInput in;
  in.kind = FrameKind::Metivier;
  in.n = 2;
  in.m = 3;
  Eigen::MatrixXd Ji(4, 4), Jj(4, 4), Jk(4, 4);
  Ji << 0, -1, 0, 0,
        1,  0, 0, 0,
        0,  0, 0, -1,
        0,  0, 1, 0;
  Jj << 0, 0, -1, 0,
        0, 0,  0, 1,
        1, 0,  0, 0,
        0, -1, 0, 0;
  Jk << 0, 0, 0, -1,
        0, 0, -1, 0,
        0, 1,  0, 0,
        1, 0,  0, 0;
  in.J = {Ji, Jj, Jk};
  return build_frame(in);
}

FrameSpec make_grushin(int n, int m, double gamma) {
  FrameInput in;
  in.kind = FrameKind::Grushin;
  in.n = n;
  in.m = m;
  in.gamma = gamma;
  return build_frame(in);
}

FrameSpec make_heisenberg_greiner(int n, double zeta) {
  FrameInput in;
  in.kind = FrameKind::HeisenbergGreiner;
  in.n = n;
  in.zeta = zeta;
  return build_frame(in);
}

void check_point(const FrameSpec& frame, const GroupPoint& p) {
  if (p.x.size() != frame.horizontal_dim() ||
      p.z.size() != frame.center_dim())
    fail(ErrorCode::BadDimension, "point does not conform to the frame");
}

GroupPoint group_law(const FrameSpec& frame, const GroupPoint& a,
                     const GroupPoint& b) {
  if (frame.kind != FrameKind::Metivier)
    fail(ErrorCode::KindMismatch,
         "the group law is defined only on Métivier frames");
  check_point(frame, a);
  check_point(frame, b);
  GroupPoint out;
  out.x = a.x + b.x;
  out.z = a.z + b.z;
  for (int k = 0; k < frame.m; ++k)
    out.z[k] += 0.5 * (frame.J[k] * a.x).dot(b.x);
  return out;
}

GroupPoint group_inverse(const FrameSpec& frame, const GroupPoint& a) {
  if (frame.kind != FrameKind::Metivier)
    fail(ErrorCode::KindMismatch,
         "the group law is defined only on Métivier frames");
  check_point(frame, a);
  return GroupPoint{-a.x, -a.z};
}

namespace {

/// N^s = |x|^s + c |z|^2 with s the gauge power; value, euclidean gradient,
/// euclidean Hessian.
void gauge_G(const FrameSpec& frame, const Eigen::VectorXd& v, double& G,
             Eigen::VectorXd* gradG, Eigen::MatrixXd* hessG) {
  const int hd = frame.horizontal_dim();
  const int cd = frame.center_dim();
  const Eigen::VectorXd x = v.head(hd);
  const Eigen::VectorXd z = v.tail(cd);
  const double s = frame.gauge_power();
  const double c = frame.center_coeff;
  const double rho = x.norm();
  G = std::pow(rho, s) + c * z.squaredNorm();
  if (gradG) {
    gradG->setZero(frame.dim);
    if (rho > 0.0)
      gradG->head(hd) = s * std::pow(rho, s - 2.0) * x;
    gradG->tail(cd) = 2.0 * c * z;
  }
  if (hessG) {
    hessG->setZero(frame.dim, frame.dim);
    if (rho > 0.0) {
      hessG->topLeftCorner(hd, hd) =
          s * std::pow(rho, s - 2.0) *
              Eigen::MatrixXd::Identity(hd, hd) +
          s * (s - 2.0) * std::pow(rho, s - 4.0) * (x * x.transpose());
    }
    hessG->bottomRightCorner(cd, cd) =
        2.0 * c * Eigen::MatrixXd::Identity(cd, cd);
  }
}

}  // namespace

double kaplan_norm(const FrameSpec& frame, const Eigen::VectorXd& v) {
  if (v.size() != frame.dim)
    fail(ErrorCode::BadDimension, "point has wrong dimension");
  double G;
  gauge_G(frame, v, G, nullptr, nullptr);
  return std::pow(G, 1.0 / frame.gauge_power());
}

Eigen::VectorXd dilate(const FrameSpec& frame, const Eigen::VectorXd& v,
                       double lambda) {
  const int hd = frame.horizontal_dim();
  const int cd = frame.center_dim();
  Eigen::VectorXd out(v.size());
  double center_exp = 2.0;
  if (frame.kind == FrameKind::Grushin) center_exp = 1.0 + frame.gamma;
  if (frame.kind == FrameKind::HeisenbergGreiner)
    center_exp = 2.0 * frame.zeta;
  out.head(hd) = lambda * v.head(hd);
  out.tail(cd) = std::pow(lambda, center_exp) * v.tail(cd);
  return out;
}

Eigen::MatrixXd field_coefficients(const FrameSpec& frame,
                                   const Eigen::VectorXd& v) {
  const int hd = frame.horizontal_dim();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(frame.ell, frame.dim);
  switch (frame.kind) {
    case FrameKind::Metivier: {
      A.topLeftCorner(hd, hd).setIdentity();
      const Eigen::VectorXd x = v.head(hd);
      for (int k = 0; k < frame.m; ++k)
        A.col(hd + k) = 0.5 * (frame.J[k] * x);
      break;
    }
    case FrameKind::Grushin: {
      const double rho_g = std::pow(v.head(frame.n).norm(), frame.gamma);
      A.topLeftCorner(frame.n, frame.n).setIdentity();
      for (int j = 0; j < frame.m; ++j)
        A(frame.n + j, frame.n + j) = rho_g;
      break;
    }
    case FrameKind::HeisenbergGreiner: {
      const int n = frame.n;
      const Eigen::VectorXd w = v.head(2 * n);
      const double rho = w.norm();
      const double coeff =
          2.0 * frame.zeta *
          (rho > 0.0 || frame.zeta == 1.0
               ? std::pow(rho, 2.0 * frame.zeta - 2.0)
               : 0.0);
      A.topLeftCorner(2 * n, 2 * n).setIdentity();
      for (int j = 0; j < n; ++j) {
        A(j, frame.dim - 1) = coeff * w[n + j];       // X_j: +2z y_j |w|^{2z-2}
        A(n + j, frame.dim - 1) = -coeff * w[j];      // Y_j: -2z x_j |w|^{2z-2}
      }
      break;
    }
  }
  return A;
}

namespace {

Eigen::VectorXd euclidean_gradient(const ScalarField& f,
                                   const Eigen::VectorXd& v) {
  if (f.has_grad()) return f.grad(v);
  const double h = fd_step(f.h_fd, v);
  check_fd_step(h, v);
  Eigen::VectorXd g(v.size());
  Eigen::VectorXd w = v;
  for (int i = 0; i < v.size(); ++i) {
    const double vi = v[i];
    w[i] = vi + h;
    const double fp = f.eval(w);
    w[i] = vi - h;
    const double fm = f.eval(w);
    w[i] = vi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

Eigen::VectorXd subgradient(const FrameSpec& frame, const ScalarField& f,
                            const Eigen::VectorXd& v) {
  return field_coefficients(frame, v) * euclidean_gradient(f, v);
}

double subgradient_norm(const FrameSpec& frame, const ScalarField& f,
                        const Eigen::VectorXd& v) {
  return subgradient(frame, f, v).norm();
}

FieldApplication apply_fields(const FrameSpec& frame, const ScalarField& f,
                              const Eigen::VectorXd& v) {
  FieldApplication out;
  const Eigen::MatrixXd A = field_coefficients(frame, v);
  out.subgrad = A * euclidean_gradient(f, v);
  if (f.has_hess()) {
    // The supported families' fields annihilate their own coefficients, so
    // sum_i X_i(X_i f) = tr(A^T A Hess f); no first-order drift term.
    out.sublap = (A.transpose() * A * f.hess(v)).trace();
  } else {
    // Nested central differences: X_i g with g = X_i f, stepping along the
    // field direction frozen at v.
    const double h2 = 1e-4 * std::max(1.0, v.norm());
    check_fd_step(h2, v);
    double acc = 0.0;
    for (int i = 0; i < frame.ell; ++i) {
      const Eigen::VectorXd dir = A.row(i).transpose();
      auto xi_f = [&](const Eigen::VectorXd& w) {
        return (field_coefficients(frame, w) * euclidean_gradient(f, w))(i);
      };
      acc += (xi_f(v + h2 * dir) - xi_f(v - h2 * dir)) / (2.0 * h2);
    }
    out.sublap = acc;
  }
  return out;
}

ScalarField gauge_field(const FrameSpec& frame) {
  const FrameSpec f = frame;
  const double s = frame.gauge_power();
  auto value = [f](const Eigen::VectorXd& v) { return kaplan_norm(f, v); };
  auto gradN = [f, s](const Eigen::VectorXd& v) {
    double G;
    Eigen::VectorXd gG;
    gauge_G(f, v, G, &gG, nullptr);
    if (G <= 0.0) fail(ErrorCode::OriginSingularity, "gauge gradient at 0");
    return Eigen::VectorXd((1.0 / s) * std::pow(G, 1.0 / s - 1.0) * gG);
  };
  auto hessN = [f, s](const Eigen::VectorXd& v) {
    double G;
    Eigen::VectorXd gG;
    Eigen::MatrixXd hG;
    gauge_G(f, v, G, &gG, &hG);
    if (G <= 0.0) fail(ErrorCode::OriginSingularity, "gauge Hessian at 0");
    const double a = 1.0 / s;
    Eigen::MatrixXd H = a * std::pow(G, a - 1.0) * hG +
                        a * (a - 1.0) * std::pow(G, a - 2.0) *
                            (gG * gG.transpose());
    return H;
  };
  return ScalarField::analytic(value, gradN, hessN);
}

void gauge_quantities(const FrameSpec& frame, const Eigen::VectorXd& v,
                      double& grad_norm_sq, double& sublap) {
  double G;
  Eigen::VectorXd gG;
  Eigen::MatrixXd hG;
  gauge_G(frame, v, G, &gG, &hG);
  if (G <= 0.0)
    fail(ErrorCode::OriginSingularity,
         "gauge identities are undefined at the origin");
  const Eigen::MatrixXd A = field_coefficients(frame, v);
  const double s = frame.gauge_power();
  const double a = 1.0 / s;
  const double gsqG = (A * gG).squaredNorm();
  const double slapG = (A.transpose() * A * hG).trace();
  grad_norm_sq = a * a * std::pow(G, 2.0 * a - 2.0) * gsqG;
  sublap = a * std::pow(G, a - 1.0) * slapG +
           a * (a - 1.0) * std::pow(G, a - 2.0) * gsqG;
}

GaugeReport gauge_identities(const FrameSpec& frame, const Eigen::VectorXd& v,
                             GradMode mode) {
  const double N = kaplan_norm(frame, v);
  if (N == 0.0)
    fail(ErrorCode::OriginSingularity,
         "gauge identities are undefined at the origin");
  GaugeReport rep;
  rep.point = v;
  rep.N = N;

  const double rho = frame.horizontal(v).norm();
  const int hd = frame.horizontal_dim();

  double m_gsq, m_slap, m_mix;
  if (mode == GradMode::Analytic) {
    gauge_quantities(frame, v, m_gsq, m_slap);
    const ScalarField Nf = gauge_field(frame);
    Eigen::VectorXd gN = subgradient(frame, Nf, v);
    Eigen::VectorXd grho = Eigen::VectorXd::Zero(frame.ell);
    if (rho > 0.0) {
      Eigen::VectorXd grad_rho = Eigen::VectorXd::Zero(frame.dim);
      grad_rho.head(hd) = v.head(hd) / rho;
      grho = field_coefficients(frame, v) * grad_rho;
    }
    m_mix = gN.dot(grho);
  } else {
    const FrameSpec f = frame;
    ScalarField Nf =
        ScalarField::numeric([f](const Eigen::VectorXd& w) {
          return kaplan_norm(f, w);
        });
    FieldApplication app = apply_fields(frame, Nf, v);
    m_gsq = app.subgrad.squaredNorm();
    m_slap = app.sublap;
    ScalarField rhof = ScalarField::numeric([hd](const Eigen::VectorXd& w) {
      return w.head(hd).norm();
    });
    m_mix = app.subgrad.dot(subgradient(frame, rhof, v));
  }

  // Predicted closed forms. The sub-Laplacian constant is Q - 1, as forced
  // by the fundamental-solution identity Delta_G N^{2-Q} = 0 away from 0.
  double p_gsq, p_slap, p_mix;
  double grad_exp;  // |grad N| = rho^e / N^e
  switch (frame.kind) {
    case FrameKind::Metivier: grad_exp = 1.0; break;
    case FrameKind::Grushin: grad_exp = frame.gamma; break;
    case FrameKind::HeisenbergGreiner:
      grad_exp = 2.0 * frame.zeta - 1.0;
      break;
    default: grad_exp = 1.0; break;
  }
  const double ratio = rho / N;
  p_gsq = std::pow(ratio, 2.0 * grad_exp);
  p_slap = (frame.qdim - 1.0) * std::pow(ratio, 2.0 * grad_exp) / N;
  p_mix = std::pow(ratio, 2.0 * grad_exp + 1.0);

  const bool comparability =
      frame.kind == FrameKind::Metivier && !frame.is_h_type;
  const bool near_origin = N <= kNearOriginCut;
  const bool near_axis = rho <= kNearOriginCut;

  auto entry = [&](double measured, double predicted,
                   bool divides_by_rho) {
    GaugeEntry e;
    e.measured = measured;
    e.predicted = predicted;
    e.comparability_only = comparability;
    e.skipped = near_origin || (divides_by_rho && near_axis);
    const double scale = std::max(std::abs(predicted), 1e-300);
    e.rel_dev = std::abs(measured - predicted) / scale;
    return e;
  };
  rep.grad_norm_sq = entry(m_gsq, p_gsq, false);
  rep.sublap = entry(m_slap, p_slap, false);
  rep.radial_mix = entry(m_mix, p_mix, true);
  return rep;
}

double schrodinger_potential(const FrameSpec& frame, double p,
                             const Eigen::VectorXd& v) {
  const double N = kaplan_norm(frame, v);
  if (N == 0.0)
    fail(ErrorCode::OriginSingularity,
         "the Schrödinger potential is undefined at the origin");
  double gsq, slap;
  gauge_quantities(frame, v, gsq, slap);
  const double grad_U_sq = p * p * std::pow(N, 2.0 * p - 2.0) * gsq;
  const double lap_U = p * std::pow(N, p - 1.0) * slap +
                       p * (p - 1.0) * std::pow(N, p - 2.0) * gsq;
  return 0.25 * grad_U_sq - 0.5 * lap_U;
}

void check_eta_exponents(const FrameSpec& frame, double p, double q) {
  if (!(q > 1.0 && q <= 2.0))
    fail(ErrorCode::ExponentOutOfRange, "eta weight requires q in (1, 2]");
  auto require_conjugate = [&]() {
    if (std::abs(q - p / (p - 1.0)) > 1e-9)
      fail(ErrorCode::ExponentOutOfRange,
           "q must be the Hölder conjugate of p");
  };
  switch (frame.kind) {
    case FrameKind::Metivier:
      if (!(p > 2.0))
        fail(ErrorCode::ExponentOutOfRange,
             "Métivier weights require p > 2");
      if (q != 2.0) require_conjugate();
      break;
    case FrameKind::Grushin:
      if (!(p > frame.gamma + 1.0))
        fail(ErrorCode::ExponentOutOfRange,
             "Grushin weights require p > gamma + 1");
      if (q == 2.0) {
        if (!(frame.gamma < 1.0))
          fail(ErrorCode::ExponentOutOfRange,
               "the Grushin q = 2 weight requires gamma < 1");
      } else {
        require_conjugate();
      }
      break;
    case FrameKind::HeisenbergGreiner:
      if (!(p > 2.0 * frame.zeta))
        fail(ErrorCode::ExponentOutOfRange,
             "Heisenberg-Greiner weights require p > 2 zeta");
      require_conjugate();
      break;
  }
}

double eta_weight(const FrameSpec& frame, double p, double q,
                  const Eigen::VectorXd& v) {
  check_eta_exponents(frame, p, q);
  const double rho = frame.horizontal(v).norm();
  const double N = kaplan_norm(frame, v);
  if (N == 0.0) return 0.0;
  switch (frame.kind) {
    case FrameKind::Metivier:
      if (q == 2.0)
        return rho * rho * std::pow(N, 2.0 * (p - 2.0));
      return std::pow(rho, q) * std::pow(N, p - q);
    case FrameKind::Grushin: {
      const double g = frame.gamma;
      if (q == 2.0)
        return std::pow(rho, 2.0 * g) * std::pow(N, 2.0 * (p - g - 1.0));
      return std::pow(rho, g * q) * std::pow(N, p - g * q);
    }
    case FrameKind::HeisenbergGreiner: {
      const double g = 2.0 * frame.zeta - 1.0;
      return std::pow(rho, g * q) * std::pow(N, p - g * q);
    }
  }
  return 0.0;
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSkewMatrix: return "NonSkewMatrix";
    case ErrorCode::DegenerateJ: return "DegenerateJ";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::FDStepUnderflow: return "FDStepUnderflow";
    case ErrorCode::OriginSingularity: return "OriginSingularity";
    case ErrorCode::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorCode::UnusableSamples: return "UnusableSamples";
    case ErrorCode::SupportLeak: return "SupportLeak";
    case ErrorCode::DegenerateFamily: return "DegenerateFamily";
    case ErrorCode::InsufficientCurve: return "InsufficientCurve";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace sublab
