#include "sublab/families.hpp"

#include <cmath>

namespace sublab {

namespace {

// Smooth compactly supported profile exp(1 - 1/(1-u^2)) on (-1, 1); all of
// its powers are again smooth bumps.
double bump(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}
double bump_deriv(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  return bump(u) * (-2.0 * u / (w * w));
}

// Smooth step: 1 for u <= 0, 0 for u >= 1.
double sstep_raw(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
double sstep(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double a = sstep_raw(1.0 - u);
  const double b = sstep_raw(u);
  return a / (a + b);
}
double sstep_deriv(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = sstep_raw(1.0 - u);
  const double b = sstep_raw(u);
  const double da = -a / ((1.0 - u) * (1.0 - u));
  const double db = b / (u * u);
  return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

// Plateau profile in a nonnegative radius: 1 on [0, plateau], 0 beyond 1.
constexpr double kPlateau = 0.35;
double plateau(double u) { return sstep((u - kPlateau) / (1.0 - kPlateau)); }
double plateau_deriv(double u) {
  return sstep_deriv((u - kPlateau) / (1.0 - kPlateau)) / (1.0 - kPlateau);
}

ScalarField radial_gauge_bump(const FrameSpec& frame, double R) {
  const ScalarField N = gauge_field(frame);
  auto eval = [N, R](const Eigen::VectorXd& v) {
    return plateau(N.eval(v) / R);
  };
  auto grad = [N, R](const Eigen::VectorXd& v) {
    const double u = N.eval(v) / R;
    if (u <= kPlateau || u >= 1.0)
      return Eigen::VectorXd(Eigen::VectorXd::Zero(v.size()));
    return Eigen::VectorXd((plateau_deriv(u) / R) * N.grad(v));
  };
  ScalarField f = ScalarField::analytic(eval, grad);
  f.support = gauge_ball_box(frame, R);
  return f;
}

ScalarField shell_gauge_bump(const FrameSpec& frame, double c, double w) {
  const ScalarField N = gauge_field(frame);
  auto eval = [N, c, w](const Eigen::VectorXd& v) {
    return bump((N.eval(v) - c) / w);
  };
  auto grad = [N, c, w](const Eigen::VectorXd& v) {
    const double u = (N.eval(v) - c) / w;
    if (std::abs(u) >= 1.0 || N.eval(v) <= 0.0)
      return Eigen::VectorXd(Eigen::VectorXd::Zero(v.size()));
    return Eigen::VectorXd((bump_deriv(u) / w) * N.grad(v));
  };
  ScalarField f = ScalarField::analytic(eval, grad);
  f.support = gauge_ball_box(frame, c + w);
  return f;
}

/// Tube member: plateau in |x| of width w, bump in the center coordinate at
/// offset z0 with half-width dz. These sit on the degeneracy axis where the
/// U-bound weight vanishes. For a one-dimensional center the bump is
/// one-sided in z; otherwise it is a bump in |z|.
ScalarField axis_tube(const FrameSpec& frame, double w, double z0, double dz) {
  const int hd = frame.horizontal_dim();
  const int cd = frame.center_dim();
  auto center_val = [hd, cd](const Eigen::VectorXd& v) {
    return cd == 1 ? v[hd] : v.tail(cd).norm();
  };
  auto eval = [=](const Eigen::VectorXd& v) {
    const double rho = v.head(hd).norm();
    return plateau(rho / w) * bump((center_val(v) - z0) / dz);
  };
  auto grad = [=](const Eigen::VectorXd& v) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
    const double rho = v.head(hd).norm();
    const double cz = center_val(v);
    const double ux = rho / w;
    const double uz = (cz - z0) / dz;
    const double fx = plateau(ux);
    const double fz = bump(uz);
    if (rho > 0.0 && ux > kPlateau && ux < 1.0)
      g.head(hd) = (plateau_deriv(ux) / w) * fz * (v.head(hd) / rho);
    if (std::abs(uz) < 1.0) {
      if (cd == 1)
        g[hd] = fx * bump_deriv(uz) / dz;
      else if (cz > 0.0)
        g.tail(cd) = fx * (bump_deriv(uz) / dz) * (v.tail(cd) / cz);
    }
    return g;
  };
  ScalarField f = ScalarField::analytic(eval, grad);
  Eigen::VectorXd lo(frame.dim), hi(frame.dim);
  lo.head(hd).setConstant(-w);
  hi.head(hd).setConstant(w);
  if (cd == 1) {
    lo[hd] = z0 - dz;
    hi[hd] = z0 + dz;
  } else {
    lo.tail(cd).setConstant(-(z0 + dz));
    hi.tail(cd).setConstant(z0 + dz);
  }
  f.support = Domain(lo, hi);
  return f;
}

ScalarField gauss_poly(std::vector<int> expo, double s) {
  auto poly = [expo](const Eigen::VectorXd& v) {
    double h = 1.0;
    for (std::size_t i = 0; i < expo.size(); ++i)
      for (int k = 0; k < expo[i]; ++k) h *= v[static_cast<int>(i)];
    return h;
  };
  auto eval = [=](const Eigen::VectorXd& v) {
    return poly(v) * std::exp(-v.squaredNorm() / (2.0 * s * s));
  };
  auto grad = [=](const Eigen::VectorXd& v) {
    const double e = std::exp(-v.squaredNorm() / (2.0 * s * s));
    const double h = poly(v);
    Eigen::VectorXd g(v.size());
    for (int i = 0; i < v.size(); ++i) {
      double dh = 0.0;
      if (i < static_cast<int>(expo.size()) && expo[i] > 0) {
        dh = expo[i];
        for (std::size_t j = 0; j < expo.size(); ++j) {
          const int reduce = (static_cast<int>(j) == i) ? 1 : 0;
          for (int k = 0; k < expo[j] - reduce; ++k)
            dh *= v[static_cast<int>(j)];
        }
      }
      g[i] = (dh - h * v[i] / (s * s)) * e;
    }
    return g;
  };
  return ScalarField::analytic(eval, grad);
}

}  // namespace

const char* family_id_name(FamilyId id) {
  switch (id) {
    case FamilyId::RadialBumps: return "radial";
    case FamilyId::ShellBumps: return "shell";
    case FamilyId::AxisConcentrated: return "axis";
    case FamilyId::GaussHermite: return "gauss-hermite";
    case FamilyId::Constants: return "constants";
    case FamilyId::Mixed: return "mixed";
  }
  return "?";
}

FamilyId family_id_from_string(const std::string& name) {
  for (FamilyId id :
       {FamilyId::RadialBumps, FamilyId::ShellBumps, FamilyId::AxisConcentrated,
        FamilyId::GaussHermite, FamilyId::Constants, FamilyId::Mixed})
    if (name == family_id_name(id)) return id;
  fail(ErrorCode::ParseError, "unknown family id '" + name + "'");
}

Domain gauge_ball_box(const FrameSpec& frame, double R) {
  const int hd = frame.horizontal_dim();
  const int cd = frame.center_dim();
  Eigen::VectorXd half(frame.dim);
  half.head(hd).setConstant(R);
  half.tail(cd).setConstant(std::pow(R, frame.gauge_power() / 2.0) /
                            std::sqrt(frame.center_coeff));
  return Domain::centered_box(half);
}

TestFamily make_family(FamilyId id, const MeasureSpec& measure,
                       int count_hint) {
  const FrameSpec& frame = measure.frame;
  const double R = measure.gauge_radius;
  TestFamily fam;
  fam.id = id;
  auto add = [&](std::string name, ScalarField field) {
    fam.members.push_back({std::move(name), std::move(field)});
  };

  switch (id) {
    case FamilyId::RadialBumps: {
      const int count = count_hint > 0 ? count_hint : 8;
      for (int i = 0; i < count; ++i) {
        const double frac = 0.30 + 0.65 * i / std::max(1, count - 1);
        add("radial-" + std::to_string(i), radial_gauge_bump(frame, frac * R));
      }
      break;
    }
    case FamilyId::ShellBumps: {
      const int count = count_hint > 0 ? count_hint : 8;
      for (int i = 0; i < count; ++i) {
        const double c = (0.35 + 0.5 * i / std::max(1, count - 1)) * R;
        const double w = 0.45 * c;
        add("shell-" + std::to_string(i), shell_gauge_bump(frame, c, w));
      }
      break;
    }
    case FamilyId::AxisConcentrated: {
      // Tube parameters follow the proof's certificate curve: gauge scale
      // grid R_k, offsets z0 = R_k^s/(2 sqrt(c)) so N ~ R_k on the tube,
      // widths shrinking like 1/R_k.
      const int count = count_hint > 0 ? count_hint : 12;
      const double s = frame.gauge_power();
      const double rmin = 1.15, rmax = 4.0;
      for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / std::max(1, count - 1);
        const double r = rmin * std::pow(rmax / rmin, t);
        const double z0 =
            std::pow(r, s / 2.0) / (2.0 * std::sqrt(frame.center_coeff)) +
            0.35;
        const double w = 1.7 / r;
        const double dz = 0.25 + z0 / 3.0;
        add("axis-" + std::to_string(i), axis_tube(frame, w, z0, dz));
      }
      break;
    }
    case FamilyId::GaussHermite: {
      const double s = 0.45 * R;
      const int D = frame.dim;
      std::vector<std::vector<int>> exps;
      exps.push_back(std::vector<int>(D, 0));
      for (int i = 0; i < D; ++i) {
        std::vector<int> e(D, 0);
        e[i] = 1;
        exps.push_back(e);
      }
      for (int i = 0; i < D && static_cast<int>(exps.size()) < 12; ++i) {
        std::vector<int> e(D, 0);
        e[i] = 2;
        exps.push_back(e);
      }
      if (D >= 2) {
        std::vector<int> e(D, 0);
        e[0] = 1;
        e[D - 1] = 1;
        exps.push_back(e);
      }
      const int count = count_hint > 0
                            ? std::min<int>(count_hint, exps.size())
                            : static_cast<int>(exps.size());
      for (int i = 0; i < count; ++i)
        add("gh-" + std::to_string(i), gauss_poly(exps[i], s));
      break;
    }
    case FamilyId::Constants: {
      auto constant = [](double c) {
        return ScalarField::analytic(
            [c](const Eigen::VectorXd&) { return c; },
            [](const Eigen::VectorXd& v) {
              return Eigen::VectorXd(Eigen::VectorXd::Zero(v.size()));
            });
      };
      add("const-1", constant(1.0));
      add("const-2", constant(2.0));
      break;
    }
    case FamilyId::Mixed: {
      const int quarter =
          count_hint > 0 ? std::max(1, count_hint / 4) : 12;
      for (FamilyId part :
           {FamilyId::RadialBumps, FamilyId::ShellBumps,
            FamilyId::AxisConcentrated, FamilyId::GaussHermite}) {
        TestFamily sub = make_family(part, measure, quarter);
        for (auto& m : sub.members) fam.members.push_back(std::move(m));
      }
      break;
    }
  }
  return fam;
}

TestFamily split_family(const TestFamily& family, int parity) {
  TestFamily out;
  out.id = family.id;
  out.version = family.version;
  for (std::size_t i = 0; i < family.members.size(); ++i)
    if (static_cast<int>(i % 2) == parity)
      out.members.push_back(family.members[i]);
  return out;
}

TestFamily truncate_family(const TestFamily& family, std::size_t count) {
  TestFamily out;
  out.id = family.id;
  out.version = family.version;
  for (std::size_t i = 0; i < family.members.size() && i < count; ++i)
    out.members.push_back(family.members[i]);
  return out;
}

}  // namespace sublab
