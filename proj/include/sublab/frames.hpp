#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sublab/domain.hpp"
#include "sublab/errors.hpp"

namespace sublab {

enum class FrameKind { Metivier, Grushin, HeisenbergGreiner };

const char* frame_kind_name(FrameKind kind);
FrameKind frame_kind_from_string(const std::string& name);

/// Raw frame description, as read from a frame file or assembled in code.
struct FrameInput {
  FrameKind kind = FrameKind::Metivier;
  int n = 0;
  int m = 0;
  double gamma = 0.0;
  double zeta = 1.0;
  std::vector<Eigen::MatrixXd> J;
};

/// A validated subelliptic structure.
///
/// Métivier: G = R^{2n} x R^m with skew matrices J_1..J_m inducing the group
/// law; Grushin: fields (grad_x, |x|^gamma grad_y) on R^n x R^m;
/// Heisenberg-Greiner: fields X_j = d_{x_j} + 2 zeta y_j |w|^{2zeta-2} d_t,
/// Y_j = d_{y_j} - 2 zeta x_j |w|^{2zeta-2} d_t on R^{2n} x R_t.
struct FrameSpec {
  FrameKind kind = FrameKind::Metivier;
  int n = 0;
  int m = 0;
  double gamma = 0.0;
  double zeta = 1.0;
  std::vector<Eigen::MatrixXd> J;

  // Derived.
  int dim = 0;           ///< ambient dimension D
  int ell = 0;           ///< number of generating fields
  double qdim = 0.0;     ///< homogeneous dimension Q
  bool is_h_type = false;
  double center_coeff = 16.0;  ///< coefficient of |z|^2 (resp. t^2) in N^s
  double comparability_band = 1.0;  ///< c with |J_t x|^2/(|t||x|)^2 in [1/c, c]

  int horizontal_dim() const {
    return kind == FrameKind::Grushin ? n : 2 * n;
  }
  int center_dim() const {
    return kind == FrameKind::HeisenbergGreiner ? 1 : m;
  }
  /// Homogeneity exponent s with N^s = |x|^s + c |z|^2.
  double gauge_power() const;

  Eigen::VectorXd horizontal(const Eigen::VectorXd& v) const {
    return v.head(horizontal_dim());
  }
  Eigen::VectorXd center(const Eigen::VectorXd& v) const {
    return v.tail(center_dim());
  }

  std::string describe() const;
};

struct GroupPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd z;

  Eigen::VectorXd flat() const {
    Eigen::VectorXd v(x.size() + z.size());
    v << x, z;
    return v;
  }
  static GroupPoint from_flat(const FrameSpec& frame, const Eigen::VectorXd& v);
};

enum class GradMode { Analytic, CentralFD };

/// Scalar function on the ambient space with optional analytic euclidean
/// derivatives. Without them, central differences with the stated steps are
/// used (h ~ 1e-5 max(1, |xi|) for first, 1e-4 max(1, |xi|) for second order).
struct ScalarField {
  std::function<double(const Eigen::VectorXd&)> eval;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess;
  GradMode mode = GradMode::CentralFD;
  double h_fd = 1e-5;
  std::optional<Domain> support;  ///< integration window, when compactly supported

  bool has_grad() const { return mode == GradMode::Analytic && grad; }
  bool has_hess() const { return mode == GradMode::Analytic && hess; }

  static ScalarField analytic(
      std::function<double(const Eigen::VectorXd&)> eval,
      std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad,
      std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess = nullptr);
  static ScalarField numeric(std::function<double(const Eigen::VectorXd&)> eval,
                             double h_fd = 1e-5);
};

struct FieldApplication {
  Eigen::VectorXd subgrad;  ///< (X_1 f, ..., X_ell f)
  double sublap = 0.0;      ///< sum_i X_i(X_i f)
};

/// One gauge-identity measurement at a point.
struct GaugeEntry {
  double measured = 0.0;
  double predicted = 0.0;
  double rel_dev = 0.0;
  bool skipped = false;
  bool comparability_only = false;  ///< general Métivier: ratio, not equality
};

struct GaugeReport {
  Eigen::VectorXd point;
  double N = 0.0;
  GaugeEntry grad_norm_sq;  ///< |grad_G N|^2
  GaugeEntry sublap;        ///< Delta_G N
  GaugeEntry radial_mix;    ///< grad_G N . grad_G |x|
};

FrameSpec build_frame(const FrameInput& input);

FrameSpec make_h1();                      ///< n=1, m=1, J = [[0,1],[-1,0]]
FrameSpec make_quaternionic();            ///< n=2, m=3 H-type frame
FrameSpec make_grushin(int n, int m, double gamma);
FrameSpec make_heisenberg_greiner(int n, double zeta);

void check_point(const FrameSpec& frame, const GroupPoint& p);

GroupPoint group_law(const FrameSpec& frame, const GroupPoint& a,
                     const GroupPoint& b);
GroupPoint group_inverse(const FrameSpec& frame, const GroupPoint& a);

double kaplan_norm(const FrameSpec& frame, const Eigen::VectorXd& v);
inline double kaplan_norm(const FrameSpec& frame, const GroupPoint& p) {
  return kaplan_norm(frame, p.flat());
}

/// Anisotropic dilation delta_lambda.
Eigen::VectorXd dilate(const FrameSpec& frame, const Eigen::VectorXd& v,
                       double lambda);

/// ell x D coefficient matrix A with X_i = sum_j A_ij d_j.
Eigen::MatrixXd field_coefficients(const FrameSpec& frame,
                                   const Eigen::VectorXd& v);

FieldApplication apply_fields(const FrameSpec& frame, const ScalarField& f,
                              const Eigen::VectorXd& v);

/// Subgradient only (cheaper; no second derivatives).
Eigen::VectorXd subgradient(const FrameSpec& frame, const ScalarField& f,
                            const Eigen::VectorXd& v);

/// |grad_G f| at v for a field with analytic gradient.
double subgradient_norm(const FrameSpec& frame, const ScalarField& f,
                        const Eigen::VectorXd& v);

/// The Kaplan norm as a ScalarField with analytic derivatives.
ScalarField gauge_field(const FrameSpec& frame);

/// Analytic |grad_G N|^2 and Delta_G N at v (exact, any supported frame).
void gauge_quantities(const FrameSpec& frame, const Eigen::VectorXd& v,
                      double& grad_norm_sq, double& sublap);

GaugeReport gauge_identities(const FrameSpec& frame, const Eigen::VectorXd& v,
                             GradMode mode = GradMode::Analytic);

/// Schrödinger potential V = 1/4 |grad_G U|^2 - 1/2 Delta_G U with U = N^p,
/// expanded by the chain rule through the analytic gauge quantities.
double schrodinger_potential(const FrameSpec& frame, double p,
                             const Eigen::VectorXd& v);

/// U-bound weight eta for (frame, p, q).
double eta_weight(const FrameSpec& frame, double p, double q,
                  const Eigen::VectorXd& v);

/// Validates (p, q) for eta_weight without evaluating it.
void check_eta_exponents(const FrameSpec& frame, double p, double q);

}  // namespace sublab
