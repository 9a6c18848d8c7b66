#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sublab/families.hpp"
#include "sublab/measure.hpp"
#include "sublab/numerics.hpp"

namespace sublab {

// ---------------------------------------------------------------------------
// Integration by parts.

/// Horizontal vector field given by its coefficients against the generating
/// fields, h = sum_i h_i X_i, together with the divergence sum_i X_i h_i.
struct HorizontalField {
  std::string id;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> coeffs;
  std::function<double(const Eigen::VectorXd&)> divergence;
};

/// h = x (horizontal coordinates); Div h = horizontal dimension.
HorizontalField h_coordinate(const FrameSpec& frame);
/// h = grad_G log|x|; Div h = (hd - 2)/|x|^2.
HorizontalField h_grad_log_norm(const FrameSpec& frame);

struct IbpResult {
  double residual = 0.0;
  double scale = 0.0;       ///< sum of absolute term values
  double error = 0.0;       ///< combined quadrature error of the four terms
  std::array<double, 4> terms{};  ///< div, gradient, drift, weight
  std::int64_t evals = 0;
};

/// Residual of the weighted integration-by-parts identity
///   int |f|^r Div h w dmu + r int |f|^{r-2} f (grad f . h) w dmu
///   - int |f|^r (grad U . h) w dmu + int |f|^r (grad w . h) dmu  =  0
/// for compactly supported f.
IbpResult ibp_residual(const MeasureSpec& measure, const ScalarField& f,
                       const HorizontalField& h, const ScalarField& omega,
                       double r, const QuadOptions& opts = {});

struct IbpCase {
  std::string id;
  ScalarField f;
  HorizontalField h;
  ScalarField omega;
  double r = 2.0;
};

/// The 12-case smoke suite: r in {1.5, 2}, h in {x, grad log|x|},
/// omega in {1, |x|^{q-2}}, two bump positions.
std::vector<IbpCase> standard_ibp_suite(const MeasureSpec& measure);

// ---------------------------------------------------------------------------
// Declarative inequality checks.

enum class InequalityId {
  UBOUND_L2,
  UBOUND_LQ,
  HARDY_GENERAL,
  HARDY_DIMFREE_L2,
  HARDY_DIMFREE_LQ,
  LEBESGUE_SPI,
  SPI_L2,
  SPI_LQ,
  GRUSHIN_UBOUND_LQ,
  GRUSHIN_UBOUND_L2,
  HG_UBOUND_LQ,
};

const char* inequality_id_name(InequalityId id);
InequalityId inequality_id_from_string(const std::string& name);

struct InequalitySpec {
  InequalityId id = InequalityId::UBOUND_L2;
  double p = 0.0;
  double q = 2.0;           ///< integrability exponent of the check
  double r = 2.0;           ///< HARDY_GENERAL only
  std::vector<double> eps_grid;  ///< for eps-parametrized checks
  double qdim_hint = 0.0;   ///< homogeneous dimension (LEBESGUE_SPI shape)
};

/// Validates exponent ranges for the given frame (ExponentOutOfRange).
InequalitySpec make_inequality(InequalityId id, const FrameSpec& frame,
                               double p, double q = 2.0, double r = 2.0,
                               std::vector<double> eps_grid = {});

enum class Verdict { Holds, HoldsWithinError, Violated };
const char* verdict_name(Verdict v);

struct FittedConstants {
  std::optional<double> A;
  std::optional<double> B;
  std::optional<double> C;  ///< single multiplicative constant
  std::string extremal_member;
};

struct MemberRow {
  std::string member;
  double eps = 0.0;  ///< NaN when the check has no eps parameter
  double lhs = 0.0, lhs_err = 0.0;
  double rhs = 0.0, rhs_err = 0.0;
  double margin = 0.0;  ///< (rhs - lhs)/|lhs|
  bool skipped = false;
};

struct CheckReport {
  InequalityId id;
  FamilyId family;
  std::string frame;
  FittedConstants constants;
  std::vector<MemberRow> rows;
  double worst_margin = 0.0;
  std::string worst_member;
  Verdict verdict = Verdict::HoldsWithinError;
  std::string note;
};

/// Per-member eps-independent integrals for one inequality.
struct RawTerms {
  std::string member;
  IntegralEstimate lhs;
  std::map<std::string, IntegralEstimate> terms;
  bool skipped = false;  ///< precondition failed for this member
};

std::vector<RawTerms> evaluate_raw_terms(const InequalitySpec& spec,
                                         const TestFamily& family,
                                         const MeasureSpec& measure,
                                         EstimateMethod method,
                                         const QuadOptions& opts = {});

FittedConstants fit_constants(const InequalitySpec& spec,
                              const TestFamily& family,
                              const MeasureSpec& measure,
                              EstimateMethod method = EstimateMethod::AdaptiveQuad,
                              const QuadOptions& opts = {});

FittedConstants fit_constants_from_raw(const InequalitySpec& spec,
                                       const std::vector<RawTerms>& raw);

CheckReport check_inequality(const InequalitySpec& spec,
                             const TestFamily& family,
                             const MeasureSpec& measure,
                             std::optional<FittedConstants> constants = {},
                             EstimateMethod method = EstimateMethod::AdaptiveQuad,
                             const QuadOptions& opts = {});

CheckReport check_from_raw(const InequalitySpec& spec,
                           const std::vector<RawTerms>& raw,
                           const FittedConstants& constants,
                           FamilyId family_id, const std::string& frame_desc);

// ---------------------------------------------------------------------------
// Super-Poincaré growth machinery.

struct BetaPoint {
  double eps = 0.0;
  double beta = 0.0;
  double error = 0.0;
  std::string argmax_member;
};

struct BetaCurve {
  double q = 2.0;
  FamilyId family;
  std::vector<BetaPoint> points;  ///< eps strictly decreasing
};

/// Certified lower bound on any admissible growth function at eps:
/// max over members of (int |f|^q - eps int |grad f|^q) / (int |f|^{q/2})^2,
/// floored at 0.
BetaPoint beta_hat(const MeasureSpec& measure, double q, double eps,
                   const TestFamily& family, const QuadOptions& opts = {});

BetaCurve beta_curve(const MeasureSpec& measure, double q,
                     const std::vector<double>& eps_grid,
                     const TestFamily& family, const QuadOptions& opts = {});

struct ExponentFit {
  double sigma = 0.0;       ///< slope of log log beta vs log(1/eps)
  double log_c = 0.0;       ///< intercept
  double residual = 0.0;    ///< rms residual of the fit
  double half_width = 0.0;  ///< ~95% half-width on sigma
  int points_used = 0;
};

/// Least squares of log log beta on log(1/eps), using points with beta > 1.
ExponentFit fit_growth_exponent(const BetaCurve& curve);

struct EnvelopeFit {
  double c_hat = 0.0;  ///< beta <= exp(c_hat eps^{-sigma}) + k_hat
  double k_hat = 0.0;
  double sigma = 0.0;
};

/// Envelope constants fitted on the given curve points (training set).
EnvelopeFit fit_growth_envelope(const BetaCurve& curve,
                                const std::vector<int>& train_idx,
                                double sigma);

// ---------------------------------------------------------------------------
// Proof certificates and the exponent table.

enum class SpiSetting {
  MetivierL2,
  MetivierLq,
  GrushinLq,
  GrushinL2,
  HeisenbergGreinerLq,
};

const char* spi_setting_name(SpiSetting s);

/// Theoretical growth exponent sigma for the setting, exact arithmetic.
Rational exponent_table(SpiSetting setting, const Rational& p,
                        const Rational& q, const Rational& gamma,
                        const Rational& zeta);

enum class CertificateRoute { DimensionFree, Hoelder };

struct Certificate {
  SpiSetting setting;
  CertificateRoute route = CertificateRoute::DimensionFree;
  double p = 0.0, q = 0.0, eps = 0.0;
  Rational R_exponent;  ///< R = eps^{-R_exponent}
  double R = 0.0;
  std::optional<Rational> delta_exponent;  ///< delta = eps^{delta_exponent}
  std::optional<double> delta;
  Rational sigma;
  std::string beta_form;  ///< "exp(C*eps^(-sigma))"
};

Certificate certificate(const FrameSpec& frame, double p, double q, double eps,
                        CertificateRoute route = CertificateRoute::DimensionFree);

/// Ball/complement margins of the assembled proof chain at radius R.
struct DecompositionRow {
  std::string member;
  double ball_lhs = 0.0, ball_rhs = 0.0;
  double comp_lhs = 0.0, comp_rhs = 0.0;
  double ball_margin = 0.0, comp_margin = 0.0;
};

struct DecompositionReport {
  Certificate cert;
  double c_ball = 0.0;  ///< fitted multiplicative constants
  double c_comp = 0.0;
  std::vector<DecompositionRow> rows;
};

DecompositionReport certificate_decomposition(const Certificate& cert,
                                              const MeasureSpec& measure,
                                              const TestFamily& family,
                                              const QuadOptions& opts = {});

}  // namespace sublab
