#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "unisvm/dataset.hpp"

namespace unisvm {

/// The LS-DC loss catalog. Every entry psi admits psi(u) = A*u^2 -
/// (A*u^2 - psi(u)) with the second part convex for A >= lsdc_bound.
/// Plain hinge / ramp / eps-insensitive / absolute losses do not admit such a
/// decomposition and are represented here only by their smoothed surrogates.
enum class LossKind {
  LeastSquares,            // u^2                                (both tasks)
  TruncatedLeastSquares,   // min(u^2, a)                        (both tasks)
  SquaredHinge,            // max(u,0)^2                         (classification)
  TruncatedSquaredHinge,   // min(max(u,0)^2, a)                 (classification)
  SmoothedHinge,           // softplus_p(u)                      (classification)
  SmoothedRamp1,           // piecewise-quadratic ramp, width a  (classification)
  SmoothedRamp2,           // softplus_p(u) - softplus_p(u-a)    (classification)
  GenNonconvex,            // a*(1 - exp(-max(u,0)^c / b))       (classification)
  SmoothedEpsInsensitive,  // softplus_p(u-eps) + softplus_p(-u-eps) (regression)
  Huber,                   // quadratic below delta, linear above    (regression)
  SmoothedAbsolute,        // softplus_p(u) + softplus_p(-u)        (regression)
  TruncatedHuber,          // Huber truncated at |u| = a            (regression)
};

struct LossParams {
  double a = 2.0;      // truncation level / saturation value
  double b = 2.0;      // saturation rate (GenNonconvex)
  double c = 2.0;      // exponent (GenNonconvex), c >= 2
  double p = 10.0;     // smoothing sharpness
  double delta = 0.1;  // Huber width
  double eps = 0.1;    // insensitive-tube half width
};

struct LossSpec {
  LossKind kind = LossKind::LeastSquares;
  Task task = Task::Classification;
  LossParams params;
  double A = 1.0;  // LS-DC constant, >= lsdc_bound(kind, params)
};

/// Loss value psi(u). Total over finite u; softplus terms use the
/// overflow-free form max(p*u,0)/p + log1p(exp(-p*|u|))/p.
double psi(const LossSpec& loss, double u);

/// One element of the subdifferential of psi. Truncated kinds return 0 at and
/// beyond the truncation boundary.
double dpsi(const LossSpec& loss, double u);

/// Peak curvature of the generalized nonconvex loss a*(1-exp(-u_+^c/b)):
/// max over u of psi''(u). Exact value 2a/b at c = 2.
double m_abc(double a, double b, double c);

/// The least admissible LS-DC constant for the kind/parameter combination.
double lsdc_bound(LossKind kind, const LossParams& params);

bool kind_supports_task(LossKind kind, Task task);

/// Builds a validated spec. A = 0 means "use lsdc_bound"; anything below the
/// bound is rejected.
LossSpec make_loss(LossKind kind, Task task, LossParams params = {},
                   double A = 0.0);

/// Parses "name" or "name:key=val,key=val" (keys: a,b,c,p,delta,eps).
LossSpec parse_loss(const std::string& text, Task task, double A = 0.0);

std::string loss_name(LossKind kind);
/// Canonical "name:key=val,..." text listing the parameters the kind uses.
std::string loss_text(const LossSpec& loss);
std::vector<std::string> catalog_names(Task task);

/// u_i = 1 - y_i*xi_i (classification) or y_i - xi_i (regression).
Eigen::VectorXd residual(Task task, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& xi);

/// Working vector consumed by the solver: v_i = -y_i*dpsi(1 - y_i*xi_i) for
/// classification, v_i = -dpsi(y_i - xi_i) for regression (v = -2*gamma).
Eigen::VectorXd v_update(const LossSpec& loss, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& xi);

}  // namespace unisvm
