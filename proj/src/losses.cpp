#include "unisvm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace unisvm {

namespace {

// (1/p)*log(1+exp(p*t)) without overflow.
inline double softplus(double p, double t) {
  const double pt = p * t;
  return std::max(pt, 0.0) / p + std::log1p(std::exp(-std::abs(pt))) / p;
}

// 1/(1+exp(-z)) without overflow.
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double pos(double u) { return u > 0.0 ? u : 0.0; }

void require(bool ok, const char* msg) {
  if (!ok) throw InputError(msg);
}

void validate_params(LossKind kind, const LossParams& q) {
  switch (kind) {
    case LossKind::LeastSquares:
    case LossKind::SquaredHinge:
      break;
    case LossKind::TruncatedLeastSquares:
    case LossKind::TruncatedSquaredHinge:
    case LossKind::SmoothedRamp1:
      require(q.a > 0.0, "need a > 0");
      break;
    case LossKind::SmoothedHinge:
      require(q.p > 0.0, "need p > 0");
      break;
    case LossKind::SmoothedRamp2:
      require(q.a > 0.0, "need a > 0");
      require(q.p > 0.0, "need p > 0");
      break;
    case LossKind::GenNonconvex:
      require(q.a > 0.0 && q.b > 0.0, "need a > 0 and b > 0");
      require(q.c >= 2.0, "need c >= 2");
      break;
    case LossKind::SmoothedEpsInsensitive:
      require(q.p > 0.0, "need p > 0");
      require(q.eps > 0.0, "need eps > 0");
      break;
    case LossKind::Huber:
      require(q.delta > 0.0, "need delta > 0");
      break;
    case LossKind::SmoothedAbsolute:
      require(q.p > 0.0, "need p > 0");
      break;
    case LossKind::TruncatedHuber:
      require(q.delta > 0.0, "need delta > 0");
      require(q.a > 0.0, "need a > 0");
      break;
  }
}

double huber_psi(double u, double delta) {
  const double au = std::abs(u);
  return au < delta ? u * u / (2.0 * delta) : au - delta / 2.0;
}

double huber_dpsi(double u, double delta) {
  const double au = std::abs(u);
  if (au < delta) return u / delta;
  return u > 0.0 ? 1.0 : -1.0;
}

}  // namespace

double psi(const LossSpec& loss, double u) {
  const LossParams& q = loss.params;
  switch (loss.kind) {
    case LossKind::LeastSquares:
      return u * u;
    case LossKind::TruncatedLeastSquares:
      return std::min(u * u, q.a);
    case LossKind::SquaredHinge: {
      const double up = pos(u);
      return up * up;
    }
    case LossKind::TruncatedSquaredHinge: {
      const double up = pos(u);
      return std::min(up * up, q.a);
    }
    case LossKind::SmoothedHinge:
      return softplus(q.p, u);
    case LossKind::SmoothedRamp1: {
      if (u <= q.a / 2.0) {
        const double up = pos(u);
        return 2.0 / q.a * up * up;
      }
      const double w = pos(q.a - u);
      return q.a - 2.0 / q.a * w * w;
    }
    case LossKind::SmoothedRamp2:
      return softplus(q.p, u) - softplus(q.p, u - q.a);
    case LossKind::GenNonconvex: {
      const double up = pos(u);
      return q.a * -std::expm1(-std::pow(up, q.c) / q.b);
    }
    case LossKind::SmoothedEpsInsensitive:
      return softplus(q.p, u - q.eps) + softplus(q.p, -u - q.eps);
    case LossKind::Huber:
      return huber_psi(u, q.delta);
    case LossKind::SmoothedAbsolute:
      return softplus(q.p, u) + softplus(q.p, -u);
    case LossKind::TruncatedHuber:
      return huber_psi(std::min(std::abs(u), q.a), q.delta);
  }
  throw InputError("unknown loss kind");
}

double dpsi(const LossSpec& loss, double u) {
  const LossParams& q = loss.params;
  switch (loss.kind) {
    case LossKind::LeastSquares:
      return 2.0 * u;
    case LossKind::TruncatedLeastSquares:
      return std::abs(u) < std::sqrt(q.a) ? 2.0 * u : 0.0;
    case LossKind::SquaredHinge:
      return 2.0 * pos(u);
    case LossKind::TruncatedSquaredHinge:
      return u > 0.0 && u < std::sqrt(q.a) ? 2.0 * u : 0.0;
    case LossKind::SmoothedHinge:
      return sigmoid(q.p * u);
    case LossKind::SmoothedRamp1:
      if (u <= q.a / 2.0) return 4.0 / q.a * pos(u);
      return 4.0 / q.a * pos(q.a - u);
    case LossKind::SmoothedRamp2:
      return sigmoid(q.p * u) - sigmoid(q.p * (u - q.a));
    case LossKind::GenNonconvex: {
      if (u <= 0.0) return 0.0;
      return q.a * q.c / q.b * std::pow(u, q.c - 1.0) *
             std::exp(-std::pow(u, q.c) / q.b);
    }
    case LossKind::SmoothedEpsInsensitive:
      return sigmoid(q.p * (u - q.eps)) - sigmoid(-q.p * (u + q.eps));
    case LossKind::Huber:
      return huber_dpsi(u, q.delta);
    case LossKind::SmoothedAbsolute:
      return sigmoid(q.p * u) - sigmoid(-q.p * u);
    case LossKind::TruncatedHuber:
      return std::abs(u) < q.a ? huber_dpsi(u, q.delta) : 0.0;
  }
  throw InputError("unknown loss kind");
}

double m_abc(double a, double b, double c) {
  if (!(a > 0.0) || !(b > 0.0)) throw InputError("need a > 0 and b > 0");
  if (c < 2.0) throw InputError("need c >= 2");
  if (c == 2.0) return 2.0 * a / b;  // h(2) = 0 makes the general form 0^0
  const double h = (3.0 * (c - 1.0) - std::sqrt(5.0 * c * c - 6.0 * c + 1.0)) /
                   (2.0 * c);
  return a * c / std::pow(b, 2.0 / c) *
         ((c - 1.0) * std::pow(h, 1.0 - 2.0 / c) -
          c * std::pow(h, 2.0 - 2.0 / c)) *
         std::exp(-h);
}

double lsdc_bound(LossKind kind, const LossParams& q) {
  validate_params(kind, q);
  switch (kind) {
    case LossKind::LeastSquares:
    case LossKind::TruncatedLeastSquares:
    case LossKind::SquaredHinge:
    case LossKind::TruncatedSquaredHinge:
      return 1.0;
    case LossKind::SmoothedHinge:
    case LossKind::SmoothedRamp2:
      return q.p / 8.0;
    case LossKind::SmoothedRamp1:
      return 2.0 / q.a;
    case LossKind::GenNonconvex:
      return m_abc(q.a, q.b, q.c) / 2.0;
    case LossKind::SmoothedEpsInsensitive:
    case LossKind::SmoothedAbsolute:
      return q.p / 4.0;
    case LossKind::Huber:
    case LossKind::TruncatedHuber:
      return 1.0 / (2.0 * q.delta);
  }
  throw InputError("unknown loss kind");
}

bool kind_supports_task(LossKind kind, Task task) {
  switch (kind) {
    case LossKind::LeastSquares:
    case LossKind::TruncatedLeastSquares:
      return true;
    case LossKind::SquaredHinge:
    case LossKind::TruncatedSquaredHinge:
    case LossKind::SmoothedHinge:
    case LossKind::SmoothedRamp1:
    case LossKind::SmoothedRamp2:
    case LossKind::GenNonconvex:
      return task == Task::Classification;
    case LossKind::SmoothedEpsInsensitive:
    case LossKind::Huber:
    case LossKind::SmoothedAbsolute:
    case LossKind::TruncatedHuber:
      return task == Task::Regression;
  }
  return false;
}

LossSpec make_loss(LossKind kind, Task task, LossParams params, double A) {
  if (!kind_supports_task(kind, task))
    throw InputError("loss '" + loss_name(kind) + "' does not support " +
                     task_name(task));
  validate_params(kind, params);
  const double bound = lsdc_bound(kind, params);
  if (A == 0.0) A = bound;
  if (A < bound)
    throw InputError("A = " + std::to_string(A) +
                     " is below the LS-DC bound " + std::to_string(bound));
  return LossSpec{kind, task, params, A};
}

namespace {

const std::map<std::string, LossKind>& name_table() {
  static const std::map<std::string, LossKind> table = {
      {"least_squares", LossKind::LeastSquares},
      {"truncated_ls", LossKind::TruncatedLeastSquares},
      {"squared_hinge", LossKind::SquaredHinge},
      {"truncated_sq_hinge", LossKind::TruncatedSquaredHinge},
      {"smoothed_hinge", LossKind::SmoothedHinge},
      {"smoothed_ramp1", LossKind::SmoothedRamp1},
      {"smoothed_ramp2", LossKind::SmoothedRamp2},
      {"gen_nonconvex", LossKind::GenNonconvex},
      {"smoothed_eps_insensitive", LossKind::SmoothedEpsInsensitive},
      {"huber", LossKind::Huber},
      {"smoothed_absolute", LossKind::SmoothedAbsolute},
      {"truncated_huber", LossKind::TruncatedHuber},
  };
  return table;
}

// Parameter keys each kind actually consumes, in canonical print order.
std::vector<std::string> used_keys(LossKind kind) {
  switch (kind) {
    case LossKind::LeastSquares: return {};
    case LossKind::TruncatedLeastSquares: return {"a"};
    case LossKind::SquaredHinge: return {};
    case LossKind::TruncatedSquaredHinge: return {"a"};
    case LossKind::SmoothedHinge: return {"p"};
    case LossKind::SmoothedRamp1: return {"a"};
    case LossKind::SmoothedRamp2: return {"a", "p"};
    case LossKind::GenNonconvex: return {"a", "b", "c"};
    case LossKind::SmoothedEpsInsensitive: return {"p", "eps"};
    case LossKind::Huber: return {"delta"};
    case LossKind::SmoothedAbsolute: return {"p"};
    case LossKind::TruncatedHuber: return {"delta", "a"};
  }
  return {};
}

double& param_slot(LossParams& q, const std::string& key) {
  if (key == "a") return q.a;
  if (key == "b") return q.b;
  if (key == "c") return q.c;
  if (key == "p") return q.p;
  if (key == "delta") return q.delta;
  if (key == "eps") return q.eps;
  throw InputError("unknown loss parameter '" + key + "'");
}

double param_value(const LossParams& q, const std::string& key) {
  LossParams copy = q;
  return param_slot(copy, key);
}

}  // namespace

LossSpec parse_loss(const std::string& text, Task task, double A) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const auto& table = name_table();
  const auto it = table.find(name);
  if (it == table.end()) {
    std::string msg = "unknown loss '" + name + "'; available for " +
                      task_name(task) + ":";
    for (const auto& n : catalog_names(task)) msg += " " + n;
    throw InputError(msg);
  }
  LossParams params;
  // regression smoothing defaults to the sharper p
  if (task == Task::Regression) params.p = 100.0;
  if (colon != std::string::npos) {
    // ',' separates parameters; ';' is accepted too (the CSV-safe spelling)
    std::string spec_text = text.substr(colon + 1);
    for (char& ch : spec_text)
      if (ch == ';') ch = ',';
    std::istringstream rest(spec_text);
    std::string kv;
    while (std::getline(rest, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw InputError("loss parameter '" + kv + "' is not key=value");
      const std::string key = kv.substr(0, eq);
      double value = 0.0;
      try {
        std::size_t used = 0;
        const std::string vs = kv.substr(eq + 1);
        value = std::stod(vs, &used);
        if (used != vs.size()) throw std::invalid_argument(vs);
      } catch (const std::exception&) {
        throw InputError("bad numeric value in '" + kv + "'");
      }
      param_slot(params, key) = value;
    }
  }
  return make_loss(it->second, task, params, A);
}

std::string loss_name(LossKind kind) {
  for (const auto& [name, k] : name_table())
    if (k == kind) return name;
  return "?";
}

std::string loss_text(const LossSpec& loss) {
  std::string out = loss_name(loss.kind);
  const auto keys = used_keys(loss.kind);
  char buf[64];
  for (std::size_t i = 0; i < keys.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", param_value(loss.params, keys[i]));
    out += (i == 0 ? ":" : ",");
    out += keys[i] + "=" + buf;
  }
  return out;
}

std::vector<std::string> catalog_names(Task task) {
  std::vector<std::string> names;
  for (const auto& [name, kind] : name_table())
    if (kind_supports_task(kind, task)) names.push_back(name);
  return names;
}

Eigen::VectorXd residual(Task task, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& xi) {
  if (y.size() != xi.size()) throw InputError("y/xi length mismatch");
  if (task == Task::Classification) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] != 1.0 && y[i] != -1.0)
        throw InputError("classification label outside {-1,+1}");
    return Eigen::VectorXd::Ones(y.size()) - y.cwiseProduct(xi);
  }
  return y - xi;
}

Eigen::VectorXd v_update(const LossSpec& loss, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& xi) {
  const Eigen::VectorXd u = residual(loss.task, y, xi);
  const Eigen::Index m = u.size();
  Eigen::VectorXd v(m);
  if (loss.task == Task::Classification) {
#pragma omp parallel for schedule(static) if (m >= 4096)
    for (Eigen::Index i = 0; i < m; ++i) v[i] = -y[i] * dpsi(loss, u[i]);
  } else {
#pragma omp parallel for schedule(static) if (m >= 4096)
    for (Eigen::Index i = 0; i < m; ++i) v[i] = -dpsi(loss, u[i]);
  }
  return v;
}

}  // namespace unisvm
