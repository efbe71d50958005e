#include "unisvm/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>

#include "unisvm/kernels.hpp"

namespace unisvm {

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::Full: return "full";
    case Strategy::Smw: return "smw";
    case Strategy::Sparse: return "sparse";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (!(lambda > 0.0)) throw InputError("lambda must be > 0");
  if (!(tol > 0.0)) throw InputError("tol must be > 0");
  if (max_iter < 1) throw InputError("max_iter must be >= 1");
  if (rank_budget && *rank_budget < 1)
    throw InputError("rank_budget must be >= 1");
  if (trace_tol && *trace_tol < 0.0) throw InputError("trace_tol must be >= 0");
}

// ---------------------------------------------------------------------------
// Representation

Representation Representation::dense(Eigen::MatrixXd K) {
  Representation r;
  r.mat_ = std::make_shared<const Eigen::MatrixXd>(std::move(K));
  r.dense_ = true;
  return r;
}

Representation Representation::low_rank(Eigen::MatrixXd P) {
  Representation r;
  r.mat_ = std::make_shared<const Eigen::MatrixXd>(std::move(P));
  r.dense_ = false;
  return r;
}

Representation Representation::pivoted(Eigen::MatrixXd P,
                                       std::vector<int> pivots) {
  Representation r;
  r.mat_ = std::make_shared<const Eigen::MatrixXd>(std::move(P));
  r.pivots_ = std::move(pivots);
  r.dense_ = false;
  return r;
}

Eigen::Index Representation::rows() const { return mat_->rows(); }

Eigen::VectorXd Representation::embed(const Eigen::VectorXd& alpha) const {
  if (pivots_.empty()) return alpha;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(mat_->rows());
  for (std::size_t k = 0; k < pivots_.size(); ++k)
    full[pivots_[k]] = alpha[static_cast<Eigen::Index>(k)];
  return full;
}

Eigen::VectorXd Representation::fitted(const Eigen::VectorXd& alpha) const {
  if (dense_) return kernels::gemv(*mat_, alpha);
  if (pivots_.empty())
    return kernels::gemv(*mat_, kernels::gemv_transpose(*mat_, alpha));
  // xi = P * (P_B^T alpha_B)
  const Eigen::Index r = static_cast<Eigen::Index>(pivots_.size());
  if (alpha.size() != r) throw InputError("alpha/pivot size mismatch");
  Eigen::VectorXd t = Eigen::VectorXd::Zero(mat_->cols());
  for (Eigen::Index k = 0; k < r; ++k)
    t += mat_->row(pivots_[k]).transpose() * alpha[k];
  return kernels::gemv(*mat_, t);
}

Eigen::VectorXd Representation::apply(const Eigen::VectorXd& w) const {
  if (dense_) return kernels::gemv(*mat_, w);
  return kernels::gemv(*mat_, kernels::gemv_transpose(*mat_, w));
}

double Representation::quad(const Eigen::VectorXd& alpha,
                            const Eigen::VectorXd& xi) const {
  if (pivots_.empty()) return alpha.dot(xi);
  double q = 0.0;
  for (std::size_t k = 0; k < pivots_.size(); ++k)
    q += alpha[static_cast<Eigen::Index>(k)] * xi[pivots_[k]];
  return q;
}

// ---------------------------------------------------------------------------
// Factor preparation

namespace {
std::atomic<long> g_factor_preparations{0};
}

long factor_preparation_count() { return g_factor_preparations.load(); }

SolveFactor prepare_full(Eigen::MatrixXd K, double lambda, Eigen::Index m,
                         double A) {
  ++g_factor_preparations;
  if (!(lambda > 0.0) || !(A > 0.0)) throw InputError("need lambda, A > 0");
  if (K.rows() != m || K.cols() != m)
    throw InputError("K must be m x m");
  SolveFactor f;
  f.kind_ = SolveFactor::Kind::Full;
  f.m_ = m;
  f.rank_ = static_cast<int>(m);
  f.lambda_ = lambda;
  f.A_ = A;
  f.ridge_ = lambda * m / A;
  Eigen::MatrixXd ridged = K;
  ridged.diagonal().array() += f.ridge_;
  if (!ridged.allFinite())
    throw NumericError("kernel matrix contains non-finite entries");
  auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(std::move(ridged));
  if (llt->info() != Eigen::Success)
    throw NumericError("Cholesky factorization of lambda*m/A*I + K failed");
  f.K_ = std::make_shared<const Eigen::MatrixXd>(std::move(K));
  f.llt_ = std::move(llt);
  return f;
}

SolveFactor prepare_smw(LowRankFactor factor, double lambda, Eigen::Index m,
                        double A) {
  ++g_factor_preparations;
  if (!(lambda > 0.0) || !(A > 0.0)) throw InputError("need lambda, A > 0");
  if (factor.rank() < 1) throw InputError("low-rank factor must have r >= 1");
  if (factor.P.rows() != m) throw InputError("P must have m rows");
  SolveFactor f;
  f.kind_ = SolveFactor::Kind::Smw;
  f.m_ = m;
  f.rank_ = factor.rank();
  f.lambda_ = lambda;
  f.A_ = A;
  f.ridge_ = lambda * m / A;
  Eigen::MatrixXd small = factor.P.transpose() * factor.P;
  small.diagonal().array() += f.ridge_;
  auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(std::move(small));
  if (llt->info() != Eigen::Success)
    throw NumericError("Cholesky factorization of lambda*m/A*I + P^T P failed");
  f.P_ = std::make_shared<const Eigen::MatrixXd>(std::move(factor.P));
  f.llt_ = std::move(llt);
  return f;
}

SolveFactor prepare_sparse(LowRankFactor factor, double lambda, Eigen::Index m,
                           double A) {
  ++g_factor_preparations;
  if (!(lambda > 0.0) || !(A > 0.0)) throw InputError("need lambda, A > 0");
  if (factor.rank() < 1) throw InputError("low-rank factor must have r >= 1");
  if (factor.P.rows() != m) throw InputError("P must have m rows");
  SolveFactor f;
  f.kind_ = SolveFactor::Kind::Sparse;
  f.m_ = m;
  f.rank_ = factor.rank();
  f.lambda_ = lambda;
  f.A_ = A;
  f.ridge_ = lambda * m / A;
  f.pivot_block_ = factor.pivot_block();
  Eigen::MatrixXd small = factor.P.transpose() * factor.P;
  small.diagonal().array() += f.ridge_;
  auto lu = std::make_shared<Eigen::FullPivLU<Eigen::MatrixXd>>(
      small * f.pivot_block_.transpose());
  if (!lu->isInvertible()) {
    // one-time ridge retry before giving up
    small.diagonal().array() += 1e-12 * small.trace();
    lu = std::make_shared<Eigen::FullPivLU<Eigen::MatrixXd>>(
        small * f.pivot_block_.transpose());
    if (!lu->isInvertible())
      throw NumericError(
          "sparse pivot system is singular; retry with a larger trace_tol "
          "(smaller rank)");
  }
  f.P_ = std::make_shared<const Eigen::MatrixXd>(std::move(factor.P));
  f.pivots_ = std::move(factor.pivots);
  f.lu_ = std::move(lu);
  return f;
}

// ---------------------------------------------------------------------------
// Factor application

Eigen::VectorXd SolveFactor::solve(const Eigen::VectorXd& rhs) const {
  switch (kind_) {
    case Kind::Full:
      return llt_->solve(rhs);
    case Kind::Smw: {
      // (A/(lambda m)) (I - P Q^ P^T) rhs
      const Eigen::VectorXd t = kernels::gemv_transpose(*P_, rhs);
      const Eigen::VectorXd s = llt_->solve(t);
      Eigen::VectorXd alpha = rhs - kernels::gemv(*P_, s);
      alpha *= 1.0 / ridge_;
      return alpha;
    }
    case Kind::Sparse:
      return lu_->solve(kernels::gemv_transpose(*P_, rhs));
  }
  throw NumericError("invalid factor");
}

Eigen::VectorXd SolveFactor::fitted(const Eigen::VectorXd& alpha) const {
  switch (kind_) {
    case Kind::Full:
      return kernels::gemv(*K_, alpha);
    case Kind::Smw:
      return kernels::gemv(*P_, kernels::gemv_transpose(*P_, alpha));
    case Kind::Sparse:
      return kernels::gemv(*P_, pivot_block_.transpose() * alpha);
  }
  throw NumericError("invalid factor");
}

double SolveFactor::quad(const Eigen::VectorXd& alpha,
                         const Eigen::VectorXd& xi) const {
  if (kind_ != Kind::Sparse) return alpha.dot(xi);
  double q = 0.0;
  for (std::size_t k = 0; k < pivots_.size(); ++k)
    q += alpha[static_cast<Eigen::Index>(k)] * xi[pivots_[k]];
  return q;
}

Representation SolveFactor::representation() const {
  switch (kind_) {
    case Kind::Full:
      return Representation::dense(*K_);
    case Kind::Smw:
      return Representation::low_rank(*P_);
    case Kind::Sparse:
      return Representation::pivoted(*P_, pivots_);
  }
  throw NumericError("invalid factor");
}

// ---------------------------------------------------------------------------
// DCA iteration

namespace {

double objective_given(double quad, const Eigen::VectorXd& xi,
                       const LossSpec& loss, double lambda,
                       const Eigen::VectorXd& y) {
  const Eigen::VectorXd u = residual(loss.task, y, xi);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) sum += psi(loss, u[i]);
  return lambda * quad + sum / static_cast<double>(u.size());
}

}  // namespace

DcState initial_state(const Eigen::VectorXd& y) {
  DcState s;
  s.xi = y;
  s.v = Eigen::VectorXd::Zero(y.size());
  return s;
}

DcState dca_step(const SolveFactor& factor, const DcState& state,
                 const LossSpec& loss, const Eigen::VectorXd& y) {
  if (state.xi.size() != factor.m() || state.v.size() != factor.m())
    throw InputError("state size does not match factor");
  const Eigen::VectorXd rhs = state.xi - state.v * (0.5 / factor.lsdc_A());
  DcState next;
  next.alpha = factor.solve(rhs);
  if (!next.alpha.allFinite())
    throw NumericError("non-finite coefficients at iteration " +
                       std::to_string(state.iter + 1));
  next.xi = factor.fitted(next.alpha);
  next.v = v_update(loss, y, next.xi);
  if (!next.v.allFinite())
    throw NumericError("non-finite working vector at iteration " +
                       std::to_string(state.iter + 1));
  next.iter = state.iter + 1;
  next.objective_trace = state.objective_trace;
  next.objective_trace.push_back(objective_given(
      factor.quad(next.alpha, next.xi), next.xi, loss, factor.lambda(), y));
  return next;
}

// ---------------------------------------------------------------------------
// Training

std::pair<Model, TrainReport> train(const TrainConfig& config,
                                    const Dataset& data, const LossSpec& loss,
                                    const KernelSpec& kernel) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  kernel.validate();
  data.validate();
  if (loss.task != data.task)
    throw InputError("loss is for " + task_name(loss.task) +
                     " but data is for " + task_name(data.task));

  const Eigen::Index m = static_cast<Eigen::Index>(data.size());
  Strategy strat = config.strategy;
  if (strat == Strategy::Auto) {
    const bool factor_requested =
        config.rank_budget.has_value() || config.trace_tol.has_value();
    strat = (!factor_requested &&
             data.size() <= config.auto_full_limit)
                ? Strategy::Full
                : Strategy::Sparse;
  }

  TrainReport report;
  report.strategy_used = strat;

  SolveFactor factor;
  if (strat == Strategy::Full) {
    factor = prepare_full(gram_full(kernel, data, config.dense_cap),
                          config.lambda, m, loss.A);
  } else {
    const int budget =
        config.rank_budget.value_or(static_cast<int>(std::min<Eigen::Index>(m, 1000)));
    const double tol = config.trace_tol.value_or(1e-3);
    LowRankFactor lr = pivoted_cholesky(kernel, data, budget, tol);
    factor = strat == Strategy::Smw
                 ? prepare_smw(std::move(lr), config.lambda, m, loss.A)
                 : prepare_sparse(std::move(lr), config.lambda, m, loss.A);
  }
  report.factorizations = 1;
  report.rank = factor.rank();

  const Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(data.labels.data(), m);
  DcState state = initial_state(y);
  for (int k = 0; k < config.max_iter; ++k) {
    const Eigen::VectorXd v_prev = state.v;
    state = dca_step(factor, state, loss, y);
    const double rel =
        (state.v - v_prev).norm() / std::max(1.0, state.v.norm());
    if (rel < config.tol) {
      report.converged = true;
      break;
    }
  }
  report.iterations = state.iter;
  report.objective_trace = std::move(state.objective_trace);

  Model model;
  model.task = data.task;
  model.kernel = kernel;
  model.loss = loss_text(loss);
  model.lambda = config.lambda;
  model.A = loss.A;
  if (factor.kind() == SolveFactor::Kind::Sparse) {
    model.support_points.reserve(factor.pivots().size());
    for (int j : factor.pivots()) model.support_points.push_back(data.samples[j]);
  } else {
    model.support_points = data.samples;
  }
  model.coefficients = state.alpha;

  report.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(model), std::move(report)};
}

// ---------------------------------------------------------------------------
// Diagnostics and prediction

double objective(const Representation& repr, const Eigen::VectorXd& alpha,
                 const LossSpec& loss, double lambda,
                 const Eigen::VectorXd& y) {
  const Eigen::VectorXd xi = repr.fitted(alpha);
  return objective_given(repr.quad(alpha, xi), xi, loss, lambda, y);
}

double stationarity_residual(const Representation& repr,
                             const Eigen::VectorXd& alpha, const LossSpec& loss,
                             double lambda, const Eigen::VectorXd& y) {
  const Eigen::VectorXd xi = repr.fitted(alpha);
  const Eigen::VectorXd v = v_update(loss, y, xi);
  const Eigen::VectorXd w =
      2.0 * lambda * repr.embed(alpha) + v / static_cast<double>(y.size());
  return repr.apply(w).lpNorm<Eigen::Infinity>();
}

Eigen::VectorXd predict(const Model& model,
                        const std::vector<SparseVector>& queries) {
  if (queries.empty()) throw InputError("no query points");
  if (model.support_points.empty() ||
      static_cast<Eigen::Index>(model.support_points.size()) !=
          model.coefficients.size())
    throw InputError("model has inconsistent support points / coefficients");
  const Eigen::MatrixXd G =
      gram_cross(model.kernel, model.support_points, queries);
  return kernels::gemv(G, model.coefficients);
}

Metrics evaluate(const Model& model, const Dataset& data) {
  if (model.task != data.task)
    throw InputError("model is for " + task_name(model.task) +
                     " but data is for " + task_name(data.task));
  const Eigen::VectorXd scores = predict(model, data.samples);
  Metrics metrics = evaluate_scores(
      data.task, std::vector<double>(scores.data(), scores.data() + scores.size()),
      data.labels);
  metrics.support_size = model.support_points.size();
  return metrics;
}

}  // namespace unisvm
