#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unisvm/dataset.hpp"
#include "unisvm/kernel.hpp"
#include "unisvm/losses.hpp"

namespace unisvm {

enum class Strategy { Auto, Full, Smw, Sparse };

std::string strategy_name(Strategy s);

struct TrainConfig {
  double lambda = 1e-3;
  double tol = 1e-6;  // relative change of the working vector
  int max_iter = 100;
  Strategy strategy = Strategy::Auto;
  // Low-rank factor controls; leaving both unset under Auto selects the full
  // strategy for m <= auto_full_limit. Defaults when a factor is needed:
  // rank_budget = min(m, 1000), trace_tol = 1e-3.
  std::optional<int> rank_budget;
  std::optional<double> trace_tol;
  std::size_t dense_cap = 20000;
  std::size_t auto_full_limit = 2000;

  void validate() const;
};

/// Supplies fitted values K~*alpha for the three kernel representations:
/// dense K, low-rank P*P^T, and pivoted P*P_B^T (alpha over pivots only).
class Representation {
 public:
  static Representation dense(Eigen::MatrixXd K);
  static Representation low_rank(Eigen::MatrixXd P);
  static Representation pivoted(Eigen::MatrixXd P, std::vector<int> pivots);

  /// K~ * alpha; alpha has length m (dense/low_rank) or r (pivoted).
  Eigen::VectorXd fitted(const Eigen::VectorXd& alpha) const;
  /// K~ * w for a full-length w.
  Eigen::VectorXd apply(const Eigen::VectorXd& w) const;
  /// alpha^T K~ alpha given xi = fitted(alpha).
  double quad(const Eigen::VectorXd& alpha, const Eigen::VectorXd& xi) const;
  /// Embeds a pivot-supported alpha into length m (identity otherwise).
  Eigen::VectorXd embed(const Eigen::VectorXd& alpha) const;

  Eigen::Index rows() const;

 private:
  std::shared_ptr<const Eigen::MatrixXd> mat_;
  std::vector<int> pivots_;
  bool dense_ = true;
};

/// One-time factorization backing the closed-form iteration update.
/// full:   (lambda*m/A I + K)^-1 via Cholesky, solves cost O(m^2)
/// smw:    (lambda*m/A I + P^T P)^-1 (r x r), applications cost O(m*r)
/// sparse: ((lambda*m/A I + P^T P) P_B^T)^-1 (r x r), updates cost O(m*r)
class SolveFactor {
 public:
  enum class Kind { Full, Smw, Sparse };

  Kind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }
  double lsdc_A() const noexcept { return A_; }
  Eigen::Index m() const noexcept { return m_; }
  int rank() const noexcept { return rank_; }

  /// alpha solving the iteration system for the given right-hand side
  /// xi - v/(2A); length m for full/smw, r for sparse.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  /// Fitted values of a coefficient vector under this factor's kernel
  /// representation.
  Eigen::VectorXd fitted(const Eigen::VectorXd& alpha) const;
  /// alpha^T K~ alpha given xi = fitted(alpha).
  double quad(const Eigen::VectorXd& alpha, const Eigen::VectorXd& xi) const;

  Representation representation() const;
  const std::vector<int>& pivots() const noexcept { return pivots_; }

 private:
  friend SolveFactor prepare_full(Eigen::MatrixXd K, double lambda,
                                  Eigen::Index m, double A);
  friend SolveFactor prepare_smw(LowRankFactor factor, double lambda,
                                 Eigen::Index m, double A);
  friend SolveFactor prepare_sparse(LowRankFactor factor, double lambda,
                                    Eigen::Index m, double A);

  Kind kind_ = Kind::Full;
  Eigen::Index m_ = 0;
  int rank_ = 0;
  double lambda_ = 0.0, A_ = 0.0, ridge_ = 0.0;

  std::shared_ptr<const Eigen::MatrixXd> K_;  // full
  std::shared_ptr<const Eigen::MatrixXd> P_;  // smw / sparse
  std::vector<int> pivots_;                   // sparse
  Eigen::MatrixXd pivot_block_;               // P_B (sparse)
  std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>> llt_;  // full or smw
  std::shared_ptr<const Eigen::FullPivLU<Eigen::MatrixXd>> lu_;  // sparse
};

SolveFactor prepare_full(Eigen::MatrixXd K, double lambda, Eigen::Index m,
                         double A);
SolveFactor prepare_smw(LowRankFactor factor, double lambda, Eigen::Index m,
                        double A);
SolveFactor prepare_sparse(LowRankFactor factor, double lambda, Eigen::Index m,
                           double A);

/// Process-wide count of factor preparations (instrumentation; lets tests
/// assert that train() factorizes exactly once).
long factor_preparation_count();

/// DCA iterate. The warm start is xi = y, v = 0 (the first step is then the
/// ridged LSSVM solve regardless of the loss).
struct DcState {
  Eigen::VectorXd alpha;  // length m (full/smw) or r (sparse); empty before
                          // the first step
  Eigen::VectorXd xi;     // fitted values, length m
  Eigen::VectorXd v;      // working vector, length m
  int iter = 0;
  std::vector<double> objective_trace;
};

DcState initial_state(const Eigen::VectorXd& y);

/// One closed-form update: alpha' = solve(xi - v/(2A)), xi' refitted from
/// alpha', v' recomputed at xi', objective appended.
DcState dca_step(const SolveFactor& factor, const DcState& state,
                 const LossSpec& loss, const Eigen::VectorXd& y);

struct Model {
  Task task = Task::Classification;
  KernelSpec kernel;
  std::vector<SparseVector> support_points;
  Eigen::VectorXd coefficients;
  std::string loss;  // canonical "name:key=val,..." text
  double lambda = 0.0;
  double A = 0.0;
};

struct TrainReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;
  double train_seconds = 0.0;
  int rank = 0;            // factor rank (m for the full strategy)
  int factorizations = 0;  // factor preparations in this call; always 1
  Strategy strategy_used = Strategy::Full;
};

std::pair<Model, TrainReport> train(const TrainConfig& config,
                                    const Dataset& data, const LossSpec& loss,
                                    const KernelSpec& kernel);

/// F(alpha) = lambda*alpha^T K~ alpha + (1/m) sum psi(r_i).
double objective(const Representation& repr, const Eigen::VectorXd& alpha,
                 const LossSpec& loss, double lambda, const Eigen::VectorXd& y);

/// ||K~(2*lambda*alpha + v/m)||_inf at xi = K~ alpha; near zero certifies a
/// critical point of the objective.
double stationarity_residual(const Representation& repr,
                             const Eigen::VectorXd& alpha, const LossSpec& loss,
                             double lambda, const Eigen::VectorXd& y);

Eigen::VectorXd predict(const Model& model,
                        const std::vector<SparseVector>& queries);

Metrics evaluate(const Model& model, const Dataset& data);

}  // namespace unisvm
