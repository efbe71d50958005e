#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "unisvm/dataset.hpp"

namespace unisvm {

/// Gaussian kernel kappa(x,z) = exp(-gamma*||x-z||^2), gamma > 0.
struct KernelSpec {
  enum class Kind { Gaussian };
  Kind kind = Kind::Gaussian;
  double gamma = 1.0;

  void validate() const {
    if (!(gamma > 0.0)) throw InputError("kernel gamma must be > 0");
  }
};

double kernel_eval(const KernelSpec& spec, const SparseVector& x,
                   const SparseVector& z);

/// Dense m x m Gram matrix, assembled from one triangle so the result is
/// exactly symmetric. Throws CapacityError beyond max_dense samples.
Eigen::MatrixXd gram_full(const KernelSpec& spec, const Dataset& data,
                          std::size_t max_dense = 20000);

/// |queries| x |support| matrix of kernel evaluations.
Eigen::MatrixXd gram_cross(const KernelSpec& spec,
                           const std::vector<SparseVector>& support,
                           const std::vector<SparseVector>& queries);

/// Greedy low-rank factor P with pivot set B: P*P^T approximates K and the
/// pivot rows K_B are reproduced exactly as P_B*P^T.
struct LowRankFactor {
  Eigen::MatrixXd P;        // m x r, full column rank
  std::vector<int> pivots;  // B, in selection order; P(B,:) is lower triangular
  double trace_residual = 0.0;  // trace(K - P*P^T) at exit

  int rank() const noexcept { return static_cast<int>(P.cols()); }
  /// The r x r pivot block P(B,:).
  Eigen::MatrixXd pivot_block() const;
};

/// Greedy pivoted Cholesky: repeatedly pivots on the largest residual
/// diagonal (ties to the lowest index) and applies the rank-one update,
/// stopping when trace(K - P*P^T) < trace_tol*m or r = rank_budget. Only r
/// kernel columns are ever materialized; total cost O(m*r^2).
LowRankFactor pivoted_cholesky(const KernelSpec& spec, const Dataset& data,
                               int rank_budget, double trace_tol);

}  // namespace unisvm
