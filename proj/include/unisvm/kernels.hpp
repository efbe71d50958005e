#pragma once

#include <Eigen/Core>
#include <vector>

#include "unisvm/kernel.hpp"

// The compute kernels behind Gram assembly and the per-iteration matrix
// products. The OpenMP versions partition output elements across threads and
// accumulate each element in a fixed index order, so results are independent
// of the thread count and bitwise-identical to the serial reference in
// kernels::ref.

namespace unisvm::kernels {

/// y = A*x for column-major dense A.
Eigen::VectorXd gemv(const Eigen::MatrixXd& A, const Eigen::VectorXd& x);

/// y = A^T*x for column-major dense A.
Eigen::VectorXd gemv_transpose(const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& x);

/// Dense symmetric Gram matrix over `points` (upper triangle computed,
/// mirrored).
Eigen::MatrixXd gram(const KernelSpec& spec,
                     const std::vector<SparseVector>& points);

/// |queries| x |support| kernel evaluations.
Eigen::MatrixXd cross_gram(const KernelSpec& spec,
                           const std::vector<SparseVector>& support,
                           const std::vector<SparseVector>& queries);

/// Column j of the Gram matrix over `points`.
Eigen::VectorXd kernel_column(const KernelSpec& spec,
                              const std::vector<SparseVector>& points, int j);

/// Serial reference implementations (identical accumulation order; used by
/// tests and the kernel benchmark).
namespace ref {
Eigen::VectorXd gemv(const Eigen::MatrixXd& A, const Eigen::VectorXd& x);
Eigen::VectorXd gemv_transpose(const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& x);
Eigen::MatrixXd gram(const KernelSpec& spec,
                     const std::vector<SparseVector>& points);
Eigen::MatrixXd cross_gram(const KernelSpec& spec,
                           const std::vector<SparseVector>& support,
                           const std::vector<SparseVector>& queries);
Eigen::VectorXd kernel_column(const KernelSpec& spec,
                              const std::vector<SparseVector>& points, int j);
}  // namespace ref

}  // namespace unisvm::kernels
