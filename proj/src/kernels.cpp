#include "unisvm/kernels.hpp"

#include <omp.h>

#include <cmath>

namespace unisvm::kernels {

Eigen::VectorXd gemv(const Eigen::MatrixXd& A, const Eigen::VectorXd& x) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (x.size() != n) throw InputError("gemv dimension mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  const double* a = A.data();
  double* yd = y.data();
#pragma omp parallel
  {
    const int nt = omp_get_num_threads();
    const int t = omp_get_thread_num();
    const Eigen::Index lo = m * t / nt;
    const Eigen::Index hi = m * (t + 1) / nt;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double xj = x[j];
      const double* col = a + j * m;
      for (Eigen::Index i = lo; i < hi; ++i) yd[i] += col[i] * xj;
    }
  }
  return y;
}

// Column dot products with four-lane partial sums (combined in a fixed
// order, so the result is reproducible and matches kernels::ref bitwise).
static double column_dot(const double* col, const double* x, Eigen::Index m) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  Eigen::Index i = 0;
  for (; i + 4 <= m; i += 4) {
    s0 += col[i] * x[i];
    s1 += col[i + 1] * x[i + 1];
    s2 += col[i + 2] * x[i + 2];
    s3 += col[i + 3] * x[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < m; ++i) s += col[i] * x[i];
  return s;
}

Eigen::VectorXd gemv_transpose(const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& x) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (x.size() != m) throw InputError("gemv_transpose dimension mismatch");
  Eigen::VectorXd y(n);
  const double* a = A.data();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) y[j] = column_dot(a + j * m, x.data(), m);
  return y;
}

Eigen::MatrixXd gram(const KernelSpec& spec,
                     const std::vector<SparseVector>& points) {
  spec.validate();
  const Eigen::Index m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd K(m, m);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i)
      K(i, j) = kernel_eval(spec, points[i], points[j]);
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = j + 1; i < m; ++i) K(i, j) = K(j, i);
  return K;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec,
                           const std::vector<SparseVector>& support,
                           const std::vector<SparseVector>& queries) {
  spec.validate();
  const Eigen::Index q = static_cast<Eigen::Index>(queries.size());
  const Eigen::Index s = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd G(q, s);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < q; ++i)
    for (Eigen::Index j = 0; j < s; ++j)
      G(i, j) = kernel_eval(spec, queries[i], support[j]);
  return G;
}

Eigen::VectorXd kernel_column(const KernelSpec& spec,
                              const std::vector<SparseVector>& points, int j) {
  spec.validate();
  const Eigen::Index m = static_cast<Eigen::Index>(points.size());
  if (j < 0 || j >= m) throw InputError("kernel_column index out of range");
  Eigen::VectorXd col(m);
  const SparseVector& xj = points[j];
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < m; ++i)
    col[i] = kernel_eval(spec, points[i], xj);
  return col;
}

}  // namespace unisvm::kernels
