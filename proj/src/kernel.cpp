#include "unisvm/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "unisvm/kernels.hpp"

namespace unisvm {

double kernel_eval(const KernelSpec& spec, const SparseVector& x,
                   const SparseVector& z) {
  spec.validate();
  return std::exp(-spec.gamma * squared_distance(x, z));
}

Eigen::MatrixXd gram_full(const KernelSpec& spec, const Dataset& data,
                          std::size_t max_dense) {
  if (data.size() < 1) throw InputError("dataset is empty");
  if (data.size() > max_dense)
    throw CapacityError(
        "dense Gram of " + std::to_string(data.size()) +
        " samples exceeds the cap of " + std::to_string(max_dense) +
        "; use the low-rank path (sparse/smw strategy) instead");
  return kernels::gram(spec, data.samples);
}

Eigen::MatrixXd gram_cross(const KernelSpec& spec,
                           const std::vector<SparseVector>& support,
                           const std::vector<SparseVector>& queries) {
  if (support.empty() || queries.empty())
    throw InputError("gram_cross needs nonempty point lists");
  return kernels::cross_gram(spec, support, queries);
}

Eigen::MatrixXd LowRankFactor::pivot_block() const {
  const int r = rank();
  Eigen::MatrixXd PB(r, r);
  for (int k = 0; k < r; ++k) PB.row(k) = P.row(pivots[k]);
  return PB;
}

LowRankFactor pivoted_cholesky(const KernelSpec& spec, const Dataset& data,
                               int rank_budget, double trace_tol) {
  spec.validate();
  if (rank_budget < 1) throw InputError("rank_budget must be >= 1");
  if (trace_tol < 0.0) throw InputError("trace_tol must be >= 0");
  const Eigen::Index m = static_cast<Eigen::Index>(data.size());
  if (m < 1) throw InputError("dataset is empty");
  const int rmax = static_cast<int>(std::min<Eigen::Index>(rank_budget, m));

  Eigen::MatrixXd P(m, rmax);
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(m);  // kappa(x,x) = 1
  std::vector<int> pivots;
  pivots.reserve(rmax);
  double trace = static_cast<double>(m);

  int r = 0;
  while (r < rmax) {
    if (r > 0 && trace < trace_tol * m) break;

    // greedy pivot: largest residual diagonal, ties to the lowest index
    Eigen::Index piv = 0;
    double dmax = diag[0];
    for (Eigen::Index i = 1; i < m; ++i)
      if (diag[i] > dmax) {
        dmax = diag[i];
        piv = i;
      }
    if (dmax <= 0.0) break;  // residual exhausted, factor is exact

    Eigen::VectorXd q = kernels::kernel_column(spec, data.samples, piv);
    double* qd = q.data();
    for (int k = 0; k < r; ++k) {
      const double pjk = P(piv, k);
      const double* col = P.data() + static_cast<Eigen::Index>(k) * m;
#pragma omp parallel for schedule(static) if (m >= 2048)
      for (Eigen::Index i = 0; i < m; ++i) qd[i] -= col[i] * pjk;
    }

    const double root = std::sqrt(dmax);
    double* pcol = P.data() + static_cast<Eigen::Index>(r) * m;
    double* dd = diag.data();
#pragma omp parallel for schedule(static) if (m >= 2048)
    for (Eigen::Index i = 0; i < m; ++i) {
      pcol[i] = qd[i] / root;
      dd[i] -= pcol[i] * pcol[i];
    }
    diag[piv] = 0.0;

    trace = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (diag[i] < 0.0) {
        if (diag[i] < -1e-6)
          throw NumericError(
              "pivoted Cholesky residual diagonal went below -1e-6 "
              "(non-PSD breakdown)");
        if (diag[i] >= -1e-12) diag[i] = 0.0;
      }
      trace += diag[i];
    }
    pivots.push_back(static_cast<int>(piv));
    ++r;
  }

  if (r == 0)
    throw NumericError("pivoted Cholesky made no progress (zero diagonal)");

  LowRankFactor factor;
  factor.P = P.leftCols(r);
  factor.pivots = std::move(pivots);
  factor.trace_residual = trace;
  return factor;
}

}  // namespace unisvm
