// Times the OpenMP compute kernels against their serial reference
// implementations and reports the speedups, plus the steady-state iteration
// cost of the full and sparse solve strategies.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "unisvm/kernels.hpp"
#include "unisvm/solver.hpp"

using namespace unisvm;
using Clock = std::chrono::steady_clock;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best,
                    std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

void report(const std::string& name, double serial_s, double omp_s) {
  std::printf("%-28s serial %9.3f ms   omp %9.3f ms   speedup %.2fx\n",
              name.c_str(), serial_s * 1e3, omp_s * 1e3, serial_s / omp_s);
}

double g_sink = 0.0;  // keeps results observable

}  // namespace

int main() {
  std::printf("kernel benchmark on %d threads\n", omp_get_max_threads());

  const KernelSpec kernel{KernelSpec::Kind::Gaussian, 0.5};
  const Dataset gram_data = gen_checkerboard(1500, 2, 1);
  report("gram m=1500",
         time_best_of(3, [&] {
           g_sink += kernels::ref::gram(kernel, gram_data.samples)(7, 3);
         }),
         time_best_of(3, [&] {
           g_sink += kernels::gram(kernel, gram_data.samples)(7, 3);
         }));

  const Eigen::MatrixXd K = kernels::gram(kernel, gen_checkerboard(3000, 2, 2).samples);
  const Eigen::VectorXd x = Eigen::VectorXd::Random(3000);
  report("gemv 3000x3000",
         time_best_of(10, [&] { g_sink += kernels::ref::gemv(K, x)[0]; }),
         time_best_of(10, [&] { g_sink += kernels::gemv(K, x)[0]; }));

  const Eigen::MatrixXd P = Eigen::MatrixXd::Random(20000, 200);
  const Eigen::VectorXd t = Eigen::VectorXd::Random(200);
  const Eigen::VectorXd w = Eigen::VectorXd::Random(20000);
  report("gemv 20000x200",
         time_best_of(10, [&] { g_sink += kernels::ref::gemv(P, t)[0]; }),
         time_best_of(10, [&] { g_sink += kernels::gemv(P, t)[0]; }));
  report("gemv_t 20000x200",
         time_best_of(10, [&] { g_sink += kernels::ref::gemv_transpose(P, w)[0]; }),
         time_best_of(10, [&] { g_sink += kernels::gemv_transpose(P, w)[0]; }));

  // steady-state DCA iteration cost, full vs sparse
  LossParams a2;
  a2.a = 2.0;
  const auto loss =
      make_loss(LossKind::TruncatedSquaredHinge, Task::Classification, a2);

  const Dataset d_full = gen_checkerboard(4000, 2, 3);
  const Eigen::VectorXd y_full = Eigen::Map<const Eigen::VectorXd>(
      d_full.labels.data(), d_full.labels.size());
  const auto full =
      prepare_full(gram_full(kernel, d_full), 1e-5, 4000, loss.A);
  DcState sf = dca_step(full, initial_state(y_full), loss, y_full);
  const double t_full =
      time_best_of(5, [&] { sf = dca_step(full, sf, loss, y_full); });

  const Dataset d_sparse = gen_checkerboard(20000, 2, 4);
  const Eigen::VectorXd y_sparse = Eigen::Map<const Eigen::VectorXd>(
      d_sparse.labels.data(), d_sparse.labels.size());
  const auto sparse = prepare_sparse(pivoted_cholesky(kernel, d_sparse, 200, 0.0),
                                     1e-5, 20000, loss.A);
  DcState ss = dca_step(sparse, initial_state(y_sparse), loss, y_sparse);
  const double t_sparse =
      time_best_of(5, [&] { ss = dca_step(sparse, ss, loss, y_sparse); });

  std::printf("%-28s %9.3f ms per iteration\n", "full m=4000", t_full * 1e3);
  std::printf("%-28s %9.3f ms per iteration\n", "sparse m=20000 r=200",
              t_sparse * 1e3);
  std::printf("%-28s %.2fx\n", "full/sparse iteration ratio",
              t_full / t_sparse);
  return g_sink == 12345.0 ? 2 : 0;
}
