#include <omp.h>

#include <cmath>
#include <random>

#include "catalog.hpp"
#include "doctest.h"
#include "unisvm/solver.hpp"

using namespace unisvm;

namespace {

Dataset random_problem(int m, Task task, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset d;
  d.task = task;
  d.dim = 2;
  for (int i = 0; i < m; ++i) {
    SparseVector x;
    x.push(1, gauss(rng));
    x.push(2, gauss(rng));
    d.samples.push_back(std::move(x));
    d.labels.push_back(task == Task::Classification
                           ? (unit(rng) < 0.5 ? -1.0 : 1.0)
                           : gauss(rng));
  }
  return d;
}

Eigen::VectorXd labels_of(const Dataset& d) {
  return Eigen::Map<const Eigen::VectorXd>(d.labels.data(), d.size());
}


constexpr double kGamma = 1.0;

}  // namespace

TEST_CASE("prepare_full: 1x1 and identity ridges") {
  Eigen::MatrixXd K1(1, 1);
  K1 << 1.0;
  const auto f1 = prepare_full(K1, 1.0, 1, 1.0);  // lambda*m/A = 1
  Eigen::VectorXd b(1);
  b << 0.8;
  CHECK(f1.solve(b)[0] == doctest::Approx(0.4).epsilon(1e-14));

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(6, 6);
  const auto fi = prepare_full(I, 1.0 / 6.0, 6, 1.0);  // ridge 1
  const Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
  CHECK((fi.solve(rhs) - rhs / 2.0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("prepare_full matches a dense-inverse oracle") {
  const Dataset d = random_problem(20, Task::Classification, 77);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, kGamma};
  const Eigen::MatrixXd K = gram_full(kernel, d);
  const double lambda = 0.05, A = 1.5;
  const auto f = prepare_full(K, lambda, 20, A);
  Eigen::MatrixXd ridged = K;
  ridged.diagonal().array() += lambda * 20 / A;
  const Eigen::MatrixXd Qinv = ridged.inverse();
  const Eigen::VectorXd b = labels_of(d);
  CHECK((f.solve(b) - Qinv * b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("prepare_full rejects bad input") {
  Eigen::MatrixXd K(2, 2);
  K.setConstant(std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(prepare_full(K, 1.0, 2, 1.0), NumericError);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1; ridge too small
  CHECK_THROWS_AS(prepare_full(indefinite, 0.05, 2, 1.0), NumericError);
  CHECK_THROWS_AS(prepare_full(Eigen::MatrixXd::Identity(2, 2), -1.0, 2, 1.0),
                  InputError);
  CHECK_THROWS_AS(prepare_full(Eigen::MatrixXd::Identity(2, 2), 1.0, 3, 1.0),
                  InputError);
}

TEST_CASE("prepare_smw equals the full solve when P P^T = K") {
  const Dataset d = random_problem(50, Task::Classification, 5);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, 3.0};
  const Eigen::MatrixXd K = gram_full(kernel, d);
  Eigen::MatrixXd ridged_probe = K;  // PD check via LLT factor as P
  const Eigen::MatrixXd L =
      (K + 1e-10 * Eigen::MatrixXd::Identity(50, 50)).llt().matrixL();
  LowRankFactor lr;
  lr.P = L;
  for (int i = 0; i < 50; ++i) lr.pivots.push_back(i);
  lr.trace_residual = 0.0;

  const double lambda = 0.02, A = 1.0;
  const auto full = prepare_full(L * L.transpose(), lambda, 50, A);
  const auto smw = prepare_smw(lr, lambda, 50, A);
  const Eigen::VectorXd b = labels_of(d);
  CHECK((full.solve(b) - smw.solve(b)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("prepare_smw rank-1 factor matches the dense oracle") {
  Eigen::MatrixXd P(10, 1);
  for (int i = 0; i < 10; ++i) P(i, 0) = 0.3 + 0.1 * i;
  LowRankFactor lr;
  lr.P = P;
  lr.pivots = {0};
  const double lambda = 0.1, A = 2.0;
  const double ridge = lambda * 10 / A;
  const auto smw = prepare_smw(lr, lambda, 10, A);
  const Eigen::MatrixXd dense =
      (ridge * Eigen::MatrixXd::Identity(10, 10) + P * P.transpose()).inverse();
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(10, -2.0, 2.0);
  CHECK((smw.solve(b) - dense * b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("zero-column factor is rejected") {
  LowRankFactor lr;
  lr.P = Eigen::MatrixXd(4, 0);
  CHECK_THROWS_AS(prepare_smw(lr, 1.0, 4, 1.0), InputError);
  CHECK_THROWS_AS(prepare_sparse(lr, 1.0, 4, 1.0), InputError);
}

TEST_CASE("sparse solution: r = 1 scalar system and pivot support") {
  Dataset d;
  d.task = Task::Classification;
  for (int i = 0; i < 5; ++i) {
    SparseVector x;
    x.push(1, 0.5);
    d.samples.push_back(x);
    d.labels.push_back(1.0);
  }
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, 1.0};
  const LowRankFactor lr = pivoted_cholesky(kernel, d, 5, 0.0);
  REQUIRE(lr.rank() == 1);
  const auto sparse = prepare_sparse(lr, 0.1, 5, 1.0);
  const Eigen::VectorXd y = labels_of(d);
  const Eigen::VectorXd alpha = sparse.solve(y);
  CHECK(alpha.size() == 1);
  CHECK(sparse.fitted(alpha).size() == 5);
}

TEST_CASE("dca_step: first step is the ridged LSSVM solve for every loss") {
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, kGamma};
  for (Task task : {Task::Classification, Task::Regression}) {
    const Dataset d = random_problem(40, task, 101 + int(task));
    const Eigen::MatrixXd K = gram_full(kernel, d);
    const Eigen::VectorXd y = labels_of(d);
    const auto catalog = task == Task::Classification ? classification_catalog()
                                                      : regression_catalog();
    for (const LossSpec& loss : catalog) {
      CAPTURE(loss_text(loss));
      const double lambda = 1e-3;
      const auto factor = prepare_full(K, lambda, 40, loss.A);
      const DcState s1 = dca_step(factor, initial_state(y), loss, y);
      Eigen::MatrixXd ridged = K;
      ridged.diagonal().array() += lambda * 40 / loss.A;
      const Eigen::VectorXd oracle = ridged.fullPivLu().solve(y);
      REQUIRE((s1.alpha - oracle).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("dca_step: least squares reaches its fixed point after one step") {
  const Dataset d = random_problem(30, Task::Classification, 303);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, kGamma};
  const auto loss = make_loss(LossKind::LeastSquares, Task::Classification);
  const auto factor =
      prepare_full(gram_full(kernel, d), 1e-2, 30, loss.A);
  const Eigen::VectorXd y = labels_of(d);
  const DcState s1 = dca_step(factor, initial_state(y), loss, y);
  const DcState s2 = dca_step(factor, s1, loss, y);
  CHECK((s2.alpha - s1.alpha).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dca_step: hand-computed 1x1 squared-hinge recursion") {
  Eigen::MatrixXd K(1, 1);
  K << 1.0;
  const auto loss = make_loss(LossKind::SquaredHinge, Task::Classification);
  const auto factor = prepare_full(K, 1.0, 1, 1.0);  // lambda*m/A = 1
  Eigen::VectorXd y(1);
  y << 1.0;
  const DcState s1 = dca_step(factor, initial_state(y), loss, y);
  CHECK(s1.alpha[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s1.xi[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s1.v[0] == doctest::Approx(-1.0).epsilon(1e-15));
  const DcState s2 = dca_step(factor, s1, loss, y);
  CHECK(s2.alpha[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s2.v[0] == doctest::Approx(-1.0).epsilon(1e-15));
  // objective at alpha = 0.5 with lambda = 1: 0.25 + psi(0.5) = 0.5
  CHECK(s1.objective_trace.back() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("train: least squares converges in at most two iterations") {
  for (Task task : {Task::Classification, Task::Regression}) {
    const Dataset d = random_problem(60, task, 9 + int(task));
    TrainConfig cfg;
    cfg.lambda = 1e-3;
    const auto [model, report] =
        train(cfg, d, make_loss(LossKind::LeastSquares, task),
              KernelSpec{KernelSpec::Kind::Gaussian, kGamma});
    CHECK(report.converged);
    CHECK(report.iterations <= 2);
    CHECK(report.strategy_used == Strategy::Full);  // auto, m <= 2000
    CHECK(report.factorizations == 1);
  }
}

TEST_CASE("train: exactly one factorization per call (counter)") {
  const Dataset d = random_problem(50, Task::Classification, 4);
  TrainConfig cfg;
  cfg.lambda = 1e-3;
  const long before = factor_preparation_count();
  const auto [model, report] =
      train(cfg, d,
            make_loss(LossKind::SmoothedHinge, Task::Classification),
            KernelSpec{KernelSpec::Kind::Gaussian, kGamma});
  CHECK(factor_preparation_count() - before == 1);
  CHECK(report.iterations >= 2);
}

TEST_CASE("train: auto strategy selection") {
  const Dataset d = random_problem(50, Task::Classification, 4);
  TrainConfig cfg;
  cfg.lambda = 1e-3;
  const auto loss = make_loss(LossKind::SquaredHinge, Task::Classification);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, kGamma};

  CHECK(train(cfg, d, loss, kernel).second.strategy_used == Strategy::Full);
  cfg.rank_budget = 10;  // an explicit factor request flips auto to sparse
  CHECK(train(cfg, d, loss, kernel).second.strategy_used == Strategy::Sparse);

  TrainConfig capped;
  capped.lambda = 1e-3;
  capped.strategy = Strategy::Full;
  capped.dense_cap = 10;
  CHECK_THROWS_AS(train(capped, d, loss, kernel), CapacityError);
}

TEST_CASE("train input validation") {
  const Dataset d = random_problem(10, Task::Classification, 1);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, kGamma};
  const auto loss = make_loss(LossKind::SquaredHinge, Task::Classification);
  TrainConfig bad;
  bad.lambda = -1.0;
  CHECK_THROWS_AS(train(bad, d, loss, kernel), InputError);

  const auto reg_loss = make_loss(LossKind::Huber, Task::Regression);
  TrainConfig cfg;
  CHECK_THROWS_AS(train(cfg, d, reg_loss, kernel), InputError);

  Dataset broken = d;
  broken.labels[3] = 0.5;
  CHECK_THROWS_AS(train(cfg, broken, loss, kernel), InputError);
}

TEST_CASE("objective values") {
  const Dataset d = random_problem(25, Task::Classification, 55);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, kGamma};
  const Eigen::MatrixXd K = gram_full(kernel, d);
  const auto repr = Representation::dense(K);
  const Eigen::VectorXd y = labels_of(d);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(25);

  const auto ls = make_loss(LossKind::LeastSquares, Task::Classification);
  CHECK(objective(repr, zero, ls, 0.1, y) == doctest::Approx(1.0));

  const Dataset r = random_problem(25, Task::Regression, 56);
  const Eigen::VectorXd yr = labels_of(r);
  const auto lsr = make_loss(LossKind::LeastSquares, Task::Regression);
  CHECK(objective(repr, zero, lsr, 0.1, yr) ==
        doctest::Approx(yr.squaredNorm() / 25.0));
}

TEST_CASE("objective trace is nonincreasing after the warm-start iterate") {
  const Dataset pool = gen_checkerboard(240, 2, 13);
  const Dataset d = flip_labels(pool, 0.1, 14);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, 0.5};
  for (const LossSpec& loss : classification_catalog()) {
    CAPTURE(loss_text(loss));
    TrainConfig cfg;
    cfg.lambda = 1e-5;
    cfg.max_iter = 60;
    const auto [model, report] = train(cfg, d, loss, kernel);
    for (std::size_t i = 1; i < report.objective_trace.size(); ++i)
      REQUIRE(report.objective_trace[i] <=
              report.objective_trace[i - 1] + 1e-10);
  }
}

TEST_CASE("stationarity residual") {
  const Dataset d = random_problem(100, Task::Regression, 21);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, kGamma};
  const Eigen::MatrixXd K = gram_full(kernel, d);
  const Eigen::VectorXd y = labels_of(d);
  const auto ls = make_loss(LossKind::LeastSquares, Task::Regression);
  const double lambda = 0.01;

  // the ridged LSSVM solution is a stationary point of F for least squares
  Eigen::MatrixXd ridged = K;
  ridged.diagonal().array() += lambda * 100;
  const Eigen::VectorXd alpha = ridged.ldlt().solve(y);
  const auto repr = Representation::dense(K);
  CHECK(stationarity_residual(repr, alpha, ls, lambda, y) < 1e-8);

  // alpha = 0 on nontrivial data is not stationary
  CHECK(stationarity_residual(repr, Eigen::VectorXd::Zero(100), ls, lambda, y) >
        1e-2);

  // converged smooth-loss models: residual below 1e-4 * (1 + |y|_inf)
  for (const LossSpec& loss :
       {make_loss(LossKind::SmoothedHinge, Task::Classification),
        make_loss(LossKind::GenNonconvex, Task::Classification)}) {
    const Dataset dc = random_problem(80, Task::Classification, 31);
    TrainConfig cfg;
    cfg.lambda = 1e-3;
    cfg.tol = 1e-9;
    cfg.max_iter = 400;
    const auto [model, report] = train(cfg, dc, loss, kernel);
    CHECK(report.converged);
    const Eigen::MatrixXd Kc = gram_full(kernel, dc);
    const Eigen::VectorXd yc = labels_of(dc);
    CHECK(stationarity_residual(Representation::dense(Kc), model.coefficients,
                                loss, cfg.lambda, yc) <=
          1e-4 * (1.0 + yc.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("strategy equivalence on an exact-rank factor") {
  const Dataset d = gen_checkerboard(60, 2, 71);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, 1.0};
  const Eigen::MatrixXd K = gram_full(kernel, d);
  const Eigen::VectorXd y = labels_of(d);
  const LowRankFactor lr = pivoted_cholesky(kernel, d, 60, 0.0);

  LossParams a2;
  a2.a = 2.0;
  const auto loss = make_loss(LossKind::TruncatedSquaredHinge,
                              Task::Classification, a2);
  const double lambda = 1e-4;
  const auto full = prepare_full(K, lambda, 60, loss.A);
  const auto smw = prepare_smw(lr, lambda, 60, loss.A);
  const auto sparse = prepare_sparse(lr, lambda, 60, loss.A);

  DcState sf = initial_state(y), sm = initial_state(y), sp = initial_state(y);
  for (int k = 0; k < 15; ++k) {
    sf = dca_step(full, sf, loss, y);
    sm = dca_step(smw, sm, loss, y);
    sp = dca_step(sparse, sp, loss, y);
    REQUIRE((sf.xi - sm.xi).cwiseAbs().maxCoeff() < 1e-6);
    REQUIRE((sf.xi - sp.xi).cwiseAbs().maxCoeff() < 1e-6);
  }
  // the sparse coefficient vector lives on the pivots only
  CHECK(sp.alpha.size() == lr.rank());

  // out-of-sample predictions agree too
  Model full_model, sparse_model;
  full_model.task = sparse_model.task = Task::Classification;
  full_model.kernel = sparse_model.kernel = kernel;
  full_model.support_points = d.samples;
  full_model.coefficients = sf.alpha;
  for (int j : lr.pivots) sparse_model.support_points.push_back(d.samples[j]);
  sparse_model.coefficients = sp.alpha;
  const Dataset fresh = gen_checkerboard(80, 2, 72);
  const Eigen::VectorXd score_full = predict(full_model, fresh.samples);
  const Eigen::VectorXd score_sparse = predict(sparse_model, fresh.samples);
  CHECK((score_full - score_sparse).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("train on xor with flipped labels: robust loss stays accurate") {
  const Dataset pool = gen_checkerboard(800, 2, 42);
  const auto [train_clean, test_set] = split_dataset(pool, 0.5, 43);
  const Dataset train_set = flip_labels(train_clean, 0.1, 44);

  TrainConfig cfg;
  cfg.lambda = 1e-5;
  cfg.strategy = Strategy::Sparse;
  cfg.rank_budget = 10;
  cfg.trace_tol = 0.0;
  LossParams a2;
  a2.a = 2.0;
  const auto loss = make_loss(LossKind::TruncatedSquaredHinge,
                              Task::Classification, a2);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, 0.5};
  const auto [model, report] = train(cfg, train_set, loss, kernel);
  CHECK(report.rank == 10);
  CHECK(model.support_points.size() == 10);
  const Metrics metrics = evaluate(model, test_set);
  CHECK(metrics.accuracy >= 0.95);
}

TEST_CASE("predict basics") {
  Model m;
  m.task = Task::Classification;
  m.kernel = KernelSpec{KernelSpec::Kind::Gaussian, 0.5};
  SparseVector s;
  s.push(1, 0.7);
  m.support_points = {s};
  m.coefficients = Eigen::VectorXd::Constant(1, 0.5);
  m.loss = "squared_hinge";
  CHECK(predict(m, {s})[0] == doctest::Approx(0.5).epsilon(1e-15));

  m.coefficients[0] = 0.0;
  SparseVector q;
  q.push(1, -3.0);
  const Eigen::VectorXd scores = predict(m, {s, q});
  CHECK(scores[0] == 0.0);
  CHECK(scores[1] == 0.0);

  CHECK_THROWS_AS(predict(m, {}), InputError);
}

TEST_CASE("training is deterministic and thread-count independent") {
  const Dataset pool = gen_checkerboard(300, 2, 5);
  const Dataset d = flip_labels(pool, 0.1, 6);
  TrainConfig cfg;
  cfg.lambda = 1e-5;
  cfg.strategy = Strategy::Sparse;
  cfg.rank_budget = 12;
  cfg.trace_tol = 0.0;
  const auto loss = make_loss(LossKind::SmoothedRamp1, Task::Classification,
                              [] { LossParams q; q.a = 2.0; return q; }());
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, 0.5};

  omp_set_num_threads(1);
  const auto [m1, r1] = train(cfg, d, loss, kernel);
  omp_set_num_threads(2);
  const auto [m2, r2] = train(cfg, d, loss, kernel);
  omp_set_num_threads(omp_get_num_procs());
  const auto [m3, r3] = train(cfg, d, loss, kernel);

  CHECK(m1.coefficients == m2.coefficients);  // bitwise
  CHECK(m1.coefficients == m3.coefficients);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.objective_trace == r2.objective_trace);
}
