#include <cstdio>
#include <sstream>

#include "doctest.h"
#include "unisvm/model_io.hpp"

using namespace unisvm;

namespace {

Model trained_model() {
  const Dataset pool = gen_checkerboard(120, 2, 8);
  TrainConfig cfg;
  cfg.lambda = 1e-4;
  cfg.strategy = Strategy::Sparse;
  cfg.rank_budget = 8;
  cfg.trace_tol = 0.0;
  LossParams a2;
  a2.a = 2.0;
  return train(cfg, pool,
               make_loss(LossKind::TruncatedSquaredHinge, Task::Classification,
                         a2),
               KernelSpec{KernelSpec::Kind::Gaussian, 0.5})
      .first;
}

}  // namespace

TEST_CASE("binary round trip preserves scores bitwise") {
  const Model model = trained_model();
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  write_model(model, buf, false);
  const Model back = read_model(buf);

  CHECK(back.task == model.task);
  CHECK(back.kernel.gamma == model.kernel.gamma);
  CHECK(back.loss == model.loss);
  CHECK(back.lambda == model.lambda);
  CHECK(back.A == model.A);
  CHECK(back.coefficients == model.coefficients);

  const Dataset queries = gen_checkerboard(50, 2, 77);
  const Eigen::VectorXd a = predict(model, queries.samples);
  const Eigen::VectorXd b = predict(back, queries.samples);
  CHECK(a == b);  // bitwise
}

TEST_CASE("text round trip is exact too") {
  const Model model = trained_model();
  std::stringstream buf;
  write_model(model, buf, true);
  const Model back = read_model(buf);
  CHECK(back.coefficients == model.coefficients);
  CHECK(back.loss == model.loss);
  CHECK(back.kernel.gamma == model.kernel.gamma);
  for (std::size_t i = 0; i < model.support_points.size(); ++i)
    CHECK(back.support_points[i] == model.support_points[i]);
}

TEST_CASE("corrupt model streams are rejected") {
  std::stringstream junk("not a model at all");
  CHECK_THROWS_AS(read_model(junk), InputError);
  std::stringstream trunc(std::ios::in | std::ios::out | std::ios::binary);
  trunc << "USVM";
  CHECK_THROWS_AS(read_model(trunc), InputError);

  const Model model = trained_model();
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  write_model(model, buf, false);
  std::string bytes = buf.str();
  bytes.resize(bytes.size() / 2);  // cut the container short
  std::stringstream cut(bytes, std::ios::in | std::ios::binary);
  CHECK_THROWS_AS(read_model(cut), InputError);
}
