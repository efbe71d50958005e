#pragma once

#include <vector>

#include "unisvm/losses.hpp"

// The worked loss instances exercised across the suites (the same
// parameterizations the bundled bench sweep uses).
inline std::vector<unisvm::LossSpec> classification_catalog() {
  using unisvm::LossKind;
  using unisvm::LossParams;
  using unisvm::Task;
  auto L = [](LossKind k, LossParams q = {}) {
    return unisvm::make_loss(k, Task::Classification, q);
  };
  LossParams a2;
  a2.a = 2.0;
  LossParams p10;
  p10.p = 10.0;
  LossParams a2p10;
  a2p10.a = 2.0;
  a2p10.p = 10.0;
  LossParams g222;  // a=b=c=2 defaults
  LossParams g224;
  g224.c = 4.0;
  LossParams g234;
  g234.b = 3.0;
  g234.c = 4.0;
  return {
      L(LossKind::LeastSquares),
      L(LossKind::TruncatedLeastSquares, a2),
      L(LossKind::SquaredHinge),
      L(LossKind::TruncatedSquaredHinge, a2),
      L(LossKind::SmoothedHinge, p10),
      L(LossKind::SmoothedRamp1, a2),
      L(LossKind::SmoothedRamp2, a2p10),
      L(LossKind::GenNonconvex, g222),
      L(LossKind::GenNonconvex, g224),
      L(LossKind::GenNonconvex, g234),
  };
}

inline std::vector<unisvm::LossSpec> regression_catalog() {
  using unisvm::LossKind;
  using unisvm::LossParams;
  using unisvm::Task;
  auto L = [](LossKind k, LossParams q = {}) {
    return unisvm::make_loss(k, Task::Regression, q);
  };
  LossParams a2;
  a2.a = 2.0;
  LossParams eps;
  eps.p = 100.0;
  eps.eps = 0.1;
  LossParams hub;
  hub.delta = 0.1;
  LossParams abs;
  abs.p = 100.0;
  LossParams thub;
  thub.delta = 0.1;
  thub.a = 2.0;
  return {
      L(LossKind::LeastSquares),
      L(LossKind::TruncatedLeastSquares, a2),
      L(LossKind::SmoothedEpsInsensitive, eps),
      L(LossKind::Huber, hub),
      L(LossKind::SmoothedAbsolute, abs),
      L(LossKind::TruncatedHuber, thub),
  };
}

inline std::vector<unisvm::LossSpec> full_catalog() {
  auto all = classification_catalog();
  auto reg = regression_catalog();
  all.insert(all.end(), reg.begin(), reg.end());
  return all;
}

// Kinds whose psi is differentiable everywhere (no subgradient selection at a
// truncation kink); the curvature-attainment and finite-difference checks
// apply to these.
inline bool is_smooth(unisvm::LossKind kind) {
  using unisvm::LossKind;
  switch (kind) {
    case LossKind::TruncatedLeastSquares:
    case LossKind::TruncatedSquaredHinge:
    case LossKind::TruncatedHuber:
      return false;
    default:
      return true;
  }
}
