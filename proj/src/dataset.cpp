#include "unisvm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace unisvm {

std::string task_name(Task task) {
  return task == Task::Classification ? "classification" : "regression";
}

double squared_distance(const SparseVector& x, const SparseVector& z) {
  double sq = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.idx.size() && j < z.idx.size()) {
    if (x.idx[i] == z.idx[j]) {
      const double d = x.val[i] - z.val[j];
      sq += d * d;
      ++i;
      ++j;
    } else if (x.idx[i] < z.idx[j]) {
      sq += x.val[i] * x.val[i];
      ++i;
    } else {
      sq += z.val[j] * z.val[j];
      ++j;
    }
  }
  for (; i < x.idx.size(); ++i) sq += x.val[i] * x.val[i];
  for (; j < z.idx.size(); ++j) sq += z.val[j] * z.val[j];
  return sq;
}

void Dataset::validate() const {
  if (samples.empty()) throw InputError("dataset is empty");
  if (samples.size() != labels.size())
    throw InputError("dataset has " + std::to_string(samples.size()) +
                     " samples but " + std::to_string(labels.size()) + " labels");
  if (task == Task::Classification) {
    for (double y : labels)
      if (y != 1.0 && y != -1.0)
        throw InputError("classification label outside {-1,+1}: " +
                         std::to_string(y));
  }
}

Dataset parse_libsvm(std::istream& in, Task task, std::string* warn) {
  Dataset data;
  data.task = task;
  std::string line;
  long lineno = 0;
  bool odd_labels = false;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments and blank lines
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;

    std::istringstream ls(line);
    double label;
    if (!(ls >> label))
      throw ParseError("expected a numeric label", lineno);

    SparseVector x;
    std::string tok;
    int prev_idx = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError("malformed feature token '" + tok + "'", lineno);
      int index = 0;
      double value = 0.0;
      try {
        std::size_t used = 0;
        index = std::stoi(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(tok);
        const std::string vs = tok.substr(colon + 1);
        value = std::stod(vs, &used);
        if (used != vs.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("malformed feature token '" + tok + "'", lineno);
      }
      if (index < 1)
        throw ParseError("feature index must be >= 1, got " +
                         std::to_string(index), lineno);
      if (index <= prev_idx)
        throw ParseError("feature indices must be strictly increasing (" +
                         std::to_string(prev_idx) + " then " +
                         std::to_string(index) + ")", lineno);
      prev_idx = index;
      x.push(index, value);
    }

    if (task == Task::Classification) {
      if (label != 1.0 && label != -1.0 && label != 0.0) odd_labels = true;
      label = label > 0.0 ? 1.0 : -1.0;
    }
    data.dim = std::max(data.dim, x.max_index());
    data.samples.push_back(std::move(x));
    data.labels.push_back(label);
  }
  if (data.samples.empty()) throw InputError("no samples in input");
  if (odd_labels && warn)
    *warn = "labels outside {-1,0,+1} were remapped by sign";
  return data;
}

Dataset load_libsvm(const std::string& path, Task task, std::string* warn) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_libsvm(in, task, warn);
}

void write_libsvm(const Dataset& data, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", data.labels[i]);
    out << buf;
    const SparseVector& x = data.samples[i];
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", x.val[k]);
      out << ' ' << x.idx[k] << ':' << buf;
    }
    out << '\n';
  }
}

void save_libsvm(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_libsvm(data, out);
}

int checkerboard_label(double x1, double x2, int grid) {
  const long t1 = static_cast<long>(std::floor(grid * x1));
  const long t2 = static_cast<long>(std::floor(grid * x2));
  return ((t1 + t2) % 2 + 2) % 2 == 0 ? +1 : -1;
}

Dataset gen_checkerboard(int n, int grid, std::uint64_t seed) {
  if (n < 1) throw InputError("need n >= 1");
  if (grid < 2 || grid % 2 != 0) throw InputError("grid must be even and >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset data;
  data.task = Task::Classification;
  data.dim = 2;
  data.samples.reserve(n);
  data.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x1 = unit(rng);
    const double x2 = unit(rng);
    SparseVector x;
    x.push(1, x1);
    x.push(2, x2);
    data.samples.push_back(std::move(x));
    data.labels.push_back(checkerboard_label(x1, x2, grid));
  }
  return data;
}

Dataset gen_sinc(double x_min, double x_max, double step, double noise_std,
                 std::uint64_t seed) {
  if (!(x_min < x_max)) throw InputError("need x_min < x_max");
  if (!(step > 0.0)) throw InputError("need step > 0");
  if (noise_std < 0.0) throw InputError("need noise_std >= 0");
  const long count = static_cast<long>(std::floor((x_max - x_min) / step)) + 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_std > 0.0 ? noise_std : 1.0);
  Dataset data;
  data.task = Task::Regression;
  data.dim = 1;
  data.samples.reserve(count);
  data.labels.reserve(count);
  for (long k = 0; k < count; ++k) {
    const double x = x_min + k * step;
    double y = x == 0.0 ? 1.0 : std::sin(x) / x;
    if (noise_std > 0.0) y += noise(rng);
    SparseVector s;
    s.push(1, x);
    data.samples.push_back(std::move(s));
    data.labels.push_back(y);
  }
  return data;
}

Dataset flip_labels(const Dataset& data, double fraction, std::uint64_t seed) {
  if (data.task != Task::Classification)
    throw InputError("flip_labels requires a classification dataset");
  if (fraction < 0.0 || fraction >= 1.0)
    throw InputError("flip fraction must be in [0,1)");
  const std::size_t m = data.size();
  const std::size_t k = static_cast<std::size_t>(fraction * m);
  Dataset out = data;
  if (k == 0) return out;
  // partial Fisher-Yates: the first k entries are a uniform k-subset
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  for (std::size_t i = 0; i < k; ++i) out.labels[order[i]] = -out.labels[order[i]];
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double fraction,
                                          std::uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0)
    throw InputError("split fraction must be in (0,1)");
  const std::size_t m = data.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  // floor with a nudge so fractions like 1500/2514 land on the exact count
  const std::size_t k = static_cast<std::size_t>(fraction * m + 1e-9);
  if (k == 0 || k == m) throw InputError("split leaves an empty part");
  Dataset a, b;
  a.task = b.task = data.task;
  for (std::size_t i = 0; i < m; ++i) {
    Dataset& dst = i < k ? a : b;
    dst.samples.push_back(data.samples[order[i]]);
    dst.labels.push_back(data.labels[order[i]]);
    dst.dim = std::max(dst.dim, data.samples[order[i]].max_index());
  }
  return {std::move(a), std::move(b)};
}

Metrics evaluate_scores(Task task, const std::vector<double>& scores,
                        const std::vector<double>& labels) {
  if (scores.size() != labels.size())
    throw InputError("scores/labels size mismatch");
  if (scores.empty()) throw InputError("nothing to evaluate");
  Metrics m;
  if (task == Task::Classification) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double sign = scores[i] >= 0.0 ? 1.0 : -1.0;  // sgn(0) = +1
      if (sign == labels[i]) ++hits;
    }
    m.accuracy = static_cast<double>(hits) / scores.size();
  } else {
    double sq = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double d = scores[i] - labels[i];
      sq += d * d;
    }
    m.mse = sq / scores.size();
    m.rmse = std::sqrt(m.mse);
  }
  return m;
}

}  // namespace unisvm
