#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "unisvm/errors.hpp"

namespace unisvm {

enum class Task { Classification, Regression };

std::string task_name(Task task);

/// Sparse feature vector. External indices are 1-based and strictly
/// increasing; absent indices are zero.
struct SparseVector {
  std::vector<int> idx;
  std::vector<double> val;

  std::size_t nnz() const noexcept { return idx.size(); }
  int max_index() const noexcept { return idx.empty() ? 0 : idx.back(); }
  void push(int index, double value) {
    idx.push_back(index);
    val.push_back(value);
  }
  bool operator==(const SparseVector&) const = default;
};

/// ||x - z||^2 by merging the two index lists.
double squared_distance(const SparseVector& x, const SparseVector& z);

struct Dataset {
  std::vector<SparseVector> samples;
  std::vector<double> labels;
  Task task = Task::Classification;
  int dim = 0;  // max feature index seen

  std::size_t size() const noexcept { return samples.size(); }

  /// Throws InputError if any structural invariant is broken
  /// (size mismatch, empty set, classification labels outside {-1,+1}).
  void validate() const;
};

/// Reads LIBSVM text: `<label> <idx>:<val> ...`, one sample per line.
/// Classification labels are mapped to {-1,+1}: any positive label -> +1,
/// everything else -> -1. A warning is emitted via `warn` (may be null)
/// when labels outside {-1,0,+1} get remapped.
Dataset parse_libsvm(std::istream& in, Task task, std::string* warn = nullptr);
Dataset load_libsvm(const std::string& path, Task task, std::string* warn = nullptr);

void write_libsvm(const Dataset& data, std::ostream& out);
void save_libsvm(const Dataset& data, const std::string& path);

/// Tile parity of the grid x grid XOR tiling of [0,1]^2: +1 on even tiles.
int checkerboard_label(double x1, double x2, int grid);

/// n points uniform on [0,1]^2 labelled by the XOR tiling. grid must be even
/// and >= 2; grid=2 is the classic xor problem.
Dataset gen_checkerboard(int n, int grid, std::uint64_t seed);

/// Regression samples y = sin(x)/x + N(0, noise_std^2) on the grid
/// x_min, x_min+step, ..., with floor((x_max-x_min)/step)+1 points.
/// sin(0)/0 is defined as 1.
Dataset gen_sinc(double x_min, double x_max, double step, double noise_std,
                 std::uint64_t seed);

/// Negates the labels of exactly floor(fraction*m) distinct samples chosen
/// uniformly without replacement. Classification only.
Dataset flip_labels(const Dataset& data, double fraction, std::uint64_t seed);

/// Seeded shuffle split; first part has floor(fraction*m) samples.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double fraction,
                                          std::uint64_t seed);

struct Metrics {
  double accuracy = 0.0;  // classification
  double rmse = 0.0;      // regression
  double mse = 0.0;       // regression
  std::size_t support_size = 0;
  double train_seconds = 0.0;
};

/// Accuracy (sgn(score)=label, with sgn(0) counted as +1) or RMSE/MSE of raw
/// scores against the dataset labels.
Metrics evaluate_scores(Task task, const std::vector<double>& scores,
                        const std::vector<double>& labels);

}  // namespace unisvm
