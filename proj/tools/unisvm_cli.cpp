// unisvm command-line front end: synthesize datasets, train models, predict,
// evaluate, and run benchmark sweeps.

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

#include <json.hpp>

#include "unisvm/model_io.hpp"
#include "unisvm/solver.hpp"

using json = nlohmann::json;
using namespace unisvm;

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// CSV fields must stay comma-free; parameterized loss names use ';'.
std::string csv_field(std::string s) {
  for (char& c : s)
    if (c == ',') c = ';';
  return s;
}

Task parse_task(const std::string& t) {
  if (t == "class" || t == "classification") return Task::Classification;
  if (t == "reg" || t == "regression") return Task::Regression;
  throw InputError("unknown task '" + t + "' (use class or reg)");
}

Strategy parse_strategy(const std::string& s) {
  if (s == "auto") return Strategy::Auto;
  if (s == "full") return Strategy::Full;
  if (s == "smw") return Strategy::Smw;
  if (s == "sparse") return Strategy::Sparse;
  throw InputError("unknown solver '" + s + "'");
}

std::size_t dense_cap_from_env() {
  if (const char* cap = std::getenv("UNISVM_DENSE_CAP")) {
    const long v = std::atol(cap);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 20000;
}

void append_csv_row(const std::string& path, const std::string& header,
                    const std::string& row) {
  const bool fresh =
      !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw InputError("cannot write '" + path + "'");
  if (fresh) out << header << '\n';
  out << row << '\n';
}

constexpr const char* kMetricsHeader =
    "loss,seed,m,r,iterations,train_seconds,metric,error";

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data, model_path, task = "class", loss = "least_squares";
  std::string loss_params, solver = "auto", metrics;
  double lambda = 1e-3, gamma = 1.0, A = 0.0, tol = 1e-6, approx_tol = -1.0;
  int rank = 0, max_iter = 100;
  std::uint64_t seed = 1;
  std::string format = "binary";
};

std::string compose_loss_text(const std::string& loss,
                              const std::string& extra_params) {
  if (extra_params.empty()) return loss;
  return loss + (loss.find(':') == std::string::npos ? ":" : ",") +
         extra_params;
}

TrainConfig make_config(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.lambda = a.lambda;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.strategy = parse_strategy(a.solver);
  if (a.rank > 0) cfg.rank_budget = a.rank;
  if (a.approx_tol >= 0.0) cfg.trace_tol = a.approx_tol;
  cfg.dense_cap = dense_cap_from_env();
  return cfg;
}

int cmd_train(const TrainArgs& a) {
  const Task task = parse_task(a.task);
  std::string warn;
  const Dataset data = load_libsvm(a.data, task, &warn);
  if (!warn.empty()) std::cerr << "warning: " << warn << '\n';
  const LossSpec loss =
      parse_loss(compose_loss_text(a.loss, a.loss_params), task, a.A);
  const KernelSpec kernel{KernelSpec::Kind::Gaussian, a.gamma};
  const TrainConfig cfg = make_config(a);

  if (a.format != "binary" && a.format != "text")
    throw InputError("--format must be binary or text");
  const auto [model, report] = train(cfg, data, loss, kernel);
  save_model(model, a.model_path, a.format == "text");

  std::cout << "trained loss=" << csv_field(model.loss) << " m=" << data.size()
            << " r=" << report.rank << " iterations=" << report.iterations
            << " converged=" << (report.converged ? "yes" : "no")
            << " objective=" << fmt(report.objective_trace.back())
            << " seconds=" << fmt(report.train_seconds) << '\n';
  if (!report.converged)
    std::cerr << "warning: stopped at max_iter before the v-change tolerance\n";

  if (!a.metrics.empty()) {
    std::string row = csv_field(model.loss) + "," + std::to_string(a.seed) +
                      "," + std::to_string(data.size()) + "," +
                      std::to_string(report.rank) + "," +
                      std::to_string(report.iterations) + "," +
                      fmt(report.train_seconds) + "," +
                      fmt(report.objective_trace.back()) + ",";
    append_csv_row(a.metrics, kMetricsHeader, row);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string model_path, data, out;
};

int cmd_predict(const PredictArgs& a) {
  const Model model = load_model(a.model_path);
  const Dataset data = load_libsvm(a.data, model.task);
  const Eigen::VectorXd scores = predict(model, data.samples);

  std::ofstream out(a.out);
  if (!out) throw InputError("cannot write '" + a.out + "'");
  const bool classify = model.task == Task::Classification;
  out << (classify ? "index,score,label\n" : "index,score\n");
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    out << i << ',' << fmt(scores[i]);
    if (classify) out << ',' << (scores[i] >= 0.0 ? 1 : -1);
    out << '\n';
  }
  std::cout << "wrote " << scores.size() << " predictions to " << a.out << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string model_path, data, metrics;
  std::uint64_t seed = 1;
};

int cmd_eval(const EvalArgs& a) {
  const Model model = load_model(a.model_path);
  const Dataset data = load_libsvm(a.data, model.task);
  const Metrics m = evaluate(model, data);
  if (model.task == Task::Classification)
    std::cout << "accuracy=" << fmt(m.accuracy);
  else
    std::cout << "rmse=" << fmt(m.rmse) << " mse=" << fmt(m.mse);
  std::cout << " support=" << m.support_size << " n=" << data.size() << '\n';
  if (!a.metrics.empty()) {
    const double metric =
        model.task == Task::Classification ? m.accuracy : m.rmse;
    std::string row = csv_field(model.loss) + "," + std::to_string(a.seed) +
                      "," + std::to_string(data.size()) + "," +
                      std::to_string(model.support_points.size()) + ",,," +
                      fmt(metric) + ",";
    append_csv_row(a.metrics, kMetricsHeader, row);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 1;
  double flip = 0.0, split = 0.0;
  // checkerboard
  int n = 800, grid = 2;
  // sinc
  double x_min = -4.0 * std::numbers::pi, x_max = 4.0 * std::numbers::pi;
  double step = 0.01, noise = 0.05;
};

int emit_synth(const Dataset& pool, const SynthArgs& a) {
  if (a.split > 0.0) {
    auto [train_part, test_part] = split_dataset(pool, a.split, a.seed + 1);
    if (a.flip > 0.0) train_part = flip_labels(train_part, a.flip, a.seed + 2);
    const std::string train_path = a.out + "_train.libsvm";
    const std::string test_path = a.out + "_test.libsvm";
    save_libsvm(train_part, train_path);
    save_libsvm(test_part, test_path);
    std::cout << "wrote " << train_part.size() << " samples to " << train_path
              << " and " << test_part.size() << " to " << test_path << '\n';
  } else {
    Dataset data = pool;
    if (a.flip > 0.0) data = flip_labels(data, a.flip, a.seed + 2);
    const std::string path = a.out + ".libsvm";
    save_libsvm(data, path);
    std::cout << "wrote " << data.size() << " samples to " << path << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string sweep, out;
  int jobs = 1;
};

struct BenchJob {
  std::string loss;
  std::uint64_t seed = 1;
  int size = 0;
};

struct SweepSpec {
  Task task = Task::Classification;
  std::string generator = "checkerboard";
  int grid = 2;
  double flip = 0.0, split = 0.5;
  double x_min = -4.0 * std::numbers::pi, x_max = 4.0 * std::numbers::pi;
  double step = 0.01, noise = 0.05;
  std::vector<std::string> losses;
  std::vector<std::uint64_t> seeds;
  std::vector<int> sizes;
  double gamma = 1.0, lambda = 1e-3, tol = 1e-6, approx_tol = -1.0;
  std::string solver = "sparse";
  int rank = 0, max_iter = 100;
};

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sweep file '" + path + "'");
  json j = json::parse(in);
  SweepSpec s;
  s.task = parse_task(j.at("task").get<std::string>());
  const json& g = j.at("generator");
  s.generator = g.at("name").get<std::string>();
  s.grid = g.value("grid", 2);
  s.flip = g.value("flip", 0.0);
  s.split = g.value("split", 0.5);
  s.x_min = g.value("x_min", s.x_min);
  s.x_max = g.value("x_max", s.x_max);
  s.step = g.value("step", s.step);
  s.noise = g.value("noise", s.noise);
  s.losses = j.at("losses").get<std::vector<std::string>>();
  s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  s.sizes = j.at("sizes").get<std::vector<int>>();
  s.gamma = j.at("gamma").get<double>();
  s.lambda = j.at("lambda").get<double>();
  s.solver = j.value("solver", "sparse");
  s.rank = j.value("rank", 0);
  s.approx_tol = j.value("approx_tol", -1.0);
  s.tol = j.value("tol", 1e-6);
  s.max_iter = j.value("max_iter", 100);
  if (s.losses.empty() || s.seeds.empty() || s.sizes.empty())
    throw InputError("sweep needs nonempty losses, seeds and sizes");
  return s;
}

std::string run_bench_job(const SweepSpec& s, const BenchJob& job) {
  Dataset pool;
  if (s.generator == "checkerboard")
    pool = gen_checkerboard(job.size, s.grid, job.seed);
  else if (s.generator == "sinc")
    pool = gen_sinc(s.x_min, s.x_max, s.step, s.noise, job.seed);
  else
    throw InputError("unknown generator '" + s.generator + "'");

  auto [train_part, test_part] = split_dataset(pool, s.split, job.seed + 1);
  if (s.flip > 0.0) train_part = flip_labels(train_part, s.flip, job.seed + 2);

  const LossSpec loss = parse_loss(job.loss, s.task);
  TrainConfig cfg;
  cfg.lambda = s.lambda;
  cfg.tol = s.tol;
  cfg.max_iter = s.max_iter;
  cfg.strategy = parse_strategy(s.solver);
  if (s.rank > 0) cfg.rank_budget = s.rank;
  if (s.approx_tol >= 0.0) cfg.trace_tol = s.approx_tol;
  cfg.dense_cap = dense_cap_from_env();

  const KernelSpec kernel{KernelSpec::Kind::Gaussian, s.gamma};
  const auto [model, report] = train(cfg, train_part, loss, kernel);
  const Metrics m = evaluate(model, test_part);
  const double metric =
      s.task == Task::Classification ? m.accuracy : m.rmse;

  return csv_field(job.loss) + "," + std::to_string(job.seed) + "," +
         std::to_string(train_part.size()) + "," + std::to_string(report.rank) +
         "," + std::to_string(report.iterations) + "," +
         fmt(report.train_seconds) + "," + fmt(metric) + ",";
}

int cmd_bench(const BenchArgs& a) {
  const SweepSpec s = load_sweep(a.sweep);

  std::vector<BenchJob> jobs;
  for (const std::string& loss : s.losses)
    for (int size : s.sizes)
      for (std::uint64_t seed : s.seeds) jobs.push_back({loss, seed, size});

  std::vector<std::string> rows(jobs.size());
  std::size_t failures = 0;
  const int workers =
      std::max(1, std::min<int>(a.jobs, static_cast<int>(jobs.size())));
  if (workers > 1) omp_set_num_threads(1);  // sub-runs stay single-threaded

  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= jobs.size()) return;
        i = next++;
      }
      try {
        rows[i] = run_bench_job(s, jobs[i]);
      } catch (const std::exception& e) {
        rows[i] = csv_field(jobs[i].loss) + "," + std::to_string(jobs[i].seed) +
                  ",,,,,," + csv_field(e.what());
        std::lock_guard<std::mutex> lock(mu);
        ++failures;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::ofstream out(a.out);
  if (!out) throw InputError("cannot write '" + a.out + "'");
  out << kMetricsHeader << '\n';
  for (const std::string& row : rows) out << row << '\n';
  std::cout << "wrote " << rows.size() << " rows to " << a.out << " ("
            << failures << " failed)\n";
  return failures == jobs.size() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unisvm: unified DCA training of kernel SVM models with LS-DC "
               "losses"};
  app.require_subcommand(1);

  TrainArgs ta;
  CLI::App* tr = app.add_subcommand("train", "train a model");
  tr->add_option("--data", ta.data, "training data (LIBSVM format)")
      ->required();
  tr->add_option("--task", ta.task, "class|reg")->capture_default_str();
  tr->add_option("--loss", ta.loss, "loss name, e.g. truncated_sq_hinge:a=2")
      ->capture_default_str();
  tr->add_option("--loss-params", ta.loss_params, "extra key=val,... params");
  tr->add_option("--lambda", ta.lambda, "regularizer")->capture_default_str();
  tr->add_option("--gamma", ta.gamma, "Gaussian kernel width")
      ->capture_default_str();
  tr->add_option("--A", ta.A, "LS-DC constant (defaults to the loss bound)");
  tr->add_option("--solver", ta.solver, "auto|full|smw|sparse")
      ->capture_default_str();
  tr->add_option("--rank", ta.rank, "low-rank budget");
  tr->add_option("--approx-tol", ta.approx_tol,
                 "pivoted-Cholesky trace tolerance (default 0.001)");
  tr->add_option("--tol", ta.tol, "relative v-change stopping tolerance")
      ->capture_default_str();
  tr->add_option("--max-iter", ta.max_iter, "iteration cap")
      ->capture_default_str();
  tr->add_option("--seed", ta.seed, "seed recorded with metrics")
      ->capture_default_str();
  tr->add_option("--model", ta.model_path, "output model file")->required();
  tr->add_option("--metrics", ta.metrics, "append a CSV metrics row here");
  tr->add_option("--format", ta.format, "model container: binary|text")
      ->capture_default_str();

  PredictArgs pa;
  CLI::App* pr = app.add_subcommand("predict", "score samples with a model");
  pr->add_option("--model", pa.model_path)->required();
  pr->add_option("--data", pa.data)->required();
  pr->add_option("--out", pa.out, "output CSV: index,score[,label]")
      ->required();

  EvalArgs ea;
  CLI::App* ev = app.add_subcommand("eval", "evaluate a model on a dataset");
  ev->add_option("--model", ea.model_path)->required();
  ev->add_option("--data", ea.data)->required();
  ev->add_option("--metrics", ea.metrics, "append a CSV metrics row here");
  ev->add_option("--seed", ea.seed, "seed recorded with metrics");

  SynthArgs sa;
  CLI::App* sy = app.add_subcommand("synth", "generate synthetic datasets");
  sy->require_subcommand(1);
  CLI::App* cb = sy->add_subcommand("checkerboard", "XOR tiling of [0,1]^2");
  cb->add_option("--n", sa.n, "number of points")->capture_default_str();
  cb->add_option("--grid", sa.grid, "tiles per axis (even)")
      ->capture_default_str();
  CLI::App* sc = sy->add_subcommand("sinc", "y = sin(x)/x + noise");
  sc->add_option("--x-min", sa.x_min)->capture_default_str();
  sc->add_option("--x-max", sa.x_max)->capture_default_str();
  sc->add_option("--step", sa.step)->capture_default_str();
  sc->add_option("--noise", sa.noise, "noise standard deviation")
      ->capture_default_str();
  for (CLI::App* g : {cb, sc}) {
    g->add_option("--seed", sa.seed)->capture_default_str();
    g->add_option("--flip", sa.flip,
                  "label-flip fraction (train part; classification)");
    g->add_option("--split", sa.split,
                  "emit train/test pair with this train fraction");
    g->add_option("--out", sa.out, "output path prefix")->required();
  }

  BenchArgs ba;
  CLI::App* be = app.add_subcommand("bench", "run a sweep from a JSON spec");
  be->add_option("--sweep", ba.sweep, "sweep spec (JSON)")->required();
  be->add_option("--out", ba.out, "output CSV")->required();
  be->add_option("--jobs", ba.jobs, "parallel worker slots")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (tr->parsed()) return cmd_train(ta);
    if (pr->parsed()) return cmd_predict(pa);
    if (ev->parsed()) return cmd_eval(ea);
    if (sy->parsed()) {
      const Dataset pool =
          cb->parsed() ? gen_checkerboard(sa.n, sa.grid, sa.seed)
                       : gen_sinc(sa.x_min, sa.x_max, sa.step, sa.noise,
                                  sa.seed);
      return emit_synth(pool, sa);
    }
    if (be->parsed()) return cmd_bench(ba);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
