#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stackik/model.hpp"
#include "stackik/task_io.hpp"
#include "stackik/transform.hpp"

namespace stackik {

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BenchMode { kVelocityStep, kFullSolve };

std::string_view to_string(BenchMode mode);
/// Throws BenchError for anything other than velocity_step / full_solve.
BenchMode bench_mode_from_string(std::string_view text);

struct BenchConfig {
  std::string backend = "kernel";
  int samples = 500;
  int warmup = 50;
  std::uint64_t seed = 42;
  BenchMode mode = BenchMode::kFullSolve;
  std::string model_path;
  std::string tasks_path;
  std::string output_path;
  std::string output_format = "json";

  void validate() const;
};

struct SampleRecord {
  int index = 0;
  double solve_time_us = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_position_error = 0.0;

  bool operator==(const SampleRecord&) const = default;
};

struct Summary {
  double median_us = 0.0;
  double p10_us = 0.0;
  double p90_us = 0.0;
  double mean_us = 0.0;
  double std_us = 0.0;
  double success_rate = 0.0;
  std::string backend;
  int samples = 0;

  bool operator==(const Summary&) const = default;
};

struct BenchResult {
  Summary summary;
  std::vector<SampleRecord> records;
};

/// Everything a backend needs to answer solve calls: parsed documents, the
/// start configuration and the pose task that receives sampled targets.
struct BenchProblem {
  ChainModel model;
  TaskDocument tasks;
  JointVector start;
  std::size_t target_task = 0;
  BenchMode mode = BenchMode::kFullSolve;
};

/// Builds a problem from document text. The start configuration is the
/// document's `start` entry, or zero clamped into the limits.
BenchProblem load_problem(std::string_view model_text, std::string_view tasks_text, BenchMode mode);

struct SolveOutcome {
  int iterations = 0;
  bool converged = false;
  double final_position_error = 0.0;
};

/// Uniform solve interface shared by every implementation under test.
class BenchBackend {
 public:
  virtual ~BenchBackend() = default;
  virtual SolveOutcome solve(const Transform& target) = 0;
};

using BackendFactory = std::function<std::unique_ptr<BenchBackend>(const BenchProblem&)>;

class BackendRegistry {
 public:
  /// Registry holding the native "kernel" backend.
  static BackendRegistry with_defaults();

  void add(std::string id, BackendFactory factory);
  bool contains(std::string_view id) const;
  std::vector<std::string> ids() const;
  /// Throws BenchError for an unknown id.
  std::unique_ptr<BenchBackend> create(std::string_view id, const BenchProblem& problem) const;

 private:
  std::map<std::string, BackendFactory, std::less<>> factories_;
};

std::unique_ptr<BenchBackend> make_kernel_backend(const BenchProblem& problem);

/// Monotonic clock reading in microseconds.
using TimeSource = std::function<double()>;
TimeSource steady_time_source();

/// Target sequence for a seed: sampled in-limits configurations mapped
/// through FK of the target task's frame. Same seed, same sequence.
std::vector<Transform> sample_targets(const BenchProblem& problem, std::uint64_t seed, int count);

/// Timed loop: `warmup` untimed solves, then one timed solve per target.
/// Each timed region brackets exactly one backend call.
BenchResult run_samples(const BenchProblem& problem, BenchBackend& backend, std::string backend_id, int samples,
                        int warmup, std::uint64_t seed, const TimeSource& clock = steady_time_source());

/// Reads the configured documents and runs the selected backend.
BenchResult run_benchmark(const BenchConfig& config,
                          const BackendRegistry& registry = BackendRegistry::with_defaults(),
                          const TimeSource& clock = steady_time_source());

/// Midpoint median, nearest-rank p10/p90, population standard deviation.
/// Throws BenchError on an empty list.
Summary summarize(const std::vector<SampleRecord>& records, std::string backend = {});

/// Nearest-rank percentile (1-based rank ⌈pct·N/100⌉) of unsorted values.
double nearest_rank_percentile(std::vector<double> values, int pct);

}  // namespace stackik
