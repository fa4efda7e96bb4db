#include "stackik/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "stackik/kinematics.hpp"
#include "stackik/model_io.hpp"
#include "stackik/scenario.hpp"
#include "stackik/solver.hpp"

namespace stackik {

namespace {

// Warmup targets come from a separate stream so the timed sequence does not
// depend on the warmup count.
constexpr std::uint64_t kWarmupStream = 0x9e3779b97f4a7c15ULL;

class KernelBackend final : public BenchBackend {
 public:
  explicit KernelBackend(const BenchProblem& p)
      : solver_(p.model, p.model.limits(), p.tasks.config),
        stack_(p.tasks.stack),
        start_(p.start),
        target_task_(p.target_task),
        mode_(p.mode),
        kinematics_(solver_.model()),
        q_next_(p.start) {
    const auto& pose = std::get<PoseTask>(stack_.task(target_task_).spec);
    frame_ = solver_.model().frame_index(pose.frame);
    for (std::size_t i = 0; i < target_task_; ++i) {
      if (stack_.task(i).is_pose()) ++pose_slot_;
    }
    solver_.prepare(stack_);
  }

  SolveOutcome solve(const Transform& target) override {
    stack_.set_pose_target(target_task_, target);
    if (mode_ == BenchMode::kFullSolve) {
      const IkResult r = solver_.solve_position_ik(start_, stack_);
      return {r.iterations, r.converged, r.final_error[pose_slot_].head<3>().norm()};
    }
    const VelocityResult& r = solver_.step(start_, stack_);
    const auto& lim = solver_.limits();
    q_next_ = start_;
    q_next_.noalias() += (solver_.config().step_scale * solver_.config().dt) * r.qdot;
    q_next_ = q_next_.cwiseMax(lim.position_lo).cwiseMin(lim.position_hi);
    kinematics_.update(q_next_);
    const double err = (target.translation - kinematics_.frame_pose(frame_).translation).norm();
    return {1, r.qdot.allFinite() && !r.saturated, err};
  }

 private:
  TaskStackSolver solver_;
  TaskStack stack_;
  JointVector start_;
  std::size_t target_task_;
  BenchMode mode_;
  KinematicsCache kinematics_;
  JointVector q_next_;
  std::size_t frame_ = 0;
  std::size_t pose_slot_ = 0;
};

}  // namespace

std::string_view to_string(BenchMode mode) {
  return mode == BenchMode::kVelocityStep ? "velocity_step" : "full_solve";
}

BenchMode bench_mode_from_string(std::string_view text) {
  if (text == "velocity_step") return BenchMode::kVelocityStep;
  if (text == "full_solve") return BenchMode::kFullSolve;
  throw BenchError("unknown mode '" + std::string(text) + "' (expected velocity_step or full_solve)");
}

void BenchConfig::validate() const {
  if (samples < 1) throw BenchError("samples must be >= 1");
  if (warmup < 0) throw BenchError("warmup must be >= 0");
  if (backend.empty()) throw BenchError("backend id is empty");
  if (output_format != "csv" && output_format != "json") {
    throw BenchError("unknown output format '" + output_format + "' (expected csv or json)");
  }
}

BenchProblem load_problem(std::string_view model_text, std::string_view tasks_text, BenchMode mode) {
  BenchProblem p{parse_model(model_text), {}, {}, 0, mode};
  p.tasks = parse_task_document(tasks_text, p.model);
  auto target = p.tasks.stack.primary_pose_task();
  if (!target) throw BenchError("task document has no pose_tracking task to receive targets");
  p.target_task = *target;
  const LimitSet limits = p.model.limits();
  if (p.tasks.start) {
    p.start = *p.tasks.start;
    for (Eigen::Index i = 0; i < p.start.size(); ++i) {
      if (p.start[i] < limits.position_lo[i] || p.start[i] > limits.position_hi[i]) {
        throw BenchError("start configuration violates the limits of joint '" +
                         p.model.joint(static_cast<std::size_t>(i)).name + "'");
      }
    }
  } else {
    p.start = JointVector::Zero(static_cast<Eigen::Index>(p.model.n()))
                  .cwiseMax(limits.position_lo)
                  .cwiseMin(limits.position_hi);
  }
  return p;
}

void BackendRegistry::add(std::string id, BackendFactory factory) { factories_[std::move(id)] = std::move(factory); }

bool BackendRegistry::contains(std::string_view id) const { return factories_.find(id) != factories_.end(); }

std::vector<std::string> BackendRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : factories_) out.push_back(id);
  return out;
}

std::unique_ptr<BenchBackend> BackendRegistry::create(std::string_view id, const BenchProblem& problem) const {
  auto it = factories_.find(id);
  if (it == factories_.end()) throw BenchError("unknown backend '" + std::string(id) + "'");
  return it->second(problem);
}

BackendRegistry BackendRegistry::with_defaults() {
  BackendRegistry r;
  r.add("kernel", make_kernel_backend);
  return r;
}

std::unique_ptr<BenchBackend> make_kernel_backend(const BenchProblem& problem) {
  return std::make_unique<KernelBackend>(problem);
}

TimeSource steady_time_source() {
  return [] {
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now().time_since_epoch()).count();
  };
}

std::vector<Transform> sample_targets(const BenchProblem& problem, std::uint64_t seed, int count) {
  const LimitSet limits = problem.model.limits();
  const auto& pose = std::get<PoseTask>(problem.tasks.stack.task(problem.target_task).spec);
  const std::size_t frame = problem.model.frame_index(pose.frame);
  KinematicsCache cache(problem.model);
  std::mt19937_64 rng(seed);
  std::vector<Transform> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    cache.update(sample_configuration(limits, rng));
    out.push_back(cache.frame_pose(frame));
  }
  return out;
}

BenchResult run_samples(const BenchProblem& problem, BenchBackend& backend, std::string backend_id, int samples,
                        int warmup, std::uint64_t seed, const TimeSource& clock) {
  if (samples < 1) throw BenchError("samples must be >= 1");
  if (warmup < 0) throw BenchError("warmup must be >= 0");
  const auto warm_targets = sample_targets(problem, seed ^ kWarmupStream, warmup);
  const auto targets = sample_targets(problem, seed, samples);

  for (const auto& t : warm_targets) backend.solve(t);

  BenchResult result;
  result.records.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    SolveOutcome outcome;
    double begin = 0.0;
    double end = 0.0;
    try {
      begin = clock();
      outcome = backend.solve(targets[i]);
      end = clock();
    } catch (const NumericalError& e) {
      throw BenchError("sample " + std::to_string(i) + ": " + e.what());
    }
    if (!std::isfinite(outcome.final_position_error)) {
      throw BenchError("sample " + std::to_string(i) + ": non-finite solver output");
    }
    result.records.push_back({static_cast<int>(i), std::max(end - begin, 0.0), outcome.iterations,
                              outcome.converged, outcome.final_position_error});
  }
  result.summary = summarize(result.records, std::move(backend_id));
  return result;
}

BenchResult run_benchmark(const BenchConfig& config, const BackendRegistry& registry, const TimeSource& clock) {
  config.validate();
  if (!registry.contains(config.backend)) throw BenchError("unknown backend '" + config.backend + "'");
  BenchProblem problem;
  try {
    problem = load_problem(read_text_file(config.model_path), read_text_file(config.tasks_path), config.mode);
  } catch (const BenchError&) {
    throw;
  } catch (const std::exception& e) {
    throw BenchError(e.what());
  }
  auto backend = registry.create(config.backend, problem);
  return run_samples(problem, *backend, config.backend, config.samples, config.warmup, config.seed, clock);
}

double nearest_rank_percentile(std::vector<double> values, int pct) {
  if (values.empty()) throw BenchError("percentile of an empty list");
  const auto n = static_cast<long long>(values.size());
  long long rank = (static_cast<long long>(pct) * n + 99) / 100;
  rank = std::clamp(rank, 1LL, n);
  auto nth = values.begin() + (rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

Summary summarize(const std::vector<SampleRecord>& records, std::string backend) {
  if (records.empty()) throw BenchError("cannot summarize an empty record list");
  std::vector<double> times;
  times.reserve(records.size());
  int converged = 0;
  for (const auto& r : records) {
    times.push_back(r.solve_time_us);
    if (r.converged) ++converged;
  }
  const std::size_t n = times.size();

  Summary s;
  s.backend = std::move(backend);
  s.samples = static_cast<int>(n);
  s.success_rate = static_cast<double>(converged) / static_cast<double>(n);

  double sum = 0.0;
  for (double t : times) sum += t;
  s.mean_us = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double t : times) sq += (t - s.mean_us) * (t - s.mean_us);
  s.std_us = std::sqrt(sq / static_cast<double>(n));

  s.p10_us = nearest_rank_percentile(times, 10);
  s.p90_us = nearest_rank_percentile(times, 90);

  std::vector<double> sel = times;
  auto upper = sel.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(sel.begin(), upper, sel.end());
  if (n % 2 == 1) {
    s.median_us = *upper;
  } else {
    const double hi = *upper;
    const double lo = *std::max_element(sel.begin(), upper);
    s.median_us = 0.5 * (lo + hi);
  }
  return s;
}

}  // namespace stackik
