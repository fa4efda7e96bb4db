// ikbench: timed IK solves over seeded reachable targets, and report
// comparison.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stackik/bench.hpp"
#include "stackik/model_io.hpp"
#include "stackik/report.hpp"
#include "stackik/scenario.hpp"

namespace {

int run_command(const stackik::BenchConfig& config) {
  const auto result = stackik::run_benchmark(config);
  stackik::emit_report(result, config.output_format, config.output_path);
  const auto& s = result.summary;
  std::printf("backend=%s mode=%s samples=%d median_us=%.3f p10_us=%.3f p90_us=%.3f success_rate=%.4f\n",
              s.backend.c_str(), std::string(stackik::to_string(config.mode)).c_str(), s.samples, s.median_us,
              s.p10_us, s.p90_us, s.success_rate);
  return 0;
}

int compare_command(const std::string& baseline_path, const std::string& candidate_path) {
  const auto baseline = stackik::load_report(baseline_path);
  const auto candidate = stackik::load_report(candidate_path);
  const auto cmp = stackik::compare_reports(baseline.summary, candidate.summary);
  std::printf("median_ratio=%.6g\np10_ratio=%.6g\np90_ratio=%.6g\nmean_ratio=%.6g\n", cmp.median_ratio,
              cmp.p10_ratio, cmp.p90_ratio, cmp.mean_ratio);
  return 0;
}

int scenario_command(const std::string& dir) {
  const auto bundle = stackik::build_default_scenario();
  std::filesystem::create_directories(dir);
  const auto model_path = (std::filesystem::path(dir) / "spot18.model").string();
  const auto tasks_path = (std::filesystem::path(dir) / "dual_task.tasks").string();
  stackik::write_text_file(model_path, bundle.model_document);
  stackik::write_text_file(tasks_path, bundle.tasks_document);
  std::printf("%s\n%s\n", model_path.c_str(), tasks_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark harness for the prioritized task-stack IK kernel"};
  app.require_subcommand(1);

  stackik::BenchConfig config;
  std::string mode = "full_solve";
  auto* run = app.add_subcommand("run", "Time solves over seeded reachable targets and write a report");
  run->add_option("--model", config.model_path, "Model document")->required()->check(CLI::ExistingFile);
  run->add_option("--tasks", config.tasks_path, "Task-stack document")->required()->check(CLI::ExistingFile);
  run->add_option("--backend", config.backend, "Backend id")->capture_default_str();
  run->add_option("--samples", config.samples, "Timed solves")->capture_default_str();
  run->add_option("--warmup", config.warmup, "Untimed solves before timing")->capture_default_str();
  run->add_option("--seed", config.seed, "Target sequence seed")->capture_default_str();
  run->add_option("--mode", mode, "velocity_step | full_solve")->capture_default_str();
  run->add_option("--output", config.output_path, "Report path")->required();
  run->add_option("--format", config.output_format, "csv | json")->capture_default_str();

  std::string baseline;
  std::string candidate;
  auto* compare = app.add_subcommand("compare", "Print baseline/candidate ratios of two reports");
  compare->add_option("--baseline", baseline, "Baseline report")->required()->check(CLI::ExistingFile);
  compare->add_option("--candidate", candidate, "Candidate report")->required()->check(CLI::ExistingFile);

  std::string out_dir = ".";
  auto* scenario = app.add_subcommand("scenario", "Write the default 18-joint model and task documents");
  scenario->add_option("--output-dir", out_dir, "Destination directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      config.mode = stackik::bench_mode_from_string(mode);
      return run_command(config);
    }
    if (*compare) return compare_command(baseline, candidate);
    if (*scenario) return scenario_command(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
