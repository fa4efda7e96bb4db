#pragma once

#include <string>
#include <string_view>

#include "stackik/bench.hpp"

namespace stackik {

enum class ReportFormat { kCsv, kJson };

/// Throws BenchError for anything other than "csv" / "json".
ReportFormat report_format_from_string(std::string_view text);

std::string render_report(const BenchResult& result, ReportFormat format);

/// Validates the format before touching the filesystem.
void emit_report(const BenchResult& result, std::string_view format, const std::string& path);

/// Parses either report format (detected from content).
BenchResult parse_report(std::string_view text);
BenchResult load_report(const std::string& path);

struct ReportComparison {
  double median_ratio = 0.0;
  double p10_ratio = 0.0;
  double p90_ratio = 0.0;
  double mean_ratio = 0.0;
};

/// Ratios baseline / candidate: values above 1 mean the candidate is faster.
ReportComparison compare_reports(const Summary& baseline, const Summary& candidate);

}  // namespace stackik
