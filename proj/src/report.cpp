#include "stackik/report.hpp"

#include <charconv>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "stackik/model_io.hpp"

namespace stackik {

using nlohmann::json;

namespace {

constexpr const char* kCsvHeader = "index,solve_time_us,iterations,converged,final_position_error";

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

double to_double(std::string_view s, std::string_view what) {
  std::string tmp(s);
  try {
    std::size_t used = 0;
    double v = std::stod(tmp, &used);
    if (used != tmp.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw BenchError("report: bad number for " + std::string(what) + ": '" + tmp + "'");
  }
}

int to_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw BenchError("report: bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

json summary_json(const Summary& s) {
  return {{"median_us", s.median_us}, {"p10_us", s.p10_us},     {"p90_us", s.p90_us},
          {"mean_us", s.mean_us},     {"std_us", s.std_us},     {"success_rate", s.success_rate},
          {"backend", s.backend},     {"samples", s.samples}};
}

BenchResult parse_json_report(std::string_view text) {
  BenchResult out;
  try {
    json doc = json::parse(text);
    const json& s = doc.at("summary");
    out.summary = {s.at("median_us").get<double>(), s.at("p10_us").get<double>(), s.at("p90_us").get<double>(),
                   s.at("mean_us").get<double>(),   s.at("std_us").get<double>(), s.at("success_rate").get<double>(),
                   s.at("backend").get<std::string>(), s.at("samples").get<int>()};
    for (const auto& r : doc.at("records")) {
      out.records.push_back({r.at("index").get<int>(), r.at("solve_time_us").get<double>(),
                             r.at("iterations").get<int>(), r.at("converged").get<bool>(),
                             r.at("final_position_error").get<double>()});
    }
  } catch (const json::exception& e) {
    throw BenchError(std::string("report: ") + e.what());
  }
  return out;
}

BenchResult parse_csv_report(std::string_view text) {
  BenchResult out;
  bool header_seen = false;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      auto eq = line.find('=');
      if (eq == std::string_view::npos) continue;
      auto key = line.substr(0, eq);
      auto value = line.substr(eq + 1);
      Summary& s = out.summary;
      if (key == "median_us") s.median_us = to_double(value, key);
      else if (key == "p10_us") s.p10_us = to_double(value, key);
      else if (key == "p90_us") s.p90_us = to_double(value, key);
      else if (key == "mean_us") s.mean_us = to_double(value, key);
      else if (key == "std_us") s.std_us = to_double(value, key);
      else if (key == "success_rate") s.success_rate = to_double(value, key);
      else if (key == "backend") s.backend = std::string(value);
      else if (key == "samples") s.samples = to_int(value, key);
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw BenchError("report: unexpected csv header '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != 5) throw BenchError("report: csv row has " + std::to_string(cells.size()) + " cells");
    if (cells[3] != "true" && cells[3] != "false") throw BenchError("report: bad converged flag");
    out.records.push_back({to_int(cells[0], "index"), to_double(cells[1], "solve_time_us"),
                           to_int(cells[2], "iterations"), cells[3] == "true",
                           to_double(cells[4], "final_position_error")});
  }
  if (!header_seen) throw BenchError("report: missing csv header");
  return out;
}

}  // namespace

ReportFormat report_format_from_string(std::string_view text) {
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "json") return ReportFormat::kJson;
  throw BenchError("unknown report format '" + std::string(text) + "' (expected csv or json)");
}

std::string render_report(const BenchResult& result, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    json records = json::array();
    for (const auto& r : result.records) {
      records.push_back({{"index", r.index},
                         {"solve_time_us", r.solve_time_us},
                         {"iterations", r.iterations},
                         {"converged", r.converged},
                         {"final_position_error", r.final_position_error}});
    }
    json doc = {{"summary", summary_json(result.summary)}, {"records", records}};
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : result.records) {
    os << r.index << ',' << fmt_double(r.solve_time_us) << ',' << r.iterations << ','
       << (r.converged ? "true" : "false") << ',' << fmt_double(r.final_position_error) << '\n';
  }
  const Summary& s = result.summary;
  os << "# median_us=" << fmt_double(s.median_us) << '\n'
     << "# p10_us=" << fmt_double(s.p10_us) << '\n'
     << "# p90_us=" << fmt_double(s.p90_us) << '\n'
     << "# mean_us=" << fmt_double(s.mean_us) << '\n'
     << "# std_us=" << fmt_double(s.std_us) << '\n'
     << "# success_rate=" << fmt_double(s.success_rate) << '\n'
     << "# backend=" << s.backend << '\n'
     << "# samples=" << s.samples << '\n';
  return os.str();
}

void emit_report(const BenchResult& result, std::string_view format, const std::string& path) {
  const ReportFormat f = report_format_from_string(format);
  write_text_file(path, render_report(result, f));
}

BenchResult parse_report(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_json_report(text);
  return parse_csv_report(text);
}

BenchResult load_report(const std::string& path) { return parse_report(read_text_file(path)); }

ReportComparison compare_reports(const Summary& baseline, const Summary& candidate) {
  auto ratio = [](double a, double b) {
    if (!(b > 0.0)) throw BenchError("cannot form a ratio against a non-positive candidate statistic");
    return a / b;
  };
  return {ratio(baseline.median_us, candidate.median_us), ratio(baseline.p10_us, candidate.p10_us),
          ratio(baseline.p90_us, candidate.p90_us), ratio(baseline.mean_us, candidate.mean_us)};
}

}  // namespace stackik
