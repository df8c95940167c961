#pragma once

#include "cubic3/geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cubic3::cli {

using nlohmann::ordered_json;

enum ExitCode { kOk = 0, kParseError = 2, kPipelineError = 3, kCertificationFailure = 4 };

struct AnalysisRequest {
  std::string source;  // inline text or @file as given
  Form form;
  /// Subset of singular, defect, hodge, surfaces, lines, in that order.
  std::vector<std::string> commands;
  std::uint64_t seed = 0;
  TrackerSettings settings;
  /// Lines to test: explicit pairs of points, else `sample` random ones.
  std::vector<std::pair<RatVector, RatVector>> lines;
  int sample = 3;
};

struct Timing {
  std::string command;
  double seconds = 0.0;
};

struct Report {
  ordered_json json;
  /// Wall-clock timings stay out of the JSON so reruns are byte-identical.
  std::vector<Timing> timings;
  int exit_code = kOk;
};

extern const std::vector<std::string> kCommands;

/// Reads `text` or, for `@path`, the file at path ('#' lines skipped).
std::string read_source(const std::string& arg);

/// "1,-1,0,0,0" or "1 -1 0 0 0" as a rational point.
RatVector parse_point(const std::string& text, int n);

Report run_pipeline(const AnalysisRequest& req);

/// Human-readable digest of a report, with timings.
std::string summary(const Report& r);

/// Full command line: analyze, lines, batch. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cubic3::cli
