#pragma once

#include "platecheck/degree.hpp"
#include "platecheck/interpenetration.hpp"
#include "platecheck/measure.hpp"
#include "platecheck/truncation.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace platecheck {

using Json = nlohmann::ordered_json;

constexpr const char* kReportFormat = "report_v1";
constexpr const char* kToolVersion = "0.1.0";

/// Document with format, tool, version, subcommand, seed, an empty
/// tolerances object and an empty result object.
Json make_report(const std::string& subcommand, std::uint64_t seed);
void set_tolerance(Json& report, const std::string& name, double value);

/// v rounded to 9 significant digits; non-finite values become the strings
/// "inf", "-inf" and "nan".
Json number(double v);
Json point(const Vec3& p, int dim = 3);

Json to_json(const DegreeResult& r);
Json to_json(const InvertibilityReport& r);
Json to_json(const InterpenetrationReport& r, bool with_field = false);
Json to_json(const FhReport& r);
Json to_json(const PipelineReport& r);
Json to_json(const TruncationResult& r);
Json to_json(const CoverEstimate& r);
Json to_json(const RigidityFit& r);

enum class ReportFormat { text, csv };
ReportFormat report_format_from_string(const std::string& s);

/// Indented JSON text with a trailing newline.
std::string render_report(const Json& report);
/// One row per h of a pipeline run.
std::string render_csv(const PipelineReport& r);
Json parse_report(const std::string& text);

}  // namespace platecheck
