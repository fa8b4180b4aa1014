#include "platecheck/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace platecheck {

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

Json point(const Vec3& p, int dim) {
  Json a = Json::array();
  for (int i = 0; i < dim; ++i) a.push_back(number(p[i]));
  return a;
}

namespace {

Json measure(const MeasureEstimate& m) { return {{"value", number(m.value)}, {"radius", number(m.radius)}}; }

Json fit_json(const RigidityFit& f) {
  Json R = Json::array();
  for (int i = 0; i < 3; ++i) R.push_back(point(f.R.row(i).transpose()));
  return {{"id", f.id},           {"center", point(f.center)},      {"radius", number(f.radius)},
          {"R", R},               {"b", point(f.b)},                {"residual", number(f.residual)},
          {"dist_norm", number(f.dist_norm)}, {"volume", number(f.volume)}};
}

}  // namespace

Json make_report(const std::string& subcommand, std::uint64_t seed) {
  return {{"format", kReportFormat}, {"tool", "platecheck"},   {"version", kToolVersion},
          {"subcommand", subcommand}, {"seed", seed},          {"tolerances", Json::object()},
          {"result", Json::object()}};
}

void set_tolerance(Json& report, const std::string& name, double value) { report["tolerances"][name] = number(value); }

Json to_json(const DegreeResult& r) {
  return {{"value", r.value},           {"method", to_string(r.method)},    {"regular", r.regular},
          {"margin", number(r.margin)}, {"residual", number(r.residual)},  {"estimate", number(r.estimate)},
          {"quadrature_error", number(r.quadrature_error)}};
}

Json to_json(const InvertibilityReport& r) {
  Json w = Json::array();
  for (const auto& p : r.witnesses) w.push_back({{"a", p.a}, {"b", p.b}, {"measure", number(p.measure)}});
  return {{"overlap", number(r.overlap)}, {"candidate_pairs", r.candidate_pairs}, {"witnesses", w}};
}

Json to_json(const InterpenetrationReport& r, bool with_field) {
  Json levels = Json::array();
  for (const auto& l : r.levels) levels.push_back({{"k", l.k}, {"samples", l.samples}, {"measure", measure(l.measure)}});
  Json j{{"verdict", to_string(r.verdict)},
         {"witnesses", {r.witnesses[0], r.witnesses[1]}},
         {"uses_k0", r.uses_k0},
         {"levels", levels},
         {"excluded", measure(r.excluded)},
         {"threshold", number(r.threshold)},
         {"margin_base", number(r.margin_base)},
         {"margin_u2", number(r.margin_u2)},
         {"margin_cap", number(r.margin_cap)},
         {"samples", r.field.size()},
         {"degree_tolerance", number(r.field.tolerance)}};
  if (with_field) {
    Json f = Json::array();
    for (std::size_t i = 0; i < r.field.size(); ++i)
      f.push_back({{"x", point(r.field.points[i], 2)},
                   {"degree", r.field.results[i].value},
                   {"excluded", static_cast<bool>(r.field.excluded[i])}});
    j["field"] = f;
  }
  return j;
}

Json to_json(const FhReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs)
    pairs.push_back({{"gap", number(p.gap)},
                     {"sup_deviation", number(p.sup_deviation)},
                     {"fraction", number(p.fraction)},
                     {"rejected", p.rejected},
                     {"diagnostic", p.diagnostic}});
  return {{"h", number(r.h)},
          {"tau", number(r.tau)},
          {"tau_warning", r.tau_warning},
          {"F_pixels", r.F.count()},
          {"F_measure", number(r.F.measure())},
          {"pixel", number(r.F.cell())},
          {"cap1_upper", number(r.cap1_upper)},
          {"cap1_lower", number(r.cap1_lower)},
          {"energy", number(r.energy)},
          {"comparability", number(r.comparability)},
          {"threshold", number(r.threshold)},
          {"good", r.good},
          {"bad", r.bad},
          {"majority_good", r.majority_good},
          {"volume", number(r.volume)},
          {"pairs", pairs}};
}

Json to_json(const PipelineReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"h", number(row.h)},
                    {"energy_Ih", number(row.energy_Ih)},
                    {"dist_energy", number(row.dist_energy)},
                    {"truncation_mismatch", number(row.truncation_mismatch)},
                    {"degree_l1", number(row.degree_l1)},
                    {"volume", number(row.volume)},
                    {"volume_over_h2", number(row.volume_over_h2)},
                    {"volume_pass", row.volume_pass},
                    {"far", to_json(row.far)}});
  return {{"pass", r.pass},
          {"failed_step", r.failed_step},
          {"limit", to_json(r.limit)},
          {"collar",
           {{"delta", number(r.collar.delta)},
            {"halvings", r.collar.halvings},
            {"clearance", number(r.collar.clearance)},
            {"ok", r.collar.ok}}},
          {"scaling",
           {{"slope", number(r.scaling.slope)},
            {"intercept", number(r.scaling.intercept)},
            {"required", number(r.scaling.required)},
            {"pass", r.scaling.pass}}},
          {"degree_converges", r.degree_converges},
          {"rows", rows}};
}

Json to_json(const TruncationResult& r) {
  return {{"K", number(r.K)},
          {"lipschitz_bound", number(r.lipschitz_bound)},
          {"C1", number(r.C1)},
          {"mismatch_measure", number(r.mismatch_measure)},
          {"excess_energy", number(r.excess_energy)},
          {"bad_volume", number(r.bad_volume)},
          {"dilated_volume", number(r.dilated_volume)},
          {"good_lipschitz", number(r.good_lipschitz)},
          {"rounds", r.rounds},
          {"degenerate", r.degenerate}};
}

Json to_json(const CoverEstimate& r) {
  return {{"kind", to_string(r.kind)},
          {"m", number(r.m)},
          {"delta", number(r.delta)},
          {"value", number(r.value)},
          {"omega", number(r.omega)},
          {"pieces", r.cover.size()}};
}

Json to_json(const RigidityFit& r) { return fit_json(r); }

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "text" || s == "structured-text" || s == "json") return ReportFormat::text;
  if (s == "csv") return ReportFormat::csv;
  fail(Errc::invalid_argument, "unknown report format '" + s + "'");
}

std::string render_report(const Json& report) { return report.dump(2) + "\n"; }

std::string render_csv(const PipelineReport& r) {
  std::ostringstream out;
  out << "h,energy_Ih,dist_energy,truncation_mismatch,degree_l1,F_pixels,cap1_lower,cap1_upper,good,bad,volume,"
         "volume_over_h2,volume_pass\n";
  auto num = [](double v) { return number(v).dump(); };
  for (const auto& row : r.rows)
    out << num(row.h) << ',' << num(row.energy_Ih) << ',' << num(row.dist_energy) << ','
        << num(row.truncation_mismatch) << ',' << num(row.degree_l1) << ',' << row.far.F.count() << ','
        << num(row.far.cap1_lower) << ',' << num(row.far.cap1_upper) << ',' << row.far.good << ',' << row.far.bad
        << ',' << num(row.volume) << ',' << num(row.volume_over_h2) << ',' << (row.volume_pass ? 1 : 0) << '\n';
  return out.str();
}

Json parse_report(const std::string& text) {
  try {
    Json j = Json::parse(text);
    if (j.value("format", "") != kReportFormat) fail(Errc::invalid_argument, "not a report_v1 document");
    return j;
  } catch (const Json::exception& e) {
    fail(Errc::invalid_argument, std::string("malformed report: ") + e.what());
  }
}

}  // namespace platecheck
