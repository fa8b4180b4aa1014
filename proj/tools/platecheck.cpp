#include "platecheck/degree.hpp"
#include "platecheck/elasticity.hpp"
#include "platecheck/interpenetration.hpp"
#include "platecheck/io.hpp"
#include "platecheck/measure.hpp"
#include "platecheck/pathology.hpp"
#include "platecheck/report.hpp"
#include "platecheck/truncation.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace platecheck;

namespace {

struct Common {
  std::string out;
  std::string format = "text";
  std::uint64_t seed = 0;
};

std::uint64_t effective_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("PLATECHECK_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') fail(Errc::invalid_argument, "PLATECHECK_SEED must be an unsigned integer");
    return v;
  }
  return seed;
}

Vec3 parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_number(item));
  if (v.size() < 2 || v.size() > 3) fail(Errc::invalid_argument, "point must have 2 or 3 comma-separated entries");
  return Vec3(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) fail(Errc::invalid_argument, "cannot write " + c.out);
  f << text;
}

void emit_json(const Common& c, const Json& report) {
  if (report_format_from_string(c.format) == ReportFormat::csv)
    fail(Errc::invalid_argument, "csv output is only available for pipeline runs");
  emit(c, render_report(report));
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Output path (default stdout)");
  app->add_option("--format", c.format, "Report format: text or csv")->check(CLI::IsMember({"text", "csv"}));
  app->add_option("--seed", c.seed, "Seed echoed into the report (PLATECHECK_SEED overrides)");
}

// ---- degree ----

struct DegreeArgs {
  Common c;
  std::string map, point, method = "jacobian";
  double tolerance = -1.0, radius = 0.1;
};

void run_degree(const DegreeArgs& a) {
  const auto f = load_map(a.map);
  const Vec3 y = parse_point(a.point);
  DegreeOptions opt;
  opt.boundary_tolerance = a.tolerance;
  DegreeResult r;
  if (a.method == "jacobian") r = degree_jacobian(f, y, opt);
  else if (a.method == "boundary") r = degree_boundary(f, y, opt);
  else r = degree_integral(f, Bump{y, a.radius}, {}, opt);
  Json rep = make_report("degree", effective_seed(a.c.seed));
  set_tolerance(rep, "boundary_tolerance", opt.boundary_tolerance);
  set_tolerance(rep, "singular_tolerance", opt.singular_tolerance);
  set_tolerance(rep, "facet_tolerance", opt.facet_tolerance);
  if (a.method == "integral") set_tolerance(rep, "bump_radius", a.radius);
  rep["result"] = to_json(r);
  emit_json(a.c, rep);
}

// ---- detect ----

struct DetectArgs {
  Common c;
  std::string u1, u2, mode = "offset", apex = "0,0,1";
  double thickness = 1.0, min_fraction = 0.01;
  int levels = 2, grid = 64;
  bool field = false;
};

void run_detect(const DetectArgs& a) {
  ExtensionSpec spec;
  spec.thickness = a.thickness;
  spec.levels = a.levels;
  spec.mode = a.mode == "cone" ? CapMode::cone : CapMode::normal_offset;
  spec.apex = parse_point(a.apex);
  SimpleOptions opt;
  opt.grid = a.grid;
  opt.min_fraction = a.min_fraction;
  const auto r = check_simple_interpenetration(load_map(a.u1), load_map(a.u2), spec, opt);
  Json rep = make_report("detect", effective_seed(a.c.seed));
  set_tolerance(rep, "thickness", a.thickness);
  set_tolerance(rep, "min_fraction", a.min_fraction);
  set_tolerance(rep, "grid", a.grid);
  set_tolerance(rep, "degree_tolerance", r.field.tolerance);
  rep["result"] = to_json(r, a.field);
  rep["result"]["mode"] = to_string(spec.mode);
  emit_json(a.c, rep);
}

// ---- pathology ----

struct PathologyArgs {
  Common c;
  std::string generator = "ms";
  std::string dir = ".";
  MSParams ms;
  int resolution = 16;
  double h = 0.05;
};

void run_pathology(const PathologyArgs& a) {
  namespace fs = std::filesystem;
  fs::create_directories(a.dir);
  Json manifest = make_report("pathology", effective_seed(a.c.seed));
  Json params{{"generator", a.generator},
              {"k", a.ms.k},
              {"rho", number(a.ms.rho)},
              {"bend_radius", number(a.ms.bend_radius)},
              {"block_segments", a.ms.block_segments},
              {"block_rings", a.ms.block_rings},
              {"cluster_points", a.ms.cluster_points},
              {"cluster_width", number(a.ms.cluster_width)},
              {"fill_fraction", number(a.ms.fill_fraction)},
              {"hole", number(a.ms.hole)}};
  Json files = Json::array();
  auto write = [&](const std::string& name, const PiecewiseAffineMap& m) {
    save_map((fs::path(a.dir) / name).string(), m);
    files.push_back(name);
  };
  if (a.generator == "ms") {
    write("ms_k" + std::to_string(a.ms.k) + ".map", ms_element(a.ms));
  } else if (a.generator == "ms-limit") {
    params["resolution"] = a.resolution;
    write("ms_limit.map", ms_limit(a.ms, a.resolution));
  } else if (a.generator == "cavitation") {
    write("cavitation.map", cavitation_block(a.ms.rho, a.ms));
  } else if (a.generator == "fill") {
    write("fill.map", fill_block(a.ms));
  } else {
    const auto sc = crossing_scenario();
    write("u1.map", *sc.u1);
    write("u2.map", *sc.u2);
    write("u.map", *sc.u);
    params["h"] = number(a.h);
    write("y_h.map", *sc.sequence(a.h).y);
  }
  manifest["result"] = {{"params", params}, {"files", files}};
  std::ofstream f(fs::path(a.dir) / "manifest.json", std::ios::binary);
  f << render_report(manifest);
  if (!a.c.out.empty()) emit(a.c, render_report(manifest));
}

// ---- rigidity ----

struct RigidityArgs {
  Common c;
  std::string map;
  std::vector<std::string> balls;
  double thickness = 1.0;
  int points = 8;
};

void run_rigidity(const RigidityArgs& a) {
  const auto v = load_map(a.map);
  Json fits = Json::array();
  FitOptions opt;
  opt.thickness = a.thickness;
  opt.points_per_radius = a.points;
  if (a.balls.empty()) {
    fits.push_back(to_json(rigidity_fit_domain(v)));
  } else {
    int id = 0;
    for (const auto& b : a.balls) {
      std::vector<double> q;
      std::stringstream ss(b);
      std::string item;
      while (std::getline(ss, item, ',')) q.push_back(parse_number(item));
      if (q.size() != 4) fail(Errc::invalid_argument, "ball must be x,y,z,r");
      opt.id = id++;
      fits.push_back(to_json(rigidity_fit(v, Vec3(q[0], q[1], q[2]), q[3], opt)));
    }
  }
  Json rep = make_report("rigidity", effective_seed(a.c.seed));
  set_tolerance(rep, "thickness", a.thickness);
  set_tolerance(rep, "points_per_radius", a.points);
  auto dom = v.domain_ptr();
  std::function<Vec3(const Vec3&)> f = [&](const Vec3& x) {
    const auto y = v.evaluate(x);
    return y ? *y : Vec3(x);
  };
  const auto scan = rigidity_constant_scan({f}, *dom, {0.5, 1.0, 2.0});
  Json rows = Json::array();
  for (const auto& r : scan.rows)
    rows.push_back({{"scale", number(r.scale)}, {"constant", number(r.constant)}, {"exact_rigid", r.exact_rigid}});
  rep["result"] = {{"fits", fits}, {"scan", {{"rows", rows}, {"spread", number(scan.spread)}}}};
  emit_json(a.c, rep);
}

// ---- truncate ----

struct TruncateArgs {
  Common c;
  std::string map, out_map;
  double K = 1.0;
};

void run_truncate(const TruncateArgs& a) {
  const auto r = lipschitz_truncate(load_map(a.map), a.K);
  if (!a.out_map.empty()) save_map(a.out_map, *r.map);
  Json rep = make_report("truncate", effective_seed(a.c.seed));
  set_tolerance(rep, "K", a.K);
  rep["result"] = to_json(r);
  emit_json(a.c, rep);
}

// ---- measure ----

struct MeasureArgs {
  Common c;
  std::string pixels, kind = "spherical";
  double m = 1.0, delta = 0.1;
  int budget = 5;
  bool cap1 = false;
};

void run_measure(const MeasureArgs& a) {
  const auto set = load_pixels(a.pixels);
  const auto est = premeasure(set, premeasure_kind_from_string(a.kind), a.m, a.delta);
  Json rep = make_report("measure", effective_seed(a.c.seed));
  set_tolerance(rep, "delta", a.delta);
  rep["result"] = to_json(est);
  if (a.cap1) {
    set_tolerance(rep, "cap1_budget", a.budget);
    const auto cap = cap1_estimate(set, a.budget);
    rep["result"]["cap1"] = {{"value", number(cap.value)}, {"candidate", cap.candidate}};
    if (set.dimension() == 2) rep["result"]["cap1"]["lower_bound"] = number(cap1_lower_bound(set));
  }
  emit_json(a.c, rep);
}

// ---- pipeline ----

struct PipelineArgs {
  Common c;
  std::string config;
};

void run_pipeline_cmd(PipelineArgs a) {
  const Config cfg = load_config(a.config);
  const std::uint64_t seed = effective_seed(static_cast<std::uint64_t>(config_int(cfg, "seed", static_cast<int>(a.c.seed))));
  if (a.c.out.empty()) a.c.out = config_string(cfg, "out", "");
  if (a.c.format == "text") a.c.format = config_string(cfg, "format", "text");
  CrossingParams cp;
  cp.separation = config_double(cfg, "separation", cp.separation);
  cp.angle_deg = config_double(cfg, "angle", cp.angle_deg);
  cp.lift = config_double(cfg, "lift", cp.lift);
  cp.radius = config_double(cfg, "radius", cp.radius);
  cp.arc_length = config_double(cfg, "arc_length", cp.arc_length);
  cp.width = config_double(cfg, "width", cp.width);
  cp.flat_cells = config_int(cfg, "flat_cells", cp.flat_cells);
  cp.arc_cells = config_int(cfg, "arc_cells", cp.arc_cells);
  cp.width_cells = config_int(cfg, "width_cells", cp.width_cells);
  cp.kirchhoff.isometry_tolerance = config_double(cfg, "isometry_tolerance", cp.kirchhoff.isometry_tolerance);
  PipelineOptions opt;
  opt.extension.thickness = config_double(cfg, "thickness", opt.extension.thickness);
  opt.extension.levels = config_int(cfg, "levels", opt.extension.levels);
  opt.extension.delta = config_double(cfg, "delta", opt.extension.delta);
  opt.simple.grid = config_int(cfg, "grid", opt.simple.grid);
  opt.simple.min_fraction = config_double(cfg, "min_fraction", opt.simple.min_fraction);
  opt.simple.degree.boundary_tolerance = config_double(cfg, "degree_tolerance", opt.simple.degree.boundary_tolerance);
  opt.K = config_double(cfg, "K", opt.K);
  opt.tau = config_double(cfg, "tau", opt.tau);
  opt.far.pixel = config_double(cfg, "pixel", opt.far.pixel);
  opt.far.cap1_budget = config_int(cfg, "cap1_budget", opt.far.cap1_budget);
  opt.c = config_double(cfg, "c", opt.c);
  opt.epsilon = config_double(cfg, "epsilon", opt.epsilon);
  opt.affine_points_per_radius = config_int(cfg, "affine_points_per_radius", opt.affine_points_per_radius);
  const auto hs = config_list(cfg, "h", {1.0 / 16, 1.0 / 32, 1.0 / 64});
  for (const auto& [key, value] : cfg) {
    static const std::set<std::string> known{
        "seed", "out", "format", "separation", "angle", "lift", "radius", "arc_length", "width", "flat_cells",
        "arc_cells", "width_cells", "isometry_tolerance", "thickness", "levels", "delta", "grid", "min_fraction",
        "degree_tolerance", "K", "tau", "pixel", "cap1_budget", "c", "epsilon", "affine_points_per_radius", "h"};
    if (!known.count(key)) fail(Errc::invalid_argument, "unknown config key '" + key + "'");
  }
  const auto r = run_pipeline(crossing_scenario(cp), hs, opt);
  if (report_format_from_string(a.c.format) == ReportFormat::csv) {
    emit(a.c, render_csv(r));
    return;
  }
  Json rep = make_report("pipeline", seed);
  for (const auto& [name, v] :
       std::vector<std::pair<std::string, double>>{{"K", opt.K},
                                                   {"tau", opt.tau},
                                                   {"epsilon", opt.epsilon},
                                                   {"c", opt.c},
                                                   {"min_fraction", opt.simple.min_fraction},
                                                   {"grid", opt.simple.grid},
                                                   {"degree_tolerance", opt.simple.degree.boundary_tolerance},
                                                   {"delta", r.collar.delta},
                                                   {"thickness", opt.extension.thickness},
                                                   {"pixel", opt.far.pixel},
                                                   {"cap1_budget", opt.far.cap1_budget},
                                                   {"comparability", kCap1Comparability},
                                                   {"isometry_tolerance", cp.kirchhoff.isometry_tolerance},
                                                   {"affine_points_per_radius", opt.affine_points_per_radius}})
    set_tolerance(rep, name, v);
  Json ladder = Json::array();
  for (double h : hs) ladder.push_back(number(h));
  rep["h"] = ladder;
  rep["result"] = to_json(r);
  emit(a.c, render_report(rep));
}

int exit_code(Errc e) {
  return e == Errc::invariant_violation || e == Errc::inconsistency ? 3 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"platecheck: self-interpenetration checks for thin-plate deformations"};
  app.require_subcommand(1);

  DegreeArgs da;
  auto* deg = app.add_subcommand("degree", "Brouwer degree of a map at a point");
  add_common(deg, da.c);
  deg->add_option("--map", da.map, "Map file")->required();
  deg->add_option("--point", da.point, "Target point x,y[,z]")->required();
  deg->add_option("--method", da.method)->check(CLI::IsMember({"jacobian", "boundary", "integral"}));
  deg->add_option("--tolerance", da.tolerance, "Boundary proximity tolerance (negative = default)");
  deg->add_option("--radius", da.radius, "Bump radius for the integral method");

  DetectArgs de;
  auto* det = app.add_subcommand("detect", "Simple interpenetration check of u1, u2");
  add_common(det, de.c);
  det->add_option("--u1", de.u1)->required();
  det->add_option("--u2", de.u2)->required();
  det->add_option("--mode", de.mode)->check(CLI::IsMember({"offset", "cone"}));
  det->add_option("--apex", de.apex, "Cone apex x,y,z");
  det->add_option("--thickness", de.thickness);
  det->add_option("--levels", de.levels);
  det->add_option("--grid", de.grid);
  det->add_option("--min-fraction", de.min_fraction);
  det->add_flag("--field", de.field, "Include the per-sample degree field");

  PathologyArgs pa;
  auto* pat = app.add_subcommand("pathology", "Write generator maps and a manifest");
  add_common(pat, pa.c);
  pat->add_option("generator", pa.generator)
      ->check(CLI::IsMember({"ms", "ms-limit", "cavitation", "fill", "crossing"}));
  pat->add_option("--dir", pa.dir, "Output directory");
  pat->add_option("--k", pa.ms.k);
  pat->add_option("--rho", pa.ms.rho);
  pat->add_option("--bend-radius", pa.ms.bend_radius);
  pat->add_option("--segments", pa.ms.block_segments);
  pat->add_option("--rings", pa.ms.block_rings);
  pat->add_option("--resolution", pa.resolution);
  pat->add_option("--thickness", pa.h, "Thickness of the emitted crossing plate");

  RigidityArgs ra;
  auto* rig = app.add_subcommand("rigidity", "Rigid fits on balls and a constant scan");
  add_common(rig, ra.c);
  rig->add_option("--map", ra.map)->required();
  rig->add_option("--ball", ra.balls, "Ball x,y,z,r (repeatable)");
  rig->add_option("--thickness", ra.thickness);
  rig->add_option("--points", ra.points, "Lattice points per radius");

  TruncateArgs ta;
  auto* tru = app.add_subcommand("truncate", "Lipschitz truncation at level K");
  add_common(tru, ta.c);
  tru->add_option("--map", ta.map)->required();
  tru->add_option("--K", ta.K)->required();
  tru->add_option("--out-map", ta.out_map, "Truncated map file");

  MeasureArgs ma;
  auto* mea = app.add_subcommand("measure", "Covering premeasure of a pixel set");
  add_common(mea, ma.c);
  mea->add_option("--pixels", ma.pixels)->required();
  mea->add_option("--kind", ma.kind);
  mea->add_option("--m", ma.m);
  mea->add_option("--delta", ma.delta);
  mea->add_flag("--cap1", ma.cap1, "Also estimate the 1-capacity");
  mea->add_option("--budget", ma.budget);

  PipelineArgs pi;
  auto* pip = app.add_subcommand("pipeline", "Crossing scenario across an h ladder");
  add_common(pip, pi.c);
  pip->add_option("--config", pi.config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*deg) run_degree(da);
    else if (*det) run_detect(de);
    else if (*pat) run_pathology(pa);
    else if (*rig) run_rigidity(ra);
    else if (*tru) run_truncate(ta);
    else if (*mea) run_measure(ma);
    else if (*pip) run_pipeline_cmd(pi);
  } catch (const Error& e) {
    std::cerr << "platecheck: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "platecheck: internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
