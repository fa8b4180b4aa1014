#include "platecheck/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace platecheck {

namespace {

using nlohmann::json;

json rows(const std::vector<Vec3>& pts, int dim) {
  json out = json::array();
  for (const Vec3& p : pts) {
    json r = json::array();
    for (int i = 0; i < dim; ++i) r.push_back(p[i]);
    out.push_back(r);
  }
  return out;
}

std::vector<Vec3> parse_rows(const json& j, int dim, const char* what) {
  if (!j.is_array()) fail(Errc::invalid_argument, std::string(what) + " must be an array");
  std::vector<Vec3> out;
  for (const auto& r : j) {
    if (!r.is_array() || static_cast<int>(r.size()) != dim)
      fail(Errc::invalid_argument, std::string(what) + " rows must have " + std::to_string(dim) + " entries");
    Vec3 p = Vec3::Zero();
    for (int i = 0; i < dim; ++i) p[i] = r[i].get<double>();
    out.push_back(p);
  }
  return out;
}

json domain_json(const TriangulatedDomain& d) {
  const int n = d.vertices_per_simplex();
  json simplices = json::array(), boundary = json::array();
  for (const Simplex& s : d.simplices()) simplices.push_back(std::vector<int>(s.begin(), s.begin() + n));
  for (const Facet& f : d.boundary_facets()) boundary.push_back(std::vector<int>(f.begin(), f.begin() + n - 1));
  return {{"format", kMeshFormat},
          {"dimension", d.dimension()},
          {"vertices", rows(d.vertices(), d.dimension())},
          {"simplices", simplices},
          {"boundary", boundary}};
}

json parse_json(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::invalid_argument, std::string("malformed mesh document: ") + e.what());
  }
}

TriangulatedDomain domain_from(const json& j) {
  try {
    if (j.value("format", "") != kMeshFormat) fail(Errc::invalid_argument, "unknown mesh format");
    const int dim = j.at("dimension").get<int>();
    require(dim == 2 || dim == 3, "dimension must be 2 or 3");
    auto verts = parse_rows(j.at("vertices"), dim, "vertices");
    std::vector<Simplex> simplices;
    for (const auto& r : j.at("simplices")) {
      require(r.is_array() && static_cast<int>(r.size()) == dim + 1, "simplex rows must have dimension + 1 entries");
      Simplex s{-1, -1, -1, -1};
      for (int i = 0; i <= dim; ++i) {
        s[i] = r[i].get<int>();
        require(s[i] >= 0 && static_cast<std::size_t>(s[i]) < verts.size(), "simplex vertex index out of range");
      }
      simplices.push_back(s);
    }
    return TriangulatedDomain(dim, std::move(verts), std::move(simplices));
  } catch (const json::exception& e) {
    fail(Errc::invalid_argument, std::string("malformed mesh document: ") + e.what());
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::invalid_argument, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::invalid_argument, "cannot write " + path);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

void write_domain(std::ostream& out, const TriangulatedDomain& domain) { out << domain_json(domain).dump(1) << '\n'; }

void write_map(std::ostream& out, const PiecewiseAffineMap& map) {
  json j = domain_json(map.domain());
  j["target_dimension"] = map.target_dimension();
  j["values"] = rows(map.values(), map.target_dimension());
  out << j.dump(1) << '\n';
}

TriangulatedDomain read_domain(std::istream& in) { return domain_from(parse_json(in)); }

PiecewiseAffineMap read_map(std::istream& in) {
  const json j = parse_json(in);
  auto dom = std::make_shared<TriangulatedDomain>(domain_from(j));
  if (!j.contains("values") || !j.contains("target_dimension"))
    fail(Errc::invalid_argument, "map document needs values and target_dimension");
  const int td = j.at("target_dimension").get<int>();
  require(td == 2 || td == 3, "target_dimension must be 2 or 3");
  auto values = parse_rows(j.at("values"), td, "values");
  require(values.size() == dom->vertex_count(), "values must match the vertex count");
  return PiecewiseAffineMap(dom, std::move(values), td);
}

void save_map(const std::string& path, const PiecewiseAffineMap& map) {
  auto out = open_out(path);
  write_map(out, map);
}

PiecewiseAffineMap load_map(const std::string& path) {
  auto in = open_in(path);
  return read_map(in);
}

void write_pixels(std::ostream& out, const PixelSet& set) {
  std::ostringstream s;
  s.precision(17);
  const Vec3& o = set.origin();
  const auto d = set.dims();
  s << kPixelFormat << "\ndimension " << set.dimension() << "\norigin " << o.x() << ' ' << o.y() << ' ' << o.z()
    << "\ncell " << set.cell() << "\ndims " << d[0] << ' ' << d[1] << ' ' << d[2] << '\n';
  std::vector<std::size_t> runs;
  bool cur = false;
  std::size_t len = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.get_flat(i) != cur) {
      runs.push_back(len);
      cur = !cur;
      len = 0;
    }
    ++len;
  }
  runs.push_back(len);
  s << "runs " << runs.size();
  for (std::size_t r : runs) s << ' ' << r;
  s << '\n';
  out << s.str();
}

PixelSet read_pixels(std::istream& in) {
  auto expect = [&](const char* key) {
    std::string k;
    if (!(in >> k) || k != key) fail(Errc::invalid_argument, std::string("pixel file: expected ") + key);
  };
  std::string fmt;
  if (!(in >> fmt) || fmt != kPixelFormat) fail(Errc::invalid_argument, "unknown pixel format");
  int dim = 0;
  Vec3 o;
  double cell = 0;
  std::array<int, 3> d{};
  std::size_t n = 0;
  expect("dimension");
  in >> dim;
  expect("origin");
  in >> o.x() >> o.y() >> o.z();
  expect("cell");
  in >> cell;
  expect("dims");
  in >> d[0] >> d[1] >> d[2];
  expect("runs");
  in >> n;
  if (!in) fail(Errc::invalid_argument, "pixel file: malformed header");
  PixelSet set(dim, o, cell, d);
  std::size_t pos = 0;
  bool cur = false;
  for (std::size_t i = 0; i < n; ++i, cur = !cur) {
    std::size_t r = 0;
    if (!(in >> r)) fail(Errc::invalid_argument, "pixel file: truncated runs");
    if (pos + r > set.size()) fail(Errc::invalid_argument, "pixel file: runs exceed the grid");
    for (std::size_t k = 0; k < r; ++k) set.set_flat(pos + k, cur);
    pos += r;
  }
  if (pos != set.size()) fail(Errc::invalid_argument, "pixel file: runs do not cover the grid");
  return set;
}

void save_pixels(const std::string& path, const PixelSet& set) {
  auto out = open_out(path);
  write_pixels(out, set);
}

PixelSet load_pixels(const std::string& path) {
  auto in = open_in(path);
  return read_pixels(in);
}

Config parse_config(std::istream& in) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::invalid_argument, "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(Errc::invalid_argument, "config line " + std::to_string(lineno) + ": empty key");
    c[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config load_config(const std::string& path) {
  auto in = open_in(path);
  return parse_config(in);
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const auto slash = t.find('/');
    double v = 0;
    if (slash != std::string::npos) {
      const double num = std::stod(t.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument(t);
      const std::string den_text = t.substr(slash + 1);
      const double den = std::stod(den_text, &used);
      if (used != den_text.size() || den == 0.0) throw std::invalid_argument(t);
      v = num / den;
    } else {
      v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
    }
    return v;
  } catch (const std::logic_error&) {
    fail(Errc::invalid_argument, "not a number: '" + t + "'");
  }
}

double config_double(const Config& c, const std::string& key, double fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : parse_number(it->second);
}

int config_int(const Config& c, const std::string& key, int fallback) {
  const double v = config_double(c, key, fallback);
  if (v != std::floor(v)) fail(Errc::invalid_argument, key + " must be an integer");
  return static_cast<int>(v);
}

std::string config_string(const Config& c, const std::string& key, const std::string& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

std::vector<double> config_list(const Config& c, const std::string& key, const std::vector<double>& fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  return out;
}

}  // namespace platecheck
