#pragma once

#include "platecheck/geometry.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace platecheck {

constexpr const char* kMeshFormat = "platecheck_mesh_v1";
constexpr const char* kPixelFormat = "platecheck_pixels_v1";

/// JSON document with fields format, dimension, vertices, simplices,
/// boundary, and for maps target_dimension and values. Vertex rows have
/// `dimension` entries, value rows `target_dimension` entries.
void write_domain(std::ostream& out, const TriangulatedDomain& domain);
void write_map(std::ostream& out, const PiecewiseAffineMap& map);
/// Throws invalid_argument on malformed documents.
TriangulatedDomain read_domain(std::istream& in);
PiecewiseAffineMap read_map(std::istream& in);

void save_map(const std::string& path, const PiecewiseAffineMap& map);
PiecewiseAffineMap load_map(const std::string& path);

/// Text header lines `format`, `dimension d`, `origin x y z`, `cell c`,
/// `dims nx ny nz`, then `runs n r1 r2 ...`: alternating run lengths over
/// the flat cell order, starting with empty cells.
void write_pixels(std::ostream& out, const PixelSet& set);
PixelSet read_pixels(std::istream& in);
void save_pixels(const std::string& path, const PixelSet& set);
PixelSet load_pixels(const std::string& path);

/// Flat `key = value` lines; `#` starts a comment; later keys override.
using Config = std::map<std::string, std::string>;
Config parse_config(std::istream& in);
Config load_config(const std::string& path);

double config_double(const Config& c, const std::string& key, double fallback);
int config_int(const Config& c, const std::string& key, int fallback);
std::string config_string(const Config& c, const std::string& key, const std::string& fallback);
/// Comma-separated list of numbers; entries may be fractions like 1/16.
std::vector<double> config_list(const Config& c, const std::string& key, const std::vector<double>& fallback);
double parse_number(const std::string& text);

}  // namespace platecheck
