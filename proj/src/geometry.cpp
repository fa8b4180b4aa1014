#include "platecheck/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>

namespace platecheck {

namespace {

double signed_volume(int dim, const std::vector<Vec3>& v, const Simplex& s) {
  if (dim == 2) {
    const Vec3 e1 = v[s[1]] - v[s[0]], e2 = v[s[2]] - v[s[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  }
  Mat3 e;
  e.col(0) = v[s[1]] - v[s[0]];
  e.col(1) = v[s[2]] - v[s[0]];
  e.col(2) = v[s[3]] - v[s[0]];
  return e.determinant() / 6.0;
}

// Outward-oriented facets of a positively oriented simplex; facet i is
// opposite vertex i.
std::array<Facet, 4> simplex_facets(int dim, const Simplex& s) {
  if (dim == 2) {
    return {Facet{s[1], s[2], -1}, Facet{s[2], s[0], -1}, Facet{s[0], s[1], -1}, Facet{-1, -1, -1}};
  }
  return {Facet{s[1], s[2], s[3]}, Facet{s[0], s[3], s[2]}, Facet{s[0], s[1], s[3]},
          Facet{s[0], s[2], s[1]}};
}

std::array<int, 3> sorted_key(const Facet& f, int dim) {
  std::array<int, 3> k = f;
  if (dim == 2) {
    if (k[0] > k[1]) std::swap(k[0], k[1]);
    k[2] = -1;
  } else {
    std::sort(k.begin(), k.end());
  }
  return k;
}

// Parity of the permutation taking the sorted key to the facet ordering.
bool even_order(const Facet& f, int dim) {
  if (dim == 2) return f[0] < f[1];
  int inversions = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (f[i] > f[j]) ++inversions;
  return inversions % 2 == 0;
}

}  // namespace

// ---- TriangulatedDomain ---------------------------------------------------

TriangulatedDomain::TriangulatedDomain(int dimension, std::vector<Vec3> vertices,
                                       std::vector<Simplex> simplices)
    : dim_(dimension), vertices_(std::move(vertices)), simplices_(std::move(simplices)) {
  require(dim_ == 2 || dim_ == 3, "domain dimension must be 2 or 3");
  require(!simplices_.empty(), "domain has no simplices");
  const int nv = static_cast<int>(vertices_.size());
  const int k = dim_ + 1;

  bounds_.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  bounds_.hi = -bounds_.lo;
  for (auto& p : vertices_) {
    require(p.allFinite(), "non-finite vertex coordinate");
    if (dim_ == 2) p.z() = 0.0;
    bounds_.lo = bounds_.lo.cwiseMin(p);
    bounds_.hi = bounds_.hi.cwiseMax(p);
  }
  const double scale = (bounds_.hi - bounds_.lo).norm();

  volumes_.resize(simplices_.size());
  inverse_edges_.resize(simplices_.size());
  min_height_.resize(simplices_.size());
  for (std::size_t s = 0; s < simplices_.size(); ++s) {
    Simplex& sx = simplices_[s];
    for (int i = 0; i < 4; ++i) {
      if (i < k) {
        require(sx[i] >= 0 && sx[i] < nv, "simplex references a missing vertex");
      } else {
        sx[i] = -1;
      }
    }
    double vol = signed_volume(dim_, vertices_, sx);
    if (vol < 0.0) {
      std::swap(sx[dim_ - 1], sx[dim_]);
      vol = -vol;
    }
    require(vol > 1e-14 * std::pow(scale, dim_), "degenerate simplex " + std::to_string(s));
    volumes_[s] = vol;
    total_volume_ += vol;

    Mat3 e = Mat3::Identity();
    for (int i = 1; i < k; ++i) e.col(i - 1) = vertices_[sx[i]] - vertices_[sx[0]];
    if (dim_ == 2) e.col(2) = Vec3::UnitZ();
    inverse_edges_[s] = e.inverse();

    double diam = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) diam = std::max(diam, (vertices_[sx[i]] - vertices_[sx[j]]).norm());
    mesh_size_ = std::max(mesh_size_, diam);

    double hmin = std::numeric_limits<double>::infinity();
    for (const Facet& f : simplex_facets(dim_, sx)) {
      if (f[0] < 0) continue;
      double area;
      if (dim_ == 2) {
        area = (vertices_[f[1]] - vertices_[f[0]]).norm();
      } else {
        area = 0.5 * (vertices_[f[1]] - vertices_[f[0]]).cross(vertices_[f[2]] - vertices_[f[0]]).norm();
      }
      hmin = std::min(hmin, dim_ * vol / area);
    }
    min_height_[s] = hmin;
  }

  struct FacetUse {
    Facet oriented;
    int count = 0;
    bool even = true;
  };
  std::map<std::array<int, 3>, FacetUse> facets;
  for (const Simplex& sx : simplices_) {
    for (const Facet& f : simplex_facets(dim_, sx)) {
      if (f[0] < 0) continue;
      auto& use = facets[sorted_key(f, dim_)];
      const bool even = even_order(f, dim_);
      if (use.count == 0) {
        use.oriented = f;
        use.even = even;
      } else if (use.count >= 2 || use.even == even) {
        fail(Errc::invalid_argument, "overlapping or non-manifold simplices share a facet");
      }
      ++use.count;
    }
  }
  boundary_vertex_.assign(vertices_.size(), false);
  for (const auto& [key, use] : facets) {
    if (use.count != 1) continue;
    boundary_.push_back(use.oriented);
    for (int v : use.oriented)
      if (v >= 0) boundary_vertex_[v] = true;
  }

  vertex_simplices_.assign(vertices_.size(), {});
  for (std::size_t s = 0; s < simplices_.size(); ++s)
    for (int i = 0; i < k; ++i) vertex_simplices_[simplices_[s][i]].push_back(static_cast<int>(s));

  build_locator();
}

Vec3 TriangulatedDomain::centroid(std::size_t s) const {
  Vec3 c = Vec3::Zero();
  for (int i = 0; i <= dim_; ++i) c += vertices_[simplices_[s][i]];
  return c / (dim_ + 1);
}

Eigen::Vector4d TriangulatedDomain::barycentric(std::size_t s, const Vec3& p) const {
  Vec3 local = inverse_edges_[s] * (p - vertices_[simplices_[s][0]]);
  Eigen::Vector4d b = Eigen::Vector4d::Zero();
  if (dim_ == 2) {
    b << 1.0 - local.x() - local.y(), local.x(), local.y(), 0.0;
  } else {
    b << 1.0 - local.sum(), local.x(), local.y(), local.z();
  }
  return b;
}

void TriangulatedDomain::build_locator() {
  const Vec3 extent = (bounds_.hi - bounds_.lo).cwiseMax(Vec3::Constant(1e-12));
  const double target_cells = std::max<double>(1.0, simplices_.size() / 2.0);
  double measure = extent.x() * extent.y() * (dim_ == 3 ? extent.z() : 1.0);
  const double h = std::pow(measure / target_cells, 1.0 / dim_);
  for (int a = 0; a < dim_; ++a) grid_dims_[a] = std::clamp(static_cast<int>(std::ceil(extent[a] / h)), 1, 512);
  grid_dims_[2] = dim_ == 3 ? grid_dims_[2] : 1;
  grid_origin_ = bounds_.lo;
  for (int a = 0; a < 3; ++a) grid_cell_[a] = extent[a] / grid_dims_[a];
  buckets_.assign(static_cast<std::size_t>(grid_dims_[0]) * grid_dims_[1] * grid_dims_[2], {});

  const double pad = 1e-9 * mesh_size_;
  for (std::size_t s = 0; s < simplices_.size(); ++s) {
    Vec3 lo = vertices_[simplices_[s][0]], hi = lo;
    for (int i = 1; i <= dim_; ++i) {
      lo = lo.cwiseMin(vertices_[simplices_[s][i]]);
      hi = hi.cwiseMax(vertices_[simplices_[s][i]]);
    }
    std::array<int, 3> a{}, b{};
    for (int d = 0; d < 3; ++d) {
      a[d] = std::clamp(static_cast<int>(std::floor((lo[d] - pad - grid_origin_[d]) / grid_cell_[d])), 0, grid_dims_[d] - 1);
      b[d] = std::clamp(static_cast<int>(std::floor((hi[d] + pad - grid_origin_[d]) / grid_cell_[d])), 0, grid_dims_[d] - 1);
    }
    for (int z = a[2]; z <= b[2]; ++z)
      for (int y = a[1]; y <= b[1]; ++y)
        for (int x = a[0]; x <= b[0]; ++x)
          buckets_[(static_cast<std::size_t>(z) * grid_dims_[1] + y) * grid_dims_[0] + x].push_back(static_cast<int>(s));
  }
}

std::optional<Located> TriangulatedDomain::locate(const Vec3& p) const {
  const double tol = 1e-12 * mesh_size_;
  std::array<int, 3> c{};
  for (int d = 0; d < 3; ++d) {
    if (d == 2 && dim_ == 2) {
      c[d] = 0;
      continue;
    }
    if (p[d] < bounds_.lo[d] - tol || p[d] > bounds_.hi[d] + tol) return std::nullopt;
    c[d] = std::clamp(static_cast<int>(std::floor((p[d] - grid_origin_[d]) / grid_cell_[d])), 0, grid_dims_[d] - 1);
  }
  const auto& bucket = buckets_[(static_cast<std::size_t>(c[2]) * grid_dims_[1] + c[1]) * grid_dims_[0] + c[0]];
  Vec3 q = p;
  if (dim_ == 2) q.z() = 0.0;
  for (int s : bucket) {
    const Eigen::Vector4d b = barycentric(s, q);
    const double eps = tol / min_height_[s];
    bool inside = true;
    for (int i = 0; i <= dim_; ++i) inside = inside && b[i] >= -eps;
    if (inside) return Located{static_cast<std::size_t>(s), b};
  }
  return std::nullopt;
}

// ---- PiecewiseAffineMap ---------------------------------------------------

PiecewiseAffineMap::PiecewiseAffineMap(DomainPtr domain, std::vector<Vec3> values, int target_dimension)
    : domain_(std::move(domain)), values_(std::move(values)), target_dim_(target_dimension) {
  require(domain_ != nullptr, "map requires a domain");
  require(target_dim_ == 2 || target_dim_ == 3, "target dimension must be 2 or 3");
  require(values_.size() == domain_->vertex_count(), "values array length must equal vertex count");
  for (auto& v : values_) {
    require(v.allFinite(), "non-finite map value");
    if (target_dim_ == 2) v.z() = 0.0;
  }
  const int dim = domain_->dimension();
  gradients_.resize(domain_->simplex_count());
  for (std::size_t s = 0; s < gradients_.size(); ++s) {
    const Simplex& sx = domain_->simplex(s);
    Mat3 e = Mat3::Identity(), d = Mat3::Zero();
    for (int i = 1; i <= dim; ++i) {
      e.col(i - 1) = domain_->vertex(sx[i]) - domain_->vertex(sx[0]);
      d.col(i - 1) = values_[sx[i]] - values_[sx[0]];
    }
    if (dim == 2) e.col(2) = Vec3::UnitZ();
    gradients_[s] = d * e.inverse();
    if (dim == 2) gradients_[s].col(2).setZero();
  }
}

double PiecewiseAffineMap::jacobian(std::size_t s) const {
  const int dim = domain_->dimension();
  require(dim == target_dim_, "jacobian requires equal domain and target dimension");
  if (dim == 2) return gradients_[s].topLeftCorner<2, 2>().determinant();
  return gradients_[s].determinant();
}

Vec3 PiecewiseAffineMap::evaluate_in(std::size_t s, const Eigen::Vector4d& b) const {
  const Simplex& sx = domain_->simplex(s);
  Vec3 out = Vec3::Zero();
  for (int i = 0; i <= domain_->dimension(); ++i) out += b[i] * values_[sx[i]];
  return out;
}

std::optional<Vec3> PiecewiseAffineMap::evaluate(const Vec3& x) const {
  auto loc = domain_->locate(x);
  if (!loc) return std::nullopt;
  return evaluate_in(loc->simplex, loc->barycentric);
}

std::array<Vec3, 3> PiecewiseAffineMap::facet_image(const Facet& f) const {
  std::array<Vec3, 3> out;
  for (int i = 0; i < 3; ++i) out[i] = f[i] >= 0 ? values_[f[i]] : Vec3::Zero();
  return out;
}

double PiecewiseAffineMap::image_mesh_size() const {
  double m = 0.0;
  const int k = domain_->vertices_per_simplex();
  for (const Simplex& sx : domain_->simplices())
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) m = std::max(m, (values_[sx[i]] - values_[sx[j]]).norm());
  return m;
}

Box PiecewiseAffineMap::image_bounds() const {
  Box b{values_.front(), values_.front()};
  for (const auto& v : values_) {
    b.lo = b.lo.cwiseMin(v);
    b.hi = b.hi.cwiseMax(v);
  }
  return b;
}

PiecewiseAffineMap interpolate(DomainPtr domain, const std::function<Vec3(const Vec3&)>& f, int target_dimension) {
  std::vector<Vec3> values;
  values.reserve(domain->vertex_count());
  for (const auto& v : domain->vertices()) values.push_back(f(v));
  return PiecewiseAffineMap(std::move(domain), std::move(values), target_dimension);
}

// ---- PixelSet -------------------------------------------------------------

PixelSet::PixelSet(int dimension, Vec3 origin, double cell, std::array<int, 3> dims)
    : dim_(dimension), origin_(origin), cell_(cell), dims_(dims) {
  require(dim_ == 2 || dim_ == 3, "pixel set dimension must be 2 or 3");
  require(cell_ > 0.0, "pixel cell size must be positive");
  if (dim_ == 2) dims_[2] = 1;
  for (int d : dims_) require(d >= 1, "pixel grid dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], 0);
}

std::array<int, 3> PixelSet::coords(std::size_t idx) const {
  const int i = static_cast<int>(idx % dims_[0]);
  const std::size_t rest = idx / dims_[0];
  return {i, static_cast<int>(rest % dims_[1]), static_cast<int>(rest / dims_[1])};
}

Vec3 PixelSet::cell_center(int i, int j, int k) const {
  Vec3 c = origin_ + cell_ * Vec3(i + 0.5, j + 0.5, k + 0.5);
  if (dim_ == 2) c.z() = origin_.z();
  return c;
}

std::optional<std::array<int, 3>> PixelSet::cell_of(const Vec3& p) const {
  std::array<int, 3> c{};
  for (int d = 0; d < dim_; ++d) {
    c[d] = static_cast<int>(std::floor((p[d] - origin_[d]) / cell_));
    if (c[d] < 0 || c[d] >= dims_[d]) return std::nullopt;
  }
  return c;
}

std::size_t PixelSet::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

double PixelSet::measure() const { return static_cast<double>(count()) * std::pow(cell_, dim_); }

std::vector<std::array<int, 3>> PixelSet::occupied() const {
  std::vector<std::array<int, 3>> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(coords(i));
  return out;
}

bool PixelSet::same_grid(const PixelSet& o) const {
  return dim_ == o.dim_ && dims_ == o.dims_ && cell_ == o.cell_ && origin_ == o.origin_;
}

PixelSet PixelSet::operator|(const PixelSet& o) const {
  require(same_grid(o), "pixel sets live on different grids");
  PixelSet r = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] = bits_[i] | o.bits_[i];
  return r;
}

PixelSet PixelSet::operator&(const PixelSet& o) const {
  require(same_grid(o), "pixel sets live on different grids");
  PixelSet r = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] = bits_[i] & o.bits_[i];
  return r;
}

bool PixelSet::subset_of(const PixelSet& o) const {
  require(same_grid(o), "pixel sets live on different grids");
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !o.bits_[i]) return false;
  return true;
}

PixelSet rasterize(int dimension, const Box& box, double cell, const std::function<bool(const Vec3&)>& pred) {
  std::array<int, 3> dims{1, 1, 1};
  for (int d = 0; d < dimension; ++d)
    dims[d] = std::max(1, static_cast<int>(std::ceil((box.hi[d] - box.lo[d]) / cell - 1e-9)));
  PixelSet set(dimension, box.lo, cell, dims);
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto c = set.coords(i);
    if (pred(set.cell_center(c[0], c[1], c[2]))) set.set_flat(i, true);
  }
  return set;
}

// ---- construction -----------------------------------------------------------

TriangulatedDomain build_grid_domain(int dimension, const Box& box, std::array<int, 3> cells) {
  require(dimension == 2 || dimension == 3, "grid dimension must be 2 or 3");
  for (int d = 0; d < dimension; ++d) {
    require(cells[d] >= 1, "grid resolution must be at least 1");
    require(box.hi[d] > box.lo[d], "grid box is degenerate");
  }
  const int nx = cells[0], ny = cells[1], nz = dimension == 3 ? cells[2] : 0;
  auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  std::vector<Vec3> verts;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        Vec3 p(box.lo.x() + (box.hi.x() - box.lo.x()) * i / nx, box.lo.y() + (box.hi.y() - box.lo.y()) * j / ny,
               dimension == 3 ? box.lo.z() + (box.hi.z() - box.lo.z()) * k / nz : 0.0);
        verts.push_back(p);
      }
  std::vector<Simplex> simplices;
  if (dimension == 2) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int v00 = id(i, j, 0), v10 = id(i + 1, j, 0), v01 = id(i, j + 1, 0), v11 = id(i + 1, j + 1, 0);
        simplices.push_back({v00, v10, v11, -1});
        simplices.push_back({v00, v11, v01, -1});
      }
  } else {
    static const std::array<std::array<int, 3>, 6> perms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          for (const auto& p : perms) {
            std::array<int, 3> c{i, j, k};
            Simplex s{};
            s[0] = id(c[0], c[1], c[2]);
            for (int step = 0; step < 3; ++step) {
              ++c[p[step]];
              s[step + 1] = id(c[0], c[1], c[2]);
            }
            simplices.push_back(s);
          }
  }
  return TriangulatedDomain(dimension, std::move(verts), std::move(simplices));
}

TriangulatedDomain build_grid_domain(int dimension, const Box& box, int resolution) {
  require(resolution >= 1, "grid resolution must be at least 1");
  return build_grid_domain(dimension, box, {resolution, resolution, resolution});
}

TriangulatedDomain build_disk_domain(const Vec3& center, double radius, int rings) {
  require(rings >= 1, "disk needs at least one ring");
  require(radius > 0.0, "disk radius must be positive");
  std::vector<Vec3> verts{Vec3(center.x(), center.y(), 0.0)};
  std::vector<int> ring_start{0};
  for (int r = 1; r <= rings; ++r) {
    ring_start.push_back(static_cast<int>(verts.size()));
    const int n = 6 * r;
    for (int j = 0; j < n; ++j) {
      const double a = 2.0 * std::numbers::pi * j / n;
      verts.emplace_back(center.x() + radius * r / rings * std::cos(a), center.y() + radius * r / rings * std::sin(a), 0.0);
    }
  }
  std::vector<Simplex> tris;
  for (int j = 0; j < 6; ++j) tris.push_back({0, ring_start[1] + j, ring_start[1] + (j + 1) % 6, -1});
  for (int r = 2; r <= rings; ++r) {
    const int nin = 6 * (r - 1), nout = 6 * r;
    int a = 0, b = 0;
    while (a < nin || b < nout) {
      const double next_in = (a + 1.0) / nin, next_out = (b + 1.0) / nout;
      const int ia = ring_start[r - 1] + a % nin, ib = ring_start[r] + b % nout;
      if (a < nin && (b >= nout || next_in < next_out)) {
        tris.push_back({ia, ib, ring_start[r - 1] + (a + 1) % nin, -1});
        ++a;
      } else {
        tris.push_back({ia, ib, ring_start[r] + (b + 1) % nout, -1});
        ++b;
      }
    }
  }
  return TriangulatedDomain(2, std::move(verts), std::move(tris));
}

TriangulatedDomain build_ball_domain(const Vec3& center, double radius, int resolution) {
  require(resolution >= 2 && resolution % 2 == 0, "ball resolution must be even and >= 2");
  TriangulatedDomain cube = build_grid_domain(3, Box{Vec3::Constant(-1.0), Vec3::Constant(1.0)}, resolution);
  std::vector<Vec3> verts;
  for (const Vec3& p : cube.vertices()) {
    const double n2 = p.norm();
    Vec3 q = n2 > 0.0 ? Vec3(p * (p.cwiseAbs().maxCoeff() / n2)) : p;
    verts.push_back(center + radius * q);
  }
  return TriangulatedDomain(3, std::move(verts), cube.simplices());
}

TriangulatedDomain merge_domains(std::span<const TriangulatedDomain> parts, double weld_tolerance) {
  require(!parts.empty(), "nothing to merge");
  const int dim = parts.front().dimension();
  require(weld_tolerance > 0.0, "weld tolerance must be positive");
  std::map<std::array<long long, 3>, std::vector<int>> grid;
  std::vector<Vec3> verts;
  std::vector<Simplex> simplices;
  auto key_of = [&](const Vec3& p) {
    return std::array<long long, 3>{static_cast<long long>(std::floor(p.x() / weld_tolerance)),
                                    static_cast<long long>(std::floor(p.y() / weld_tolerance)),
                                    static_cast<long long>(std::floor(p.z() / weld_tolerance))};
  };
  auto weld = [&](const Vec3& p) {
    const auto k = key_of(p);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = grid.find({k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == grid.end()) continue;
          for (int v : it->second)
            if ((verts[v] - p).norm() <= weld_tolerance) return v;
        }
    const int id = static_cast<int>(verts.size());
    verts.push_back(p);
    grid[k].push_back(id);
    return id;
  };
  for (const auto& part : parts) {
    require(part.dimension() == dim, "cannot merge meshes of different dimension");
    std::vector<int> remap(part.vertex_count());
    for (std::size_t v = 0; v < part.vertex_count(); ++v) remap[v] = weld(part.vertex(v));
    for (const Simplex& s : part.simplices()) {
      Simplex t{-1, -1, -1, -1};
      for (int i = 0; i <= dim; ++i) t[i] = remap[s[i]];
      simplices.push_back(t);
    }
  }
  return TriangulatedDomain(dim, std::move(verts), std::move(simplices));
}

PrismMesh extrude_cylinder(DomainPtr base, int levels, double height, double bottom) {
  require(base != nullptr, "extrusion needs a base mesh");
  require(base->dimension() == 2, "extrusion base must be two-dimensional");
  require(levels >= 1, "extrusion needs at least one level");
  require(height > 0.0, "extrusion height must be positive");
  PrismMesh prism;
  prism.base = base;
  prism.levels = levels;
  prism.height = height;
  prism.bottom = bottom;
  const int nb = static_cast<int>(base->vertex_count());
  std::vector<Vec3> verts;
  verts.reserve(static_cast<std::size_t>(nb) * (levels + 1));
  for (int l = 0; l <= levels; ++l)
    for (const Vec3& p : base->vertices()) verts.emplace_back(p.x(), p.y(), prism.layer_coordinate(l));
  std::vector<Simplex> tets;
  tets.reserve(base->simplex_count() * 3 * levels);
  for (const Simplex& t : base->simplices()) {
    std::array<int, 3> v{t[0], t[1], t[2]};
    std::sort(v.begin(), v.end());
    for (int l = 0; l < levels; ++l) {
      const int a0 = l * nb + v[0], b0 = l * nb + v[1], c0 = l * nb + v[2];
      const int a1 = a0 + nb, b1 = b0 + nb, c1 = c0 + nb;
      tets.push_back({a0, b0, c0, c1});
      tets.push_back({a0, b0, b1, c1});
      tets.push_back({a0, a1, b1, c1});
    }
  }
  prism.mesh = std::make_shared<TriangulatedDomain>(3, std::move(verts), std::move(tets));
  return prism;
}

// ---- sampling -------------------------------------------------------------

std::vector<Vec3> sample_interior(const TriangulatedDomain& domain, std::size_t n, std::uint64_t seed) {
  require(n >= 1, "sample count must be at least 1");
  if (domain.simplex_count() == 0 || domain.total_volume() <= 0.0) fail(Errc::invalid_argument, "empty domain");
  std::vector<double> cumulative(domain.simplex_count());
  double acc = 0.0;
  for (std::size_t s = 0; s < cumulative.size(); ++s) cumulative[s] = (acc += domain.volume(s));
  Rng rng(seed);
  const double shift = rng.uniform();
  const int k = domain.vertices_per_simplex();
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + shift) / static_cast<double>(n) * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t s = std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
    // Uniform barycentric coordinates from sorted uniforms, kept off the facets.
    std::array<double, 5> cuts{};
    Eigen::Vector4d b = Eigen::Vector4d::Zero();
    do {
      cuts[0] = 0.0;
      for (int j = 1; j < k; ++j) cuts[j] = rng.uniform();
      cuts[k] = 1.0;
      std::sort(cuts.begin() + 1, cuts.begin() + k);
      for (int j = 0; j < k; ++j) b[j] = cuts[j + 1] - cuts[j];
    } while (b.head(k).minCoeff() < 1e-9);
    Vec3 p = Vec3::Zero();
    for (int j = 0; j < k; ++j) p += b[j] * domain.vertex(domain.simplex(s)[j]);
    out.push_back(p);
  }
  return out;
}

GridSamples grid_samples(const TriangulatedDomain& domain, int nx, int ny) {
  require(domain.dimension() == 2, "grid samples need a planar domain");
  require(nx >= 1 && ny >= 1, "grid sample counts must be positive");
  GridSamples g;
  g.nx = nx;
  g.ny = ny;
  const Box& b = domain.bounds();
  g.spacing_x = (b.hi.x() - b.lo.x()) / nx;
  g.spacing_y = (b.hi.y() - b.lo.y()) / ny;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec3 p(b.lo.x() + (i + 0.5) * g.spacing_x, b.lo.y() + (j + 0.5) * g.spacing_y, 0.0);
      if (domain.locate(p)) {
        g.points.push_back(p);
        g.cells.push_back({i, j});
      }
    }
  return g;
}

MeasureEstimate measure_of(const TriangulatedDomain& domain, const std::function<bool(const Vec3&)>& pred,
                           std::size_t samples, std::uint64_t seed) {
  const auto pts = sample_interior(domain, samples, seed);
  std::vector<bool> hits(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) hits[i] = pred(pts[i]);
  std::vector<char> flat(hits.begin(), hits.end());
  return measure_of(std::span<const bool>(reinterpret_cast<const bool*>(flat.data()), flat.size()),
                    domain.total_volume());
}

MeasureEstimate measure_of(std::span<const bool> hits, double domain_volume) {
  if (hits.empty()) return {};
  const double n = static_cast<double>(hits.size());
  const double p = static_cast<double>(std::count(hits.begin(), hits.end(), true)) / n;
  return {domain_volume * p, 3.0 * domain_volume * std::sqrt(p * (1.0 - p) / n)};
}

MeasureEstimate measure_of(const PixelSet& set) { return {set.measure(), 0.0}; }

}  // namespace platecheck
