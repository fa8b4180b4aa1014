#include "platecheck/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace platecheck {

double gradient_norm(const PiecewiseAffineMap& f, std::size_t s) {
  const int n = f.domain().dimension(), m = f.target_dimension();
  const Eigen::MatrixXd G = f.gradient(s).topLeftCorner(m, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  return svd.singularValues()(0);
}

namespace {

void dilate(const TriangulatedDomain& dom, std::vector<bool>& bad) {
  std::vector<bool> touched(dom.vertex_count(), false);
  for (std::size_t s = 0; s < dom.simplex_count(); ++s)
    if (bad[s])
      for (int i = 0; i <= dom.dimension(); ++i) touched[dom.simplex(s)[i]] = true;
  for (std::size_t s = 0; s < dom.simplex_count(); ++s)
    for (int i = 0; i <= dom.dimension() && !bad[s]; ++i)
      if (touched[dom.simplex(s)[i]]) bad[s] = true;
}

}  // namespace

TruncationResult lipschitz_truncate(const PiecewiseAffineMap& f, double K) {
  if (!(K > 0.0)) fail(Errc::invalid_argument, "truncation threshold must be positive", K);
  const TriangulatedDomain& dom = f.domain();
  const int dim = dom.dimension(), m = f.target_dimension();
  const std::size_t ns = dom.simplex_count(), nv = dom.vertex_count();

  TruncationResult out;
  out.K = K;
  std::vector<double> norms(ns);
  parallel_for(ns, [&](std::size_t s) { norms[s] = gradient_norm(f, s); });
  std::vector<bool> bad(ns, false);
  for (std::size_t s = 0; s < ns; ++s) {
    if (norms[s] >= K) out.excess_energy += dom.volume(s) * norms[s];
    if (norms[s] > K) {
      bad[s] = true;
      out.bad_volume += dom.volume(s);
    }
  }
  std::vector<Vec3> values = f.values();
  if (std::none_of(bad.begin(), bad.end(), [](bool b) { return b; })) {
    out.map = std::make_shared<PiecewiseAffineMap>(f);
    out.bad = bad;
    out.lipschitz_bound = *std::max_element(norms.begin(), norms.end());
    out.C1 = out.lipschitz_bound / K;
    return out;
  }

  for (;;) {
    ++out.rounds;
    dilate(dom, bad);
    std::vector<bool> fixed(nv, false);
    for (std::size_t s = 0; s < ns; ++s)
      if (!bad[s])
        for (int i = 0; i <= dim; ++i) fixed[dom.simplex(s)[i]] = true;
    std::vector<int> good_v, free_v;
    for (std::size_t v = 0; v < nv; ++v) (fixed[v] ? good_v : free_v).push_back(static_cast<int>(v));
    if (good_v.empty()) {
      Vec3 mean = Vec3::Zero();
      for (const auto& v : f.values()) mean += v;
      mean /= static_cast<double>(nv);
      out.map = std::make_shared<PiecewiseAffineMap>(f.domain_ptr(), std::vector<Vec3>(nv, mean), m);
      out.degenerate = true;
      break;
    }
    // Componentwise Lipschitz constants of f on the good vertex set.
    Vec3 L = Vec3::Zero();
    for (std::size_t a = 0; a < good_v.size(); ++a)
      for (std::size_t b = a + 1; b < good_v.size(); ++b) {
        const double d = (dom.vertex(good_v[a]) - dom.vertex(good_v[b])).norm();
        L = L.cwiseMax((f.value(good_v[a]) - f.value(good_v[b])).cwiseAbs() / d);
      }
    out.good_lipschitz = L.norm();
    values = f.values();
    parallel_for(free_v.size(), [&](std::size_t i) {
      const int v = free_v[i];
      const Vec3 x = dom.vertex(v);
      Vec3 upper = Vec3::Constant(std::numeric_limits<double>::infinity());
      Vec3 lower = -upper;
      for (int a : good_v) {
        const double d = (x - dom.vertex(a)).norm();
        upper = upper.cwiseMin(f.value(a) + L * d);
        lower = lower.cwiseMax(f.value(a) - L * d);
      }
      values[v] = 0.5 * (upper + lower);
      if (m == 2) values[v].z() = 0.0;
    });
    auto trial = std::make_shared<PiecewiseAffineMap>(f.domain_ptr(), values, m);
    bool grew = false;
    for (std::size_t s = 0; s < ns; ++s)
      if (bad[s] && gradient_norm(*trial, s) > K * (1.0 + 1e-12)) {
        // A refilled simplex still too steep: grow the bad set around it.
        for (int i = 0; i <= dim; ++i)
          for (int t : dom.vertex_simplices()[dom.simplex(s)[i]])
            if (!bad[t]) {
              bad[t] = true;
              grew = true;
            }
      }
    if (!grew) {
      out.map = trial;
      break;
    }
  }

  out.bad = bad;
  for (std::size_t s = 0; s < ns; ++s) {
    out.lipschitz_bound = std::max(out.lipschitz_bound, gradient_norm(*out.map, s));
    if (bad[s]) out.dilated_volume += dom.volume(s);
    bool differs = false;
    for (int i = 0; i <= dim; ++i) differs = differs || out.map->value(dom.simplex(s)[i]) != f.value(dom.simplex(s)[i]);
    if (differs) out.mismatch_measure += dom.volume(s);
  }
  out.C1 = out.lipschitz_bound / K;
  return out;
}

TruncationSweep truncation_bound_sweep(const std::vector<PiecewiseAffineMap>& family, double K) {
  TruncationSweep sweep;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& f : family) {
    const TruncationResult r = lipschitz_truncate(f, K);
    sweep.rows.push_back({r.excess_energy, r.mismatch_measure, r.C1});
    if (r.excess_energy > 0.0) {
      const double ratio = r.mismatch_measure / r.excess_energy;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  sweep.C2 = hi;
  sweep.ratio_spread = hi > 0.0 && lo > 0.0 ? hi / lo : 1.0;
  for (const auto& row : sweep.rows) {
    if (row.excess_energy == 0.0 ? row.mismatch_measure > 0.0 : row.mismatch_measure > sweep.C2 * row.excess_energy * (1 + 1e-12))
      ++sweep.violations;
  }
  return sweep;
}

}  // namespace platecheck
