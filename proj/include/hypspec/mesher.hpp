// Intrinsic geodesic meshing of pants blocks, glued surfaces, cyclic covers,
// truncated cusps, and the flat/polar oracle domains.
//
// A pants block is cut along its three seams into two isometric right-angled
// hexagons (corners may degenerate to ideal points when an end is a cusp).
// Each hexagon is meshed from three kinds of cells:
//   - a Fermi-coordinate quad of collar depth about each finite side,
//   - a horocyclic strip up each ideal corner, truncated near the cusp,
//   - one fat central cell, triangulated by constrained Delaunay in a
//     Poincare chart centered on the cell.
// Cell interfaces share vertex ids, the mirror hexagon is an index-level
// copy, and gluing is pure index identification, so conforming seams and
// determinism hold by construction.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "hypspec/delaunay.hpp"
#include "hypspec/geometry.hpp"
#include "hypspec/hyperbolic.hpp"
#include "hypspec/mesh.hpp"

namespace hypspec {

namespace mesher_detail {

// All structured spacings use h/1.6 so that band diagonals stay below the
// requested h_max.
inline double effective_h(double h) { return h / 1.6; }

inline int circle_half_segments(double ell, double h) {
  return std::max(2, static_cast<int>(std::ceil(0.5 * ell / effective_h(h))));
}

// Zipper triangulation of the band between two rows sampled over the same
// parameter range. Rows are vertex id lists; `emit` receives CCW triangles
// (inner row first, outer row above).
inline void zip_rows(const std::vector<int>& inner, const std::vector<int>& outer,
                     std::vector<std::array<int, 3>>& out) {
  int pa = static_cast<int>(inner.size()) - 1;
  int pb = static_cast<int>(outer.size()) - 1;
  if (pa < 1 && pb < 1) throw std::runtime_error("zip_rows: degenerate rows");
  int i = 0, j = 0;
  while (i < pa || j < pb) {
    bool take_inner;
    if (i >= pa)
      take_inner = false;
    else if (j >= pb)
      take_inner = true;
    else
      take_inner = (static_cast<double>(i + 1) * pb <= static_cast<double>(j + 1) * pa);
    if (take_inner) {
      out.push_back({inner[i], inner[i + 1], outer[j]});
      ++i;
    } else {
      out.push_back({inner[i], outer[j + 1], outer[j]});
      ++j;
    }
  }
}

// Closed-ring variant: rows list each vertex once; both rings start at the
// same angular origin.
inline void zip_rings(const std::vector<int>& inner, const std::vector<int>& outer,
                      std::vector<std::array<int, 3>>& out) {
  std::vector<int> a(inner), b(outer);
  a.push_back(inner.front());
  b.push_back(outer.front());
  zip_rows(a, b, out);
}

struct HexObject {
  bool ideal = false;
  // finite side
  FermiChart chart;   // base at the side's start corner, `along` the walk direction
  double len = 0;     // a_i = ell_i / 2
  double depth = 0;   // collar quad depth
  // ideal corner
  HVec xi{};
  double entry_level = 0;   // Busemann level of the strip entry horocycle
  double entry_arc = 0;     // horocyclic arc of this cell's entry row
};

struct HexRealization {
  std::array<HexObject, 3> obj;
  // seam_after[i] joins object i to object i+1; its index in b-numbering is
  // third(i, i+1) but only the endpoint anchors matter here.
  std::array<double, 3> seam_length{};  // +inf unless both flanking objects finite

  static int seam_index(int i) { return (i + 2) % 3; }
};

inline HVec side_end_corner(const HexObject& o) { return o.chart.at(0, o.len); }

// Realize the (possibly degenerate) hexagon with alternate half-lengths a[i]
// (NaN marks an ideal corner). The walk is anchored at the midpoint of the
// longest finite side and runs both ways around, so no intermediate point
// strays farther than about half the diameter from the frame origin; a
// single-frame loop would lose exp(diameter) precision for thin collars.
inline HexRealization realize_hexagon(const std::array<double, 3>& a) {
  HexRealization hex;
  std::array<bool, 3> ideal{};
  int n_ideal = 0;
  for (int i = 0; i < 3; ++i) {
    ideal[i] = std::isnan(a[i]);
    if (ideal[i]) ++n_ideal;
    hex.obj[i].ideal = ideal[i];
    if (!ideal[i]) hex.obj[i].len = a[i];
  }

  auto seam_between = [&](int i, int j) -> double {
    // cosh(b) = (X + cosh a_i cosh a_j)/(sinh a_i sinh a_j); X = cosh of the
    // opposite side, 1 when the opposite corner is a cusp.
    int k = 3 - i - j;
    double X = ideal[k] ? 1.0 : std::cosh(a[k]);
    double num = X + std::cosh(a[i]) * std::cosh(a[j]);
    double den = std::sinh(a[i]) * std::sinh(a[j]);
    return std::acosh(num / den);
  };

  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3;
    hex.seam_length[i] =
        (!ideal[i] && !ideal[j]) ? seam_between(i, j) : std::numeric_limits<double>::infinity();
  }

  if (n_ideal == 3) {
    for (int i = 0; i < 3; ++i) {
      double th = 0.5 * kPi + i * (2.0 * kPi / 3.0);
      hex.obj[i].xi = HVec{1.0, std::cos(th), std::sin(th)};
    }
    return hex;
  }

  // Cyclic boundary: side 2i = a_i (corner object), side 2i+1 = seam_after[i].
  auto side_length = [&](int s) -> double {
    if (s % 2 == 0) {
      int i = s / 2;
      return ideal[i] ? std::numeric_limits<double>::infinity() : hex.obj[i].len;
    }
    return hex.seam_length[(s - 1) / 2];
  };

  int anchor = -1;
  double longest = -1;
  for (int s = 0; s < 6; ++s) {
    double L = side_length(s);
    if (std::isfinite(L) && L > longest) {
      longest = L;
      anchor = s;
    }
  }
  if (anchor < 0) throw std::runtime_error("hexagon has no finite side");

  // at_corner[s]: position of corner s with the direction along side s.
  std::array<std::optional<GeodesicState>, 6> fwd_corner, bwd_corner;

  // Forward walk (+pi/2 turns) from the anchor midpoint up to corner
  // anchor+4; backward walk (-pi/2 turns) down to the same corner.
  {
    GeodesicState g = geodesic_step(origin(), HVec{0, 1, 0}, 0.5 * side_length(anchor));
    for (int k = 1; k <= 4; ++k) {
      int s = (anchor + k) % 6;
      HVec vp = rotate_tangent(g.point, g.dir, 0.5 * kPi);
      fwd_corner[s] = GeodesicState{g.point, vp};
      if (k == 4) break;
      if (!std::isfinite(side_length(s))) break;
      g = geodesic_step(g.point, vp, side_length(s));
    }
  }
  {
    GeodesicState g = geodesic_step(origin(), HVec{0, -1, 0}, 0.5 * side_length(anchor));
    for (int k = 0; k <= 2; ++k) {
      int sb = (anchor - k + 6) % 6;  // corner just reached
      HVec along = renormalize_tangent(g.point, g.dir * -1.0);
      bwd_corner[sb] = GeodesicState{g.point, along};
      if (k == 2) break;
      int sprev = (sb + 5) % 6;
      if (!std::isfinite(side_length(sprev))) break;
      HVec u = rotate_tangent(g.point, g.dir, -0.5 * kPi);
      g = geodesic_step(g.point, u, side_length(sprev));
    }
  }

  int meet = (anchor + 4) % 6;
  if (fwd_corner[meet] && bwd_corner[meet]) {
    double scale = 1.0 + std::cosh(0.5 * longest + 1.0);
    if (hdist(fwd_corner[meet]->point, bwd_corner[meet]->point) > 1e-9 * scale)
      throw std::runtime_error("hexagon walk failed to close");
  }

  for (int i = 0; i < 3; ++i) {
    if (ideal[i]) continue;
    const auto& rec = bwd_corner[2 * i] ? bwd_corner[2 * i] : fwd_corner[2 * i];
    if (!rec) throw std::runtime_error("hexagon walk missed a finite side");
    hex.obj[i].chart = FermiChart{rec->point, rec->dir, perp_tangent(rec->point, rec->dir)};
  }

  // Ideal points from the flanking rays (chart normals are the seam
  // directions at the corners).
  double ray_tol = 1e-9 * (1.0 + std::cosh(0.5 * longest + 1.0));
  for (int i = 0; i < 3; ++i) {
    if (!ideal[i]) continue;
    int prev = (i + 2) % 3, next = (i + 1) % 3;
    std::optional<HVec> cand1, cand2;
    if (!ideal[prev]) {
      const auto& o = hex.obj[prev];
      cand1 = ideal_endpoint(side_end_corner(o), o.chart.normal);
    }
    if (!ideal[next]) {
      const auto& o = hex.obj[next];
      cand2 = ideal_endpoint(o.chart.base, o.chart.normal);
    }
    HVec xi;
    if (cand1 && cand2) {
      HVec c1 = *cand1 * (1.0 / cand1->t);
      HVec c2 = *cand2 * (1.0 / cand2->t);
      HVec d = c1 - c2;
      if (std::sqrt(d.x * d.x + d.y * d.y + d.t * d.t) > ray_tol)
        throw std::runtime_error("hexagon asymptotic rays do not meet at the cusp");
      xi = (c1 + c2) * 0.5;
    } else {
      xi = cand1 ? *cand1 : *cand2;
      xi = xi * (1.0 / xi.t);
    }
    hex.obj[i].xi = xi;
  }
  return hex;
}

struct HexMeshData {
  std::vector<HVec> pos;
  std::vector<VertexProvenance> prov;
  std::vector<std::array<int, 3>> tris;
  std::array<std::vector<int>, 3> bottom;  // finite side i: ring-0 chain, s ascending
  std::array<std::vector<int>, 3> rim;     // ideal corner i: truncation row, s ascending
  std::array<std::vector<int>, 3> seam;    // seam_after[i]: full chain obj i -> obj i+1
  std::array<int, 3> half_segments{};      // per finite side
};

// Target horocycle length of a full cusp tube at its entry into the block.
inline constexpr double kCuspEntryLength = 1.0;

class HexMesher {
 public:
  HexMesher(const std::array<double, 3>& a, double h, double cusp_rim_len)
      : h_(h), he_(effective_h(h)), rim_len_(cusp_rim_len), hex_(realize_hexagon(a)) {}

  HexMeshData build() {
    prepare_depths();
    for (int i = 0; i < 3; ++i)
      if (!hex_.obj[i].ideal) build_quad(i);
    for (int i = 0; i < 3; ++i)
      if (hex_.obj[i].ideal) build_strip(i);
    build_seams_and_core();
    return std::move(data_);
  }

 private:
  int add_vertex(const HVec& p, char chart, int slot, double u, double v) {
    data_.pos.push_back(p);
    VertexProvenance pr;
    pr.block = 0;
    pr.slot = slot;
    pr.chart = chart;
    pr.u = u;
    pr.v = v;
    data_.prov.push_back(pr);
    return static_cast<int>(data_.pos.size()) - 1;
  }

  // Quad depths: full collar widths, shrunk only if a seam budget would
  // leave no room for the central cell's seam segment.
  void prepare_depths() {
    for (int i = 0; i < 3; ++i) {
      auto& o = hex_.obj[i];
      if (!o.ideal) o.depth = collar_width(2.0 * o.len);
    }
    for (int i = 0; i < 3; ++i) {
      int j = (i + 1) % 3;
      if (hex_.obj[i].ideal || hex_.obj[j].ideal) continue;
      double budget = hex_.seam_length[i];
      double min_middle = std::min(1e-4, 0.05 * budget);
      double need = hex_.obj[i].depth + hex_.obj[j].depth;
      if (need > budget - min_middle) {
        double f = (budget - min_middle) / need;
        hex_.obj[i].depth *= f;
        hex_.obj[j].depth *= f;
      }
    }
    // Cusp entry levels: fix the per-cell entry arc, then push entries
    // deeper wherever a seam would be left without room for the core.
    double min_mid = std::min(0.05, he_);
    for (int i = 0; i < 3; ++i) {
      auto& o = hex_.obj[i];
      if (!o.ideal) continue;
      auto [pa, da] = ray_toward(i, (i + 2) % 3);
      auto [pb, db] = ray_toward(i, (i + 1) % 3);
      double level = std::min(busemann(pa, o.xi), busemann(pb, o.xi));
      HVec qa = point_at_level(pa, o.xi, level);
      HVec qb = point_at_level(pb, o.xi, level);
      double arc = horocycle_arc_between(qa, qb);
      // Arc scales as e^{level}; move to the level with the target arc.
      double ref_level = level, ref_arc = arc;
      o.entry_level = ref_level + std::log(0.5 * kCuspEntryLength / ref_arc);
      // Keep clear of the flanking collar quads.
      for (int nb : {(i + 2) % 3, (i + 1) % 3}) {
        if (hex_.obj[nb].ideal) continue;
        HVec anchor =
            (nb == (i + 2) % 3) ? side_end_corner(hex_.obj[nb]) : hex_.obj[nb].chart.base;
        double t_entry = busemann(anchor, o.xi) - o.entry_level;
        double required = hex_.obj[nb].depth + min_mid;
        if (t_entry < required) o.entry_level = busemann(anchor, o.xi) - required;
      }
      o.entry_arc = ref_arc * std::exp(o.entry_level - ref_level);
    }
    // Seams with an ideal corner at both ends: deepen both entries until the
    // middle segment has room.
    for (int i = 0; i < 3; ++i) {
      int j = (i + 1) % 3;
      auto& oi = hex_.obj[i];
      auto& oj = hex_.obj[j];
      if (!oi.ideal || !oj.ideal) continue;
      auto [mid, dirv] = ray_toward(i, j);  // anchored at the symmetric point
      double ti = busemann(mid, oi.xi) - oi.entry_level;
      double tj = busemann(mid, oj.xi) - oj.entry_level;
      double gap = ti + tj;
      if (gap < min_mid) {
        double d = 0.5 * (min_mid - gap);
        oi.entry_level -= d;
        oi.entry_arc *= std::exp(-d);
        oj.entry_level -= d;
        oj.entry_arc *= std::exp(-d);
      }
    }
  }

  // Ray on the seam between ideal corner `i` and its flanking object
  // `nb`, anchored at the finite flank (or on the ideal-ideal geodesic),
  // directed toward xi_i.
  std::pair<HVec, HVec> ray_toward(int i, int nb) {
    const auto& o = hex_.obj[nb];
    const HVec& xi = hex_.obj[i].xi;
    if (!o.ideal) {
      HVec anchor = (nb == (i + 2) % 3) ? side_end_corner(o) : o.chart.base;
      return {anchor, direction_to_ideal(anchor, xi)};
    }
    // Both corners ideal: anchor at the symmetric point of the connecting
    // geodesic x(t) = (e^t xi + e^{-t} eta)/sqrt(-2<xi,eta>).
    const HVec& eta = o.xi;
    double n2 = -2.0 * mdot(xi, eta);
    if (!(n2 > 0)) throw std::runtime_error("cusp geodesic: coincident ideal points");
    double inv = 1.0 / std::sqrt(n2);
    HVec mid = (xi + eta) * inv;
    mid = renormalize_point(mid);
    return {mid, direction_to_ideal(mid, xi)};
  }

  static HVec point_at_level(const HVec& anchor, const HVec& xi, double level) {
    // Along a unit ray into xi, the Busemann level drops at rate 1.
    double t = busemann(anchor, xi) - level;
    HVec dir = direction_to_ideal(anchor, xi);
    return geodesic_step(anchor, dir, t).point;
  }

  void build_quad(int i) {
    const auto& o = hex_.obj[i];
    double w = o.depth;
    std::vector<double> radii = quad_radii(w);
    int m = static_cast<int>(radii.size()) - 1;
    quad_rows_[i].resize(m + 1);
    for (int j = 0; j <= m; ++j) {
      double r = radii[j];
      // Minimum 2 segments: single-segment rows would put both endpoints on
      // seams and collapse against the mirror copy.
      int n = std::max(2, static_cast<int>(std::ceil(o.len * std::cosh(r) / he_)));
      if (j == 0) n = std::max(2, static_cast<int>(std::ceil(o.len / he_)));
      auto& row = quad_rows_[i][j];
      row.resize(n + 1);
      for (int k = 0; k <= n; ++k) {
        double s = o.len * k / n;
        row[k] = add_vertex(o.chart.at(r, s), 'C', i, r, s);
      }
    }
    for (int j = 0; j < m; ++j) zip_rows(quad_rows_[i][j], quad_rows_[i][j + 1], data_.tris);
    data_.bottom[i] = quad_rows_[i][0];
    data_.half_segments[i] = static_cast<int>(quad_rows_[i][0].size()) - 1;
  }

  std::vector<double> quad_radii(double w) const {
    std::vector<double> r{0.0};
    if (w > 1.0) {
      // Keep at least 5 layers across the unit band next to the curve.
      int m1 = std::max(5, static_cast<int>(std::ceil(1.0 / he_)));
      for (int j = 1; j <= m1; ++j) r.push_back(static_cast<double>(j) / m1);
      int m2 = std::max(1, static_cast<int>(std::ceil((w - 1.0) / he_)));
      for (int j = 1; j <= m2; ++j) r.push_back(1.0 + (w - 1.0) * j / m2);
    } else {
      int m = std::max(1, static_cast<int>(std::ceil(w / he_)));
      for (int j = 1; j <= m; ++j) r.push_back(w * j / m);
    }
    return r;
  }

  void build_strip(int i) {
    auto& o = hex_.obj[i];
    auto [pa, da] = ray_toward(i, (i + 2) % 3);
    auto [pb, db] = ray_toward(i, (i + 1) % 3);
    double depth = std::log(2.0 * o.entry_arc / rim_len_);
    if (!(depth > 0)) throw std::runtime_error("cusp truncation shallower than its entry");
    if (rim_len_ < 10.0 * std::numeric_limits<double>::epsilon())
      throw std::runtime_error("cusp rim length below 10*machine-epsilon");
    int m = std::max(1, static_cast<int>(std::ceil(depth / he_)));
    strip_rows_[i].resize(m + 1);
    for (int j = 0; j <= m; ++j) {
      double d = depth * j / m;
      double level = o.entry_level - d;
      HVec start = point_at_level(pa, o.xi, level);
      HVec stop = point_at_level(pb, o.xi, level);
      double arc = o.entry_arc * std::exp(-d);
      // Horocycle branch toward the other seam.
      HVec vdir = direction_to_ideal(start, o.xi);
      HVec wdir = perp_tangent(start, vdir);
      HVec probe = horocycle_step(start, o.xi, wdir, arc);
      if (hdist(probe, stop) > 1e-7 * std::max(1.0, arc)) {
        wdir = wdir * -1.0;
        probe = horocycle_step(start, o.xi, wdir, arc);
        if (hdist(probe, stop) > 1e-7 * std::max(1.0, arc))
          throw std::runtime_error("cusp strip: horocycle row fails to meet the far seam");
      }
      int n = std::max(2, static_cast<int>(std::ceil(arc / he_)));
      auto& row = strip_rows_[i][j];
      row.resize(n + 1);
      for (int k = 0; k <= n; ++k) {
        double s = arc * k / n;
        HVec pt = (k == 0) ? start : (k == n ? stop : horocycle_step(start, o.xi, wdir, s));
        row[k] = add_vertex(pt, 'U', i, d, s);
      }
    }
    // Deeper rows have smaller arcs; zip outer-to-inner so orientation
    // matches the quads (row j is "inner" toward the block core).
    for (int j = 0; j < m; ++j) zip_rows(strip_rows_[i][j + 1], strip_rows_[i][j], data_.tris);
    data_.rim[i] = strip_rows_[i].back();
  }

  // Seam chains, the central cell polygon, and its CDT triangulation.
  void build_seams_and_core() {
    std::vector<int> polygon;  // vertex ids, CCW
    for (int i = 0; i < 3; ++i) {
      int j = (i + 1) % 3;
      const auto& oi = hex_.obj[i];
      const auto& oj = hex_.obj[j];

      // Arc of object i (quad top or strip entry), s ascending.
      const std::vector<int>& arc =
          oi.ideal ? strip_rows_[i].front() : quad_rows_[i].back();
      for (size_t t = 0; t + 1 < arc.size(); ++t) polygon.push_back(arc[t]);
      polygon.push_back(arc.back());

      // Middle of seam_after[i] from object i's arc end to object j's start.
      const std::vector<int>& next_arc =
          oj.ideal ? strip_rows_[j].front() : quad_rows_[j].back();
      HVec from = data_.pos[arc.back()];
      HVec to = data_.pos[next_arc.front()];
      double mid_len = hdist(from, to);
      if (mid_len < 1e-9)
        throw std::runtime_error("hexagon cells touch: seam left no room for the core");
      std::vector<int> middle;
      int nmid = std::max(1, static_cast<int>(std::ceil(mid_len / he_)));
      HVec dir = direction_to(from, to);
      for (int t = 1; t < nmid; ++t) {
        HVec p = geodesic_step(from, dir, mid_len * t / nmid).point;
        auto dc = to_disk(p);
        middle.push_back(add_vertex(p, 'D', -1, dc[0], dc[1]));
      }
      for (int v : middle) polygon.push_back(v);

      // Full seam chain for the mirror weld: lateral column of object i
      // ascending, middle, lateral column of object j descending.
      auto& chain = data_.seam[i];
      if (oi.ideal) {
        const auto& rows = strip_rows_[i];
        for (int r = static_cast<int>(rows.size()) - 1; r >= 0; --r)
          chain.push_back(rows[r].back());
      } else {
        for (const auto& row : quad_rows_[i]) chain.push_back(row.back());
      }
      for (int v : middle) chain.push_back(v);
      if (oj.ideal) {
        for (const auto& row : strip_rows_[j]) chain.push_back(row.front());
      } else {
        const auto& rows = quad_rows_[j];
        for (int r = static_cast<int>(rows.size()) - 1; r >= 0; --r)
          chain.push_back(rows[r].front());
      }
    }
    triangulate_core(polygon);
  }

  void triangulate_core(const std::vector<int>& polygon) {
    // Chart centered on the cell.
    HVec center{0, 0, 0};
    for (int v : polygon) center = center + data_.pos[v];
    center = renormalize_point(center);
    Frame fr = frame_at(center);

    auto chart_of = [&](const HVec& p) {
      HVec local = fr.pull(p);
      return Vec2{local.x / (1.0 + local.t), local.y / (1.0 + local.t)};
    };

    std::vector<Vec2> pts;
    std::vector<int> ids;  // mesh vertex id per CDT point
    std::vector<int> poly_local;
    for (int v : polygon) {
      poly_local.push_back(static_cast<int>(pts.size()));
      pts.push_back(chart_of(data_.pos[v]));
      ids.push_back(v);
    }
    // Ensure counterclockwise in the chart.
    double area2 = 0;
    for (size_t t = 0; t < pts.size(); ++t) {
      const Vec2& a = pts[t];
      const Vec2& b = pts[(t + 1) % pts.size()];
      area2 += a.x * b.y - a.y * b.x;
    }
    bool flip_y = area2 < 0;
    if (flip_y)
      for (auto& p : pts) p.y = -p.y;

    // Interior samples on polar rings about the center, kept clear of the
    // boundary polyline.
    double max_r = 0;
    for (int v : polygon) max_r = std::max(max_r, hdist(center, data_.pos[v]));
    size_t nb = poly_local.size();
    auto inside_polygon = [&](const Vec2& q) {
      bool in = false;
      for (size_t t = 0, s = nb - 1; t < nb; s = t++) {
        const Vec2& a = pts[s];
        const Vec2& b = pts[t];
        if (((a.y > q.y) != (b.y > q.y)) &&
            (q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x))
          in = !in;
      }
      return in;
    };
    PolarChart polar{fr};
    std::vector<HVec> interior;
    double ring_step = 0.85 * he_;
    for (double r = ring_step; r < max_r; r += ring_step) {
      int n = std::max(6, static_cast<int>(std::ceil(2.0 * kPi * std::sinh(r) / ring_step)));
      for (int k = 0; k < n; ++k) {
        HVec p = polar.at(r, 2.0 * kPi * k / n);
        Vec2 q = chart_of(p);
        if (flip_y) q.y = -q.y;
        if (!inside_polygon(q)) continue;
        bool clear = true;
        for (int v : polygon)
          if (hdist(p, data_.pos[v]) < 0.75 * he_) {
            clear = false;
            break;
          }
        if (clear) interior.push_back(p);
      }
    }
    for (const auto& p : interior) {
      Vec2 q = chart_of(p);
      if (flip_y) q.y = -q.y;
      pts.push_back(q);
      auto dc = to_disk(p);
      ids.push_back(add_vertex(p, 'D', -1, dc[0], dc[1]));
    }

    // Triangulate, splitting any interior edge longer than the target h at
    // its geodesic midpoint until the core honors the mesh size.
    std::vector<std::array<int, 3>> tris;
    for (int pass = 0; pass < 12; ++pass) {
      tris = ConstrainedDelaunay::triangulate(pts, poly_local);
      std::set<std::pair<int, int>> long_edges;
      for (const auto& t : tris)
        for (int e = 0; e < 3; ++e) {
          int u = t[e], v = t[(e + 1) % 3];
          if (u > v) std::swap(u, v);
          if (hdist(data_.pos[ids[u]], data_.pos[ids[v]]) > h_) long_edges.insert({u, v});
        }
      if (long_edges.empty()) break;
      bool added = false;
      for (const auto& [u, v] : long_edges) {
        HVec m = renormalize_point(data_.pos[ids[u]] + data_.pos[ids[v]]);
        Vec2 q = chart_of(m);
        if (flip_y) q.y = -q.y;
        if (!inside_polygon(q)) continue;
        pts.push_back(q);
        auto dc = to_disk(m);
        ids.push_back(add_vertex(m, 'D', -1, dc[0], dc[1]));
        added = true;
      }
      if (!added) break;
    }
    // Orient the core consistently with the band cells: an edge shared with
    // an existing triangle must appear with opposite direction.
    std::set<std::pair<int, int>> existing;
    for (const auto& t : data_.tris)
      for (int e = 0; e < 3; ++e) existing.insert({t[e], t[(e + 1) % 3]});
    int vote_flip = 0, vote_keep = 0;
    for (const auto& t : tris)
      for (int e = 0; e < 3; ++e) {
        int u = ids[t[e]], v = ids[t[(e + 1) % 3]];
        if (existing.count({u, v}))
          ++vote_flip;
        else if (existing.count({v, u}))
          ++vote_keep;
      }
    if (vote_flip > 0 && vote_keep > 0)
      throw std::runtime_error("core cell orientation is inconsistent with its boundary");
    for (const auto& t : tris) {
      std::array<int, 3> tri{ids[t[0]], ids[t[1]], ids[t[2]]};
      if (vote_flip > vote_keep) std::swap(tri[1], tri[2]);
      data_.tris.push_back(tri);
    }
  }

  double h_, he_, rim_len_;
  HexRealization hex_;
  HexMeshData data_;
  std::array<std::vector<std::vector<int>>, 3> quad_rows_;
  std::array<std::vector<std::vector<int>>, 3> strip_rows_;
};

}  // namespace mesher_detail

// ---------------------------------------------------------------------------
// Pants block meshes
// ---------------------------------------------------------------------------

struct PantsMesh {
  HyperbolicMesh mesh;
  std::array<int, 3> loop_of_slot{-1, -1, -1};  // boundary loop index per slot
  std::array<int, 3> segments_of_slot{0, 0, 0};
};

namespace mesher_detail {

// Orient every declared loop so its edges agree with the induced boundary
// orientation of the oriented triangles.
inline void fix_loop_orientations(HyperbolicMesh& mesh) {
  std::set<std::pair<int, int>> directed;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) directed.insert({t[e], t[(e + 1) % 3]});
  for (auto& loop : mesh.boundary_loops) {
    int u = loop.vertices[0], v = loop.vertices[1];
    if (directed.count({u, v})) continue;
    if (!directed.count({v, u}))
      throw std::runtime_error("boundary loop does not follow mesh edges");
    std::reverse(loop.vertices.begin(), loop.vertices.end());
  }
}

}  // namespace mesher_detail

// Mesh one pants block with target mesh size h. Boundary circles are tagged
// GlueSeam; cusps are truncated where the horocycle reaches `cusp_rim_len`
// (default h/10) and their rims tagged CuspRim.
inline PantsMesh mesh_pants(const PantsBlock& block, double h, double cusp_rim_len = -1) {
  using namespace mesher_detail;
  block.validate();
  if (!(h > 0)) throw std::invalid_argument("mesh_pants: h must be positive");
  if (cusp_rim_len <= 0) cusp_rim_len = h / 10.0;

  std::array<double, 3> a;
  for (int i = 0; i < 3; ++i)
    a[i] = block.is_cusp(i) ? std::numeric_limits<double>::quiet_NaN()
                            : 0.5 * block.boundary_lengths[i];

  HexMeshData hexA;
  try {
    hexA = HexMesher(a, h, cusp_rim_len).build();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("mesh_pants: hexagon meshing failed: ") + e.what());
  }

  // Pants = hexagon + mirror copy welded along the three seam chains.
  PantsMesh out;
  HyperbolicMesh& mesh = out.mesh;
  int nA = static_cast<int>(hexA.pos.size());

  std::vector<int> mirror(nA, -1);  // hexagon vertex -> mirror copy vertex
  for (int i = 0; i < 3; ++i)
    for (int v : hexA.seam[i]) mirror[v] = v;  // seams are shared
  int next_id = nA;
  for (int v = 0; v < nA; ++v)
    if (mirror[v] < 0) mirror[v] = next_id++;

  mesh.vertex_count = next_id;
  mesh.provenance.resize(next_id);
  std::vector<HVec> pos(next_id);
  for (int v = 0; v < nA; ++v) {
    pos[v] = hexA.pos[v];
    mesh.provenance[v] = hexA.prov[v];
    if (mirror[v] != v) {
      pos[mirror[v]] = hexA.pos[v];
      VertexProvenance pr = hexA.prov[v];
      if (pr.chart == 'C' && pr.slot >= 0) pr.v = 2.0 * a[pr.slot] - pr.v;  // circle coordinate
      if (pr.chart == 'U' && pr.slot >= 0) {
        // mirror arc position on the full horocycle
        pr.v = -pr.v;
      }
      mesh.provenance[mirror[v]] = pr;
    }
  }

  for (const auto& t : hexA.tris) mesh.triangles.push_back(t);
  for (const auto& t : hexA.tris)
    mesh.triangles.push_back({mirror[t[0]], mirror[t[2]], mirror[t[1]]});

  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int u = t[e], v = t[(e + 1) % 3];
      if (mesh.edge_lengths.count(edge_key(u, v))) continue;
      mesh.set_edge_length(u, v, hdist(pos[u], pos[v]));
    }

  // Boundary circles: hexagon bottom + reversed mirror bottom.
  for (int i = 0; i < 3; ++i) {
    if (block.is_cusp(i)) {
      BoundaryLoop loop;
      loop.tag = BoundaryTag::CuspRim;
      const auto& row = hexA.rim[i];
      loop.vertices.assign(row.begin(), row.end());
      for (int t = static_cast<int>(row.size()) - 2; t >= 1; --t)
        loop.vertices.push_back(mirror[row[t]]);
      out.loop_of_slot[i] = static_cast<int>(mesh.boundary_loops.size());
      mesh.boundary_loops.push_back(std::move(loop));
    } else {
      BoundaryLoop loop;
      loop.tag = BoundaryTag::GlueSeam;
      const auto& row = hexA.bottom[i];
      loop.vertices.assign(row.begin(), row.end());
      for (int t = static_cast<int>(row.size()) - 2; t >= 1; --t)
        loop.vertices.push_back(mirror[row[t]]);
      out.loop_of_slot[i] = static_cast<int>(mesh.boundary_loops.size());
      out.segments_of_slot[i] = 2 * hexA.half_segments[i];
      mesh.boundary_loops.push_back(std::move(loop));
    }
  }

  mesher_detail::fix_loop_orientations(mesh);
  try {
    mesh.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("mesh_pants: invalid block mesh: ") + e.what());
  }
  return out;
}

// Structured annulus [0, r_max] x R/(ell_c Z) in the cusp model metric
// dr^2 + e^{-2r} ds^2. The r = r_max rim is tagged CuspRim, the r = 0 circle
// GlueSeam.
inline HyperbolicMesh truncate_cusp(double ell_c, double r_max, double h) {
  using namespace mesher_detail;
  if (!(ell_c > 0)) throw std::invalid_argument("truncate_cusp: circle length must be positive");
  if (!(r_max > 0)) throw std::invalid_argument("truncate_cusp: r_max must be positive");
  if (!(h > 0)) throw std::invalid_argument("truncate_cusp: h must be positive");
  double rim = ell_c * std::exp(-r_max);
  if (rim < 10.0 * std::numeric_limits<double>::epsilon())
    throw std::invalid_argument("truncate_cusp: rim length below 10*machine-epsilon");

  double he = effective_h(h);
  int m = std::max(1, static_cast<int>(std::ceil(r_max / he)));
  HyperbolicMesh mesh;
  std::vector<std::vector<int>> rows(m + 1);
  std::vector<std::pair<double, double>> coords;  // (r, s)
  for (int j = 0; j <= m; ++j) {
    double r = r_max * j / m;
    double len = ell_c * std::exp(-r);
    int n = std::max(3, static_cast<int>(std::ceil(len / he)));
    rows[j].resize(n);
    for (int k = 0; k < n; ++k) {
      rows[j][k] = static_cast<int>(coords.size());
      coords.push_back({r, ell_c * k / n});  // s in base-circle units
      VertexProvenance pr;
      pr.block = 0;
      pr.slot = 0;
      pr.chart = 'U';
      pr.u = r;
      pr.v = coords.back().second;
      mesh.provenance.push_back(pr);
    }
  }
  mesh.vertex_count = static_cast<int>(coords.size());
  // Deeper rows are shorter; zip with the deeper row as "inner".
  for (int j = 0; j < m; ++j) zip_rings(rows[j + 1], rows[j], mesh.triangles);
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int u = t[e], v = t[(e + 1) % 3];
      if (mesh.edge_lengths.count(edge_key(u, v))) continue;
      auto [r1, s1] = coords[u];
      auto [r2, s2] = coords[v];
      mesh.set_edge_length(u, v, cusp_chart_distance(r1, s1, r2, s2, ell_c));
    }
  BoundaryLoop base;
  base.tag = BoundaryTag::GlueSeam;
  base.vertices = rows[0];
  mesh.boundary_loops.push_back(base);
  BoundaryLoop rim_loop;
  rim_loop.tag = BoundaryTag::CuspRim;
  rim_loop.vertices = rows[m];
  mesh.boundary_loops.push_back(rim_loop);
  mesher_detail::fix_loop_orientations(mesh);
  mesh.validate();
  return mesh;
}

// ---------------------------------------------------------------------------
// Glued surfaces and cyclic covers
// ---------------------------------------------------------------------------

struct AppliedGluing {
  int gluing_index = 0;
  double requested_twist = 0;
  double applied_twist = 0;
  int offset_segments = 0;
  int segments = 0;
};

struct SurfaceMesh {
  FNSurface surface;
  HyperbolicMesh mesh;
  std::vector<AppliedGluing> applied;
  std::map<std::pair<int, int>, int> free_loop_of_slot;  // (block, slot) -> loop index
};

namespace mesher_detail {

struct WeldBuilder {
  std::vector<int> parent;

  explicit WeldBuilder(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;  // keep the smaller id (deterministic provenance choice)
  }
};

}  // namespace mesher_detail

// Weld per-block meshes along the surface's gluings. Twists are quantized
// to whole boundary segments; the applied twist is recorded.
inline SurfaceMesh glue(const FNSurface& surface, const std::vector<PantsMesh>& blocks) {
  using namespace mesher_detail;
  surface.validate();
  if (blocks.size() != surface.blocks.size())
    throw std::invalid_argument("glue: one mesh per block required");

  SurfaceMesh out;
  out.surface = surface;

  std::vector<int> offset(blocks.size() + 1, 0);
  for (size_t b = 0; b < blocks.size(); ++b)
    offset[b + 1] = offset[b] + blocks[b].mesh.vertex_count;
  int total = offset.back();
  WeldBuilder weld(total);

  for (int gi = 0; gi < static_cast<int>(surface.gluings.size()); ++gi) {
    const Gluing& g = surface.gluings[gi];
    const PantsMesh& A = blocks[g.from.block];
    const PantsMesh& B = blocks[g.to.block];
    const auto& la = A.mesh.boundary_loops[A.loop_of_slot[g.from.slot]].vertices;
    const auto& lb = B.mesh.boundary_loops[B.loop_of_slot[g.to.slot]].vertices;
    int n = static_cast<int>(la.size());
    if (n != static_cast<int>(lb.size()))
      throw std::runtime_error("glue: seam subdivision mismatch between partner circles");
    double ell = surface.boundary_length(g.from);
    double seg = ell / n;
    int k = static_cast<int>(std::llround(g.twist / seg));
    AppliedGluing ap;
    ap.gluing_index = gi;
    ap.requested_twist = g.twist;
    ap.offset_segments = ((k % n) + n) % n;
    ap.applied_twist = k * seg;
    ap.segments = n;
    out.applied.push_back(ap);
    for (int t = 0; t < n; ++t) {
      int u = offset[g.from.block] + la[t];
      int v = offset[g.to.block] + lb[((ap.offset_segments - t) % n + n) % n];
      weld.unite(u, v);
    }
  }

  // Compact ids.
  std::vector<int> compact(total, -1);
  int next = 0;
  for (int v = 0; v < total; ++v)
    if (weld.find(v) == v) compact[v] = next++;
  auto global_id = [&](int b, int local) {
    return compact[weld.find(offset[b] + local)];
  };

  HyperbolicMesh& mesh = out.mesh;
  mesh.vertex_count = next;
  mesh.provenance.resize(next);
  // The weld representative is the smallest raw id, so its provenance wins.
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
    for (int v = 0; v < blocks[b].mesh.vertex_count; ++v) {
      int raw = offset[b] + v;
      if (weld.find(raw) == raw) {
        VertexProvenance pr = blocks[b].mesh.provenance[v];
        pr.block = b;
        mesh.provenance[compact[raw]] = pr;
      }
    }

  for (size_t b = 0; b < blocks.size(); ++b)
    for (const auto& t : blocks[b].mesh.triangles)
      mesh.triangles.push_back({global_id(static_cast<int>(b), t[0]),
                                global_id(static_cast<int>(b), t[1]),
                                global_id(static_cast<int>(b), t[2])});
  for (size_t b = 0; b < blocks.size(); ++b)
    for (const auto& [key, len] : blocks[b].mesh.edge_lengths) {
      int u = global_id(static_cast<int>(b), static_cast<int>(key >> 32));
      int v = global_id(static_cast<int>(b), static_cast<int>(key & 0xffffffffu));
      mesh.set_edge_length(u, v, len);
    }

  // Remaining boundary loops: unglued circles and cusp rims.
  std::set<std::pair<int, int>> glued;
  for (const auto& g : surface.gluings) {
    glued.insert({g.from.block, g.from.slot});
    glued.insert({g.to.block, g.to.slot});
  }
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
    for (int s = 0; s < 3; ++s) {
      int li = blocks[b].loop_of_slot[s];
      if (li < 0) continue;
      if (glued.count({b, s})) continue;
      BoundaryLoop loop = blocks[b].mesh.boundary_loops[li];
      for (auto& v : loop.vertices) v = global_id(b, v);
      out.free_loop_of_slot[{b, s}] = static_cast<int>(mesh.boundary_loops.size());
      mesh.boundary_loops.push_back(std::move(loop));
    }

  mesh.validate();
  return out;
}

// Mesh every block (identical blocks share one mesh) and weld.
inline SurfaceMesh glue_surface(const FNSurface& surface, double h, double cusp_rim_len = -1) {
  surface.validate();
  std::vector<PantsMesh> metas;
  std::map<std::string, int> cache;
  std::vector<int> which(surface.blocks.size());
  for (size_t b = 0; b < surface.blocks.size(); ++b) {
    const auto& blk = surface.blocks[b];
    std::string key = std::to_string(static_cast<int>(blk.kind));
    for (double L : blk.boundary_lengths) key += "," + format_double(L);
    auto it = cache.find(key);
    if (it == cache.end()) {
      metas.push_back(mesh_pants(blk, h, cusp_rim_len));
      it = cache.emplace(key, static_cast<int>(metas.size()) - 1).first;
    }
    which[b] = it->second;
  }
  std::vector<PantsMesh> per_block;
  for (size_t b = 0; b < surface.blocks.size(); ++b) per_block.push_back(metas[which[b]]);
  return glue(surface, per_block);
}

// Cyclic cover of order (k+2)*n along a non-separating pants curve: the cut
// surface is copied (k+2)*n times and chained with the curve's own twist.
inline SurfaceMesh cyclic_cover_mesh(const FNSurface& surface, int curve, int k, int n,
                                     double h) {
  using namespace mesher_detail;
  surface.validate();
  if (curve < 0 || curve >= static_cast<int>(surface.gluings.size()))
    throw std::invalid_argument("cyclic_cover_mesh: no such gluing");
  if (k < 1) throw std::invalid_argument("cyclic_cover_mesh: k must be >= 1");
  if (n < 1) throw std::invalid_argument("cyclic_cover_mesh: n must be >= 1");
  if (!surface.curve_non_separating(curve))
    throw std::invalid_argument(
        "cyclic_cover_mesh: curve is separating (cutting disconnects the surface)");

  FNSurface cut = surface;
  Gluing removed = cut.gluings[curve];
  cut.gluings.erase(cut.gluings.begin() + curve);
  SurfaceMesh T = glue_surface(cut, h);

  int N = (k + 2) * n;
  const HyperbolicMesh& tm = T.mesh;
  int nv = tm.vertex_count;
  int minus_loop = T.free_loop_of_slot.at({removed.from.block, removed.from.slot});
  int plus_loop = T.free_loop_of_slot.at({removed.to.block, removed.to.slot});
  const auto& lminus = tm.boundary_loops[minus_loop].vertices;
  const auto& lplus = tm.boundary_loops[plus_loop].vertices;
  int ns = static_cast<int>(lminus.size());
  if (ns != static_cast<int>(lplus.size()))
    throw std::runtime_error("cyclic_cover_mesh: cut circle subdivision mismatch");
  double ell = surface.boundary_length(removed.from);
  double seg = ell / ns;
  int koff = static_cast<int>(std::llround(removed.twist / seg));
  int offmod = ((koff % ns) + ns) % ns;

  WeldBuilder weld(N * nv);
  for (int c = 0; c < N; ++c) {
    int cn = (c + 1) % N;
    for (int t = 0; t < ns; ++t) {
      int u = c * nv + lplus[t];
      int v = cn * nv + lminus[((offmod - t) % ns + ns) % ns];
      weld.unite(u, v);
    }
  }

  SurfaceMesh out;
  out.surface = surface;
  AppliedGluing ap;
  ap.gluing_index = curve;
  ap.requested_twist = removed.twist;
  ap.offset_segments = offmod;
  ap.applied_twist = koff * seg;
  ap.segments = ns;
  out.applied.push_back(ap);

  std::vector<int> compact(N * nv, -1);
  int next = 0;
  for (int v = 0; v < N * nv; ++v)
    if (weld.find(v) == v) compact[v] = next++;
  auto gid = [&](int c, int local) { return compact[weld.find(c * nv + local)]; };

  HyperbolicMesh& mesh = out.mesh;
  mesh.vertex_count = next;
  mesh.provenance.resize(next);
  for (int c = 0; c < N; ++c)
    for (int v = 0; v < nv; ++v) {
      int raw = c * nv + v;
      if (weld.find(raw) == raw) {
        VertexProvenance pr = tm.provenance[v];
        pr.copy = c;
        mesh.provenance[compact[raw]] = pr;
      }
    }
  for (int c = 0; c < N; ++c)
    for (const auto& t : tm.triangles)
      mesh.triangles.push_back({gid(c, t[0]), gid(c, t[1]), gid(c, t[2])});
  for (int c = 0; c < N; ++c)
    for (const auto& [key, len] : tm.edge_lengths)
      mesh.set_edge_length(gid(c, static_cast<int>(key >> 32)),
                           gid(c, static_cast<int>(key & 0xffffffffu)), len);
  for (int c = 0; c < N; ++c)
    for (int li = 0; li < static_cast<int>(tm.boundary_loops.size()); ++li) {
      if (li == minus_loop || li == plus_loop) continue;
      BoundaryLoop loop = tm.boundary_loops[li];
      for (auto& v : loop.vertices) v = gid(c, v);
      mesh.boundary_loops.push_back(std::move(loop));
    }
  mesh.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Oracle domains
// ---------------------------------------------------------------------------

// Flat unit torus (or Lx x Ly) as an n x n periodic grid.
inline HyperbolicMesh mesh_flat_torus(int n, double Lx = 1.0, double Ly = 1.0) {
  if (n < 3) throw std::invalid_argument("mesh_flat_torus: n must be >= 3");
  HyperbolicMesh mesh;
  mesh.geometry = MeshGeometry::Euclidean;
  mesh.vertex_count = n * n;
  mesh.provenance.resize(n * n);
  auto id = [&](int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); };
  double dx = Lx / n, dy = Ly / n, diag = std::hypot(dx, dy);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      VertexProvenance pr;
      pr.chart = 'G';
      pr.u = i * dx;
      pr.v = j * dy;
      mesh.provenance[id(i, j)] = pr;
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      mesh.set_edge_length(id(i, j), id(i + 1, j), dx);
      mesh.set_edge_length(id(i, j), id(i, j + 1), dy);
      mesh.set_edge_length(id(i, j), id(i + 1, j + 1), diag);
    }
  mesh.validate();
  return mesh;
}

namespace mesher_detail {

// Shared polar-disk builder; `chord` returns the geodesic distance between
// (r1,th1) and (r2,th2), `circumference` the circle length at radius r.
template <class Chord, class Circumference>
inline HyperbolicMesh polar_disk(double R, double h, Chord chord, Circumference circ,
                                 MeshGeometry geom) {
  if (!(R > 0) || !(h > 0)) throw std::invalid_argument("disk mesh: R and h must be positive");
  double he = effective_h(h);
  int m = std::max(1, static_cast<int>(std::ceil(R / he)));
  HyperbolicMesh mesh;
  mesh.geometry = geom;
  std::vector<std::vector<int>> rings(m + 1);
  std::vector<std::pair<double, double>> coords;
  auto add = [&](double r, double th) {
    coords.push_back({r, th});
    VertexProvenance pr;
    pr.chart = 'P';
    pr.u = r;
    pr.v = th;
    mesh.provenance.push_back(pr);
    return static_cast<int>(coords.size()) - 1;
  };
  int center = add(0, 0);
  rings[0] = {center};
  for (int j = 1; j <= m; ++j) {
    double r = R * j / m;
    int n = std::max(6, static_cast<int>(std::ceil(circ(r) / he)));
    rings[j].resize(n);
    for (int k = 0; k < n; ++k) rings[j][k] = add(r, 2.0 * kPi * k / n);
  }
  // Center fan; bands use the outer ring as the zip's first row so the
  // shared ring edges come out in opposite directions.
  for (size_t k = 0; k < rings[1].size(); ++k) {
    int a = rings[1][k], b = rings[1][(k + 1) % rings[1].size()];
    mesh.triangles.push_back({center, a, b});
  }
  for (int j = 1; j < m; ++j) zip_rings(rings[j + 1], rings[j], mesh.triangles);
  mesh.vertex_count = static_cast<int>(coords.size());
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int u = t[e], v = t[(e + 1) % 3];
      if (mesh.edge_lengths.count(edge_key(u, v))) continue;
      auto [r1, t1] = coords[u];
      auto [r2, t2] = coords[v];
      mesh.set_edge_length(u, v, chord(r1, t1, r2, t2));
    }
  BoundaryLoop loop;
  loop.tag = BoundaryTag::GlueSeam;
  loop.vertices = rings[m];
  mesh.boundary_loops.push_back(loop);
  fix_loop_orientations(mesh);
  mesh.validate();
  return mesh;
}

}  // namespace mesher_detail

// Geodesic disk of radius R in the hyperbolic plane.
inline HyperbolicMesh mesh_hyperbolic_disk(double R, double h) {
  auto chord = [](double r1, double t1, double r2, double t2) {
    HVec p{std::cosh(r1), std::sinh(r1) * std::cos(t1), std::sinh(r1) * std::sin(t1)};
    HVec q{std::cosh(r2), std::sinh(r2) * std::cos(t2), std::sinh(r2) * std::sin(t2)};
    return hdist(p, q);
  };
  auto circ = [](double r) { return 2.0 * kPi * std::sinh(r); };
  return mesher_detail::polar_disk(R, h, chord, circ, MeshGeometry::Hyperbolic);
}

// Euclidean disk of radius R (flat oracle).
inline HyperbolicMesh mesh_flat_disk(double R, double h) {
  auto chord = [](double r1, double t1, double r2, double t2) {
    double d2 = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(t1 - t2);
    return std::sqrt(std::max(0.0, d2));
  };
  auto circ = [](double r) { return 2.0 * kPi * r; };
  return mesher_detail::polar_disk(R, h, chord, circ, MeshGeometry::Euclidean);
}

// ---------------------------------------------------------------------------
// Collar sub-complexes
// ---------------------------------------------------------------------------

struct SubComplexShape {
  int vertices = 0, edges = 0, triangles = 0;
  int euler_char = 0;
  int boundary_loops = 0;
  bool connected = false;
};

// Induced sub-complex on the vertices whose collar-chart distance from the
// glued curve `gluing_index` is at most `width`. The collar theorem says it
// should be an annulus for width up to arsinh(1/sinh(ell/2)).
inline SubComplexShape collar_subcomplex(const SurfaceMesh& sm, int gluing_index, double width) {
  const Gluing& g = sm.surface.gluings.at(gluing_index);
  const HyperbolicMesh& mesh = sm.mesh;
  std::vector<char> in(mesh.vertex_count, 0);
  for (int v = 0; v < mesh.vertex_count; ++v) {
    const auto& pr = mesh.provenance[v];
    if (pr.chart != 'C') continue;
    bool side = (pr.block == g.from.block && pr.slot == g.from.slot) ||
                (pr.block == g.to.block && pr.slot == g.to.slot);
    if (side && pr.u <= width + 1e-12) in[v] = 1;
  }

  SubComplexShape shape;
  std::vector<int> remap(mesh.vertex_count, -1);
  for (int v = 0; v < mesh.vertex_count; ++v)
    if (in[v]) remap[v] = shape.vertices++;
  std::map<std::pair<int, int>, int> edge_tris;
  std::vector<std::array<int, 3>> tris;
  for (const auto& t : mesh.triangles) {
    if (!in[t[0]] || !in[t[1]] || !in[t[2]]) continue;
    tris.push_back(t);
    for (int e = 0; e < 3; ++e) {
      int u = t[e], v = t[(e + 1) % 3];
      if (u > v) std::swap(u, v);
      ++edge_tris[{u, v}];
    }
  }
  shape.triangles = static_cast<int>(tris.size());
  std::set<std::pair<int, int>> edges;
  for (const auto& [key, len] : mesh.edge_lengths) {
    int u = static_cast<int>(key >> 32), v = static_cast<int>(key & 0xffffffffu);
    if (in[u] && in[v]) edges.insert({u, v});
  }
  shape.edges = static_cast<int>(edges.size());
  shape.euler_char = shape.vertices - shape.edges + shape.triangles;

  // Boundary loops of the sub-complex: edges with exactly one triangle.
  std::map<int, std::vector<int>> adj;
  int boundary_edges = 0;
  for (const auto& [e, cnt] : edge_tris)
    if (cnt == 1) {
      ++boundary_edges;
      adj[e.first].push_back(e.second);
      adj[e.second].push_back(e.first);
    }
  std::set<int> seen;
  for (auto& [v, nb] : adj) {
    if (seen.count(v)) continue;
    ++shape.boundary_loops;
    std::vector<int> stack{v};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      if (!seen.insert(u).second) continue;
      for (int w : adj[u]) stack.push_back(w);
    }
  }

  // Connectivity over the sub-complex edges.
  if (shape.vertices > 0) {
    std::vector<int> parent(shape.vertices);
    for (int i = 0; i < shape.vertices; ++i) parent[i] = i;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : edges) parent[find(remap[e.first])] = find(remap[e.second]);
    shape.connected = true;
    int root = find(0);
    for (int i = 0; i < shape.vertices; ++i)
      if (find(i) != root) shape.connected = false;
  }
  (void)boundary_edges;
  return shape;
}

}  // namespace hypspec
