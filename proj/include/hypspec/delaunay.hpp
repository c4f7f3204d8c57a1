// Planar constrained Delaunay triangulation of a polygonal region.
//
// Used on Poincare-disk coordinates of the fat central cells, where the
// Euclidean Delaunay of the chart coincides with the hyperbolic one
// (circles map to circles). Inputs are small (hundreds of points), so
// insertions locate by scanning. Collar arcs make many inputs nearly
// cocircular; robustness comes from long-double predicates, a deterministic
// sub-resolution jitter, and cavities grown by adjacency from the located
// triangle so they stay star-shaped.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace hypspec {

struct Vec2 {
  double x = 0, y = 0;
};

namespace cdt_detail {

inline long double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  long double abx = (long double)b.x - a.x, aby = (long double)b.y - a.y;
  long double acx = (long double)c.x - a.x, acy = (long double)c.y - a.y;
  return abx * acy - aby * acx;
}

inline bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  long double ax = (long double)a.x - p.x, ay = (long double)a.y - p.y;
  long double bx = (long double)b.x - p.x, by = (long double)b.y - p.y;
  long double cx = (long double)c.x - p.x, cy = (long double)c.y - p.y;
  long double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                    (bx * bx + by * by) * (ax * cy - cx * ay) +
                    (cx * cx + cy * cy) * (ax * by - bx * ay);
  return det > 0;  // assumes CCW (a,b,c)
}

inline bool segments_cross(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  long double d1 = orient2d(q1, q2, p1), d2 = orient2d(q1, q2, p2);
  long double d3 = orient2d(p1, p2, q1), d4 = orient2d(p1, p2, q2);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace cdt_detail

class ConstrainedDelaunay {
 public:
  // `points` all get inserted; `polygon` is a closed chain of indices whose
  // bounded side is the region to keep.
  static std::vector<std::array<int, 3>> triangulate(const std::vector<Vec2>& points,
                                                     const std::vector<int>& polygon) {
    ConstrainedDelaunay d(points);
    for (int i = 0; i < static_cast<int>(points.size()); ++i) d.insert(i);
    for (size_t i = 0; i < polygon.size(); ++i) {
      int a = polygon[i], b = polygon[(i + 1) % polygon.size()];
      d.recover_edge(a, b);
      d.constrained_.insert(ukey(a, b));
    }
    return d.interior_triangles();
  }

 private:
  explicit ConstrainedDelaunay(const std::vector<Vec2>& points) : pts_(points) {
    n_real_ = static_cast<int>(pts_.size());
    // Rescale into a moderate box so the predicates stay well conditioned,
    // then break cocircular degeneracies with a deterministic jitter far
    // below the point spacing.
    double cx = 0, cy = 0;
    for (const auto& p : pts_) {
      cx += p.x;
      cy += p.y;
    }
    cx /= std::max<size_t>(1, pts_.size());
    cy /= std::max<size_t>(1, pts_.size());
    double r = 1e-12;
    for (auto& p : pts_) {
      p.x -= cx;
      p.y -= cy;
      r = std::max({r, std::abs(p.x), std::abs(p.y)});
    }
    uint64_t h = 0x9e3779b97f4a7c15ull;
    auto jit = [&h]() {
      h ^= h >> 12;
      h ^= h << 25;
      h ^= h >> 27;
      return (static_cast<double>((h * 2685821657736338717ull) >> 11) /
                  9007199254740992.0 -
              0.5) *
             2e-9;
    };
    for (auto& p : pts_) {
      p.x = p.x / r + jit();
      p.y = p.y / r + jit();
    }
    pts_.push_back({0.0, 64.0});
    pts_.push_back({-64.0, -48.0});
    pts_.push_back({64.0, -48.0});
    tris_.push_back({n_real_, n_real_ + 1, n_real_ + 2});
    alive_.push_back(true);
  }

  static uint64_t ukey(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
  }

  // Directed-edge -> triangle map over live triangles.
  std::unordered_map<uint64_t, int> directed_map() const {
    std::unordered_map<uint64_t, int> m;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!alive_[t]) continue;
      const auto& tr = tris_[t];
      for (int e = 0; e < 3; ++e)
        m[(static_cast<uint64_t>(tr[e]) << 32) | static_cast<uint32_t>(tr[(e + 1) % 3])] = t;
    }
    return m;
  }

  int locate(const Vec2& p) const {
    using namespace cdt_detail;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!alive_[t]) continue;
      const auto& tr = tris_[t];
      if (orient2d(pts_[tr[0]], pts_[tr[1]], p) >= 0 &&
          orient2d(pts_[tr[1]], pts_[tr[2]], p) >= 0 &&
          orient2d(pts_[tr[2]], pts_[tr[0]], p) >= 0)
        return t;
    }
    throw std::runtime_error("cdt: point not located in any triangle");
  }

  void insert(int p) {
    using namespace cdt_detail;
    int seed = locate(pts_[p]);
    auto dmap = directed_map();
    auto neighbor = [&](int t, int e) -> int {
      const auto& tr = tris_[t];
      uint64_t k = (static_cast<uint64_t>(tr[(e + 1) % 3]) << 32) |
                   static_cast<uint32_t>(tr[e]);
      auto it = dmap.find(k);
      return it == dmap.end() ? -1 : it->second;
    };
    // Grow the cavity from the containing triangle so it stays connected.
    std::set<int> bad{seed};
    std::deque<int> queue{seed};
    while (!queue.empty()) {
      int t = queue.front();
      queue.pop_front();
      for (int e = 0; e < 3; ++e) {
        int o = neighbor(t, e);
        if (o < 0 || bad.count(o)) continue;
        const auto& tr = tris_[o];
        if (in_circumcircle(pts_[tr[0]], pts_[tr[1]], pts_[tr[2]], pts_[p])) {
          bad.insert(o);
          queue.push_back(o);
        }
      }
    }
    std::set<std::pair<int, int>> bad_dir;
    for (int t : bad) {
      const auto& tr = tris_[t];
      for (int e = 0; e < 3; ++e) bad_dir.insert({tr[e], tr[(e + 1) % 3]});
    }
    for (int t : bad) alive_[t] = false;
    for (const auto& [u, v] : bad_dir) {
      if (bad_dir.count({v, u})) continue;  // interior to the cavity
      if (orient2d(pts_[p], pts_[u], pts_[v]) <= 0)
        throw std::runtime_error("cdt: degenerate cavity fan");
      tris_.push_back({p, u, v});
      alive_.push_back(true);
    }
  }

  bool has_edge(int a, int b) const {
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!alive_[t]) continue;
      const auto& tr = tris_[t];
      for (int e = 0; e < 3; ++e)
        if ((tr[e] == a && tr[(e + 1) % 3] == b) || (tr[e] == b && tr[(e + 1) % 3] == a))
          return true;
    }
    return false;
  }

  std::array<int, 2> edge_triangles(int u, int v) const {
    std::array<int, 2> out{-1, -1};
    int n = 0;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!alive_[t]) continue;
      const auto& tr = tris_[t];
      for (int e = 0; e < 3; ++e)
        if ((tr[e] == u && tr[(e + 1) % 3] == v) || (tr[e] == v && tr[(e + 1) % 3] == u)) {
          if (n < 2) out[n] = t;
          ++n;
          break;
        }
    }
    if (n != 2) throw std::runtime_error("cdt: edge without two triangles during recovery");
    return out;
  }

  static int opposite_vertex(const std::array<int, 3>& tr, int u, int v) {
    for (int w : tr)
      if (w != u && w != v) return w;
    throw std::runtime_error("cdt: degenerate triangle");
  }

  void flip(int u, int v) {
    using namespace cdt_detail;
    auto [t1, t2] = edge_triangles(u, v);
    int p = opposite_vertex(tris_[t1], u, v);
    int q = opposite_vertex(tris_[t2], u, v);
    alive_[t1] = alive_[t2] = false;
    auto make = [&](int a, int b, int c) {
      if (orient2d(pts_[a], pts_[b], pts_[c]) < 0) std::swap(b, c);
      tris_.push_back({a, b, c});
      alive_.push_back(true);
    };
    make(p, q, u);
    make(q, p, v);
  }

  void recover_edge(int a, int b) {
    using namespace cdt_detail;
    if (has_edge(a, b)) return;
    for (int guard = 0; guard < 10000; ++guard) {
      bool flipped = false;
      for (int t = 0; t < static_cast<int>(tris_.size()) && !flipped; ++t) {
        if (!alive_[t]) continue;
        const auto& tr = tris_[t];
        for (int e = 0; e < 3 && !flipped; ++e) {
          int u = tr[e], v = tr[(e + 1) % 3];
          if (u == a || u == b || v == a || v == b) continue;
          if (constrained_.count(ukey(u, v))) continue;
          if (!segments_cross(pts_[a], pts_[b], pts_[u], pts_[v])) continue;
          auto [t1, t2] = edge_triangles(u, v);
          int p = opposite_vertex(tris_[t1], u, v);
          int q = opposite_vertex(tris_[t2], u, v);
          if (!segments_cross(pts_[p], pts_[q], pts_[u], pts_[v])) continue;  // non-convex quad
          flip(u, v);
          flipped = true;
        }
      }
      if (has_edge(a, b)) return;
      if (!flipped) break;
    }
    throw std::runtime_error("cdt: could not recover constrained edge");
  }

  std::vector<std::array<int, 3>> interior_triangles() const {
    // Flood from triangles on super-vertices, crossing only unconstrained
    // edges; whatever is never reached lies inside the polygon.
    std::unordered_map<uint64_t, std::vector<int>> by_edge;
    std::vector<int> live;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!alive_[t]) continue;
      live.push_back(t);
      const auto& tr = tris_[t];
      for (int e = 0; e < 3; ++e) by_edge[ukey(tr[e], tr[(e + 1) % 3])].push_back(t);
    }
    std::unordered_map<int, char> outside;
    std::deque<int> queue;
    for (int t : live) {
      const auto& tr = tris_[t];
      if (tr[0] >= n_real_ || tr[1] >= n_real_ || tr[2] >= n_real_) {
        outside[t] = 1;
        queue.push_back(t);
      }
    }
    while (!queue.empty()) {
      int t = queue.front();
      queue.pop_front();
      const auto& tr = tris_[t];
      for (int e = 0; e < 3; ++e) {
        uint64_t k = ukey(tr[e], tr[(e + 1) % 3]);
        if (constrained_.count(k)) continue;
        for (int o : by_edge[k]) {
          if (o != t && !outside.count(o)) {
            outside[o] = 1;
            queue.push_back(o);
          }
        }
      }
    }
    std::vector<std::array<int, 3>> out;
    for (int t : live)
      if (!outside.count(t)) out.push_back(tris_[t]);
    return out;
  }

  std::vector<Vec2> pts_;
  int n_real_ = 0;
  std::vector<std::array<int, 3>> tris_;
  std::vector<char> alive_;
  std::set<uint64_t> constrained_;
};

}  // namespace hypspec
