// Intrinsic triangle meshes: triangles carry geodesic edge lengths only,
// no embedding. Geometry is hyperbolic (curvature -1) or Euclidean (the
// flat oracle problems); both share the combinatorial machinery.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hypspec {

enum class BoundaryTag { Dirichlet, Neumann, GlueSeam, CuspRim };

inline std::string to_string(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Dirichlet: return "dirichlet";
    case BoundaryTag::Neumann: return "neumann";
    case BoundaryTag::GlueSeam: return "glue_seam";
    case BoundaryTag::CuspRim: return "cusp_rim";
  }
  return "?";
}

inline BoundaryTag boundary_tag_from_string(const std::string& s) {
  if (s == "dirichlet") return BoundaryTag::Dirichlet;
  if (s == "neumann") return BoundaryTag::Neumann;
  if (s == "glue_seam") return BoundaryTag::GlueSeam;
  if (s == "cusp_rim") return BoundaryTag::CuspRim;
  throw std::invalid_argument("unknown boundary tag '" + s + "'");
}

enum class MeshGeometry { Hyperbolic, Euclidean };

struct BoundaryLoop {
  BoundaryTag tag = BoundaryTag::GlueSeam;
  std::vector<int> vertices;  // closed cycle, consistent orientation
};

// Where a vertex came from: block (and cover copy), boundary slot for collar
// and cusp charts, and the chart coordinates. Chart kinds: 'C' collar (r, s
// along the circle), 'U' cusp (depth, arc), 'D' core cell (disk chart x,y),
// 'P' polar (r, theta), 'G' grid (i, j), '?' unknown/ingested.
struct VertexProvenance {
  int block = -1;
  int copy = 0;
  int slot = -1;
  char chart = '?';
  double u = 0, v = 0;
};

struct MeshQuality {
  double h_max = 0;
  double min_angle = 0;  // radians
  int vertex_count = 0;
  int triangle_count = 0;
};

inline uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

struct HyperbolicMesh {
  MeshGeometry geometry = MeshGeometry::Hyperbolic;
  int vertex_count = 0;
  std::vector<std::array<int, 3>> triangles;
  std::unordered_map<uint64_t, double> edge_lengths;
  std::vector<BoundaryLoop> boundary_loops;
  std::vector<VertexProvenance> provenance;  // empty or size vertex_count

  double edge_length(int a, int b) const {
    auto it = edge_lengths.find(edge_key(a, b));
    if (it == edge_lengths.end())
      throw std::runtime_error("mesh: missing edge length for (" + std::to_string(a) + "," +
                               std::to_string(b) + ")");
    return it->second;
  }

  void set_edge_length(int a, int b, double len) {
    if (!(len > 0) || !std::isfinite(len))
      throw std::runtime_error("mesh: nonpositive edge length");
    auto [it, inserted] = edge_lengths.try_emplace(edge_key(a, b), len);
    if (!inserted && std::abs(it->second - len) > 1e-9 * std::max(1.0, it->second))
      throw std::runtime_error("mesh: conflicting lengths for one edge");
  }

  std::array<double, 3> triangle_lengths(int t) const {
    const auto& tri = triangles[t];
    return {edge_length(tri[1], tri[2]), edge_length(tri[2], tri[0]),
            edge_length(tri[0], tri[1])};
  }

  double triangle_area(int t) const {
    auto [a, b, c] = triangle_lengths(t);
    return geometry == MeshGeometry::Hyperbolic ? hyperbolic_triangle_area(a, b, c)
                                                : euclidean_triangle_area(a, b, c);
  }

  // Angle deficit via the hyperbolic half-angle (L'Huilier-type) formula;
  // stable for small triangles where pi - sum(angles) cancels.
  static double hyperbolic_triangle_area(double a, double b, double c) {
    double s = 0.5 * (a + b + c);
    double p = std::tanh(0.5 * s) * std::tanh(0.5 * (s - a)) * std::tanh(0.5 * (s - b)) *
               std::tanh(0.5 * (s - c));
    if (p <= 0) return 0;
    return 4.0 * std::atan(std::sqrt(p));
  }

  static double euclidean_triangle_area(double a, double b, double c) {
    double s = 0.5 * (a + b + c);
    double p = s * (s - a) * (s - b) * (s - c);
    return p > 0 ? std::sqrt(p) : 0;
  }

  // Interior angles opposite to sides (a, b, c).
  std::array<double, 3> triangle_angles(int t) const {
    auto [a, b, c] = triangle_lengths(t);
    auto ang = [&](double opp, double s1, double s2) {
      double cosv;
      if (geometry == MeshGeometry::Hyperbolic)
        cosv = (std::cosh(s1) * std::cosh(s2) - std::cosh(opp)) / (std::sinh(s1) * std::sinh(s2));
      else
        cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
      return std::acos(std::clamp(cosv, -1.0, 1.0));
    };
    return {ang(a, b, c), ang(b, c, a), ang(c, a, b)};
  }

  double total_area() const {
    double sum = 0;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) sum += triangle_area(t);
    return sum;
  }

  int euler_characteristic() const {
    return vertex_count - static_cast<int>(edge_lengths.size()) +
           static_cast<int>(triangles.size());
  }

  MeshQuality quality() const {
    MeshQuality q;
    q.vertex_count = vertex_count;
    q.triangle_count = static_cast<int>(triangles.size());
    q.min_angle = 10.0;
    for (const auto& [k, len] : edge_lengths) q.h_max = std::max(q.h_max, len);
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
      auto ang = triangle_angles(t);
      q.min_angle = std::min({q.min_angle, ang[0], ang[1], ang[2]});
    }
    return q;
  }

  // Full structural check: positive lengths, strict triangle inequalities,
  // positive area (angle sum below pi), oriented manifold combinatorics,
  // connectivity, and agreement between declared loops and the actual
  // boundary edges.
  void validate() const {
    if (vertex_count <= 0 || triangles.empty()) throw std::runtime_error("mesh: empty");
    if (!provenance.empty() && static_cast<int>(provenance.size()) != vertex_count)
      throw std::runtime_error("mesh: provenance size mismatch");

    for (const auto& [key, len] : edge_lengths)
      if (!(len > 0) || !std::isfinite(len)) throw std::runtime_error("mesh: bad edge length");

    std::unordered_map<uint64_t, int> undirected;
    std::unordered_map<uint64_t, int> directed;
    auto dkey = [](int a, int b) {
      return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
    };
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
      const auto& tri = triangles[t];
      for (int v : tri)
        if (v < 0 || v >= vertex_count) throw std::runtime_error("mesh: vertex index out of range");
      auto [a, b, c] = triangle_lengths(t);
      if (!(a < b + c && b < a + c && c < a + b))
        throw std::runtime_error("mesh: triangle inequality violated in triangle " +
                                 std::to_string(t));
      if (!(triangle_area(t) > 0))
        throw std::runtime_error("mesh: zero-area triangle " + std::to_string(t));
      if (geometry == MeshGeometry::Hyperbolic) {
        auto ang = triangle_angles(t);
        if (!(ang[0] + ang[1] + ang[2] < kPiMeshGuard))
          throw std::runtime_error("mesh: hyperbolic angle sum >= pi in triangle " +
                                   std::to_string(t));
      }
      for (int e = 0; e < 3; ++e) {
        int u = tri[e], v = tri[(e + 1) % 3];
        if (++directed[dkey(u, v)] > 1)
          throw std::runtime_error("mesh: duplicated directed edge (non-orientable or non-manifold)");
        ++undirected[edge_key(u, v)];
      }
    }
    if (undirected.size() != edge_lengths.size())
      throw std::runtime_error("mesh: edge set does not match triangle edges");
    for (const auto& [k, cnt] : undirected)
      if (cnt > 2) throw std::runtime_error("mesh: edge with more than two triangles");

    // Declared boundary loops must exactly cover the boundary edges.
    std::unordered_map<uint64_t, int> boundary_edges;
    for (const auto& [k, cnt] : undirected)
      if (cnt == 1) boundary_edges[k] = 0;
    size_t declared = 0;
    for (const auto& loop : boundary_loops) {
      if (loop.vertices.size() < 3) throw std::runtime_error("mesh: degenerate boundary loop");
      for (size_t i = 0; i < loop.vertices.size(); ++i) {
        int u = loop.vertices[i], v = loop.vertices[(i + 1) % loop.vertices.size()];
        auto it = boundary_edges.find(edge_key(u, v));
        if (it == boundary_edges.end() || it->second != 0)
          throw std::runtime_error("mesh: boundary loop edge is not a free mesh edge");
        it->second = 1;
        ++declared;
      }
    }
    if (declared != boundary_edges.size())
      throw std::runtime_error("mesh: boundary edges not covered by declared loops");

    // Connectivity through shared vertices.
    std::vector<int> parent(vertex_count);
    for (int i = 0; i < vertex_count; ++i) parent[i] = i;
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (const auto& tri : triangles) {
      parent[find(tri[0])] = find(tri[1]);
      parent[find(tri[1])] = find(tri[2]);
    }
    int root = find(0);
    for (int i = 0; i < vertex_count; ++i)
      if (find(i) != root) throw std::runtime_error("mesh: not connected");
  }

  // Deterministic content hash (geometry, combinatorics, loops).
  uint64_t hash() const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t x) {
      h ^= x;
      h *= 1099511628211ull;
    };
    mix(static_cast<uint64_t>(geometry));
    mix(static_cast<uint64_t>(vertex_count));
    for (const auto& t : triangles)
      for (int v : t) mix(static_cast<uint64_t>(v));
    std::vector<std::pair<uint64_t, double>> edges(edge_lengths.begin(), edge_lengths.end());
    std::sort(edges.begin(), edges.end());
    for (const auto& [k, len] : edges) {
      mix(k);
      uint64_t bits;
      static_assert(sizeof(bits) == sizeof(len));
      std::memcpy(&bits, &len, sizeof(bits));
      mix(bits);
    }
    for (const auto& loop : boundary_loops) {
      mix(static_cast<uint64_t>(loop.tag));
      for (int v : loop.vertices) mix(static_cast<uint64_t>(v));
    }
    return h;
  }

 private:
  static constexpr double kPiMeshGuard = 3.14159265358979323846 + 1e-9;
};

// ---------------------------------------------------------------------------
// Plain-text mesh files: "HYPMESH v1" (hyperbolic lengths) and "FLATMESH v1"
// (Euclidean lengths). Doubles are printed with max_digits10 so a round trip
// is loss-free.
// ---------------------------------------------------------------------------

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_mesh(const HyperbolicMesh& mesh, std::ostream& os) {
  os << (mesh.geometry == MeshGeometry::Hyperbolic ? "HYPMESH v1" : "FLATMESH v1") << "\n";
  std::vector<std::pair<uint64_t, double>> edges(mesh.edge_lengths.begin(),
                                                 mesh.edge_lengths.end());
  std::sort(edges.begin(), edges.end());
  os << mesh.vertex_count << " " << mesh.triangles.size() << " " << edges.size() << " "
     << mesh.boundary_loops.size() << " " << mesh.provenance.size() << "\n";
  for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (const auto& [key, len] : edges)
    os << static_cast<int>(key >> 32) << " " << static_cast<int>(key & 0xffffffffu) << " "
       << format_double(len) << "\n";
  for (const auto& loop : mesh.boundary_loops) {
    os << to_string(loop.tag) << " " << loop.vertices.size();
    for (int v : loop.vertices) os << " " << v;
    os << "\n";
  }
  for (const auto& p : mesh.provenance)
    os << p.block << " " << p.copy << " " << p.slot << " " << p.chart << " "
       << format_double(p.u) << " " << format_double(p.v) << "\n";
}

inline void save_mesh(const HyperbolicMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_mesh(mesh, os);
}

inline HyperbolicMesh read_mesh(std::istream& is) {
  std::string magic, version;
  is >> magic >> version;
  HyperbolicMesh mesh;
  if (magic == "HYPMESH")
    mesh.geometry = MeshGeometry::Hyperbolic;
  else if (magic == "FLATMESH")
    mesh.geometry = MeshGeometry::Euclidean;
  else
    throw std::runtime_error("mesh file: unknown format '" + magic + "'");
  if (version != "v1") throw std::runtime_error("mesh file: unsupported version");

  size_t nt = 0, ne = 0, nl = 0, np = 0;
  is >> mesh.vertex_count >> nt >> ne >> nl >> np;
  if (!is) throw std::runtime_error("mesh file: bad header");
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles) is >> t[0] >> t[1] >> t[2];
  for (size_t e = 0; e < ne; ++e) {
    int a, b;
    double len;
    is >> a >> b >> len;
    mesh.set_edge_length(a, b, len);
  }
  for (size_t l = 0; l < nl; ++l) {
    std::string tag;
    size_t n;
    is >> tag >> n;
    BoundaryLoop loop;
    loop.tag = boundary_tag_from_string(tag);
    loop.vertices.resize(n);
    for (auto& v : loop.vertices) is >> v;
    mesh.boundary_loops.push_back(std::move(loop));
  }
  mesh.provenance.resize(np);
  for (auto& p : mesh.provenance) is >> p.block >> p.copy >> p.slot >> p.chart >> p.u >> p.v;
  if (!is) throw std::runtime_error("mesh file: truncated");
  return mesh;
}

inline HyperbolicMesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_mesh(is);
}

}  // namespace hypspec
