// Surface data model (pants blocks, Fenchel-Nielsen gluings) and the
// closed-form hyperbolic quantities used throughout: collar widths,
// right-angled hexagon sides, eigenvalue-count bounds, cover orders, the
// analytic-systole interval.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hypspec {

inline constexpr double kPi = std::numbers::pi_v<double>;

// ---------------------------------------------------------------------------
// Closed-form scalar operations
// ---------------------------------------------------------------------------

// chi(S_{gamma,p,q,r}) = 2 - 2*gamma - p - q - r. Surfaces with embedded
// Moebius bands (r > 0) are outside the orientable pipeline.
inline int euler_characteristic(int genus, int punctures, int holes, int moebius) {
  if (genus < 0 || punctures < 0 || holes < 0)
    throw std::invalid_argument("euler_characteristic: negative topological data");
  if (moebius < 0 || moebius > 2)
    throw std::invalid_argument("euler_characteristic: moebius count must be 0, 1, or 2");
  if (moebius > 0)
    throw std::invalid_argument(
        "euler_characteristic: unsupported topology (non-orientable surfaces are out of scope)");
  return 2 - 2 * genus - punctures - holes - moebius;
}

// Half-width of the embedded collar about a simple closed geodesic of
// length ell: rho = arsinh(1/sinh(ell/2)).
inline double collar_width(double ell) {
  if (!(ell > 0)) throw std::invalid_argument("collar_width: length must be positive");
  return std::asinh(1.0 / std::sinh(0.5 * ell));
}

// Rayleigh quotient bound sinh(1)*L / (2*pi - sinh(1)*L) for a pants-block
// test function whose boundary lengths sum to L.
inline double buser_rayleigh_bound(double sum_ell) {
  const double s1 = std::sinh(1.0);
  if (!(sum_ell >= 0) || !(s1 * sum_ell < 2.0 * kPi))
    throw std::invalid_argument("buser_rayleigh_bound: requires 0 <= sinh(1)*sum < 2*pi");
  return s1 * sum_ell / (2.0 * kPi - s1 * sum_ell);
}

namespace detail {
// Smallest integer k with k >= value (k >= 1). `strict` demands k > value.
inline int min_integer_at_least(double value, bool strict) {
  if (!(value < 1e9)) throw std::invalid_argument("cover order bound overflows int");
  double c = std::ceil(value);
  int k = static_cast<int>(std::max(1.0, c));
  if (strict && static_cast<double>(k) == value) ++k;
  return k;
}
}  // namespace detail

// Real-valued cover-order requirement ell*e^ell / (2 sinh(ell/2) eps area).
inline double randol_cover_bound(double ell, double eps, double area) {
  if (!(ell > 0) || !(eps > 0) || !(area > 0))
    throw std::invalid_argument("randol_cover_bound: all inputs must be positive");
  return ell * std::exp(ell) / (2.0 * std::sinh(0.5 * ell) * eps * area);
}

// Sharper collar form 2*ell*sinh(rho)/(rho^2*eps*area); never larger than
// randol_cover_bound.
inline double randol_cover_bound_collar(double ell, double eps, double area) {
  if (!(ell > 0) || !(eps > 0) || !(area > 0))
    throw std::invalid_argument("randol_cover_bound_collar: all inputs must be positive");
  double rho = collar_width(ell);
  return 2.0 * ell * std::sinh(rho) / (rho * rho * eps * area);
}

// Minimal cover multiplier k with k >= randol_cover_bound.
inline int randol_cover_order(double ell, double eps, double area) {
  return detail::min_integer_at_least(randol_cover_bound(ell, eps, area), /*strict=*/false);
}

// Minimal k for the collar form, whose inequality is strict; hence the bump
// on exact ties.
inline int randol_cover_order_collar(double ell, double eps, double area) {
  return detail::min_integer_at_least(randol_cover_bound_collar(ell, eps, area),
                                      /*strict=*/true);
}

// Minimal k with k >= 2*ln(4*gamma - 2)/eps; valid for every hyperbolic
// metric on the closed genus-gamma surface.
inline int randol_genus_order(int genus, double eps) {
  if (genus < 2) throw std::invalid_argument("randol_genus_order: genus must be >= 2");
  if (!(eps > 0)) throw std::invalid_argument("randol_genus_order: eps must be positive");
  double bound = 2.0 * std::log(4.0 * genus - 2.0) / eps;
  return detail::min_integer_at_least(bound, /*strict=*/false);
}

// Sharp upper bound 2*arcosh(2*gamma - 1) for the length of a shortest
// two-sided non-separating simple closed geodesic on a closed genus-gamma
// hyperbolic surface.
inline double nonsep_length_bound(int genus) {
  if (genus < 2) throw std::invalid_argument("nonsep_length_bound: genus must be >= 2");
  return 2.0 * std::acosh(2.0 * genus - 1.0);
}

// Weaker logarithmic form 2*ln(4*gamma - 2) of the same bound.
inline double nonsep_length_bound_log(int genus) {
  if (genus < 2) throw std::invalid_argument("nonsep_length_bound_log: genus must be >= 2");
  return 2.0 * std::log(4.0 * genus - 2.0);
}

// Two-sided enclosure of the analytic systole:
//   lower = -kappa/4 + sys^2/area^2     (curvature K <= kappa <= 0)
//   upper = 1/4 + 4*pi^2 / arsinh(1/sinh(sys))^2   (needs K >= -1)
inline std::pair<double, double> analytic_systole_interval(double sys, double area,
                                                           int euler_char, double kappa) {
  if (!(sys > 0) || !(area > 0))
    throw std::invalid_argument("analytic_systole_interval: sys and area must be positive");
  if (euler_char >= 0)
    throw std::invalid_argument("analytic_systole_interval: requires negative Euler characteristic");
  if (kappa > 0)
    throw std::invalid_argument("analytic_systole_interval: requires kappa <= 0");
  double lower = -kappa / 4.0 + (sys * sys) / (area * area);
  double w = std::asinh(1.0 / std::sinh(sys));
  double upper = 0.25 + 4.0 * kPi * kPi / (w * w);
  return {lower, upper};
}

// delta = min{pi/area, sys^2/area^2}.
inline double mondal_delta(double sys, double area) {
  if (!(sys > 0) || !(area > 0))
    throw std::invalid_argument("mondal_delta: sys and area must be positive");
  return std::min(kPi / area, sys * sys / (area * area));
}

// Cheeger inequality lower bound h^2/4 for the bottom of the spectrum.
inline double cheeger_lower_bound(double h) {
  if (!(h >= 0)) throw std::invalid_argument("cheeger_lower_bound: h must be >= 0");
  return 0.25 * h * h;
}

// ---------------------------------------------------------------------------
// Right-angled hexagons
// ---------------------------------------------------------------------------

// Sides in cyclic order a1, b3, a2, b1, a3, b2; b_i is opposite a_i and
// satisfies cosh(b_i) sinh(a_j) sinh(a_k) = cosh(a_i) + cosh(a_j) cosh(a_k).
struct Hexagon {
  std::array<double, 3> a{};
  std::array<double, 3> b{};

  std::array<double, 6> sides_cyclic() const { return {a[0], b[2], a[1], b[0], a[2], b[1]}; }

  // Largest relative defect of the three cyclic relations.
  double relation_defect() const {
    double worst = 0;
    for (int i = 0; i < 3; ++i) {
      int j = (i + 1) % 3, k = (i + 2) % 3;
      double lhs = std::cosh(b[i]) * std::sinh(a[j]) * std::sinh(a[k]);
      double rhs = std::cosh(a[i]) + std::cosh(a[j]) * std::cosh(a[k]);
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    return worst;
  }
};

// The unique right-angled hexagon with alternate sides ell_i/2. Cutting a
// hyperbolic pair of pants with boundary lengths ell_i along its three seams
// yields two isometric copies of this hexagon.
inline Hexagon hexagons_from_pants(double ell1, double ell2, double ell3) {
  if (!(ell1 > 0) || !(ell2 > 0) || !(ell3 > 0))
    throw std::invalid_argument("hexagons_from_pants: lengths must be positive");
  Hexagon h;
  h.a = {0.5 * ell1, 0.5 * ell2, 0.5 * ell3};
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    double num = std::cosh(h.a[i]) + std::cosh(h.a[j]) * std::cosh(h.a[k]);
    double den = std::sinh(h.a[j]) * std::sinh(h.a[k]);
    h.b[i] = std::acosh(num / den);
  }
  return h;
}

// Seam between the two finite boundaries of a pants block whose third end is
// a cusp: cosh(b) = (1 + cosh(a_j) cosh(a_k)) / (sinh(a_j) sinh(a_k)).
inline double seam_opposite_cusp(double half_j, double half_k) {
  double num = 1.0 + std::cosh(half_j) * std::cosh(half_k);
  double den = std::sinh(half_j) * std::sinh(half_k);
  return std::acosh(num / den);
}

// ---------------------------------------------------------------------------
// Pants blocks and Fenchel-Nielsen surfaces
// ---------------------------------------------------------------------------

enum class BlockKind { ThreeHoles, TwoHolesOneCusp, OneHoleTwoCusps, ThreeCusps };

inline int cusp_count(BlockKind k) {
  switch (k) {
    case BlockKind::ThreeHoles: return 0;
    case BlockKind::TwoHolesOneCusp: return 1;
    case BlockKind::OneHoleTwoCusps: return 2;
    case BlockKind::ThreeCusps: return 3;
  }
  return 0;
}

inline std::string to_string(BlockKind k) {
  switch (k) {
    case BlockKind::ThreeHoles: return "three_holes";
    case BlockKind::TwoHolesOneCusp: return "two_holes_one_cusp";
    case BlockKind::OneHoleTwoCusps: return "one_hole_two_cusps";
    case BlockKind::ThreeCusps: return "three_cusps";
  }
  return "?";
}

// One pair of pants. boundary_lengths[s] is NaN exactly when slot s is a
// cusp; every block has Euler characteristic -1.
struct PantsBlock {
  BlockKind kind = BlockKind::ThreeHoles;
  std::array<double, 3> boundary_lengths{};

  bool is_cusp(int slot) const { return std::isnan(boundary_lengths[slot]); }

  void validate() const {
    int cusps = 0;
    for (double L : boundary_lengths) {
      if (std::isnan(L)) {
        ++cusps;
      } else if (!(L > 0)) {
        throw std::invalid_argument("PantsBlock: boundary lengths must be positive");
      }
    }
    if (cusps != cusp_count(kind))
      throw std::invalid_argument("PantsBlock: cusp slots do not match block kind");
  }
};

struct SlotRef {
  int block = -1;
  int slot = -1;
  bool operator==(const SlotRef&) const = default;
  bool operator<(const SlotRef& o) const {
    return block != o.block ? block < o.block : slot < o.slot;
  }
};

struct Gluing {
  SlotRef from, to;
  double twist = 0;  // length units along the glued circle
};

// A surface of finite type assembled from pants blocks. Cusp slots are
// implied by the blocks; remaining unglued hole slots are free geodesic
// boundary circles.
struct FNSurface {
  std::vector<PantsBlock> blocks;
  std::vector<Gluing> gluings;

  int euler_char() const { return -static_cast<int>(blocks.size()); }

  double boundary_length(const SlotRef& s) const {
    return blocks.at(s.block).boundary_lengths.at(s.slot);
  }

  std::vector<SlotRef> free_boundaries() const {
    std::vector<SlotRef> out;
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
      for (int s = 0; s < 3; ++s) {
        SlotRef ref{b, s};
        if (blocks[b].is_cusp(s)) continue;
        bool glued = false;
        for (const auto& g : gluings)
          if (g.from == ref || g.to == ref) glued = true;
        if (!glued) out.push_back(ref);
      }
    return out;
  }

  std::vector<SlotRef> cusp_slots() const {
    std::vector<SlotRef> out;
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
      for (int s = 0; s < 3; ++s)
        if (blocks[b].is_cusp(s)) out.push_back({b, s});
    return out;
  }

  bool closed() const { return free_boundaries().empty() && cusp_slots().empty(); }

  // Genus of a closed orientable surface built from these blocks.
  int genus() const {
    if (!closed()) throw std::invalid_argument("FNSurface::genus: surface is not closed");
    return (2 + static_cast<int>(blocks.size())) / 2;
  }

  void validate() const {
    if (blocks.empty()) throw std::invalid_argument("FNSurface: no blocks");
    for (const auto& b : blocks) b.validate();

    std::vector<SlotRef> used;
    for (const auto& g : gluings) {
      for (const SlotRef& s : {g.from, g.to}) {
        if (s.block < 0 || s.block >= static_cast<int>(blocks.size()) || s.slot < 0 || s.slot > 2)
          throw std::invalid_argument("FNSurface: gluing references a nonexistent slot");
        if (blocks[s.block].is_cusp(s.slot))
          throw std::invalid_argument("FNSurface: cusp slots cannot be glued");
        if (std::find(used.begin(), used.end(), s) != used.end())
          throw std::invalid_argument("FNSurface: slot appears in more than one gluing");
        used.push_back(s);
      }
      if (g.from == g.to) throw std::invalid_argument("FNSurface: slot glued to itself");
      double la = boundary_length(g.from), lb = boundary_length(g.to);
      if (std::abs(la - lb) > 1e-12 * std::max(la, lb))
        throw std::invalid_argument("FNSurface: glued slots have different boundary lengths");
    }

    // Connectivity of the gluing graph.
    std::vector<int> parent(blocks.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (const auto& g : gluings) parent[find(g.from.block)] = find(g.to.block);
    int root = find(0);
    for (size_t i = 0; i < parent.size(); ++i)
      if (find(static_cast<int>(i)) != root)
        throw std::invalid_argument("FNSurface: gluing graph is not connected");
  }

  // Whether cutting along gluing `index` keeps the surface connected.
  bool curve_non_separating(int index) const {
    if (index < 0 || index >= static_cast<int>(gluings.size()))
      throw std::invalid_argument("FNSurface: no such gluing");
    std::vector<int> parent(blocks.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (int g = 0; g < static_cast<int>(gluings.size()); ++g) {
      if (g == index) continue;
      parent[find(gluings[g].from.block)] = find(gluings[g].to.block);
    }
    int root = find(0);
    for (size_t i = 0; i < parent.size(); ++i)
      if (find(static_cast<int>(i)) != root) return false;
    return true;
  }
};

// Total hyperbolic area -2*pi*chi = 2*pi * (number of blocks).
inline double gauss_bonnet_area(const FNSurface& surface) {
  surface.validate();
  return 2.0 * kPi * static_cast<double>(surface.blocks.size());
}

inline int small_count_bound(const FNSurface& surface) {
  surface.validate();
  return -surface.euler_char();
}

// Minimum over pants-curve lengths and free geodesic boundary lengths; an
// upper bound for sys(S). +infinity when the surface has no such curve
// (e.g. a single all-cusp block).
inline double sys_upper_bound(const FNSurface& surface) {
  surface.validate();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : surface.gluings) best = std::min(best, surface.boundary_length(g.from));
  for (const auto& s : surface.free_boundaries())
    best = std::min(best, surface.boundary_length(s));
  return best;
}

// ---------------------------------------------------------------------------
// Bound report
// ---------------------------------------------------------------------------

struct Verdict {
  std::string name;
  bool pass = false;
  bool applicable = true;
  double lhs = 0, rhs = 0;
  std::string note;

  double margin() const { return rhs - lhs; }
};

struct BoundReport {
  double area = 0;
  int euler_char = 0;
  double sys_upper = 0;  // +inf when no enumerable curve exists
  std::map<int, double> collar_widths;  // gluing index -> rho
  double lambda0_universal = 0.25;
  double lambda_ess_floor = 0.25;
  std::pair<double, double> lambda_interval{0, 0};
  bool lambda_interval_valid = false;
  int small_count = 0;
  double mondal = 0;
  bool sys_is_upper_bound_only = true;  // consumers of the lower bound beware
  std::vector<Verdict> verdicts;
};

inline BoundReport bound_report(const FNSurface& surface) {
  surface.validate();
  BoundReport r;
  r.area = gauss_bonnet_area(surface);
  r.euler_char = surface.euler_char();
  r.sys_upper = sys_upper_bound(surface);
  for (int g = 0; g < static_cast<int>(surface.gluings.size()); ++g)
    r.collar_widths[g] = collar_width(surface.boundary_length(surface.gluings[g].from));
  r.small_count = -r.euler_char;

  if (std::isfinite(r.sys_upper)) {
    r.lambda_interval = analytic_systole_interval(r.sys_upper, r.area, r.euler_char, -1.0);
    r.lambda_interval_valid = true;
    r.mondal = mondal_delta(r.sys_upper, r.area);

    Verdict ordered;
    ordered.name = "lambda_interval_ordered";
    ordered.lhs = r.lambda_interval.first;
    ordered.rhs = r.lambda_interval.second;
    ordered.pass = ordered.lhs <= ordered.rhs;
    r.verdicts.push_back(ordered);

    if (surface.closed() && surface.blocks.size() >= 2) {
      Verdict ns;
      ns.name = "sys_upper_vs_nonsep_bound";
      ns.lhs = r.sys_upper;
      ns.rhs = nonsep_length_bound(surface.genus());
      ns.pass = ns.lhs <= ns.rhs;
      ns.note = ns.pass ? "" : "no enumerated curve realizes the bound; inconclusive";
      ns.applicable = ns.pass;  // failure of the proxy is not a theorem violation
      r.verdicts.push_back(ns);
    }
  } else {
    Verdict v;
    v.name = "sys_upper_finite";
    v.pass = true;
    v.applicable = false;
    v.note = "no pants curves or free boundaries; systole-based bounds skipped";
    r.verdicts.push_back(v);
  }
  return r;
}

// ---------------------------------------------------------------------------
// JSON surface files
// ---------------------------------------------------------------------------
//
// { "blocks": [{"kind": "...", "lengths": [l0, l1|null, l2]}],
//   "gluings": [{"from": [b, slot], "to": [b, slot], "twist": t}],
//   "cusps": [[b, slot], ...] }   (cusps section optional, checked if present)

inline nlohmann::ordered_json surface_to_json(const FNSurface& s) {
  nlohmann::ordered_json j;
  j["blocks"] = nlohmann::ordered_json::array();
  for (const auto& b : s.blocks) {
    nlohmann::ordered_json jb;
    jb["kind"] = to_string(b.kind);
    nlohmann::ordered_json lens = nlohmann::ordered_json::array();
    for (double L : b.boundary_lengths) {
      if (std::isnan(L))
        lens.push_back(nullptr);
      else
        lens.push_back(L);
    }
    jb["lengths"] = lens;
    j["blocks"].push_back(jb);
  }
  j["gluings"] = nlohmann::ordered_json::array();
  for (const auto& g : s.gluings) {
    nlohmann::ordered_json jg;
    jg["from"] = {g.from.block, g.from.slot};
    jg["to"] = {g.to.block, g.to.slot};
    jg["twist"] = g.twist;
    j["gluings"].push_back(jg);
  }
  nlohmann::ordered_json cusps = nlohmann::ordered_json::array();
  for (const auto& c : s.cusp_slots()) cusps.push_back({c.block, c.slot});
  j["cusps"] = cusps;
  return j;
}

inline BlockKind block_kind_from_string(const std::string& s) {
  if (s == "three_holes") return BlockKind::ThreeHoles;
  if (s == "two_holes_one_cusp") return BlockKind::TwoHolesOneCusp;
  if (s == "one_hole_two_cusps") return BlockKind::OneHoleTwoCusps;
  if (s == "three_cusps") return BlockKind::ThreeCusps;
  if (s == "two_holes_moebius")
    throw std::invalid_argument("surface_from_json: Moebius blocks are not supported");
  throw std::invalid_argument("surface_from_json: unknown block kind '" + s + "'");
}

inline FNSurface surface_from_json(const nlohmann::json& j) {
  FNSurface s;
  if (!j.contains("blocks")) throw std::invalid_argument("surface_from_json: missing 'blocks'");
  for (const auto& jb : j.at("blocks")) {
    PantsBlock b;
    b.kind = block_kind_from_string(jb.at("kind").get<std::string>());
    const auto& lens = jb.at("lengths");
    if (lens.size() != 3) throw std::invalid_argument("surface_from_json: block needs 3 length entries");
    for (int i = 0; i < 3; ++i) {
      if (lens[i].is_null())
        b.boundary_lengths[i] = std::numeric_limits<double>::quiet_NaN();
      else
        b.boundary_lengths[i] = lens[i].get<double>();
    }
    s.blocks.push_back(b);
  }
  if (j.contains("gluings")) {
    for (const auto& jg : j.at("gluings")) {
      Gluing g;
      g.from = {jg.at("from")[0].get<int>(), jg.at("from")[1].get<int>()};
      g.to = {jg.at("to")[0].get<int>(), jg.at("to")[1].get<int>()};
      g.twist = jg.value("twist", 0.0);
      s.gluings.push_back(g);
    }
  }
  if (j.contains("cusps")) {
    std::vector<SlotRef> declared;
    for (const auto& jc : j.at("cusps")) declared.push_back({jc[0].get<int>(), jc[1].get<int>()});
    auto actual = s.cusp_slots();
    std::sort(declared.begin(), declared.end());
    std::sort(actual.begin(), actual.end());
    if (declared != actual)
      throw std::invalid_argument("surface_from_json: 'cusps' section disagrees with block kinds");
  }
  s.validate();
  return s;
}

}  // namespace hypspec
