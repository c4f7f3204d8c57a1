// hypspec: build hyperbolic surfaces from pants data, compute low spectra,
// and run the verification campaigns.
//
// Exit codes: 0 all checks pass, 1 any FAIL verdict, 2 usage/config error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hypspec/experiments.hpp"
#include "hypspec/geometry.hpp"
#include "hypspec/mesher.hpp"
#include "hypspec/plot.hpp"
#include "hypspec/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string out = "out";
  double h = 0.1;
  int m = -1;  // default: -chi + 3
  int k = 3, n = 2, curve = 0;
  uint64_t seed = 0;
  bool plot = false;
};

int max_threads() {
  if (const char* env = std::getenv("HYPSPEC_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_manifest(const Options& opt, const std::string& command, const ordered_json& config) {
  fs::create_directories(opt.out);
  ordered_json m;
  m["command"] = command;
  m["config"] = config;
  m["config_hash"] = fnv1a(config.dump());
  m["seed"] = opt.seed;
  m["versions"] = {{"hypspec", HYPSPEC_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  std::ofstream os(fs::path(opt.out) / "manifest.json");
  os << m.dump(2) << "\n";
}

hypspec::FNSurface load_surface(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open surface file '" + path + "'");
  json j;
  is >> j;
  return hypspec::surface_from_json(j);
}

bool looks_like_mesh_file(const std::string& path) {
  std::ifstream is(path);
  std::string magic;
  is >> magic;
  return magic == "HYPMESH" || magic == "FLATMESH";
}

struct CheckRow {
  std::string surface;
  hypspec::Verdict verdict;
  const hypspec::BoundReport* bounds = nullptr;
};

void write_checks_csv(const std::vector<std::pair<std::string, hypspec::Verdict>>& rows,
                      const std::map<std::string, hypspec::BoundReport>& bounds,
                      std::ostream& os) {
  os << "surface,check,verdict,lhs,rhs,margin,note,area,euler_char,sys_upper,lambda_lower,"
        "lambda_upper,mondal_delta,small_count\n";
  for (const auto& [label, v] : rows) {
    os << label << "," << v.name << ","
       << (v.applicable ? (v.pass ? "PASS" : "FAIL") : "SKIP") << ","
       << hypspec::format_double(v.lhs) << "," << hypspec::format_double(v.rhs) << ","
       << hypspec::format_double(v.margin()) << ",\"" << v.note << "\"";
    auto it = bounds.find(label);
    if (it != bounds.end()) {
      const auto& b = it->second;
      os << "," << hypspec::format_double(b.area) << "," << b.euler_char << ","
         << hypspec::format_double(b.sys_upper) << ","
         << hypspec::format_double(b.lambda_interval.first) << ","
         << hypspec::format_double(b.lambda_interval.second) << ","
         << hypspec::format_double(b.mondal) << "," << b.small_count;
    } else {
      os << ",,,,,,,";
    }
    os << "\n";
  }
}

int finish_checks(const Options& opt,
                  const std::vector<std::pair<std::string, hypspec::Verdict>>& rows,
                  const std::map<std::string, hypspec::BoundReport>& bounds) {
  fs::create_directories(opt.out);
  std::ofstream os(fs::path(opt.out) / "results.csv");
  write_checks_csv(rows, bounds, os);
  bool all_pass = true;
  for (const auto& [label, v] : rows) {
    std::cout << (v.applicable ? (v.pass ? "[PASS] " : "[FAIL] ") : "[SKIP] ") << label << " / "
              << v.name << "  lhs=" << v.lhs << " rhs=" << v.rhs;
    if (!v.note.empty()) std::cout << "  (" << v.note << ")";
    std::cout << "\n";
    if (v.applicable && !v.pass) all_pass = false;
  }
  return all_pass ? 0 : 1;
}

void print_bound_report(const hypspec::BoundReport& b) {
  std::cout << "area            " << b.area << "\n";
  std::cout << "euler_char      " << b.euler_char << "\n";
  std::cout << "sys_upper       " << b.sys_upper << "  (enumerated curves; upper bound only)\n";
  std::cout << "lambda0_univ    " << b.lambda0_universal << "\n";
  std::cout << "lambda_ess_floor " << b.lambda_ess_floor << "\n";
  if (b.lambda_interval_valid)
    std::cout << "lambda_interval [" << b.lambda_interval.first << ", "
              << b.lambda_interval.second << "]\n";
  std::cout << "small_count     " << b.small_count << "\n";
  if (b.lambda_interval_valid) std::cout << "mondal_delta    " << b.mondal << "\n";
  for (const auto& g : b.collar_widths)
    std::cout << "collar[" << g.first << "]       " << g.second << "\n";
  for (const auto& v : b.verdicts)
    std::cout << (v.applicable ? (v.pass ? "[PASS] " : "[FAIL] ") : "[SKIP] ") << v.name << "\n";
}

// Genus-g ring surface with uniform curve length and optional random twists.
hypspec::FNSurface uniform_genus_surface(int genus, double ell, uint64_t twist_seed,
                                         bool randomize) {
  hypspec::FNSurface s;
  hypspec::PantsBlock blk;
  blk.kind = hypspec::BlockKind::ThreeHoles;
  blk.boundary_lengths = {ell, ell, ell};
  int m = 2 * genus - 2;
  s.blocks.assign(m, blk);
  for (int i = 0; i < m; ++i) s.gluings.push_back({{i, 2}, {(i + 1) % m, 0}, 0.0});
  for (int i = 0; i + 1 < m; i += 2) s.gluings.push_back({{i, 1}, {i + 1, 1}, 0.0});
  if (randomize) {
    std::mt19937_64 rng(twist_seed ^ 0x7715577155ull);
    std::uniform_real_distribution<double> tw(-0.5, 0.5);
    for (auto& g : s.gluings) g.twist = tw(rng) * ell;
  }
  s.validate();
  return s;
}

std::vector<std::pair<std::string, hypspec::Verdict>> buser_checks(
    const hypspec::FNSurface& surface, const std::string& label, const Options& opt,
    std::map<std::string, hypspec::BoundReport>& bounds_out,
    std::vector<double>* eigenvalues_out = nullptr) {
  using namespace hypspec;
  std::vector<std::pair<std::string, Verdict>> rows;
  BoundReport bounds = bound_report(surface);
  bounds_out[label] = bounds;

  SurfaceMesh sm = glue_surface(surface, opt.h);
  DiscreteOperator op = assemble(sm.mesh, BoundaryCondition::Neumann);
  int chi = surface.euler_char();
  int m = opt.m > 0 ? opt.m : -chi + 3;
  SpectralResult res = lowest_eigenpairs(op, m, 1e-8, opt.seed);
  if (eigenvalues_out) *eigenvalues_out = res.eigenvalues;

  TestFamily fam = buser_test_functions(sm, op);
  rows.push_back({label, verify_variational(fam, res)});

  {
    Verdict v;
    v.name = "count_below_buser_bound";
    double thr = fam.quotient_bound * (1.0 + kSolverSlack);
    int cnt = 0;
    for (double l : res.eigenvalues)
      if (l <= thr) ++cnt;
    v.lhs = -chi;
    v.rhs = cnt;
    v.pass = cnt >= -chi;
    v.note = "threshold=" + format_double(thr);
    rows.push_back({label, v});
  }
  for (auto& v : small_eigenvalue_audit(surface, sm.mesh, res, bounds)) rows.push_back({label, v});
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypspec: spectra of hyperbolic surfaces built from pants decompositions"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  Options opt;
  std::string input, bc_name = "neumann", hlist_str, ell_list_str = "0.5,1,2";
  int genus = 2, samples = 1;
  double ell = 0.05, radius = 2.0;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", opt.out, "output directory (default: out)");
    c->add_option("--h", opt.h, "target mesh size");
    c->add_option("--m", opt.m, "number of eigenpairs (default: -chi+3)");
    c->add_option("--seed", opt.seed, "RNG seed for the eigensolver and sampling");
    c->add_flag("--plot", opt.plot, "write SVG spectrum plots");
  };

  auto* cb = app.add_subcommand("bounds", "closed-form bound report for a surface file");
  cb->add_option("surface", input, "surface JSON file")->required();
  add_common(cb);

  auto* cbuild = app.add_subcommand("build", "mesh a surface and export HYPMESH");
  cbuild->add_option("surface", input, "surface JSON file")->required();
  add_common(cbuild);

  auto* cspec = app.add_subcommand("spectrum", "lowest eigenpairs of a surface or mesh file");
  cspec->add_option("input", input, "surface JSON or HYPMESH/FLATMESH file")->required();
  cspec->add_option("--bc", bc_name, "boundary condition: neumann|dirichlet");
  add_common(cspec);

  auto* ccover = app.add_subcommand("cover", "build a cyclic cover mesh along a pants curve");
  ccover->add_option("surface", input, "surface JSON file")->required();
  ccover->add_option("--curve", opt.curve, "gluing index of the cut curve");
  ccover->add_option("--k", opt.k, "chain length parameter (cover order is (k+2)n)");
  ccover->add_option("--n", opt.n, "number of chained blocks");
  add_common(ccover);

  auto* cconv = app.add_subcommand("converge", "mesh-refinement convergence study");
  cconv->add_option("input", input, "torus | disk | surface JSON file")->required();
  cconv->add_option("--h-list", hlist_str, "comma-separated decreasing mesh sizes")->required();
  cconv->add_option("--radius", radius, "disk radius (input=disk)");
  cconv->add_option("--bc", bc_name, "boundary condition for meshes with boundary");
  add_common(cconv);

  auto* cver = app.add_subcommand("verify", "verification campaigns");
  cver->require_subcommand(1);
  auto* vb = cver->add_subcommand("buser", "short-curve squeeze checks");
  vb->add_option("--genus", genus, "genus (>= 2)");
  vb->add_option("--ell", ell, "pants curve length");
  vb->add_option("--samples", samples, "twist samples (first sample is untwisted)");
  add_common(vb);
  auto* vr = cver->add_subcommand("randol", "cyclic cover eigenvalue checks");
  vr->add_option("--genus", genus, "genus of the base (>= 2)");
  vr->add_option("--ell", ell, "curve length on the base")->default_val(1.0);
  vr->add_option("--curve", opt.curve, "gluing index of the cut curve");
  vr->add_option("--k", opt.k, "chain length parameter");
  vr->add_option("--n", opt.n, "number of test functions");
  add_common(vr);
  auto* vn = cver->add_subcommand("nodal", "nodal-domain checks on sampled surfaces");
  vn->add_option("--samples", samples, "number of sampled genus-2 surfaces")->default_val(5);
  add_common(vn);
  auto* vc = cver->add_subcommand("collar", "collar sub-complex realization checks");
  vc->add_option("--ell", ell_list_str, "comma-separated curve lengths");
  add_common(vc);
  auto* vk = cver->add_subcommand("campaign", "JSON-driven campaign");
  vk->add_option("config", input, "campaign config JSON")->required();
  add_common(vk);

  // the mesh-size flag is literally --h, so no -h shorthand anywhere
  std::function<void(CLI::App*)> fix_help = [&](CLI::App* a) {
    for (auto* sub : a->get_subcommands({})) {
      sub->set_help_flag("--help", "print help and exit");
      fix_help(sub);
    }
  };
  fix_help(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  using namespace hypspec;
  try {
    if (cb->parsed()) {
      FNSurface s = load_surface(input);
      ordered_json cfg{{"surface", input}};
      write_manifest(opt, "bounds", cfg);
      BoundReport b = bound_report(s);
      print_bound_report(b);
      std::vector<std::pair<std::string, Verdict>> rows;
      std::map<std::string, BoundReport> bm{{input, b}};
      for (auto& v : b.verdicts) rows.push_back(std::make_pair(input, v));
      return finish_checks(opt, rows, bm);
    }

    if (cbuild->parsed()) {
      FNSurface s = load_surface(input);
      ordered_json cfg{{"surface", input}, {"h", opt.h}};
      write_manifest(opt, "build", cfg);
      SurfaceMesh sm = glue_surface(s, opt.h);
      fs::create_directories(opt.out);
      save_mesh(sm.mesh, (fs::path(opt.out) / "mesh.hyp").string());
      auto q = sm.mesh.quality();
      std::cout << "vertices " << q.vertex_count << "  triangles " << q.triangle_count
                << "  h_max " << q.h_max << "  area " << sm.mesh.total_area() << "  chi "
                << sm.mesh.euler_characteristic() << "\n";
      for (const auto& ap : sm.applied)
        std::cout << "gluing " << ap.gluing_index << ": requested twist " << ap.requested_twist
                  << ", applied " << ap.applied_twist << " (" << ap.offset_segments << "/"
                  << ap.segments << " segments)\n";
      return 0;
    }

    if (cspec->parsed()) {
      BoundaryCondition bc =
          bc_name == "dirichlet" ? BoundaryCondition::Dirichlet : BoundaryCondition::Neumann;
      HyperbolicMesh mesh;
      std::optional<BoundReport> bounds;
      if (looks_like_mesh_file(input)) {
        mesh = load_mesh(input);
        if (opt.m <= 0) opt.m = 6;
      } else {
        FNSurface s = load_surface(input);
        bounds = bound_report(s);
        mesh = glue_surface(s, opt.h).mesh;
        if (opt.m <= 0) opt.m = -s.euler_char() + 3;
      }
      ordered_json cfg{{"input", input}, {"h", opt.h}, {"m", opt.m}, {"bc", bc_name}};
      write_manifest(opt, "spectrum", cfg);
      DiscreteOperator op = assemble(mesh, bc);
      SpectralResult res = lowest_eigenpairs(op, opt.m, 1e-8, opt.seed);
      fs::create_directories(opt.out);
      save_spectrum_csv(res, (fs::path(opt.out) / "spectrum.csv").string());
      for (size_t i = 0; i < res.eigenvalues.size(); ++i)
        std::cout << "lambda_" << i << " = " << res.eigenvalues[i]
                  << "  (residual " << res.residual_norms[i] << ")\n";
      if (opt.plot) {
        std::vector<PlotLine> lines{{0.25, "1/4", "#c0392b"}};
        if (bounds && bounds->lambda_interval_valid)
          lines.push_back({bounds->lambda_interval.first, "lambda_lower", "#27ae60"});
        save_spectrum_svg(res.eigenvalues, lines, (fs::path(opt.out) / "spectrum.svg").string());
      }
      return 0;
    }

    if (ccover->parsed()) {
      FNSurface s = load_surface(input);
      ordered_json cfg{
          {"surface", input}, {"curve", opt.curve}, {"k", opt.k}, {"n", opt.n}, {"h", opt.h}};
      write_manifest(opt, "cover", cfg);
      SurfaceMesh cm = cyclic_cover_mesh(s, opt.curve, opt.k, opt.n, opt.h);
      fs::create_directories(opt.out);
      save_mesh(cm.mesh, (fs::path(opt.out) / "cover.hyp").string());
      std::cout << "cover order " << (opt.k + 2) * opt.n << "  chi "
                << cm.mesh.euler_characteristic() << "  area " << cm.mesh.total_area()
                << "  vertices " << cm.mesh.vertex_count << "\n";
      return 0;
    }

    if (cconv->parsed()) {
      std::vector<double> hs;
      for (auto& tok : CLI::detail::split(hlist_str, ',')) hs.push_back(std::stod(tok));
      BoundaryCondition bc =
          bc_name == "dirichlet" ? BoundaryCondition::Dirichlet : BoundaryCondition::Neumann;
      int m = opt.m > 0 ? opt.m : 5;
      ordered_json cfg{{"input", input}, {"h_list", hlist_str}, {"m", m}};
      write_manifest(opt, "converge", cfg);
      std::vector<std::vector<double>> values;
      for (double h : hs) {
        HyperbolicMesh mesh;
        if (input == "torus") {
          mesh = mesh_flat_torus(std::max(3, static_cast<int>(std::ceil(1.0 / h))));
        } else if (input == "disk") {
          mesh = mesh_hyperbolic_disk(radius, h);
          bc = BoundaryCondition::Dirichlet;
        } else {
          mesh = glue_surface(load_surface(input), h).mesh;
        }
        DiscreteOperator op = assemble(mesh, bc);
        values.push_back(lowest_eigenpairs(op, m, 1e-8, opt.seed).eigenvalues);
      }
      ConvergenceStudy cs = convergence_from_values(hs, values);
      fs::create_directories(opt.out);
      std::ofstream os(fs::path(opt.out) / "convergence.csv");
      os << "index,extrapolated,observed_order";
      for (double h : hs) os << ",lambda_h" << format_double(h);
      os << "\n";
      for (size_t j = 0; j < cs.extrapolated.size(); ++j) {
        os << j << "," << format_double(cs.extrapolated[j]) << ","
           << format_double(cs.observed_order[j]);
        for (size_t i = 0; i < hs.size(); ++i) os << "," << format_double(values[i][j]);
        os << "\n";
        std::cout << "lambda_" << j << ": extrapolated " << cs.extrapolated[j] << ", order "
                  << cs.observed_order[j] << (cs.monotone ? "" : "  [non-monotone]") << "\n";
      }
      return 0;
    }

    // verify subcommands
    std::vector<std::pair<std::string, Verdict>> rows;
    std::map<std::string, BoundReport> bounds;

    if (vb->parsed()) {
      ordered_json cfg{{"genus", genus}, {"ell", ell},        {"h", opt.h},
                       {"m", opt.m},     {"samples", samples}, {"seed", opt.seed}};
      write_manifest(opt, "verify buser", cfg);
      for (int s = 0; s < samples; ++s) {
        FNSurface surf = s == 0 ? buser_surface(genus, ell)
                                : uniform_genus_surface(genus, ell, opt.seed + s, true);
        std::string label = "buser_g" + std::to_string(genus) + "_s" + std::to_string(s);
        std::vector<double> ev;
        for (auto& r : buser_checks(surf, label, opt, bounds, &ev)) rows.push_back(r);
        if (opt.plot) {
          std::vector<PlotLine> lines{{0.25, "1/4", "#c0392b"},
                                      {bounds[label].lambda_interval.first, "lambda_lower",
                                       "#27ae60"}};
          fs::create_directories(opt.out);
          save_spectrum_svg(ev, lines,
                            (fs::path(opt.out) / (label + "_spectrum.svg")).string());
        }
      }
      return finish_checks(opt, rows, bounds);
    }

    if (vr->parsed()) {
      ordered_json cfg{{"genus", genus}, {"ell", ell}, {"curve", opt.curve}, {"k", opt.k},
                       {"n", opt.n},     {"h", opt.h}, {"m", opt.m},         {"seed", opt.seed}};
      write_manifest(opt, "verify randol", cfg);
      FNSurface base = uniform_genus_surface(genus, ell, 0, false);
      std::string label = "randol_g" + std::to_string(genus);
      bounds[label] = bound_report(base);

      RandolFamily rf = randol_family(base, opt.curve, opt.k, opt.n, opt.h);
      SurfaceMesh bm = glue_surface(base, opt.h);
      DiscreteOperator bop = assemble(bm.mesh, BoundaryCondition::Neumann);
      int mb = std::max(5, -base.euler_char() + 2);
      SpectralResult bres = lowest_eigenpairs(bop, mb, 1e-8, opt.seed);
      int small = 0;
      for (double l : bres.eigenvalues)
        if (l <= 0.25) ++small;
      int mc = opt.m > 0 ? opt.m : opt.n + small + 4;
      SpectralResult cres = lowest_eigenpairs(rf.op, mc, 1e-8, opt.seed);

      rows.push_back({label, verify_variational(rf.family, cres)});
      {
        Verdict v;
        v.name = "count_below_randol_bound";
        double thr = rf.quotient_bound * (1.0 + kSolverSlack);
        int cnt = 0;
        for (double l : cres.eigenvalues)
          if (l <= thr) ++cnt;
        v.lhs = opt.n;
        v.rhs = cnt;
        v.pass = cnt >= opt.n;
        v.note = "threshold=" + format_double(thr) + " order=" + std::to_string(rf.order);
        rows.push_back({label, v});
      }
      {
        Verdict v;
        v.name = "cover_contains_base_spectrum";
        v.pass = true;
        double worst = 0;
        for (double l : bres.eigenvalues) {
          if (l > 0.25) continue;
          double best = 1e99;
          for (double c : cres.eigenvalues) best = std::min(best, std::abs(c - l));
          double tol = 2.0 * kSolverSlack * std::max(l, 0.0) + 1e-6;
          worst = std::max(worst, best - tol);
          if (best > tol) v.pass = false;
        }
        v.lhs = worst;
        v.rhs = 0;
        v.note = "base eigenvalues <= 1/4 matched in the cover";
        rows.push_back({label, v});
      }
      if (opt.plot) {
        fs::create_directories(opt.out);
        save_spectrum_svg(cres.eigenvalues,
                          {{0.25, "1/4", "#c0392b"},
                           {rf.quotient_bound, "randol bound", "#27ae60"}},
                          (fs::path(opt.out) / (label + "_cover_spectrum.svg")).string());
      }
      return finish_checks(opt, rows, bounds);
    }

    if (vn->parsed()) {
      ordered_json cfg{{"samples", samples}, {"h", opt.h}, {"m", opt.m}, {"seed", opt.seed}};
      write_manifest(opt, "verify nodal", cfg);
      int mth = std::min(max_threads(), samples);
      std::vector<std::vector<std::pair<std::string, Verdict>>> all(samples);
      std::vector<std::map<std::string, BoundReport>> bnd(samples);
      std::atomic<int> next{0};
      auto worker = [&]() {
        for (int s = next.fetch_add(1); s < samples; s = next.fetch_add(1)) {
          FNSurface surf = sampled_genus2_surface(opt.seed + s);
          std::string label = "sample_" + std::to_string(s);
          bnd[s][label] = bound_report(surf);
          SurfaceMesh sm = glue_surface(surf, opt.h);
          DiscreteOperator op = assemble(sm.mesh, BoundaryCondition::Neumann);
          int m = opt.m > 0 ? opt.m : 11;
          SpectralResult res = lowest_eigenpairs(op, m, 1e-8, opt.seed);
          Verdict vc;
          vc.name = "courant_domain_counts";
          vc.pass = true;
          int worst_excess = 0;
          for (size_t i = 0; i < res.eigenvalues.size(); ++i) {
            NodalReport rep = nodal_domains(sm.mesh, res.eigenvectors[i]);
            int excess = rep.total() - static_cast<int>(i) - 1;
            worst_excess = std::max(worst_excess, excess);
            if (excess > 0) vc.pass = false;
          }
          vc.lhs = worst_excess;
          vc.rhs = 0;
          vc.note = "domains minus (i+1), worst over i";
          all[s].push_back({label, vc});
          for (auto& v : small_eigenvalue_audit(surf, sm.mesh, res, bnd[s][label]))
            all[s].push_back({label, v});
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < mth; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      for (int s = 0; s < samples; ++s) {
        for (auto& r : all[s]) rows.push_back(r);
        for (auto& [k2, v2] : bnd[s]) bounds[k2] = v2;
      }
      return finish_checks(opt, rows, bounds);
    }

    if (vc->parsed()) {
      ordered_json cfg{{"ell", ell_list_str}, {"h", opt.h}};
      write_manifest(opt, "verify collar", cfg);
      for (auto& tok : CLI::detail::split(ell_list_str, ',')) {
        double L = std::stod(tok);
        FNSurface surf = uniform_genus_surface(2, L, 0, false);
        std::string label = "collar_ell_" + tok;
        bounds[label] = bound_report(surf);
        SurfaceMesh sm = glue_surface(surf, opt.h);
        auto shape = collar_subcomplex(sm, 0, collar_width(L));
        Verdict v;
        v.name = "collar_is_annulus";
        v.pass = shape.connected && shape.euler_char == 0 && shape.boundary_loops == 2;
        v.lhs = shape.euler_char;
        v.rhs = 0;
        v.note = "loops=" + std::to_string(shape.boundary_loops) +
                 " connected=" + std::to_string(shape.connected) +
                 " width=" + format_double(collar_width(L));
        rows.push_back({label, v});
      }
      return finish_checks(opt, rows, bounds);
    }

    if (vk->parsed()) {
      std::ifstream is(input);
      if (!is) throw std::invalid_argument("cannot open campaign config '" + input + "'");
      json cfg;
      is >> cfg;
      opt.h = cfg.value("h", opt.h);
      opt.m = cfg.value("m", opt.m);
      opt.seed = cfg.value("seed", opt.seed);
      std::set<std::string> checks;
      for (auto& c : cfg.value("checks", json::array({"bounds", "audit"})))
        checks.insert(c.get<std::string>());
      ordered_json mcfg{{"config", input}, {"h", opt.h}, {"m", opt.m}, {"seed", opt.seed}};
      write_manifest(opt, "verify campaign", mcfg);

      struct Item {
        std::string label;
        FNSurface surface;
      };
      std::vector<Item> items;
      int idx = 0;
      for (auto& js : cfg.at("surfaces")) {
        Item it;
        if (js.contains("file")) {
          it.surface = load_surface(js.at("file").get<std::string>());
          it.label = js.at("file").get<std::string>();
        } else if (js.contains("genus")) {
          it.surface = uniform_genus_surface(js.at("genus").get<int>(),
                                             js.value("ell", 1.0), opt.seed + idx,
                                             js.value("random_twists", false));
          it.label = "genus" + std::to_string(js.at("genus").get<int>()) + "_" +
                     std::to_string(idx);
        } else if (js.contains("sample_seed")) {
          it.surface = sampled_genus2_surface(js.at("sample_seed").get<uint64_t>());
          it.label = "sample" + std::to_string(js.at("sample_seed").get<uint64_t>());
        } else {
          throw std::invalid_argument("campaign: surface entry needs file/genus/sample_seed");
        }
        items.push_back(std::move(it));
        ++idx;
      }

      int mth = std::min<int>(max_threads(), static_cast<int>(items.size()));
      std::vector<std::vector<std::pair<std::string, Verdict>>> all(items.size());
      std::vector<std::map<std::string, BoundReport>> bnd(items.size());
      std::atomic<size_t> next{0};
      auto worker = [&]() {
        for (size_t s = next.fetch_add(1); s < items.size(); s = next.fetch_add(1)) {
          const auto& it = items[s];
          BoundReport b = bound_report(it.surface);
          bnd[s][it.label] = b;
          if (checks.count("bounds"))
            for (auto& v : b.verdicts) all[s].push_back(std::make_pair(it.label, v));
          if (checks.count("audit") || checks.count("nodal")) {
            SurfaceMesh sm = glue_surface(it.surface, opt.h);
            DiscreteOperator op = assemble(sm.mesh, BoundaryCondition::Neumann);
            int m = opt.m > 0 ? opt.m : -it.surface.euler_char() + 3;
            SpectralResult res = lowest_eigenpairs(op, m, 1e-8, opt.seed);
            if (checks.count("audit"))
              for (auto& v : small_eigenvalue_audit(it.surface, sm.mesh, res, b))
                all[s].push_back({it.label, v});
            if (checks.count("nodal")) {
              Verdict vc;
              vc.name = "courant_domain_counts";
              vc.pass = true;
              int worst = 0;
              for (size_t i = 0; i < res.eigenvalues.size(); ++i) {
                NodalReport rep = nodal_domains(sm.mesh, res.eigenvectors[i]);
                worst = std::max(worst, rep.total() - static_cast<int>(i) - 1);
              }
              vc.pass = worst <= 0;
              vc.lhs = worst;
              vc.rhs = 0;
              all[s].push_back({it.label, vc});
            }
          }
          if (checks.count("collar") && !it.surface.gluings.empty()) {
            SurfaceMesh sm = glue_surface(it.surface, opt.h);
            double L = it.surface.boundary_length(it.surface.gluings[0].from);
            auto shape = collar_subcomplex(sm, 0, collar_width(L));
            Verdict v;
            v.name = "collar_is_annulus";
            v.pass = shape.connected && shape.euler_char == 0 && shape.boundary_loops == 2;
            v.lhs = shape.euler_char;
            v.rhs = 0;
            all[s].push_back({it.label, v});
          }
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < mth; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      for (size_t s = 0; s < items.size(); ++s) {
        for (auto& r : all[s]) rows.push_back(r);
        for (auto& [k2, v2] : bnd[s]) bounds[k2] = v2;
      }
      return finish_checks(opt, rows, bounds);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
