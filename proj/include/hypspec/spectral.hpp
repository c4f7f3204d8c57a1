// P1 finite elements on intrinsic meshes: cotangent stiffness from the
// Euclidean comparison triangle of each edge-length triple, lumped mass from
// the true (hyperbolic or flat) triangle areas, and a blocked shift-invert
// eigensolver for the lowest part of the (K, M) pencil.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypspec/mesh.hpp"

namespace hypspec {

enum class BoundaryCondition { Dirichlet, Neumann };

inline std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

struct DiscreteOperator {
  Eigen::SparseMatrix<double> stiffness;  // ndof x ndof, symmetric PSD
  Eigen::SparseMatrix<double> mass;       // diagonal, positive
  Eigen::VectorXd mass_diag;
  std::vector<int> dof_of_vertex;  // -1 for eliminated Dirichlet vertices
  std::vector<int> vertex_of_dof;
  BoundaryCondition bc = BoundaryCondition::Neumann;
  double h_max = 0;
  uint64_t mesh_hash = 0;

  int ndof() const { return static_cast<int>(vertex_of_dof.size()); }
};

// Dirichlet vertices: loops tagged Dirichlet always; GlueSeam loops when the
// requested condition is Dirichlet; cusp rims stay natural (Neumann) because
// truncation only perturbs the spectrum near the essential floor.
inline DiscreteOperator assemble(const HyperbolicMesh& mesh, BoundaryCondition bc) {
  mesh.validate();

  std::vector<char> eliminated(mesh.vertex_count, 0);
  for (const auto& loop : mesh.boundary_loops) {
    bool kill = loop.tag == BoundaryTag::Dirichlet ||
                (loop.tag == BoundaryTag::GlueSeam && bc == BoundaryCondition::Dirichlet);
    if (!kill) continue;
    for (int v : loop.vertices) eliminated[v] = 1;
  }

  DiscreteOperator op;
  op.bc = bc;
  op.mesh_hash = mesh.hash();
  op.dof_of_vertex.assign(mesh.vertex_count, -1);
  for (int v = 0; v < mesh.vertex_count; ++v)
    if (!eliminated[v]) {
      op.dof_of_vertex[v] = static_cast<int>(op.vertex_of_dof.size());
      op.vertex_of_dof.push_back(v);
    }
  int n = op.ndof();
  if (n == 0) throw std::runtime_error("assemble: no degrees of freedom remain");

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.triangles.size() * 9);
  Eigen::VectorXd lumped = Eigen::VectorXd::Zero(n);

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tri = mesh.triangles[t];
    auto [a, b, c] = mesh.triangle_lengths(t);  // opposite tri[0], tri[1], tri[2]
    double s = 0.5 * (a + b + c);
    double area_e = std::sqrt(std::max(0.0, s * (s - a) * (s - b) * (s - c)));
    if (!(area_e > 0)) throw std::runtime_error("assemble: zero-area comparison triangle");
    double cot0 = (-a * a + b * b + c * c) / (4.0 * area_e);
    double cot1 = (-b * b + a * a + c * c) / (4.0 * area_e);
    double cot2 = (-c * c + a * a + b * b) / (4.0 * area_e);
    const double w[3] = {0.5 * cot0, 0.5 * cot1, 0.5 * cot2};  // weight of edge opposite i

    double area_h = mesh.triangle_area(t);
    for (int i = 0; i < 3; ++i) {
      int vi = tri[i];
      if (op.dof_of_vertex[vi] >= 0) lumped[op.dof_of_vertex[vi]] += area_h / 3.0;
    }
    for (int i = 0; i < 3; ++i) {
      int u = tri[(i + 1) % 3], v = tri[(i + 2) % 3];
      int du = op.dof_of_vertex[u], dv = op.dof_of_vertex[v];
      if (du >= 0 && dv >= 0) {
        trips.emplace_back(du, dv, -w[i]);
        trips.emplace_back(dv, du, -w[i]);
      }
      if (du >= 0) trips.emplace_back(du, du, w[i]);
      if (dv >= 0) trips.emplace_back(dv, dv, w[i]);
    }
  }

  op.stiffness.resize(n, n);
  op.stiffness.setFromTriplets(trips.begin(), trips.end());
  op.mass_diag = lumped;
  for (int i = 0; i < n; ++i)
    if (!(lumped[i] > 0)) throw std::runtime_error("assemble: nonpositive lumped mass entry");
  std::vector<Eigen::Triplet<double>> mt;
  mt.reserve(n);
  for (int i = 0; i < n; ++i) mt.emplace_back(i, i, lumped[i]);
  op.mass.resize(n, n);
  op.mass.setFromTriplets(mt.begin(), mt.end());
  op.h_max = mesh.quality().h_max;
  return op;
}

struct SpectralResult {
  std::vector<double> eigenvalues;              // ascending
  std::vector<Eigen::VectorXd> eigenvectors;    // vertex-indexed, M-orthonormal
  std::vector<double> residual_norms;           // ||K v - lambda M v|| / ||M v||
  double h_max = 0;
  BoundaryCondition bc = BoundaryCondition::Neumann;
  int iterations = 0;
  bool converged = false;
  uint64_t mesh_hash = 0;
  uint64_t seed = 0;
};

// Raw Rayleigh quotient of a vertex function against the assembled pencil.
inline double rayleigh_quotient(const DiscreteOperator& op, const Eigen::VectorXd& f_vertex) {
  if (f_vertex.size() != static_cast<Eigen::Index>(op.dof_of_vertex.size()))
    throw std::invalid_argument("rayleigh_quotient: function must be vertex-indexed");
  Eigen::VectorXd f(op.ndof());
  for (int d = 0; d < op.ndof(); ++d) f[d] = f_vertex[op.vertex_of_dof[d]];
  double m = f.dot(op.mass_diag.cwiseProduct(f));
  if (!(m > 0))
    throw std::invalid_argument("rayleigh_quotient: function vanishes after Dirichlet elimination");
  double k = f.dot(op.stiffness * f);
  return k / m;
}

// Blocked shift-invert subspace iteration with Rayleigh-Ritz projection.
// Deterministic for a fixed seed; residual and M-orthogonality targets are
// part of the contract, the algorithm is not.
inline SpectralResult lowest_eigenpairs(const DiscreteOperator& op, int m, double tol = 1e-8,
                                        uint64_t seed = 0) {
  int n = op.ndof();
  if (m < 1 || m >= n)
    throw std::invalid_argument("lowest_eigenpairs: need 1 <= m < dof count");

  // Small negative shift keeps K - sigma*M positive definite (K is PSD).
  double scale = op.stiffness.diagonal().sum() / op.mass_diag.sum();
  double sigma = -std::max(1e-12, 1e-6 * scale);
  Eigen::SparseMatrix<double> shifted = op.stiffness - sigma * op.mass;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(shifted);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("lowest_eigenpairs: factorization of the shifted pencil failed");

  int p = std::min(n, m + std::max(8, m / 2));
  std::mt19937_64 rng(seed ^ 0x5eed5eed5eedull);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = unif(rng);

  auto m_orthonormalize = [&](Eigen::MatrixXd& Y) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < Y.cols(); ++j) {
        for (int k = 0; k < j; ++k) {
          double proj = Y.col(k).dot(op.mass_diag.cwiseProduct(Y.col(j)));
          Y.col(j) -= proj * Y.col(k);
        }
        double nrm = std::sqrt(Y.col(j).dot(op.mass_diag.cwiseProduct(Y.col(j))));
        if (nrm < 1e-14) {
          for (int i = 0; i < n; ++i) Y(i, j) = unif(rng);
          nrm = std::sqrt(Y.col(j).dot(op.mass_diag.cwiseProduct(Y.col(j))));
        }
        Y.col(j) /= nrm;
      }
    }
  };
  m_orthonormalize(X);

  SpectralResult res;
  res.bc = op.bc;
  res.h_max = op.h_max;
  res.mesh_hash = op.mesh_hash;
  res.seed = seed;

  Eigen::VectorXd ritz;
  const int max_iter = 400;
  int it = 0;
  for (; it < max_iter; ++it) {
    Eigen::MatrixXd Y = solver.solve(op.mass_diag.asDiagonal() * X);
    m_orthonormalize(Y);
    Eigen::MatrixXd A = Y.transpose() * (op.stiffness * Y);
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    X = Y * es.eigenvectors();
    ritz = es.eigenvalues();

    bool ok = true;
    for (int j = 0; j < m && ok; ++j) {
      Eigen::VectorXd r = op.stiffness * X.col(j) - ritz[j] * op.mass_diag.cwiseProduct(X.col(j));
      double denom = (op.mass_diag.cwiseProduct(X.col(j))).norm();
      if (r.norm() > tol * denom) ok = false;
    }
    if (ok) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.iterations = it;

  res.eigenvalues.resize(m);
  res.residual_norms.resize(m);
  res.eigenvectors.resize(m);
  for (int j = 0; j < m; ++j) {
    res.eigenvalues[j] = ritz[j];
    Eigen::VectorXd r = op.stiffness * X.col(j) - ritz[j] * op.mass_diag.cwiseProduct(X.col(j));
    res.residual_norms[j] = r.norm() / (op.mass_diag.cwiseProduct(X.col(j))).norm();
    Eigen::VectorXd full = Eigen::VectorXd::Zero(op.dof_of_vertex.size());
    for (int d = 0; d < n; ++d) full[op.vertex_of_dof[d]] = X(d, j);
    res.eigenvectors[j] = full;
  }
  if (!res.converged) {
    std::string msg = "lowest_eigenpairs: no convergence after " + std::to_string(max_iter) +
                      " iterations; residuals:";
    for (double r : res.residual_norms) msg += " " + std::to_string(r);
    throw std::runtime_error(msg);
  }
  return res;
}

// Group eigenvalues into clusters separated by a relative gap.
inline std::vector<std::pair<int, int>> cluster_eigenvalues(const std::vector<double>& ev,
                                                            double rel_gap = 1e-4) {
  std::vector<std::pair<int, int>> out;
  int start = 0;
  for (int i = 1; i <= static_cast<int>(ev.size()); ++i) {
    bool split = i == static_cast<int>(ev.size());
    if (!split) {
      double gap = ev[i] - ev[i - 1];
      double ref = std::max({std::abs(ev[i]), std::abs(ev[i - 1]), 1e-9});
      split = gap > rel_gap * ref;
    }
    if (split) {
      out.push_back({start, i});
      start = i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

struct ConvergenceStudy {
  std::vector<double> h;                        // decreasing
  std::vector<std::vector<double>> eigenvalues; // per h
  std::vector<double> extrapolated;             // Richardson assuming O(h^2)
  std::vector<double> observed_order;           // NaN when non-monotone
  bool monotone = true;
};

// Pure arithmetic part, separated for testing: Richardson extrapolation from
// the two finest levels assuming O(h^2), plus the observed order fitted from
// the last three levels.
inline ConvergenceStudy convergence_from_values(const std::vector<double>& h,
                                                const std::vector<std::vector<double>>& values) {
  if (h.size() < 3) throw std::invalid_argument("convergence study needs at least 3 mesh sizes");
  for (size_t i = 1; i < h.size(); ++i)
    if (!(h[i] < h[i - 1]))
      throw std::invalid_argument("convergence study needs strictly decreasing mesh sizes");
  ConvergenceStudy cs;
  cs.h = h;
  cs.eigenvalues = values;
  size_t m = values.front().size();
  size_t L = h.size();
  for (size_t j = 0; j < m; ++j) {
    double l1 = values[L - 3][j], l2 = values[L - 2][j], l3 = values[L - 1][j];
    double h2 = h[L - 2], h3 = h[L - 1];
    cs.extrapolated.push_back((l3 * h2 * h2 - l2 * h3 * h3) / (h2 * h2 - h3 * h3));
    double d12 = l1 - l2, d23 = l2 - l3;
    if (d12 * d23 <= 0) {
      cs.monotone = false;
      cs.observed_order.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    // Solve (h1^p - h2^p)/(h2^p - h3^p) = d12/d23 for p by bisection.
    double target = d12 / d23;
    double h1 = h[L - 3];
    auto f = [&](double pp) {
      return (std::pow(h1, pp) - std::pow(h2, pp)) / (std::pow(h2, pp) - std::pow(h3, pp)) -
             target;
    };
    double lo = 0.1, hi = 8.0;
    if (f(lo) * f(hi) > 0) {
      cs.observed_order.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (f(lo) * f(mid) <= 0 ? hi : lo) = mid;
    }
    cs.observed_order.push_back(0.5 * (lo + hi));
  }
  return cs;
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

inline void write_spectrum_csv(const SpectralResult& res, std::ostream& os) {
  os << "index,eigenvalue,residual\n";
  for (size_t i = 0; i < res.eigenvalues.size(); ++i)
    os << i << "," << format_double(res.eigenvalues[i]) << ","
       << format_double(res.residual_norms[i]) << "\n";
}

inline void save_spectrum_csv(const SpectralResult& res, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_spectrum_csv(res, os);
}

}  // namespace hypspec
