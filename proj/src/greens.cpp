#include "avf/greens.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "avf/error.hpp"
#include "avf/quadrature.hpp"

namespace avf {

struct GreenTable::Factor {
  Eigen::SparseMatrix<double> laplacian;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
};

namespace {

Eigen::SparseMatrix<double> sparse_toppling_matrix(const Graph& g) {
  const int n = g.num_sites();
  std::vector<Eigen::Triplet<double>> triplets;
  for (int v = 0; v < n; ++v) {
    triplets.emplace_back(v, v, g.degree(v) - g.self_loops(v));
    for (const Slot& s : g.slots(v)) {
      if (s.kind == SlotKind::internal) triplets.emplace_back(v, s.target, -1.0);
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace

GreenTable solve_green(const Graph& g) {
  if (g.num_boundary() == 0) throw NumericalError("graph without boundary has a singular Laplacian");
  auto factor = std::make_shared<GreenTable::Factor>();
  factor->laplacian = sparse_toppling_matrix(g);
  factor->solver.compute(factor->laplacian);
  if (factor->solver.info() != Eigen::Success) throw NumericalError("sparse factorization of the Laplacian failed");

  GreenTable table;
  table.graph_ = g;
  const int n = g.num_sites();
  table.column_of_site_.assign(n, -1);
  std::vector<int> attached;
  for (int b = 0; b < g.num_boundary(); ++b) {
    const int v = g.boundary_site(b);
    if (table.column_of_site_[v] < 0) {
      table.column_of_site_[v] = static_cast<int>(attached.size());
      attached.push_back(v);
    }
  }
  const auto m = static_cast<Eigen::Index>(attached.size());
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index j = 0; j < m; ++j) rhs(attached[j], j) = 1.0;
  table.block_ = factor->solver.solve(rhs);
  if (factor->solver.info() != Eigen::Success) throw NumericalError("Green function solve failed");
  table.residual_ = (factor->laplacian * table.block_ - rhs).cwiseAbs().maxCoeff();
  table.factor_ = std::move(factor);
  return table;
}

double GreenTable::row_sum(int u) const {
  double s = 0.0;
  for (int b = 0; b < graph_.num_boundary(); ++b) s += boundary(u, b);
  return s;
}

std::vector<double> GreenTable::site_column(int v) const {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(graph_.num_sites());
  rhs(v) = 1.0;
  const Eigen::VectorXd x = factor_->solver.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

std::vector<double> solve_site_column(const Graph& g, int v) {
  if (g.num_boundary() == 0) throw NumericalError("graph without boundary has a singular Laplacian");
  if (v < 0 || v >= g.num_sites()) throw std::invalid_argument("site out of range");
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(sparse_toppling_matrix(g));
  if (solver.info() != Eigen::Success) throw NumericalError("sparse factorization of the Laplacian failed");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(g.num_sites());
  rhs(v) = 1.0;
  const Eigen::VectorXd x = solver.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

double z_ruv_determinant(const Graph& g, std::span<const int> roots, std::span<const int> us,
                         std::span<const int> vs) {
  const int total = g.num_sites() + g.num_boundary();
  if (us.size() != vs.size()) throw std::invalid_argument("U and V must have equal length");
  if (roots.empty()) throw std::invalid_argument("the Jacobi route needs a non-empty root set");
  std::vector<char> is_root(static_cast<std::size_t>(total), 0);
  for (int r : roots) {
    if (r < 0 || r >= total) throw std::invalid_argument("root vertex out of range");
    is_root[r] = 1;
  }
  for (int v : us) {
    if (v < 0 || v >= total || is_root[v]) throw std::invalid_argument("U vertex out of range or in R");
  }
  for (int v : vs) {
    if (v < 0 || v >= total || is_root[v]) throw std::invalid_argument("V vertex out of range or in R");
  }

  // Dense Laplacian of the extended graph restricted to non-root vertices.
  std::vector<int> index(static_cast<std::size_t>(total), -1);
  int kept = 0;
  for (int v = 0; v < total; ++v) {
    if (!is_root[v]) index[v] = kept++;
  }
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(kept, kept);
  const auto add_edge = [&](int a, int b) {
    if (index[a] >= 0) lap(index[a], index[a]) += 1.0;
    if (index[b] >= 0) lap(index[b], index[b]) += 1.0;
    if (index[a] >= 0 && index[b] >= 0) {
      lap(index[a], index[b]) -= 1.0;
      lap(index[b], index[a]) -= 1.0;
    }
  };
  for (int e = 0; e < g.num_edges(); ++e) add_edge(g.edge_ends(e).first, g.edge_ends(e).second);
  for (int b = 0; b < g.num_boundary(); ++b) add_edge(g.boundary_site(b), g.num_sites() + b);

  if (kept == 0) return us.empty() ? 1.0 : 0.0;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lap);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13)) {
    throw NumericalError("restricted Laplacian is ill-conditioned (reciprocal condition estimate " +
                         std::to_string(rcond) + ")");
  }
  const double det = lu.determinant();
  if (us.empty()) return det;
  const Eigen::MatrixXd green = lu.inverse();
  const auto k = static_cast<Eigen::Index>(us.size());
  Eigen::MatrixXd minor(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) minor(i, j) = green(index[us[i]], index[vs[j]]);
  }
  return det * minor.determinant();
}

double asymptotic_bd_green(double x, double y) {
  const double r2 = x * x + y * y;
  if (r2 == 0.0) throw std::invalid_argument("boundary Green function is singular at the origin");
  return y / (std::numbers::pi * r2);
}

double asymptotic_bd_green_dx(double x, double y) {
  const double r2 = x * x + y * y;
  return -2.0 * x * y / (std::numbers::pi * r2 * r2);
}

double asymptotic_bd_green_dy(double x, double y) {
  const double r2 = x * x + y * y;
  return (x * x - y * y) / (std::numbers::pi * r2 * r2);
}

double ObservableMatrix::determinant() const {
  const auto& m = entries;
  if (k == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Derivatives are taken with respect to the observation point (x, y), so the
// x-derivative of G_bd(x_i - x, y) flips sign.
ObservableMatrix triple_point_matrix(double x, double y, std::array<double, 3> xs) {
  ObservableMatrix m;
  m.k = 3;
  for (int i = 0; i < 3; ++i) {
    const double dx = xs[i] - x;
    m.entries[i] = {asymptotic_bd_green(dx, y), -asymptotic_bd_green_dx(dx, y), asymptotic_bd_green_dy(dx, y)};
  }
  return m;
}

ObservableMatrix pair_matrix(double x, double y, std::array<double, 2> xs) {
  ObservableMatrix m;
  m.k = 2;
  for (int i = 0; i < 2; ++i) {
    const double dx = xs[i] - x;
    m.entries[i] = {asymptotic_bd_green(dx, y), -asymptotic_bd_green_dx(dx, y), 0.0};
  }
  return m;
}

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// Boundary points are parametrised by the angle under which they are seen
// from the observation point, x = x0 + y tan(theta). In that variable the
// harmonic measure is flat and every integrand below is bounded and smooth.
double boundary_point(double x0, double y, double theta) { return x0 + y * std::tan(theta); }
double jacobian(double y, double theta) {
  const double c = std::cos(theta);
  return y / (c * c);
}

}  // namespace

double triple_point_density(double y) {
  if (!(y > 0)) throw std::invalid_argument("height must be positive");
  const quad::Options outer{1e-13 / (y * y), 1e-9, 2000};
  const quad::Options middle{1e-14 / (y * y), 1e-11, 2000};
  const quad::Options inner{1e-15 / (y * y), 1e-12, 2000};
  auto over_t1 = [&](double t1) {
    const double x1 = boundary_point(0.0, y, t1);
    auto over_t2 = [&](double t2) {
      const double x2 = boundary_point(0.0, y, t2);
      auto over_t3 = [&](double t3) {
        const double x3 = boundary_point(0.0, y, t3);
        return triple_point_matrix(0.0, y, {x1, x2, x3}).determinant() * jacobian(y, t3);
      };
      return quad::require(quad::integrate(over_t3, t2, kHalfPi, inner), "triple density x3") * jacobian(y, t2);
    };
    return quad::require(quad::integrate(over_t2, t1, kHalfPi, middle), "triple density x2") * jacobian(y, t1);
  };
  return quad::require(quad::integrate(over_t1, -kHalfPi, kHalfPi, outer), "triple density x1");
}

double interface_density(double y) {
  if (!(y > 0)) throw std::invalid_argument("height must be positive");
  const quad::Options outer{1e-13 / y, 1e-10, 2000};
  const quad::Options inner{1e-15 / y, 1e-12, 2000};
  auto over_t1 = [&](double t1) {
    const double x1 = boundary_point(0.0, y, t1);
    auto over_t2 = [&](double t2) {
      const double x2 = boundary_point(0.0, y, t2);
      return pair_matrix(0.0, y, {x1, x2}).determinant() * jacobian(y, t2);
    };
    return quad::require(quad::integrate(over_t2, t1, kHalfPi, inner), "interface density x2") * jacobian(y, t1);
  };
  return quad::require(quad::integrate(over_t1, -kHalfPi, kHalfPi, outer), "interface density x1");
}

double triple_point_weight(std::array<double, 3> xs) {
  std::sort(xs.begin(), xs.end());
  const double spread = xs[2] - xs[0];
  const double gap = std::min(xs[1] - xs[0], xs[2] - xs[1]);
  if (!(gap > 0)) throw std::invalid_argument("boundary points must be distinct");
  const quad::Options outer{1e-13, 1e-9, 2000};
  const quad::Options inner{1e-15, 1e-11, 2000};
  // For fixed y the x-integrand has peaks of width y at each boundary point.
  // Each piece between a boundary point and a neighbouring midpoint (or
  // infinity) is integrated in the angle seen from that boundary point.
  auto over_y = [&](double y) {
    auto piece = [&](double anchor, double length, double direction) {
      const double top = length == 0.0 ? kHalfPi : std::atan(length / y);
      auto f = [&](double t) {
        const double x = anchor + direction * y * std::tan(t);
        return triple_point_matrix(x, y, xs).determinant() * jacobian(y, t);
      };
      return quad::require(quad::integrate(f, 0.0, top, inner), "weight over x");
    };
    const double m01 = 0.5 * (xs[1] - xs[0]);
    const double m12 = 0.5 * (xs[2] - xs[1]);
    return piece(xs[0], 0.0, -1.0) + piece(xs[0], m01, 1.0) + piece(xs[1], m01, -1.0) + piece(xs[1], m12, 1.0) +
           piece(xs[2], m12, -1.0) + piece(xs[2], 0.0, 1.0);
  };
  double total = quad::require(quad::integrate(over_y, 0.0, gap, outer), "weight over y, near");
  total += quad::require(quad::integrate(over_y, gap, spread, outer), "weight over y, middle");
  total += quad::require(quad::integrate_improper(over_y, spread, std::numeric_limits<double>::infinity(), spread, outer),
                         "weight over y, far");
  return total;
}

}  // namespace avf
