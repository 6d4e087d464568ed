#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "avf/graph.hpp"

namespace avf {

/// Correction factor of the boundary Green function on the triangular
/// lattice at unit site density, 2^(1/2) 3^(-1/4). Not used on the square
/// lattice.
inline const double kTriangularGreenFactor = std::sqrt(2.0) * std::pow(3.0, -0.25);

/// Inverse of the toppling matrix of a graph, with boundary columns.
///
/// G(u, v) for sites u, v solves L G(., v) = delta_v. The boundary value
/// G(u, b) = G(u, site(b)) is the probability that a walk from u is absorbed
/// through half-edge b, so the boundary values of each row sum to one.
class GreenTable {
 public:
  const Graph& graph() const { return graph_; }
  double boundary(int u, int b) const { return block_(u, column_of_site_[graph_.boundary_site(b)]); }
  double row_sum(int u) const;
  /// Column G(., v), solved on demand against the stored factorization.
  std::vector<double> site_column(int v) const;
  /// Max-norm residual of L X - E over the stored boundary columns.
  double residual() const { return residual_; }

  friend GreenTable solve_green(const Graph& g);

 private:
  struct Factor;
  Graph graph_;
  std::shared_ptr<const Factor> factor_;
  Eigen::MatrixXd block_;  // V x (number of boundary-attached sites)
  std::vector<int> column_of_site_;
  double residual_ = 0.0;
};

/// Sparse Cholesky solve of the toppling matrix, all boundary columns.
GreenTable solve_green(const Graph& g);

/// Single column G(., v) without building a table; for large domains where
/// only a few sources are needed.
std::vector<double> solve_site_column(const Graph& g, int v);

/// Z_{R,U,V} as det(L_R) det[G_R(u_i, v_j)], with L_R the Laplacian of the
/// extended graph (sites plus one outer vertex per boundary half-edge,
/// numbered as in exact.hpp) restricted to vertices outside R, and G_R its
/// inverse. R must be non-empty. Throws NumericalError on an ill-conditioned
/// restriction.
double z_ruv_determinant(const Graph& g, std::span<const int> roots, std::span<const int> us,
                         std::span<const int> vs);

/// Half-plane boundary Green function (1/pi) y / (x^2 + y^2).
double asymptotic_bd_green(double x, double y);
double asymptotic_bd_green_dx(double x, double y);
double asymptotic_bd_green_dy(double x, double y);

/// k x k matrix with rows indexed by boundary points x_i and columns
/// (G, dG/dx, dG/dy) truncated to k, G = G_bd(x_i - x, y) seen from the
/// observation point (x, y).
struct ObservableMatrix {
  int k = 0;
  std::array<std::array<double, 3>, 3> entries{};
  double determinant() const;
};

ObservableMatrix triple_point_matrix(double x, double y, std::array<double, 3> xs);
ObservableMatrix pair_matrix(double x, double y, std::array<double, 2> xs);

/// Integral of det M[0, y, (x1, x2, x3)] over x1 <= x2 <= x3; tends to
/// 1 / (2 pi y^2).
double triple_point_density(double y);

/// Integral of det M'[0, y, (x1, x2)] over x1 <= x2; tends to 1 / (pi y).
double interface_density(double y);

/// Integral of det M[x, y, (x1, x2, x3)] over the upper half-plane.
double triple_point_weight(std::array<double, 3> xs);

inline double closed_form_triple_density(double y) { return 1.0 / (2.0 * std::numbers::pi * y * y); }
inline double closed_form_interface_density(double y) { return 1.0 / (std::numbers::pi * y); }

}  // namespace avf
