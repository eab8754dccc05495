#pragma once

// Lagrange finite elements (bilinear or biquadratic) on a uniform
// quadrilateral grid of the unit square with homogeneous Dirichlet
// boundary conditions. Boundary dofs are eliminated at assembly time.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sgeig {

using SparseMatrix = Eigen::SparseMatrix<double>;

class Mesh {
public:
    /// n cells per side, element order 1 or 2.
    Mesh(int cells_per_side, int order);

    [[nodiscard]] int cells_per_side() const noexcept { return n_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] double cell_size() const noexcept { return 1.0 / n_; }
    /// Nodes per side including the boundary, order * n + 1.
    [[nodiscard]] int nodes_per_side() const noexcept { return order_ * n_ + 1; }
    [[nodiscard]] std::size_t node_count() const noexcept;
    /// Interior dofs, (order * n - 1)^2.
    [[nodiscard]] std::size_t dof_count() const noexcept;

    /// Interior dof number of grid node (i, j), or -1 on the boundary.
    [[nodiscard]] int dof_of_node(int i, int j) const noexcept;
    [[nodiscard]] Eigen::Vector2d node_coordinates(int i, int j) const noexcept;
    [[nodiscard]] Eigen::Vector2d dof_coordinates(std::size_t dof) const;

private:
    int n_;
    int order_;
};

[[nodiscard]] Mesh build_mesh(int cells_per_side, int order);

/// a_0 = 1; for m >= 1, (m+1)^{-varsigma} sin(m pi x_1) for odd m and
/// (m+1)^{-varsigma} sin(m pi x_2) for even m.
struct CoefficientTerm {
    int m = 0;
    double varsigma = 3.2;

    [[nodiscard]] double amplitude() const;
    [[nodiscard]] double operator()(double x1, double x2) const;
    /// 0 for the constant term, otherwise the coordinate (1 or 2) it varies along.
    [[nodiscard]] int direction() const noexcept { return m == 0 ? 0 : (m % 2 == 1 ? 1 : 2); }
};

struct QuadratureOptions {
    /// Gauss points per direction for smooth integrands; 0 means order + 2.
    int base_points = 0;
    /// Add ceil(m pi h) points along the oscillating direction of a_m.
    bool resolve_oscillation = true;
};

[[nodiscard]] SparseMatrix assemble_mass(const Mesh& mesh);
/// Mass matrix over all nodes, boundary included.
[[nodiscard]] SparseMatrix assemble_mass_full(const Mesh& mesh);
[[nodiscard]] SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientTerm& term,
                                              const QuadratureOptions& quad = {});
/// Stiffness for an arbitrary coefficient function using (points x points) Gauss points.
[[nodiscard]] SparseMatrix assemble_stiffness(const Mesh& mesh, const std::function<double(double, double)>& a,
                                              int points);

/// Mass matrix M plus the stiffness family K^(0..M), all on one sparsity pattern.
struct ParametricOperator {
    SparseMatrix mass;
    std::vector<SparseMatrix> stiffness;

    [[nodiscard]] std::size_t dof_count() const { return static_cast<std::size_t>(mass.rows()); }
    /// Number of parametric terms M (stiffness.size() - 1).
    [[nodiscard]] std::size_t terms() const { return stiffness.empty() ? 0 : stiffness.size() - 1; }
};

[[nodiscard]] ParametricOperator build_parametric_operator(const Mesh& mesh, std::size_t terms, double varsigma,
                                                           const QuadratureOptions& quad = {});

/// K(y) = K^(0) + sum_{m=1}^{M} y_m K^(m). y must have at least M entries.
[[nodiscard]] SparseMatrix assemble_pointwise(const ParametricOperator& op, std::span<const double> y);

/// Value of the finite element function with interior coefficients u at x.
[[nodiscard]] double evaluate_field(const Mesh& mesh, const Eigen::VectorXd& u, double x1, double x2);

/// Interpolates a coarse field onto a finer nested mesh of the same order.
/// Exact when fine.cells_per_side() is a multiple of coarse.cells_per_side().
[[nodiscard]] Eigen::VectorXd prolongate(const Mesh& coarse, const Mesh& fine, const Eigen::VectorXd& u);

/// ||u_h - f||_{L2(D)} by cellwise Gauss quadrature.
[[nodiscard]] double l2_distance(const Mesh& mesh, const Eigen::VectorXd& u,
                                 const std::function<double(double, double)>& f);

}  // namespace sgeig
