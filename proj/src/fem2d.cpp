#include "sgeig/fem2d.hpp"

#include "sgeig/legendre.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgeig {

Mesh::Mesh(int cells_per_side, int order) : n_(cells_per_side), order_(order) {
    if (order != 1 && order != 2) throw std::invalid_argument("element order must be 1 or 2");
    if (cells_per_side < 2) throw std::invalid_argument("mesh needs at least 2 cells per side");
}

std::size_t Mesh::node_count() const noexcept {
    const auto s = static_cast<std::size_t>(nodes_per_side());
    return s * s;
}

std::size_t Mesh::dof_count() const noexcept {
    const auto s = static_cast<std::size_t>(nodes_per_side() - 2);
    return s * s;
}

int Mesh::dof_of_node(int i, int j) const noexcept {
    const int last = nodes_per_side() - 1;
    if (i <= 0 || j <= 0 || i >= last || j >= last) return -1;
    return (j - 1) * (last - 1) + (i - 1);
}

Eigen::Vector2d Mesh::node_coordinates(int i, int j) const noexcept {
    const double step = cell_size() / order_;
    return {i * step, j * step};
}

Eigen::Vector2d Mesh::dof_coordinates(std::size_t dof) const {
    const int inner = nodes_per_side() - 2;
    if (dof >= dof_count()) throw std::out_of_range("dof index out of range");
    const int i = static_cast<int>(dof % inner) + 1;
    const int j = static_cast<int>(dof / inner) + 1;
    return node_coordinates(i, j);
}

Mesh build_mesh(int cells_per_side, int order) { return Mesh(cells_per_side, order); }

double CoefficientTerm::amplitude() const {
    return m == 0 ? 1.0 : std::pow(static_cast<double>(m) + 1.0, -varsigma);
}

double CoefficientTerm::operator()(double x1, double x2) const {
    if (m == 0) return 1.0;
    const double x = (m % 2 == 1) ? x1 : x2;
    return amplitude() * std::sin(m * std::numbers::pi * x);
}

namespace {

// 1D Lagrange shape functions on [0,1] with equispaced nodes.
struct Shape1D {
    int order;

    [[nodiscard]] int count() const { return order + 1; }

    [[nodiscard]] double value(int a, double t) const {
        if (order == 1) return a == 0 ? 1.0 - t : t;
        switch (a) {
            case 0: return 2.0 * (t - 0.5) * (t - 1.0);
            case 1: return -4.0 * t * (t - 1.0);
            default: return 2.0 * t * (t - 0.5);
        }
    }

    [[nodiscard]] double derivative(int a, double t) const {
        if (order == 1) return a == 0 ? -1.0 : 1.0;
        switch (a) {
            case 0: return 4.0 * t - 3.0;
            case 1: return -8.0 * t + 4.0;
            default: return 4.0 * t - 1.0;
        }
    }
};

struct Tabulated {
    std::vector<double> t, w;    // points and weights on [0,1], weights sum to 1
    std::vector<double> v, d;    // v[k * count + a]
};

Tabulated tabulate(const Shape1D& shape, int points) {
    const auto& rule = gauss_legendre(static_cast<std::size_t>(points));
    Tabulated tab;
    const int nb = shape.count();
    for (int k = 0; k < points; ++k) {
        const double t = 0.5 * (rule.nodes[k] + 1.0);
        tab.t.push_back(t);
        tab.w.push_back(rule.weights[k]);
        for (int a = 0; a < nb; ++a) {
            tab.v.push_back(shape.value(a, t));
            tab.d.push_back(shape.derivative(a, t));
        }
    }
    return tab;
}

enum class Form { Mass, Stiffness };

SparseMatrix assemble_impl(const Mesh& mesh, bool interior_only, Form form,
                           const std::function<double(double, double)>& coefficient, int qx, int qy) {
    const Shape1D shape{mesh.order()};
    const int nb = shape.count();
    const int nloc = nb * nb;
    const Tabulated tx = tabulate(shape, qx);
    const Tabulated ty = tabulate(shape, qy);
    const double h = mesh.cell_size();
    const int n = mesh.cells_per_side();
    const int side = mesh.nodes_per_side();

    const auto size = static_cast<Eigen::Index>(interior_only ? mesh.dof_count() : mesh.node_count());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * n * nloc * nloc);
    std::vector<int> index(nloc);
    Eigen::MatrixXd local(nloc, nloc);

    for (int ey = 0; ey < n; ++ey) {
        for (int ex = 0; ex < n; ++ex) {
            local.setZero();
            for (int ky = 0; ky < qy; ++ky) {
                for (int kx = 0; kx < qx; ++kx) {
                    const double x1 = (ex + tx.t[kx]) * h;
                    const double x2 = (ey + ty.t[ky]) * h;
                    const double c = coefficient(x1, x2) * tx.w[kx] * ty.w[ky];
                    if (c == 0.0) continue;
                    for (int i = 0; i < nloc; ++i) {
                        const int ia = i % nb, ib = i / nb;
                        const double vi = tx.v[kx * nb + ia] * ty.v[ky * nb + ib];
                        const double gxi = tx.d[kx * nb + ia] * ty.v[ky * nb + ib];
                        const double gyi = tx.v[kx * nb + ia] * ty.d[ky * nb + ib];
                        for (int j = 0; j < nloc; ++j) {
                            const int ja = j % nb, jb = j / nb;
                            if (form == Form::Mass) {
                                local(i, j) += c * vi * tx.v[kx * nb + ja] * ty.v[ky * nb + jb];
                            } else {
                                const double gxj = tx.d[kx * nb + ja] * ty.v[ky * nb + jb];
                                const double gyj = tx.v[kx * nb + ja] * ty.d[ky * nb + jb];
                                local(i, j) += c * (gxi * gxj + gyi * gyj);
                            }
                        }
                    }
                }
            }
            // Jacobian: h^2 area factor; gradients scale by 1/h each.
            local *= (form == Form::Mass) ? h * h : 1.0;
            for (int i = 0; i < nloc; ++i) {
                const int gi = mesh.order() * ex + i % nb;
                const int gj = mesh.order() * ey + i / nb;
                index[i] = interior_only ? mesh.dof_of_node(gi, gj) : gj * side + gi;
            }
            for (int i = 0; i < nloc; ++i) {
                if (index[i] < 0) continue;
                for (int j = 0; j < nloc; ++j) {
                    if (index[j] < 0) continue;
                    triplets.emplace_back(index[i], index[j], local(i, j));
                }
            }
        }
    }
    SparseMatrix mat(size, size);
    mat.setFromTriplets(triplets.begin(), triplets.end());
    mat.makeCompressed();
    return mat;
}

// Symmetrize exactly: assembly sums the same products in a different order
// for (i,j) and (j,i) only through rounding, so average the two.
SparseMatrix symmetrized(const SparseMatrix& a) {
    SparseMatrix at = a.transpose();
    SparseMatrix s = 0.5 * (a + at);
    s.makeCompressed();
    return s;
}

int base_points(const Mesh& mesh, const QuadratureOptions& quad) {
    return quad.base_points > 0 ? quad.base_points : mesh.order() + 2;
}

}  // namespace

SparseMatrix assemble_mass(const Mesh& mesh) {
    const int q = mesh.order() + 2;
    return symmetrized(assemble_impl(mesh, true, Form::Mass, [](double, double) { return 1.0; }, q, q));
}

SparseMatrix assemble_mass_full(const Mesh& mesh) {
    const int q = mesh.order() + 2;
    return symmetrized(assemble_impl(mesh, false, Form::Mass, [](double, double) { return 1.0; }, q, q));
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientTerm& term, const QuadratureOptions& quad) {
    const int q0 = base_points(mesh, quad);
    int qx = q0;
    int qy = q0;
    if (term.direction() != 0 && quad.resolve_oscillation) {
        const int extra = static_cast<int>(std::ceil(term.m * std::numbers::pi * mesh.cell_size()));
        (term.direction() == 1 ? qx : qy) += extra;
    }
    return symmetrized(assemble_impl(mesh, true, Form::Stiffness, std::cref(term), qx, qy));
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const std::function<double(double, double)>& a, int points) {
    return symmetrized(assemble_impl(mesh, true, Form::Stiffness, a, points, points));
}

ParametricOperator build_parametric_operator(const Mesh& mesh, std::size_t terms, double varsigma,
                                             const QuadratureOptions& quad) {
    ParametricOperator op;
    op.mass = assemble_mass(mesh);
    op.stiffness.reserve(terms + 1);
    for (std::size_t m = 0; m <= terms; ++m) {
        op.stiffness.push_back(assemble_stiffness(mesh, CoefficientTerm{static_cast<int>(m), varsigma}, quad));
    }
    return op;
}

SparseMatrix assemble_pointwise(const ParametricOperator& op, std::span<const double> y) {
    const std::size_t terms = op.terms();
    if (y.size() < terms) throw std::invalid_argument("parameter point shorter than the number of terms");
    SparseMatrix k = op.stiffness.front();
    auto values = Eigen::Map<Eigen::VectorXd>(k.valuePtr(), k.nonZeros());
    for (std::size_t m = 1; m <= terms; ++m) {
        const auto& km = op.stiffness[m];
        if (km.nonZeros() != k.nonZeros()) throw std::logic_error("stiffness matrices do not share a pattern");
        values += y[m - 1] * Eigen::Map<const Eigen::VectorXd>(km.valuePtr(), km.nonZeros());
    }
    return k;
}

double evaluate_field(const Mesh& mesh, const Eigen::VectorXd& u, double x1, double x2) {
    const int n = mesh.cells_per_side();
    const double h = mesh.cell_size();
    const int ex = std::clamp(static_cast<int>(std::floor(x1 / h)), 0, n - 1);
    const int ey = std::clamp(static_cast<int>(std::floor(x2 / h)), 0, n - 1);
    const double tx = x1 / h - ex;
    const double ty = x2 / h - ey;
    const Shape1D shape{mesh.order()};
    double value = 0.0;
    for (int b = 0; b < shape.count(); ++b) {
        for (int a = 0; a < shape.count(); ++a) {
            const int dof = mesh.dof_of_node(mesh.order() * ex + a, mesh.order() * ey + b);
            if (dof < 0) continue;
            value += u[dof] * shape.value(a, tx) * shape.value(b, ty);
        }
    }
    return value;
}

Eigen::VectorXd prolongate(const Mesh& coarse, const Mesh& fine, const Eigen::VectorXd& u) {
    if (u.size() != static_cast<Eigen::Index>(coarse.dof_count())) {
        throw std::invalid_argument("prolongate: vector does not match the coarse mesh");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(fine.dof_count()));
    for (std::size_t d = 0; d < fine.dof_count(); ++d) {
        const auto x = fine.dof_coordinates(d);
        out[static_cast<Eigen::Index>(d)] = evaluate_field(coarse, u, x[0], x[1]);
    }
    return out;
}

double l2_distance(const Mesh& mesh, const Eigen::VectorXd& u, const std::function<double(double, double)>& f) {
    const int q = mesh.order() + 4;
    const auto& rule = gauss_legendre(static_cast<std::size_t>(q));
    const double h = mesh.cell_size();
    const int n = mesh.cells_per_side();
    double sum = 0.0;
    for (int ey = 0; ey < n; ++ey) {
        for (int ex = 0; ex < n; ++ex) {
            for (int ky = 0; ky < q; ++ky) {
                for (int kx = 0; kx < q; ++kx) {
                    const double x1 = (ex + 0.5 * (rule.nodes[kx] + 1.0)) * h;
                    const double x2 = (ey + 0.5 * (rule.nodes[ky] + 1.0)) * h;
                    const double diff = evaluate_field(mesh, u, x1, x2) - f(x1, x2);
                    sum += rule.weights[kx] * rule.weights[ky] * h * h * diff * diff;
                }
            }
        }
    }
    return std::sqrt(sum);
}

}  // namespace sgeig
