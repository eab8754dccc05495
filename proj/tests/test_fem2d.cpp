#include "sgeig/fem2d.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <numbers>
#include <random>

using namespace sgeig;

namespace {

double smallest_eigenvalue(const SparseMatrix& k, const SparseMatrix& m, Eigen::VectorXd* vec = nullptr) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(k), Eigen::MatrixXd(m)};
    if (vec) *vec = es.eigenvectors().col(0);
    return es.eigenvalues()[0];
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("dof counts") {
    CHECK(build_mesh(2, 1).dof_count() == 1);
    CHECK(build_mesh(2, 2).dof_count() == 9);
    CHECK(build_mesh(96, 2).dof_count() == 36481);
    CHECK_THROWS_AS((void)build_mesh(4, 3), std::invalid_argument);
    const Mesh mesh(4, 2);
    for (std::size_t d = 0; d < mesh.dof_count(); ++d) {
        const auto x = mesh.dof_coordinates(d);
        const int i = static_cast<int>(std::lround(x[0] * 8)), j = static_cast<int>(std::lround(x[1] * 8));
        CHECK(mesh.dof_of_node(i, j) == static_cast<int>(d));
    }
}

TEST_CASE("single bilinear dof") {
    const Mesh mesh(2, 1);
    const Eigen::MatrixXd k(assemble_stiffness(mesh, CoefficientTerm{0, 3.2}));
    CHECK(k(0, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("mass matrix") {
    for (int order : {1, 2}) {
        const Mesh mesh(4, order);
        const SparseMatrix full = assemble_mass_full(mesh);
        CHECK(Eigen::MatrixXd(full).sum() == doctest::Approx(1.0).epsilon(1e-14));
        const SparseMatrix m = assemble_mass(mesh);
        CHECK((Eigen::MatrixXd(m) - Eigen::MatrixXd(m).transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(m)};
        CHECK(es.eigenvalues()[0] > 0.0);
    }
}

TEST_CASE("stiffness family: symmetry, decay, shared pattern") {
    const Mesh mesh(8, 2);
    const auto op = build_parametric_operator(mesh, 20, 3.2);
    const double k1 = op.stiffness[1].norm();
    for (std::size_t m = 0; m <= 20; ++m) {
        const Eigen::MatrixXd k(op.stiffness[m]);
        CHECK((k - k.transpose()).norm() == 0.0);
        CHECK(op.stiffness[m].nonZeros() == op.mass.nonZeros());
        if (m >= 1) CHECK(op.stiffness[m].norm() / k1 <= std::pow((m + 1.0) / 2.0, -3.2) * 1.5);
    }
    double sum = 0.0;
    for (int m = 1; m <= 10000; ++m) sum += CoefficientTerm{m, 3.2}.amplitude();
    CHECK(sum < 1.0);
}

TEST_CASE("pointwise operator") {
    const Mesh mesh(8, 1);
    const auto op = build_parametric_operator(mesh, 12, 3.2);
    std::vector<double> zero(12, 0.0), y(12), my(12);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CHECK((Eigen::MatrixXd(assemble_pointwise(op, zero)) - Eigen::MatrixXd(op.stiffness[0])).norm() == 0.0);
    for (int trial = 0; trial < 100; ++trial) {
        for (std::size_t m = 0; m < y.size(); ++m) y[m] = u(rng), my[m] = -y[m];
        const SparseMatrix k = assemble_pointwise(op, y);
        if (trial == 0) {
            const SparseMatrix sum = k + assemble_pointwise(op, my);
            CHECK((Eigen::MatrixXd(sum) - 2.0 * Eigen::MatrixXd(op.stiffness[0])).norm() <= 1e-12);
        }
        Eigen::SimplicialLLT<SparseMatrix> llt(k);
        CHECK(llt.info() == Eigen::Success);
    }
    CHECK_THROWS_AS((void)assemble_pointwise(op, std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST_CASE("quadratic elements converge at h^4 / h^3 at the mean") {
    const double exact = 2.0 * std::numbers::pi * std::numbers::pi;
    auto exact_u = [](double x1, double x2) { return 2.0 * std::sin(std::numbers::pi * x1) * std::sin(std::numbers::pi * x2); };
    std::vector<double> h, err_mu, err_u;
    for (int n : {2, 4, 8}) {
        const Mesh mesh(n, 2);
        const SparseMatrix m = assemble_mass(mesh);
        Eigen::VectorXd u;
        const double mu = smallest_eigenvalue(assemble_stiffness(mesh, CoefficientTerm{0, 3.2}), m, &u);
        u /= std::sqrt(u.dot(m * u));
        if (u.sum() < 0) u = -u;
        h.push_back(1.0 / n);
        err_mu.push_back(mu - exact);
        err_u.push_back(l2_distance(mesh, u, exact_u));
        CHECK(mu > exact);
    }
    CHECK(fit_slope(h, err_mu) == doctest::Approx(4.0).epsilon(0.1));
    CHECK(fit_slope(h, err_u) == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("nested prolongation is exact") {
    const Mesh coarse(4, 2), fine(8, 2);
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    Eigen::VectorXd u(static_cast<Eigen::Index>(coarse.dof_count()));
    for (auto& x : u) x = nd(rng);
    const Eigen::VectorXd uf = prolongate(coarse, fine, u);
    for (double x1 : {0.1, 0.33, 0.71})
        for (double x2 : {0.05, 0.5, 0.93})
            CHECK(evaluate_field(fine, uf, x1, x2) == doctest::Approx(evaluate_field(coarse, u, x1, x2)).epsilon(1e-13));
    const SparseMatrix mc = assemble_mass(coarse), mf = assemble_mass(fine);
    CHECK(uf.dot(mf * uf) == doctest::Approx(u.dot(mc * u)).epsilon(1e-13));
}
