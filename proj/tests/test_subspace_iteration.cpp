#include "sgeig/inverse_iteration.hpp"
#include "sgeig/subspace_iteration.hpp"
#include "sgeig/validation.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace sgeig;

namespace {

struct Problem {
    Mesh mesh;
    MultiIndexSet set;
    ParametricOperator op;
    Problem(int n, std::size_t size)
        : mesh(n, 2), set(generate_index_set_with_size(DecayWeights::algebraic(3.2), size)),
          op(build_parametric_operator(mesh, std::max<std::uint32_t>(set.active_dimensions(), 1), 3.2)) {}
};

}  // namespace

TEST_CASE("Q = 1 reproduces spectral inverse iteration") {
    const Problem p(4, 31);
    const GalerkinSystem sys(p.op, p.set);
    SubspaceOptions so;
    so.q = 1;
    so.tol = 1e-11;
    InverseIterationOptions io;
    io.tol = 1e-11;
    const SpectralBasis b = SpectralSubspaceIteration(sys, so).run();
    const EigenpairResult r = SpectralInverseIteration(sys, io).run();
    REQUIRE(b.converged);
    REQUIRE(r.converged);
    SpectralVector u = b.vectors.front();
    if (u.col(0).dot(p.op.mass * r.u.col(0)) < 0.0) u = -u;
    CHECK(tensor_norm(u - r.u, p.op.mass) <= 1e-8);
}

TEST_CASE("with A = {0} the iteration is classical subspace iteration") {
    const Problem p(4, 1);
    const GalerkinSystem sys(p.op, p.set);
    SubspaceOptions so;
    so.q = 3;
    so.max_steps = 80;
    so.tol = 1e-12;
    const SpectralBasis b = SpectralSubspaceIteration(sys, so).run();

    const Eigen::MatrixXd k(p.op.stiffness.front()), m(p.op.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m);
    Eigen::MatrixXd u(k.rows(), 3);
    for (int q = 0; q < 3; ++q) u.col(q) = b.vectors[static_cast<std::size_t>(q)].col(0);
    // M-orthonormal, and spanning the three smallest eigenvectors.
    CHECK((u.transpose() * m * u - Eigen::Matrix3d::Identity()).norm() <= 1e-10);
    const Eigen::MatrixXd overlap = u.transpose() * m * es.eigenvectors().leftCols(3);
    CHECK(std::abs(overlap.determinant()) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Galerkin orthogonality and convergence of the spanned subspace") {
    const Problem p(4, 31);
    const GalerkinSystem sys(p.op, p.set);
    SubspaceOptions so;
    so.q = 3;
    so.max_steps = 40;
    so.run_all_steps = true;
    so.sum_trick = true;
    const SpectralBasis b = SpectralSubspaceIteration(sys, so).run();
    REQUIRE(b.steps == 40);
    for (const auto& rec : b.history) {
        CHECK(rec.projection_residual <= so.orth_tol);
        CHECK(rec.orth_residual <= 1e-4);
    }

    const auto at_zero = deterministic_eigensolve(p.op, {}, 3);
    const std::vector<double> zero(p.set.active_dimensions(), 0.0);
    CHECK(1.0 - subspace_angle(b.vectors, p.set, p.op.mass, zero, at_zero.vectors) <= 1e-6);

    // Pointwise Gram matrix of the evaluated basis stays close to the identity.
    for (const auto& y : random_points(p.set.active_dimensions(), 10, 4)) {
        Eigen::MatrixXd u(sys.spatial_size(), 3);
        for (int q = 0; q < 3; ++q) u.col(q) = evaluate_expansion(b.vectors[static_cast<std::size_t>(q)], p.set, y);
        CHECK((u.transpose() * (p.op.mass * u) - Eigen::Matrix3d::Identity()).norm() <= 2e-2);
    }
}

TEST_CASE("orthogonality after normalization improves with the index set") {
    double previous = 1.0;
    for (const std::size_t size : {5, 12, 31, 52}) {
        const Problem p(4, size);
        const GalerkinSystem sys(p.op, p.set);
        SubspaceOptions so;
        so.q = 3;
        so.max_steps = 12;
        so.run_all_steps = true;
        so.sum_trick = true;
        const SpectralBasis b = SpectralSubspaceIteration(sys, so).run();
        double worst = 0.0;
        for (std::size_t q = 0; q < 3; ++q)
            for (std::size_t i = 0; i < q; ++i)
                worst = std::max(worst, weighted_gram(b.vectors[q], b.vectors[i], sys.triple, sys.mass()).norm());
        CHECK(worst == doctest::Approx(b.history.back().orth_residual));
        CHECK(worst < previous);
        previous = worst;
    }
}

TEST_CASE("linearly dependent start vectors break down with a diagnostic") {
    const Problem p(4, 5);
    const GalerkinSystem sys(p.op, p.set);
    SubspaceOptions so;
    so.q = 2;
    const SpectralSubspaceIteration it(sys, so);
    SpectralBasis b = it.initial_basis();
    b.vectors[1] = b.vectors[0];
    CHECK_THROWS_AS((void)it.run(b, {}), SolverError);
}

TEST_CASE("options are validated") {
    const Problem p(4, 1);
    const GalerkinSystem sys(p.op, p.set);
    SubspaceOptions so;
    so.q = 0;
    CHECK_THROWS_AS(SpectralSubspaceIteration(sys, so), std::invalid_argument);
}
