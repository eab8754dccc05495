#include "sgeig/stochastic_galerkin.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace sgeig;

namespace {

struct Small {
    Mesh mesh;
    MultiIndexSet set;
    ParametricOperator op;
    Small(int n, int order, double varsigma, std::size_t size)
        : mesh(n, order), set(generate_index_set_with_size(DecayWeights::algebraic(varsigma), size)),
          op(build_parametric_operator(mesh, std::max<std::uint32_t>(set.active_dimensions(), 1), varsigma)) {}
};

// sum_m G^(m) (x) K^(m) as a dense NP x NP matrix; block (alpha, beta) = G_ab K.
Eigen::MatrixXd dense_khat(const ParametricOperator& op, const RaiseMomentMatrices& g, double shift = 0.0) {
    const Eigen::Index n = op.mass.rows();
    const auto p = static_cast<Eigen::Index>(g.stochastic_size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * p, n * p);
    for (std::size_t m = 0; m < g.count(); ++m) {
        const Eigen::MatrixXd gm(g[m]);
        Eigen::MatrixXd km(op.stiffness[m]);
        if (m == 0) km -= shift * Eigen::MatrixXd(op.mass);
        for (Eigen::Index a = 0; a < p; ++a)
            for (Eigen::Index b = 0; b < p; ++b)
                if (gm(a, b) != 0.0) out.block(a * n, b * n, n, n) += gm(a, b) * km;
    }
    return out;
}

Eigen::VectorXd flatten(const SpectralVector& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

SpectralVector random_spectral(Eigen::Index n, Eigen::Index p, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    SpectralVector v(n, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < n; ++i) v(i, j) = d(rng);
    return v;
}

}  // namespace

TEST_CASE("K_hat application matches the dense Kronecker sum") {
    const Small s(4, 1, 2.0, 12);
    REQUIRE(s.set.active_dimensions() >= 2);
    const auto moments = build_moment_matrices(s.set);
    std::mt19937_64 rng(7);
    for (const double shift : {0.0, 3.5}) {
        const KroneckerOperator khat(s.op, moments, shift == 0.0 ? std::nullopt : std::optional<double>(shift));
        const Eigen::MatrixXd dense = dense_khat(s.op, moments, shift);
        for (int t = 0; t < 3; ++t) {
            const SpectralVector v = random_spectral(khat.spatial_size(), khat.stochastic_size(), rng);
            const Eigen::VectorXd expected = dense * flatten(v);
            CHECK((flatten(khat.apply(v)) - expected).norm() <= 1e-12 * expected.norm());
        }
    }
}

TEST_CASE("K_hat is symmetric positive definite without a shift") {
    const Small s(3, 2, 2.0, 12);
    const auto moments = build_moment_matrices(s.set);
    const Eigen::MatrixXd dense = dense_khat(s.op, moments);
    CHECK((dense - dense.transpose()).norm() <= 1e-13 * dense.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("mean preconditioner inverts K^(0) blockwise") {
    const Small s(4, 2, 3.2, 5);
    const MeanPreconditioner pre(s.op.stiffness.front());
    std::mt19937_64 rng(3);
    const SpectralVector r = random_spectral(static_cast<Eigen::Index>(s.op.dof_count()), 5, rng);
    CHECK((pre.apply(s.op.stiffness.front() * r) - r).norm() <= 1e-11 * r.norm());
    // Symmetric: <a, B b> = <B a, b>.
    const SpectralVector a = random_spectral(r.rows(), r.cols(), rng);
    CHECK(std::abs(a.cwiseProduct(pre.apply(r)).sum() - pre.apply(a).cwiseProduct(r).sum()) <= 1e-11);
}

TEST_CASE("pcg solves the Kronecker system") {
    const Small s(4, 1, 2.0, 12);
    const auto moments = build_moment_matrices(s.set);
    const KroneckerOperator khat(s.op, moments);
    const MeanPreconditioner pre(s.op.stiffness.front());
    std::mt19937_64 rng(11);
    const SpectralVector b = random_spectral(khat.spatial_size(), khat.stochastic_size(), rng);
    const PcgResult r = pcg_solve(khat, pre, b, nullptr, PcgOptions{1e-12, 200});
    REQUIRE(r.converged);
    CHECK_FALSE(r.negative_curvature);
    const Eigen::VectorXd exact = dense_khat(s.op, moments).ldlt().solve(flatten(b));
    CHECK((flatten(r.x) - exact).norm() <= 1e-9 * exact.norm());
    CHECK(r.history.size() == static_cast<std::size_t>(r.iterations) + 1);

    SUBCASE("warm start at the solution needs no iterations") {
        const SpectralVector x0 = r.x;
        const PcgResult again = pcg_solve(khat, pre, b, &x0, PcgOptions{1e-8, 200});
        CHECK(again.converged);
        CHECK(again.iterations == 0);
    }
    SUBCASE("zero right-hand side") {
        const PcgResult z = pcg_solve(khat, pre, SpectralVector::Zero(b.rows(), b.cols()), nullptr, {});
        CHECK(z.converged);
        CHECK(z.x.norm() == 0.0);
    }
    SUBCASE("an overshifted operator is reported, not solved") {
        const KroneckerOperator negative(s.op, moments, 1e6);
        const PcgResult bad = pcg_solve(negative, pre, b, nullptr, {});
        CHECK(bad.negative_curvature);
        CHECK_FALSE(bad.converged);
    }
}

TEST_CASE("mean-preconditioned CG is cheap on the desk-scale problem") {
    const Small s(8, 2, 3.2, 31);
    const auto moments = build_moment_matrices(s.set);
    const KroneckerOperator khat(s.op, moments);
    const MeanPreconditioner pre(s.op.stiffness.front());
    SpectralVector rhs = SpectralVector::Zero(khat.spatial_size(), khat.stochastic_size());
    rhs.col(0) = s.op.mass * Eigen::VectorXd::Ones(rhs.rows());
    const PcgResult r = pcg_solve(khat, pre, rhs, nullptr, PcgOptions{1e-10, 500});
    CHECK(r.converged);
    CHECK(r.iterations <= 30);
}

TEST_CASE("weighted Gram contraction matches explicit sums") {
    const Small s(3, 1, 2.0, 12);
    const auto g = build_triple_tensor(s.set);
    const auto p = static_cast<Eigen::Index>(s.set.size());
    std::mt19937_64 rng(5);
    const SpectralVector v = random_spectral(static_cast<Eigen::Index>(s.op.dof_count()), p, rng);
    const SpectralVector w = random_spectral(v.rows(), p, rng);
    const Eigen::VectorXd got = weighted_gram(v, w, g, s.op.mass);
    const Eigen::VectorXd got_euclid = weighted_gram(v, w, g);
    for (Eigen::Index a = 0; a < p; ++a) {
        const Eigen::MatrixXd ga(g[a]);
        double expect = 0.0, expect_euclid = 0.0;
        for (Eigen::Index b = 0; b < p; ++b)
            for (Eigen::Index c = 0; c < p; ++c) {
                expect += ga(b, c) * v.col(b).dot(s.op.mass * w.col(c));
                expect_euclid += ga(b, c) * v.col(b).dot(w.col(c));
            }
        CHECK(got[a] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(got_euclid[a] == doctest::Approx(expect_euclid).epsilon(1e-12));
    }
    // Symmetric in its two arguments.
    CHECK((weighted_gram(w, v, g, s.op.mass) - got).norm() <= 1e-12 * got.norm());
}

TEST_CASE("Galerkin multiplication and the Delta block solve") {
    const Small s(3, 1, 2.0, 12);
    const auto g = build_triple_tensor(s.set);
    const auto p = static_cast<Eigen::Index>(s.set.size());
    std::mt19937_64 rng(9);
    Eigen::VectorXd c = 0.1 * Eigen::VectorXd::Random(p);
    c[0] = 1.0;
    const SpectralVector u = random_spectral(4, p, rng);
    const SpectralVector tu = galerkin_multiply(g, c, u);
    // (T(c) u)_alpha = sum_{beta,gamma} c_beta [G^(beta)]_{alpha gamma} u_gamma.
    for (Eigen::Index a = 0; a < p; ++a) {
        Eigen::VectorXd expect = Eigen::VectorXd::Zero(u.rows());
        for (Eigen::Index b = 0; b < p; ++b) {
            const Eigen::MatrixXd gb(g[b]);
            for (Eigen::Index k = 0; k < p; ++k) expect += c[b] * gb(a, k) * u.col(k);
        }
        CHECK((tu.col(a) - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
    }
    const DeltaFactor delta(g, c);
    CHECK((delta.solve_block(tu) - u).norm() <= 1e-11 * u.norm());
    CHECK((delta.matrix() * delta.solve(c) - c).norm() <= 1e-12);
}

TEST_CASE("Delta(s) spectrum lies within the range of s") {
    // s(y) = s_0 + sum_m s_m sqrt(3) y_m has range s_0 -/+ sqrt(3) sum |s_m|.
    const auto set = generate_index_set_with_size(DecayWeights::algebraic(2.0), 20);
    const auto g = build_triple_tensor(set);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.size()));
    s[0] = 2.0;
    double spread = 0.0;
    for (std::uint32_t m = 1; m <= set.active_dimensions(); ++m) {
        const auto pos = set.position_of(MultiIndex::unit(m));
        REQUIRE(pos);
        s[static_cast<Eigen::Index>(*pos)] = 0.3 / m;
        spread += std::sqrt(3.0) * 0.3 / m;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.delta(s), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= 2.0 - spread - 1e-12);
    CHECK(es.eigenvalues().maxCoeff() <= 2.0 + spread + 1e-12);
}

TEST_CASE("Delta factorization refuses a singular scalar") {
    const auto set = generate_index_set_with_size(DecayWeights::algebraic(3.2), 5);
    const auto g = build_triple_tensor(set);
    CHECK_THROWS_AS(DeltaFactor(g, Eigen::VectorXd::Zero(5)), SolverError);
}

TEST_CASE("Newton normalization") {
    const Small s(4, 2, 3.2, 31);
    const auto g = build_triple_tensor(s.set);
    const auto p = static_cast<Eigen::Index>(s.set.size());
    const auto n = static_cast<Eigen::Index>(s.op.dof_count());
    std::mt19937_64 rng(21);

    SUBCASE("a mean-only vector is normalized by its norm") {
        SpectralVector v = SpectralVector::Zero(n, p);
        v.col(0) = random_spectral(n, 1, rng);
        const NewtonResult r = newton_normalize(v, g, s.op.mass);
        CHECK(r.iterations <= 1);
        CHECK(r.s[0] == doctest::Approx(tensor_norm(v, s.op.mass)).epsilon(1e-14));
        CHECK(r.s.tail(p - 1).norm() <= 1e-14 * r.s[0]);
    }
    SUBCASE("a fluctuating vector converges quadratically") {
        SpectralVector v = 0.05 * random_spectral(n, p, rng);
        v.col(0) = random_spectral(n, 1, rng);
        const NewtonResult r = newton_normalize(v, g, s.op.mass);
        const Eigen::VectorXd target = weighted_gram(v, v, g, s.op.mass);
        CHECK((g.contract(r.s, r.s) - target).norm() <= 1e-12 * target[0]);
        CHECK(r.iterations <= 10);
        REQUIRE(r.residuals.size() >= 3);
        // Tail: r_{k+1} <= C r_k^2 once in the basin.
        const std::size_t k = r.residuals.size() - 2;
        CHECK(r.residuals[k + 1] <= 10.0 * r.residuals[k] * r.residuals[k] / target[0] + 1e-15 * target[0]);
    }
    SUBCASE("zero vector") {
        CHECK_THROWS_AS((void)newton_normalize(SpectralVector::Zero(n, p), g, s.op.mass), SolverError);
    }
}

TEST_CASE("CG tolerance schedule") {
    CHECK(cg_tolerance(1.0) == doctest::Approx(1e-2));
    CHECK(cg_tolerance(1e-20) == 1e-12);
    CHECK(cg_tolerance(1e-3, 1e-1, 1e-9) == doctest::Approx(1e-4));
}

TEST_CASE("operator refuses index sets wider than the parametrization") {
    const Mesh mesh(3, 1);
    const auto op = build_parametric_operator(mesh, 1, 3.2);
    const auto set = generate_index_set_with_size(DecayWeights::algebraic(3.2), 31);
    REQUIRE(set.active_dimensions() > 1);
    const auto moments = build_moment_matrices(set);
    CHECK_THROWS_AS(KroneckerOperator(op, moments), std::invalid_argument);
}
