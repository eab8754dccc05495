#include "sgeig/legendre.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

using namespace sgeig;

namespace {

// Independent of the module: std::legendre and a fresh Gauss rule from
// Eigen's eigen-decomposition of the Jacobi matrix (Golub-Welsch).
double oracle_poly(unsigned p, double x) { return std::sqrt(2.0 * p + 1.0) * std::legendre(p, x); }

struct Rule {
    Eigen::VectorXd x, w;
};

Rule golub_welsch(int n) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        j(k, k - 1) = j(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    Rule r;
    r.x = es.eigenvalues();
    r.w = es.eigenvectors().row(0).array().square();
    return r;
}

// E[prod_k Lambda_{a_k}] over the union of active dims, tensor quadrature per dim.
double oracle_moment(const std::vector<const MultiIndex*>& factors, int raise_dim = 0) {
    std::uint32_t dims = 0;
    for (auto* f : factors) dims = std::max(dims, f->last_dimension());
    dims = std::max<std::uint32_t>(dims, raise_dim);
    double product = 1.0;
    for (std::uint32_t m = 1; m <= dims; ++m) {
        unsigned deg = raise_dim == static_cast<int>(m) ? 1 : 0;
        for (auto* f : factors) deg += (*f)[m];
        const Rule r = golub_welsch(static_cast<int>(deg / 2 + 1));
        double s = 0.0;
        for (int q = 0; q < r.x.size(); ++q) {
            double v = raise_dim == static_cast<int>(m) ? r.x[q] : 1.0;
            for (auto* f : factors) v *= oracle_poly((*f)[m], r.x[q]);
            s += r.w[q] * v;
        }
        product *= s;
    }
    return product;
}

}  // namespace

TEST_CASE("univariate values") {
    CHECK(eval_univariate(0, 0.37) == 1.0);
    CHECK(eval_univariate(1, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(eval_univariate(2, 0.5) == doctest::Approx(-std::sqrt(5.0) / 8.0).epsilon(1e-15));
    std::vector<double> all(12);
    eval_univariate_all(-0.3, all);
    for (unsigned p = 0; p < all.size(); ++p) CHECK(all[p] == doctest::Approx(oracle_poly(p, -0.3)).epsilon(1e-13));
}

TEST_CASE("gauss rule integrates to the exactness degree") {
    for (std::size_t n : {1u, 2u, 5u, 17u}) {
        const auto& r = gauss_legendre(n);
        for (unsigned d = 0; d <= 2 * n - 1; ++d) {
            double s = 0.0;
            for (std::size_t q = 0; q < n; ++q) s += r.weights[q] * std::pow(r.nodes[q], d);
            const double exact = d % 2 ? 0.0 : 1.0 / (d + 1.0);
            CHECK(s == doctest::Approx(exact).epsilon(1e-14));
        }
    }
}

TEST_CASE("univariate triple and raise products") {
    CHECK(univariate_triple(0, 0, 1) == 0.0);
    CHECK(univariate_triple(1, 1, 2) == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-15));
    CHECK(univariate_triple(1, 1, 4) == 0.0);
    CHECK(univariate_triple(2, 3, 4) == 0.0);
    for (unsigned p = 0; p < 15; ++p) CHECK(univariate_triple(0, p, p) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(univariate_raise(0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(univariate_raise(1) == doctest::Approx(2.0 / std::sqrt(15.0)).epsilon(1e-15));
    for (unsigned p = 0; p < 10; ++p) CHECK(univariate_raise(p) == doctest::Approx(univariate_triple(1, p, p + 1) / std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("moment matrices on {0, e_1}") {
    const MultiIndexSet set({MultiIndex{}, MultiIndex::unit(1)}, {1.0, 0.5}, 0.1, std::nullopt);
    const auto g = build_moment_matrices(set);
    REQUIRE(g.count() == 2);
    CHECK(Eigen::MatrixXd(g[0]).isIdentity());
    Eigen::MatrixXd g1(g[1]);
    CHECK(g1(0, 0) == 0.0);
    CHECK(g1(0, 1) == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(g1(1, 0) == g1(0, 1));
}

TEST_CASE("tensors match a tensor-quadrature oracle") {
    const auto set = generate_index_set_with_size(DecayWeights::algebraic(2.0), 12);
    const auto g = build_moment_matrices(set);
    const auto t = build_triple_tensor(set);
    const auto p = set.size();
    double worst = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
        const Eigen::MatrixXd ga(t[a]);
        for (std::size_t b = 0; b < p; ++b)
            for (std::size_t c = 0; c < p; ++c)
                worst = std::max(worst, std::abs(ga(b, c) - oracle_moment({&set[a], &set[b], &set[c]})));
    }
    CHECK(worst <= 1e-13);
    for (std::size_t m = 0; m < g.count(); ++m) {
        const Eigen::MatrixXd gm(g[m]);
        for (std::size_t b = 0; b < p; ++b)
            for (std::size_t c = 0; c < p; ++c) {
                const double ref = oracle_moment({&set[b], &set[c]}, static_cast<int>(m));
                CHECK(std::abs(gm(b, c) - ref) <= 1e-13);
            }
    }
    CHECK(Eigen::MatrixXd(t[0]).isIdentity());
}

TEST_CASE("triple tensor symmetry and Galerkin products") {
    const auto set = generate_index_set_with_size(DecayWeights::algebraic(3.2), 31);
    const auto t = build_triple_tensor(set);
    const auto p = static_cast<Eigen::Index>(set.size());
    std::vector<Eigen::MatrixXd> dense;
    for (std::size_t a = 0; a < set.size(); ++a) dense.emplace_back(t[a]);
    for (Eigen::Index a = 0; a < p; ++a)
        for (Eigen::Index b = 0; b < p; ++b)
            for (Eigen::Index c = 0; c < p; ++c) {
                CHECK(dense[a](b, c) == doctest::Approx(dense[b](a, c)).epsilon(1e-14));
                CHECK(dense[a](b, c) == doctest::Approx(dense[c](b, a)).epsilon(1e-14));
            }
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    Eigen::VectorXd s(p), u(p);
    for (Eigen::Index i = 0; i < p; ++i) s[i] = nd(rng), u[i] = nd(rng);
    const Eigen::MatrixXd d = t.delta(s);
    CHECK((d - d.transpose()).norm() == doctest::Approx(0.0));
    CHECK((t.contract(s, u) - d * u).norm() <= 1e-12 * u.norm() * s.norm());
    CHECK((t.contract(Eigen::MatrixXd(s * u.transpose())) - d * u).norm() <= 1e-12 * u.norm() * s.norm());
}

TEST_CASE("expansion evaluation, mean and variance") {
    const auto set = generate_index_set_with_size(DecayWeights::algebraic(3.2), 20);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.size()));
    c[0] = 2.0;
    std::vector<double> y(set.active_dimensions(), 0.4);
    CHECK(evaluate_expansion(c, set, y) == doctest::Approx(2.0));
    c.setZero();
    c[*set.position_of(MultiIndex::unit(1))] = 1.0 / std::sqrt(3.0);
    y[0] = 0.3;
    CHECK(evaluate_expansion(c, set, y) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK_THROWS_AS((void)basis_values(set, std::vector<double>(1, 0.0)), std::invalid_argument);

    // Mean and variance by exact tensor quadrature over the first three dims.
    const auto small = generate_index_set(DecayWeights::explicit_values({0.5, 0.3, 0.2}), 0.01);
    std::mt19937 rng(3);
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(static_cast<Eigen::Index>(small.size()));
    for (auto& x : v) x = nd(rng);
    const auto& r = gauss_legendre(small.max_degree() + 1);
    double mean = 0.0, second = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        for (std::size_t j = 0; j < r.nodes.size(); ++j)
            for (std::size_t k = 0; k < r.nodes.size(); ++k) {
                const std::vector<double> yy{r.nodes[i], r.nodes[j], r.nodes[k]};
                const double w = r.weights[i] * r.weights[j] * r.weights[k];
                const double f = evaluate_expansion(v, small, yy);
                mean += w * f;
                second += w * f * f;
            }
    CHECK(mean == doctest::Approx(v[0]).epsilon(1e-12));
    CHECK(second - mean * mean == doctest::Approx(v.tail(v.size() - 1).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("coordinate dump") {
    const MultiIndexSet set({MultiIndex{}, MultiIndex::unit(1)}, {1.0, 0.5}, 0.1, std::nullopt);
    std::ostringstream os;
    write_coordinate(os, build_moment_matrices(set)[1]);
    CHECK(os.str().find("0 1 ") != std::string::npos);
}
