#include "sgeig/multiindex.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

using namespace sgeig;

namespace {

// Every alpha in the box [0, max_exp]^dims whose weight exceeds eps.
std::vector<MultiIndex> brute_force(const std::vector<double>& eta, double eps, unsigned max_exp) {
    std::vector<MultiIndex> out;
    std::vector<unsigned> dense(eta.size(), 0);
    std::function<void(std::size_t, double)> rec = [&](std::size_t d, double w) {
        if (d == eta.size()) {
            if (w > eps) out.push_back(MultiIndex::from_dense(dense));
            return;
        }
        double wd = w;
        for (unsigned e = 0; e <= max_exp && wd > eps; ++e) {
            dense[d] = e;
            rec(d + 1, wd);
            wd *= eta[d];
        }
        dense[d] = 0;
    };
    rec(0, 1.0);
    return out;
}

std::set<std::string> as_strings(const std::vector<MultiIndex>& v) {
    std::set<std::string> s;
    for (const auto& a : v) s.insert(a.to_string());
    return s;
}

}  // namespace

TEST_CASE("multi-index stores only nonzero exponents") {
    const std::vector<unsigned> dense{0, 2, 0, 1, 0, 0};
    const auto a = MultiIndex::from_dense(dense);
    REQUIRE(a.entries().size() == 2);
    CHECK(a.entries()[0].dim == 2);
    CHECK(a.entries()[1].dim == 4);
    CHECK(a[2] == 2);
    CHECK(a[3] == 0);
    CHECK(a.total_degree() == 3);
    CHECK(a.last_dimension() == 4);
    CHECK(a.incremented(3)[3] == 1);
    CHECK(a.decremented(4).last_dimension() == 2);
    CHECK(MultiIndex{}.is_zero());
}

TEST_CASE("weight sequence") {
    const auto eta = weight_sequence(3.2, 200);
    CHECK(eta[0] == doctest::Approx(0.107559881537).epsilon(1e-11));
    for (std::size_t m = 1; m < eta.size(); ++m) CHECK(eta[m] < eta[m - 1]);
    const double m = 200.0;
    CHECK(eta.back() * 2.0 * std::pow(m + 1.0, 2.2) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("geometric weights agree with brute force") {
    std::vector<double> eta;
    for (int m = 1; m <= 8; ++m) eta.push_back(std::pow(0.5, m));
    const auto set = generate_index_set(DecayWeights::explicit_values(eta), 0.1);
    const auto oracle = brute_force(eta, 0.1, 8);
    CHECK(as_strings(set.indices()) == as_strings(oracle));
    // (), (1), (2), (0,1), (1,1), (3), (0,0,1): e_3 has weight 1/8 > 0.1 as well.
    CHECK(set.size() == 7);
    CHECK(set[0].is_zero());
    CHECK(set[1] == MultiIndex::unit(1));
    for (std::size_t k = 1; k < set.size(); ++k) CHECK(set.weight(k) <= set.weight(k - 1));
}

TEST_CASE("algebraic weights agree with brute force on several thresholds") {
    const auto weights = DecayWeights::algebraic(3.2);
    for (double eps : {0.05, 1e-2, 2e-3, 5e-4}) {
        const auto set = generate_index_set(weights, eps);
        std::vector<double> eta;
        for (std::uint32_t m = 1; weights(m) > eps; ++m) eta.push_back(weights(m));
        CHECK(as_strings(set.indices()) == as_strings(brute_force(eta, eps, 12)));
        CHECK(set.is_downward_closed());
    }
}

TEST_CASE("trivial threshold gives the zero index only") {
    const auto set = generate_index_set(DecayWeights::algebraic(3.2), 0.999999);
    CHECK(set.size() == 1);
    CHECK(set.active_dimensions() == 0);
    CHECK_THROWS_AS((void)generate_index_set(DecayWeights::algebraic(3.2), 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)generate_index_set(DecayWeights::algebraic(3.2), 0.0), std::invalid_argument);
}

TEST_CASE("cardinality targets reproduce the reported truncation dimensions") {
    const auto weights = DecayWeights::algebraic(3.2);
    const auto a264 = generate_index_set_with_size(weights, 264);
    CHECK(a264.size() == 264);
    CHECK(a264.active_dimensions() == 113);
    const auto a121 = generate_index_set_with_size(weights, 121);
    CHECK(a121.size() == 121);
    CHECK(a121.active_dimensions() == 60);
    const auto a31 = generate_index_set_with_size(weights, 31);
    CHECK(a31.size() == 31);
    CHECK(a31.active_dimensions() == 20);
    // The pinned eps regenerates the same set.
    const auto again = generate_index_set(weights, a264.eps());
    CHECK(again.indices() == a264.indices());
}

TEST_CASE("completeness and monotone refinement") {
    const auto weights = DecayWeights::algebraic(3.2);
    const auto coarse = generate_index_set(weights, 3e-3);
    const auto fine = generate_index_set(weights, 1e-3);
    for (const auto& a : coarse) CHECK(fine.contains(a));
    for (std::size_t k = 0; k < fine.size(); ++k) {
        CHECK(fine.weight(k) > fine.eps());
        for (std::uint32_t m = 1; m <= fine.active_dimensions() + 1; ++m) {
            const auto b = fine[k].incremented(m);
            if (fine.weight(k) * weights(m) > fine.eps()) CHECK(fine.contains(b));
        }
    }
}

TEST_CASE("position lookup round-trips") {
    const auto set = generate_index_set_with_size(DecayWeights::algebraic(3.2), 52);
    CHECK(set.position_of(MultiIndex{}) == 0u);
    for (std::size_t k = 0; k < set.size(); ++k) CHECK(set.position_of(set[k]) == k);
    CHECK_FALSE(set.position_of(MultiIndex::unit(500)).has_value());
}

TEST_CASE("text serialization round-trips") {
    const auto set = generate_index_set_with_size(DecayWeights::algebraic(3.2), 40);
    std::stringstream ss;
    write_index_set(ss, set);
    const auto back = read_index_set(ss);
    CHECK(back.indices() == set.indices());
    CHECK(back.eps() == set.eps());
    REQUIRE(back.varsigma().has_value());
    CHECK(*back.varsigma() == 3.2);
    for (std::size_t k = 0; k < set.size(); ++k) CHECK(back.weight(k) == doctest::Approx(set.weight(k)));
}

TEST_CASE("constructor rejects sets that are not downward closed") {
    std::vector<MultiIndex> idx{MultiIndex{}, MultiIndex::unit(1, 2)};
    CHECK_THROWS_AS(MultiIndexSet(idx, {1.0, 0.1}, 0.01, std::nullopt), std::invalid_argument);
}
