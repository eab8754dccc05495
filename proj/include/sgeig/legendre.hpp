#pragma once

// Normalized Legendre chaos on [-1,1]^inf with the uniform probability
// measure: E[L_p L_q] = delta_pq. Raw (unnormalized) Legendre values never
// leave this module.

#include "sgeig/multiindex.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace sgeig {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Gauss-Legendre rule for the uniform probability measure on [-1,1]
/// (weights sum to 1). Exact for polynomials of degree <= 2n-1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
[[nodiscard]] const GaussRule& gauss_legendre(std::size_t n);

/// Normalized Legendre polynomial sqrt(2p+1) L_p(x).
[[nodiscard]] double eval_univariate(unsigned p, double x);
/// Values for p = 0..out.size()-1.
void eval_univariate_all(double x, std::span<double> out);

/// E[L_a L_b L_c]; exactly zero when the parity or triangle rule fails.
[[nodiscard]] double univariate_triple(unsigned a, unsigned b, unsigned c);
/// E[x L_p L_{p+1}] = (p+1) / sqrt((2p+1)(2p+3)).
[[nodiscard]] double univariate_raise(unsigned p);

/// G^(m), m = 0..M(A), with [G^(m)]_{ab} = E[y_m Lambda_a Lambda_b] and G^(0) = I.
class RaiseMomentMatrices {
public:
    RaiseMomentMatrices() = default;
    explicit RaiseMomentMatrices(std::vector<SparseMatrix> g) : g_(std::move(g)) {}

    [[nodiscard]] const SparseMatrix& operator[](std::size_t m) const { return g_[m]; }
    /// Number of matrices, M(A) + 1.
    [[nodiscard]] std::size_t count() const noexcept { return g_.size(); }
    [[nodiscard]] std::size_t stochastic_size() const { return g_.empty() ? 0 : g_.front().rows(); }

private:
    std::vector<SparseMatrix> g_;
};

/// G^(alpha) for alpha in A, [G^(alpha)]_{bc} = E[Lambda_alpha Lambda_b Lambda_c].
class TripleProductTensor {
public:
    TripleProductTensor() = default;
    explicit TripleProductTensor(std::vector<SparseMatrix> g) : g_(std::move(g)) {}

    [[nodiscard]] const SparseMatrix& operator[](std::size_t alpha) const { return g_[alpha]; }
    [[nodiscard]] std::size_t size() const noexcept { return g_.size(); }
    [[nodiscard]] std::size_t nonzeros() const;

    /// Delta(s) = sum_alpha s_alpha G^(alpha), the Galerkin multiplication by s.
    [[nodiscard]] Eigen::MatrixXd delta(const Eigen::VectorXd& s) const;
    /// F^s(s, t)_alpha = s . G^(alpha) t.
    [[nodiscard]] Eigen::VectorXd contract(const Eigen::VectorXd& s, const Eigen::VectorXd& t) const;
    /// c_alpha = sum_{b,c} [G^(alpha)]_{bc} H_{bc} for a P x P matrix H.
    [[nodiscard]] Eigen::VectorXd contract(const Eigen::MatrixXd& h) const;

private:
    std::vector<SparseMatrix> g_;
};

[[nodiscard]] RaiseMomentMatrices build_moment_matrices(const MultiIndexSet& set);
[[nodiscard]] TripleProductTensor build_triple_tensor(const MultiIndexSet& set);

/// Lambda_alpha(y) for every alpha in the set. y must cover M(A) dimensions;
/// extra entries are ignored.
[[nodiscard]] Eigen::VectorXd basis_values(const MultiIndexSet& set, std::span<const double> y);

/// sum_alpha c_alpha Lambda_alpha(y) for a scalar expansion.
[[nodiscard]] double evaluate_expansion(const Eigen::VectorXd& coeffs, const MultiIndexSet& set,
                                        std::span<const double> y);
/// Same for an N x P block of spatial coefficient columns.
[[nodiscard]] Eigen::VectorXd evaluate_expansion(const Eigen::MatrixXd& coeffs, const MultiIndexSet& set,
                                                 std::span<const double> y);

/// Coordinate text dump: "row col value" per stored entry, 0-based.
void write_coordinate(std::ostream& out, const SparseMatrix& m);

}  // namespace sgeig
