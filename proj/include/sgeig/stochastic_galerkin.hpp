#pragma once

// Linear algebra on W_A (x) V_h. A spectral vector is stored as an N x P
// matrix whose column alpha holds the spatial coefficients v_alpha, so the
// Kronecker operators act as K V G^T and block solves as V Delta^{-1}.

#include "sgeig/fem2d.hpp"
#include "sgeig/legendre.hpp"
#include "sgeig/multiindex.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgeig {

using SpectralVector = Eigen::MatrixXd;

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// ||v||^2 = sum_alpha v_alpha^T M v_alpha.
[[nodiscard]] double tensor_norm(const SpectralVector& v, const SparseMatrix& mass);
/// Block-diagonal mass application (I_P (x) M) v.
[[nodiscard]] SpectralVector apply_mass(const SparseMatrix& mass, const SpectralVector& v);

/// K_hat = sum_{m=0}^{M(A)} G^(m) (x) K^(m), with an optional shift K^(0) - lambda M.
/// Holds references: `op` and `moments` must outlive the operator.
class KroneckerOperator {
public:
    KroneckerOperator(const ParametricOperator& op, const RaiseMomentMatrices& moments,
                      std::optional<double> shift = std::nullopt);

    [[nodiscard]] SpectralVector apply(const SpectralVector& v) const;
    [[nodiscard]] Eigen::Index spatial_size() const { return n_; }
    [[nodiscard]] Eigen::Index stochastic_size() const { return p_; }
    [[nodiscard]] std::optional<double> shift() const noexcept { return shift_; }
    [[nodiscard]] const ParametricOperator& parametric() const noexcept { return *op_; }

private:
    struct Term {
        const SparseMatrix* stiffness;
        const SparseMatrix* moment;
        std::vector<Eigen::Index> columns;   // stochastic indices touched by G^(m)
        std::vector<Eigen::Index> slot;      // column -> position in `columns`, or -1
    };
    const ParametricOperator* op_;
    std::optional<double> shift_;
    Eigen::Index n_ = 0;
    Eigen::Index p_ = 0;
    std::vector<Term> terms_;
};

/// Applies (I_P (x) K^(0))^{-1} through one cached sparse Cholesky factor.
class MeanPreconditioner {
public:
    explicit MeanPreconditioner(const SparseMatrix& k0);
    [[nodiscard]] SpectralVector apply(const SpectralVector& r) const;

private:
    Eigen::SimplicialLLT<SparseMatrix> llt_;
};

struct PcgOptions {
    double tol = 1e-10;
    int max_iterations = 500;
};

struct PcgResult {
    SpectralVector x;
    int iterations = 0;
    /// sqrt(r^T B r / b^T B b) with B the preconditioner.
    double relative_residual = 0.0;
    bool converged = false;
    bool negative_curvature = false;
    std::vector<double> history;
};

/// Preconditioned CG on the Frobenius inner product of N x P blocks. Stops
/// without throwing on non-convergence or a direction with p^T K_hat p <= 0;
/// the result flags say which.
[[nodiscard]] PcgResult pcg_solve(const KroneckerOperator& op, const MeanPreconditioner& pre,
                                  const SpectralVector& rhs, const SpectralVector* initial,
                                  const PcgOptions& options);

/// Outer-step CG tolerance max(tol_min, factor * increment).
[[nodiscard]] double cg_tolerance(double increment, double factor = 1e-2, double tol_min = 1e-12);

/// F^v_alpha(v, w) = sum_{beta,gamma} [G^(alpha)]_{beta gamma} v_beta^T M w_gamma.
[[nodiscard]] Eigen::VectorXd weighted_gram(const SpectralVector& v, const SpectralVector& w,
                                            const TripleProductTensor& g, const SparseMatrix& mass);
/// Same with the Euclidean spatial product v_beta^T w_gamma.
[[nodiscard]] Eigen::VectorXd weighted_gram(const SpectralVector& v, const SpectralVector& w,
                                            const TripleProductTensor& g);

/// T(c) u = (Delta(c) (x) I_N) u, i.e. the Galerkin product of a scalar and a spectral vector.
[[nodiscard]] SpectralVector galerkin_multiply(const TripleProductTensor& g, const Eigen::VectorXd& c,
                                               const SpectralVector& u);

/// Dense factorization of Delta(s), reused for T(s) block solves and the eigenvalue system.
class DeltaFactor {
public:
    /// Throws SolverError if Delta(s) is singular or its reciprocal condition
    /// estimate falls below rcond_min.
    DeltaFactor(const TripleProductTensor& g, const Eigen::VectorXd& s, double rcond_min = 1e-13);

    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    /// Solves T(s) u = v.
    [[nodiscard]] SpectralVector solve_block(const SpectralVector& v) const;
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return delta_; }
    [[nodiscard]] double rcond() const noexcept { return rcond_; }

private:
    Eigen::MatrixXd delta_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double rcond_ = 0.0;
};

struct NewtonOptions {
    double tol = 1e-12;
    int max_iterations = 30;
    int max_halvings = 30;
};

struct NewtonResult {
    Eigen::VectorXd s;
    int iterations = 0;
    /// ||F(s_k, v)|| for k = 0, 1, ...
    std::vector<double> residuals;
};

/// Solves F(s, v) = Delta(s) s - F^v(v, v) = 0 by damped Newton from
/// s = ||v|| e_0. Converged when ||F|| <= tol * ||v||^2. Throws SolverError
/// on a singular Jacobian or when max_iterations is exhausted.
[[nodiscard]] NewtonResult newton_normalize(const SpectralVector& v, const TripleProductTensor& g,
                                            const SparseMatrix& mass, const NewtonOptions& options = {});
/// Same, with the right-hand side F^v(v, v) already formed.
[[nodiscard]] NewtonResult newton_normalize(const Eigen::VectorXd& target, const TripleProductTensor& g,
                                            const NewtonOptions& options = {});

/// Everything the spectral iterations need for one (operator, index set) pair.
struct GalerkinSystem {
    /// `op` must outlive the system; it needs at least M(A) parametric terms.
    GalerkinSystem(const ParametricOperator& op, MultiIndexSet set, std::optional<double> shift = std::nullopt);
    GalerkinSystem(const GalerkinSystem&) = delete;
    GalerkinSystem& operator=(const GalerkinSystem&) = delete;

    const ParametricOperator* op;
    MultiIndexSet set;
    RaiseMomentMatrices moments;
    TripleProductTensor triple;
    KroneckerOperator khat;
    MeanPreconditioner preconditioner;

    [[nodiscard]] Eigen::Index spatial_size() const { return khat.spatial_size(); }
    [[nodiscard]] Eigen::Index stochastic_size() const { return khat.stochastic_size(); }
    [[nodiscard]] const SparseMatrix& mass() const { return op->mass; }
};

}  // namespace sgeig
