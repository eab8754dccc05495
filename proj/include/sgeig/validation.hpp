#pragma once

// Pointwise deterministic eigensolver, sampling statistics, error metrics
// and the subspace-angle functional used to check the spectral solvers.

#include "sgeig/fem2d.hpp"
#include "sgeig/legendre.hpp"
#include "sgeig/multiindex.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sgeig {

struct PointwiseEigenSolution {
    std::vector<double> y;
    /// Ascending.
    Eigen::VectorXd values;
    /// M-orthonormal columns, largest-magnitude entry positive.
    Eigen::MatrixXd vectors;
    int sweeps = 0;
    /// max_q ||K u_q - mu_q M u_q|| / (mu_q ||M u_q||).
    double residual = 0.0;
};

struct DeterministicOptions {
    double tol = 1e-11;
    int max_sweeps = 1000;
    /// Extra block columns beyond Q; they set the convergence rate mu_Q / mu_{Q+guard+1}.
    int guard = 3;
};

/// Block inverse subspace iteration with Rayleigh-Ritz on (K(y), M). The
/// sparse Cholesky symbolic analysis is done once and reused for every y.
class DeterministicEigensolver {
public:
    explicit DeterministicEigensolver(const ParametricOperator& op, DeterministicOptions options = {});

    /// Q smallest eigenpairs at y (y may be shorter than the term count; missing entries are 0).
    [[nodiscard]] PointwiseEigenSolution solve(std::span<const double> y, int q);
    [[nodiscard]] const ParametricOperator& parametric() const noexcept { return *op_; }

private:
    const ParametricOperator* op_;
    DeterministicOptions options_;
    Eigen::SimplicialLLT<SparseMatrix> llt_;
};

[[nodiscard]] PointwiseEigenSolution deterministic_eigensolve(const ParametricOperator& op,
                                                              std::span<const double> y, int q,
                                                              const DeterministicOptions& options = {});

struct PointwiseError {
    double eigenvalue = 0.0;
    /// ||u_pc(y) - u_det(y)||_M after sign alignment.
    double eigenvector = 0.0;
};

/// Compares a chaos eigenpair (u: N x P, mu: P) at y against an oracle solution.
[[nodiscard]] PointwiseError pointwise_error(const Eigen::MatrixXd& u, const Eigen::VectorXd& mu,
                                             const MultiIndexSet& set, const SparseMatrix& mass,
                                             std::span<const double> y, const PointwiseEigenSolution& oracle);

struct SampleStatistics {
    double mean = 0.0;
    double variance = 0.0;
    double mean_standard_error = 0.0;
    double variance_standard_error = 0.0;
    std::size_t samples = 0;
};

/// Exact moments of a scalar chaos expansion: mean c_0, variance sum_{alpha != 0} c_alpha^2.
[[nodiscard]] SampleStatistics statistics_from_coefficients(const Eigen::VectorXd& c);
/// Plain Monte Carlo over y uniform in [-1,1]^dims with a fixed seed.
[[nodiscard]] SampleStatistics monte_carlo(const std::function<double(std::span<const double>)>& f,
                                           std::size_t dims, std::size_t samples, std::uint64_t seed);

/// Points of the R_d (generalized golden ratio) sequence mapped to [-1,1]^dims.
[[nodiscard]] std::vector<std::vector<double>> quasi_random_points(std::size_t dims, std::size_t count);
/// Uniform random points in [-1,1]^dims.
[[nodiscard]] std::vector<std::vector<double>> random_points(std::size_t dims, std::size_t count,
                                                             std::uint64_t seed);

/// theta(y) = |det Theta| / sqrt(det G), Theta_ij = <u_i(y), v_j(y)>_M and
/// G_ij = <u_i(y), u_j(y)>_M, with u_i the evaluated chaos basis vectors and v_j
/// M-orthonormal oracle eigenvectors. This is the cosine of the angle between
/// the two spans; with normalize = false the Gram factor is dropped (plain
/// |det Theta|, which is only a cosine when the u_i(y) are orthonormal).
[[nodiscard]] double subspace_angle(const std::vector<Eigen::MatrixXd>& basis, const MultiIndexSet& set,
                                    const SparseMatrix& mass, std::span<const double> y,
                                    const Eigen::MatrixXd& oracle_vectors, bool normalize = true);

struct AngleStatistics {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t samples = 0;
};
[[nodiscard]] AngleStatistics angle_statistics(const std::vector<double>& theta);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_standard_error = 0.0;
};
/// Least squares of y on x.
[[nodiscard]] LinearFit fit_line(std::span<const double> x, std::span<const double> y);
/// Least squares of log y on log x.
[[nodiscard]] LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct CoefficientDecay {
    /// ||u_alpha||_M in canonical order.
    std::vector<double> eigenvector_norms;
    /// |mu_alpha| in canonical order.
    std::vector<double> eigenvalue_norms;
    std::vector<double> eigenvector_sorted;
    std::vector<double> eigenvalue_sorted;
    /// Log-log slopes against the 1-based position over positions >= tail_start;
    /// zero entries are skipped.
    double eigenvector_slope = 0.0;
    double eigenvector_sorted_slope = 0.0;
    /// Slope of the running maximum from the right of the unsorted norms, i.e.
    /// of the line that bounds the canonical-order tail from above.
    double eigenvector_envelope_slope = 0.0;
    double eigenvalue_slope = 0.0;
    double eigenvalue_sorted_slope = 0.0;
};

/// tail_start is the first 1-based position included in the fits.
[[nodiscard]] CoefficientDecay coefficient_decay_report(const Eigen::MatrixXd& u, const Eigen::VectorXd& mu,
                                                        const SparseMatrix& mass, std::size_t tail_start = 2);

/// Result of sweeping y_m over [-1,1] with the other parameters at 0 and
/// following each eigenvector branch by maximal M-overlap.
struct CrossingScan {
    std::vector<double> parameter;
    /// values[k][q]: q-th smallest eigenvalue at parameter[k].
    std::vector<std::vector<double>> values;
    /// Parameter midpoints where the branches of eigenvalues `lower` and `lower + 1` swap order.
    std::vector<double> swaps;
};

/// Tracks the branches that start as the lower-th and (lower+1)-th eigenvalue
/// (0-based) at parameter -1 and records where they exchange positions.
[[nodiscard]] CrossingScan scan_crossing(const ParametricOperator& op, std::uint32_t m, int lower, int points,
                                         int q);

}  // namespace sgeig
