#pragma once

// Convergence studies built on the solvers: each returns typed rows plus the
// fitted summaries, and can be flattened into a CSV table.

#include "sgeig/inverse_iteration.hpp"
#include "sgeig/subspace_iteration.hpp"
#include "sgeig/validation.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sgeig {

struct ProblemConfig {
    int cells = 8;
    int order = 2;
    double varsigma = 3.2;
};

/// Column names plus rows of preformatted cells.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
};

/// %.17g, or "nan"/"inf" spelled out.
[[nodiscard]] std::string format_number(double x);
/// Writes `prefix` columns (e.g. config hash, version) in front of every row.
void write_csv(std::ostream& out, const Table& table,
               const std::vector<std::pair<std::string, std::string>>& prefix = {});

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
[[nodiscard]] std::string hex64(std::uint64_t h);

// ---------------------------------------------------------------------------
// Overkill reference

struct ReferenceConfig {
    ProblemConfig problem{32, 2, 3.2};
    std::size_t size = 121;
    /// Iterate exactly this many steps when tol <= 0, otherwise to tol (capped at 500).
    int steps = 16;
    double tol = 0.0;
};

struct ReferenceSolution {
    ReferenceConfig config;
    MultiIndexSet set;
    Eigen::MatrixXd u;
    Eigen::VectorXd mu;
    int steps = 0;
    /// FNV-1a over the serialized coefficients.
    [[nodiscard]] std::uint64_t hash() const;
};

[[nodiscard]] ReferenceSolution compute_reference(const ReferenceConfig& config);
/// Writes index_set.txt and result.bin into dir (created if needed).
void save_reference(const ReferenceSolution& ref, const std::filesystem::path& dir);
/// Reads what save_reference wrote; config comes from the caller since it lives in the manifest.
[[nodiscard]] ReferenceSolution load_reference(const std::filesystem::path& dir, const ReferenceConfig& config);

/// Coefficients of (u, mu) on `set` re-indexed into `target` (zero where
/// absent). Throws unless every member of `set` lies in `target`.
void embed_coefficients(const MultiIndexSet& set, const MultiIndexSet& target, const Eigen::MatrixXd& u,
                        const Eigen::VectorXd& mu, Eigen::MatrixXd& u_out, Eigen::VectorXd& mu_out);

// ---------------------------------------------------------------------------
// Spatial convergence: fixed A, refined meshes against a fine mesh with the same A.

struct SpatialStudyOptions {
    int order = 2;
    double varsigma = 3.2;
    std::vector<int> cells{4, 8, 16};
    int reference_cells = 32;
    std::size_t size = 31;
    int steps = 16;
};

struct SpatialRow {
    int cells = 0;
    double h = 0.0;
    std::size_t dofs = 0;
    double eigenfunction_error = 0.0;
    double eigenvalue_error = 0.0;
};

struct SpatialStudy {
    std::vector<SpatialRow> rows;
    LinearFit eigenfunction_fit;
    LinearFit eigenvalue_fit;
    std::uint64_t reference_hash = 0;
    [[nodiscard]] Table table() const;
};

[[nodiscard]] ReferenceConfig spatial_reference_config(const SpatialStudyOptions& options);
/// `reference` must match spatial_reference_config(options); pass nullptr to compute it.
[[nodiscard]] SpatialStudy spatial_study(const SpatialStudyOptions& options,
                                         const ReferenceSolution* reference = nullptr);

// ---------------------------------------------------------------------------
// Stochastic convergence: nested A_eps on one mesh against a larger A.

struct StochasticStudyOptions {
    ProblemConfig problem{16, 2, 3.2};
    std::vector<std::size_t> sizes{5, 8, 12, 20, 31, 52, 80, 121};
    std::size_t reference_size = 264;
    double tol = 1e-11;
    int max_steps = 100;
};

struct StochasticRow {
    std::size_t size = 0;
    double eps = 0.0;
    std::uint32_t active_dimensions = 0;
    int steps = 0;
    double eigenfunction_error = 0.0;
    double eigenvalue_error = 0.0;
};

struct StochasticStudy {
    std::vector<StochasticRow> rows;
    /// log error against log #A.
    LinearFit eigenfunction_fit;
    LinearFit eigenvalue_fit;
    /// Errors never increase along the nested sequence (1% slack).
    bool monotone = false;
    std::uint64_t reference_hash = 0;
    [[nodiscard]] Table table() const;
};

[[nodiscard]] ReferenceConfig stochastic_reference_config(const StochasticStudyOptions& options);
[[nodiscard]] StochasticStudy stochastic_study(const StochasticStudyOptions& options,
                                               const ReferenceSolution* reference = nullptr);

// ---------------------------------------------------------------------------
// Coefficient decay of a (reference) solution.

struct CoefficientStudy {
    MultiIndexSet set;
    CoefficientDecay decay;
    [[nodiscard]] Table table() const;
};

[[nodiscard]] CoefficientStudy coefficient_study(const ReferenceSolution& reference, std::size_t tail_start = 2);

// ---------------------------------------------------------------------------
// Iteration convergence of spectral inverse iteration.

struct IterationStudyOptions {
    ProblemConfig problem{8, 2, 3.2};
    std::size_t size = 31;
    std::size_t reference_size = 264;
    int steps = 25;
    /// Increment ratios are compared from step burn_in + 2 on (the first
    /// ratio is increment_{burn_in+2} / increment_{burn_in+1}) ...
    int burn_in = 3;
    /// ... while the increment stays above this solver floor.
    double increment_floor = 1e-9;
    /// Pre-plateau: steps whose eigenfunction error against the reference
    /// exceeds plateau_factor times its final value.
    double plateau_factor = 2.0;
};

struct IterationRow {
    int k = 0;
    double increment = 0.0;
    /// increment_k / increment_{k-1}; 0 for k = 1.
    double ratio = 0.0;
    double mu_change = 0.0;
    double mu_mean = 0.0;
    /// Against the larger-A reference on the same mesh.
    double eigenfunction_error = 0.0;
    double eigenvalue_error = 0.0;
    /// Against the converged fixed point of the same discretization.
    double eigenfunction_iteration_error = 0.0;
    double eigenvalue_iteration_error = 0.0;
    int cg_iterations = 0;
    int newton_iterations = 0;
};

struct IterationStudy {
    std::vector<IterationRow> rows;
    double mu1 = 0.0;
    double mu2 = 0.0;
    /// mu_1(0) / mu_2(0).
    double rate = 0.0;
    /// Increment-ratio window [first, last] (1-based steps, inclusive).
    int ratio_first = 0;
    int ratio_last = 0;
    double ratio_max_deviation = 0.0;
    /// Pre-plateau window [1, plateau_last].
    int plateau_last = 0;
    /// Slopes of ln(iteration error) per step over the pre-plateau window.
    double eigenfunction_slope = 0.0;
    double eigenvalue_slope = 0.0;
    std::uint64_t reference_hash = 0;
    [[nodiscard]] Table table() const;
};

[[nodiscard]] ReferenceConfig iteration_reference_config(const IterationStudyOptions& options);
[[nodiscard]] IterationStudy iteration_study(const IterationStudyOptions& options,
                                             const ReferenceSolution* reference = nullptr);

// ---------------------------------------------------------------------------
// Subspace iteration with the angle functional.

struct SubspaceStudyOptions {
    ProblemConfig problem{8, 2, 3.2};
    std::size_t size = 52;
    int q = 3;
    int steps = 40;
    bool sum_trick = true;
    std::size_t samples = 256;
    /// Floor level: median of arccos E[theta] over the last floor_fraction of the steps.
    double floor_fraction = 1.0 / 3.0;
    /// Geometric window: steps whose arccos E[theta] exceeds floor_factor times the floor.
    double floor_factor = 10.0;
    /// Points of the y_1 sweep used to locate the eigenvalue crossing.
    int crossing_points = 41;
};

struct SubspaceRow {
    int k = 0;
    double mean_theta = 0.0;
    double variance_theta = 0.0;
    /// arccos(E[theta_k]).
    double angle = 0.0;
    /// angle_k / angle_{k-1}; 0 for k = 1.
    double ratio = 0.0;
    double subspace_increment = 0.0;
    double max_increment = 0.0;
    int cg_iterations = 0;
    double orth_residual = 0.0;
};

struct SubspaceStudy {
    std::vector<SubspaceRow> rows;
    /// Eigenvalues at y = 0 (Q + 1 of them) and mu_Q / mu_{Q+1}.
    std::vector<double> center_values;
    double rate = 0.0;
    double angle_floor = 0.0;
    double variance_floor = 0.0;
    /// Geometric window [1, window_last]; ratios are checked on steps 2..window_last.
    int window_last = 0;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    CrossingScan crossing;
    [[nodiscard]] Table table() const;
    [[nodiscard]] Table crossing_table() const;
};

[[nodiscard]] SubspaceStudy subspace_study(const SubspaceStudyOptions& options);

// ---------------------------------------------------------------------------
// Chaos statistics of the eigenvalue against Monte Carlo over pointwise solves.

struct StatisticsStudyOptions {
    ProblemConfig problem{8, 2, 3.2};
    std::size_t size = 31;
    std::size_t samples = 10000;
    std::uint64_t seed = 20240531;
};

struct StatisticsStudy {
    SampleStatistics chaos;
    SampleStatistics rayleigh;
    SampleStatistics monte_carlo;
    /// |chaos - MC| / MC standard error.
    double mean_z = 0.0;
    double variance_z = 0.0;
    [[nodiscard]] Table table() const;
};

[[nodiscard]] StatisticsStudy statistics_study(const StatisticsStudyOptions& options);

// ---------------------------------------------------------------------------
// Pointwise residual and normalization of a converged expansion.

struct ResidualStudyOptions {
    ProblemConfig problem{16, 2, 3.2};
    std::size_t size = 121;
    std::size_t points = 20;
    std::uint64_t seed = 7;
    double tol = 1e-11;
};

struct ResidualRow {
    std::vector<double> y;
    double residual = 0.0;
    double normalization_error = 0.0;
    double eigenvalue_error = 0.0;
    double eigenvector_error = 0.0;
};

struct ResidualStudy {
    std::vector<ResidualRow> rows;
    double max_residual = 0.0;
    double max_normalization_error = 0.0;
    double median_eigenvalue_error = 0.0;
    [[nodiscard]] Table table() const;
};

[[nodiscard]] ResidualStudy residual_study(const ResidualStudyOptions& options);

}  // namespace sgeig
