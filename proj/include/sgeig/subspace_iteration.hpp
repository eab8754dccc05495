#pragma once

// Spectral subspace iteration: Q simultaneous spectral inverse iterations
// kept apart by a Galerkin-projected Gram-Schmidt process.

#include "sgeig/stochastic_galerkin.hpp"

#include <functional>
#include <vector>

namespace sgeig {

struct SubspaceOptions {
    int q = 3;
    int max_steps = 50;
    /// Stop once the largest per-vector increment is below tol. With sum_trick the
    /// vectors keep rotating inside the subspace, so runs go to max_steps.
    double tol = 1e-10;
    bool run_all_steps = false;
    /// Replace v^(1) by sum_q v^(q) before orthogonalization (robust to eigenvalue crossings).
    bool sum_trick = false;
    double cg_factor = 1e-2;
    double cg_tol_min = 1e-12;
    int cg_max_iterations = 1000;
    NewtonOptions newton{};
    double delta_rcond_min = 1e-13;
    /// Breakdown when ||w^(q)|| < breakdown_tol * ||v^(q)||.
    double breakdown_tol = 1e-8;
    /// Repeat the projection while ||F^v(w, u_i)|| / (||w|| ||u_i||) exceeds orth_tol.
    double orth_tol = 1e-8;
    int max_reorthogonalizations = 3;
};

struct SubspaceStepRecord {
    int k = 0;
    double max_increment = 0.0;
    /// max_q ||u^(k,q) - sum_i T(F^v(u^(k,q), u^(k-1,i))) u^(k-1,i)||: distance of the new
    /// vectors from the previous span, invariant under rotations inside it. Drives the CG schedule.
    double subspace_increment = 0.0;
    int cg_iterations = 0;
    int newton_iterations = 0;
    int reorthogonalizations = 0;
    /// max_{i<q} ||F^v(w^(q), u^(k,i))|| / (||w^(q)|| ||u^(k,i)||) before step (2.3): what
    /// Gram-Schmidt drives below orth_tol.
    double projection_residual = 0.0;
    /// max_{i<q} ||F^v(u^(k,q), u^(k,i))|| after normalization. Galerkin products are not
    /// associative, so this is only as small as the stochastic resolution of A allows.
    double orth_residual = 0.0;
};

struct SpectralBasis {
    std::vector<SpectralVector> vectors;
    /// Step (1) solutions, kept as CG warm starts.
    std::vector<SpectralVector> solves;
    int steps = 0;
    bool converged = false;
    std::vector<SubspaceStepRecord> history;
};

class SpectralSubspaceIteration {
public:
    using Observer = std::function<void(const SpectralBasis&, const SubspaceStepRecord&)>;

    SpectralSubspaceIteration(const GalerkinSystem& system, SubspaceOptions options = {});

    /// The Q smallest eigenvectors of (K^(0), M) in the alpha = 0 blocks.
    [[nodiscard]] SpectralBasis initial_basis() const;
    SubspaceStepRecord iterate_once(SpectralBasis& basis, double cg_tol) const;
    [[nodiscard]] SpectralBasis run(const Observer& observer = {}) const;
    [[nodiscard]] SpectralBasis run(SpectralBasis basis, const Observer& observer) const;

    [[nodiscard]] const GalerkinSystem& system() const noexcept { return *system_; }

private:
    const GalerkinSystem* system_;
    SubspaceOptions options_;
};

}  // namespace sgeig
