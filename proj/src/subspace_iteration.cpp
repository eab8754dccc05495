#include "sgeig/subspace_iteration.hpp"

#include "sgeig/validation.hpp"

#include <sstream>

namespace sgeig {

SpectralSubspaceIteration::SpectralSubspaceIteration(const GalerkinSystem& system, SubspaceOptions options)
    : system_(&system), options_(options) {
    if (options_.q < 1) throw std::invalid_argument("subspace iteration: q must be at least 1");
    if (options_.max_steps < 1) throw std::invalid_argument("subspace iteration: max_steps must be at least 1");
}

SpectralBasis SpectralSubspaceIteration::initial_basis() const {
    const auto sol = deterministic_eigensolve(*system_->op, {}, options_.q);
    SpectralBasis basis;
    for (int q = 0; q < options_.q; ++q) {
        SpectralVector u = SpectralVector::Zero(system_->spatial_size(), system_->stochastic_size());
        u.col(0) = sol.vectors.col(q);
        basis.vectors.push_back(std::move(u));
        basis.solves.emplace_back(SpectralVector::Zero(system_->spatial_size(), system_->stochastic_size()));
    }
    return basis;
}

SubspaceStepRecord SpectralSubspaceIteration::iterate_once(SpectralBasis& basis, double cg_tol) const {
    const GalerkinSystem& sys = *system_;
    const SparseMatrix& mass = sys.mass();
    const auto nq = basis.vectors.size();
    SubspaceStepRecord rec;
    rec.k = basis.steps + 1;

    // Step (1).
    std::vector<SpectralVector> v(nq);
    for (std::size_t q = 0; q < nq; ++q) {
        const SpectralVector rhs = apply_mass(mass, basis.vectors[q]);
        const bool warm = basis.solves[q].squaredNorm() > 0.0;
        PcgResult cg = pcg_solve(sys.khat, sys.preconditioner, rhs, warm ? &basis.solves[q] : nullptr,
                                 PcgOptions{cg_tol, options_.cg_max_iterations});
        if (cg.negative_curvature) throw SolverError("subspace step (1): negative curvature in CG");
        if (!cg.converged) throw SolverError("subspace step (1): CG did not converge");
        rec.cg_iterations += cg.iterations;
        v[q] = cg.x;
        basis.solves[q] = std::move(cg.x);
    }
    // Step (2.0).
    if (options_.sum_trick) {
        for (std::size_t q = 1; q < nq; ++q) v[0] += v[q];
    }
    // Steps (2.1)-(2.3), modified Gram-Schmidt against the updated vectors.
    std::vector<SpectralVector> next;
    next.reserve(nq);
    for (std::size_t q = 0; q < nq; ++q) {
        SpectralVector w = v[q];
        const double vnorm = tensor_norm(v[q], mass);
        for (std::size_t i = 0; i < q; ++i) {
            w -= galerkin_multiply(sys.triple, weighted_gram(v[q], next[i], sys.triple, mass), next[i]);
        }
        auto relative_residual = [&] {
            const double wnorm = tensor_norm(w, mass);
            double worst = 0.0;
            for (std::size_t i = 0; i < q; ++i) {
                const double c = weighted_gram(w, next[i], sys.triple, mass).norm();
                worst = std::max(worst, c / (wnorm * tensor_norm(next[i], mass)));
            }
            return worst;
        };
        double worst = q > 0 ? relative_residual() : 0.0;
        for (int pass = 0; worst > options_.orth_tol && pass < options_.max_reorthogonalizations; ++pass) {
            for (std::size_t i = 0; i < q; ++i) {
                w -= galerkin_multiply(sys.triple, weighted_gram(w, next[i], sys.triple, mass), next[i]);
            }
            ++rec.reorthogonalizations;
            worst = relative_residual();
        }
        rec.projection_residual = std::max(rec.projection_residual, worst);
        const double wnorm = tensor_norm(w, mass);
        if (!(wnorm >= options_.breakdown_tol * vnorm)) {
            std::ostringstream msg;
            msg << "subspace iteration breakdown at step " << rec.k << ", vector " << q + 1
                << ": iterates are numerically dependent (||w|| / ||v|| = " << wnorm / vnorm
                << "); use a smaller Q or a richer index set";
            throw SolverError(msg.str());
        }
        const NewtonResult newton = newton_normalize(w, sys.triple, mass, options_.newton);
        rec.newton_iterations = std::max(rec.newton_iterations, newton.iterations);
        const DeltaFactor delta(sys.triple, newton.s, options_.delta_rcond_min);
        next.push_back(delta.solve_block(w));
    }
    for (std::size_t q = 0; q < nq; ++q) {
        rec.max_increment = std::max(rec.max_increment, tensor_norm(next[q] - basis.vectors[q], mass));
        SpectralVector outside = next[q];
        for (const auto& old : basis.vectors) {
            outside -= galerkin_multiply(sys.triple, weighted_gram(next[q], old, sys.triple, mass), old);
        }
        rec.subspace_increment = std::max(rec.subspace_increment, tensor_norm(outside, mass));
        for (std::size_t i = 0; i < q; ++i) {
            rec.orth_residual = std::max(rec.orth_residual, weighted_gram(next[q], next[i], sys.triple, mass).norm());
        }
    }
    basis.vectors = std::move(next);
    basis.steps = rec.k;
    return rec;
}

SpectralBasis SpectralSubspaceIteration::run(const Observer& observer) const { return run(initial_basis(), observer); }

SpectralBasis SpectralSubspaceIteration::run(SpectralBasis basis, const Observer& observer) const {
    double previous = 1.0;
    while (basis.steps < options_.max_steps) {
        const auto rec = iterate_once(basis, cg_tolerance(previous, options_.cg_factor, options_.cg_tol_min));
        basis.history.push_back(rec);
        if (observer) observer(basis, rec);
        previous = rec.subspace_increment;
        basis.converged = rec.max_increment < options_.tol;
        if (basis.converged && !options_.run_all_steps) break;
    }
    return basis;
}

}  // namespace sgeig
