#include "sgeig/inverse_iteration.hpp"

#include "sgeig/validation.hpp"

#include <ostream>
#include <sstream>

namespace sgeig {

SpectralInverseIteration::SpectralInverseIteration(const GalerkinSystem& system, InverseIterationOptions options)
    : system_(&system), options_(options) {
    if (!(options_.tol > 0.0)) throw std::invalid_argument("inverse iteration: tol must be positive");
}

SpectralVector SpectralInverseIteration::initial_guess() const {
    const auto sol = deterministic_eigensolve(*system_->op, {}, 1);
    SpectralVector u = SpectralVector::Zero(system_->spatial_size(), system_->stochastic_size());
    u.col(0) = sol.vectors.col(0);
    return u;
}

IterationState SpectralInverseIteration::initial_state(const SpectralVector& u0) const {
    if (u0.rows() != system_->spatial_size() || u0.cols() != system_->stochastic_size()) {
        throw std::invalid_argument("inverse iteration: initial guess has the wrong shape");
    }
    IterationState state;
    state.u = u0;
    state.v = SpectralVector::Zero(u0.rows(), u0.cols());
    state.s = Eigen::VectorXd::Zero(u0.cols());
    state.mu = Eigen::VectorXd::Zero(u0.cols());
    return state;
}

StepRecord SpectralInverseIteration::iterate_once(IterationState& state, double cg_tol) const {
    const GalerkinSystem& sys = *system_;
    StepRecord rec;
    rec.k = state.k + 1;

    const SpectralVector rhs = apply_mass(sys.mass(), state.u);
    const bool warm = state.v.squaredNorm() > 0.0;
    PcgResult cg = pcg_solve(sys.khat, sys.preconditioner, rhs, warm ? &state.v : nullptr,
                             PcgOptions{cg_tol, options_.cg_max_iterations});
    if (cg.negative_curvature) {
        throw SolverError("step (1): K_hat is not positive definite (negative curvature in CG); check the shift");
    }
    if (!cg.converged) {
        std::ostringstream msg;
        msg << "step (1): CG did not reach " << cg_tol << " in " << cg.iterations << " iterations (residual "
            << cg.relative_residual << ")";
        throw SolverError(msg.str());
    }
    rec.cg_iterations = cg.iterations;
    rec.cg_residual = cg.relative_residual;

    const NewtonResult newton = newton_normalize(cg.x, sys.triple, sys.mass(), options_.newton);
    rec.newton_iterations = newton.iterations;

    const DeltaFactor delta(sys.triple, newton.s, options_.delta_rcond_min);
    rec.delta_rcond = delta.rcond();
    SpectralVector u = delta.solve_block(cg.x);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(newton.s.size());
    e1[0] = 1.0;
    Eigen::VectorXd mu = delta.solve(e1);
    if (sys.khat.shift()) mu[0] += *sys.khat.shift();

    rec.increment = tensor_norm(u - state.u, sys.mass());
    rec.mu_change = (mu - state.mu).norm();
    rec.mu_mean = mu[0];

    state.u = std::move(u);
    state.v = std::move(cg.x);
    state.s = newton.s;
    state.mu = std::move(mu);
    state.k = rec.k;
    return rec;
}

EigenpairResult SpectralInverseIteration::run(const std::optional<SpectralVector>& u0,
                                              const Observer& observer) const {
    const SpectralVector start = u0 ? *u0 : initial_guess();
    IterationState state = initial_state(start);
    EigenpairResult result;
    double previous = 1.0;
    while (state.k < options_.max_steps) {
        const StepRecord rec =
            iterate_once(state, cg_tolerance(previous, options_.cg_factor, options_.cg_tol_min));
        result.history.push_back(rec);
        if (observer) observer(state, rec);
        previous = rec.increment;
        if (rec.increment < options_.tol) {
            result.converged = true;
            if (!options_.run_all_steps) break;
        } else {
            result.converged = false;
        }
    }
    // Global sign: positive M-overlap of the mean block with the start.
    const Eigen::VectorXd m0 = system_->mass() * start.col(0);
    if (state.u.col(0).dot(m0) < 0.0) state.u = -state.u;

    result.u = std::move(state.u);
    result.mu = std::move(state.mu);
    result.s = std::move(state.s);
    result.steps = state.k;
    if (options_.rayleigh) result.mu_rayleigh = rayleigh_eigenvalue(result.u);
    return result;
}

Eigen::VectorXd SpectralInverseIteration::rayleigh_eigenvalue(const SpectralVector& u) const {
    // P_A(||u||_M^2 mu) = P_A(u . P_A(K u)), both sides contracted against G^(alpha).
    const GalerkinSystem& sys = *system_;
    const Eigen::VectorXd norm2 = weighted_gram(u, u, sys.triple, sys.mass());
    const Eigen::VectorXd energy = weighted_gram(u, sys.khat.apply(u), sys.triple);
    const DeltaFactor delta(sys.triple, norm2, options_.delta_rcond_min);
    Eigen::VectorXd mu = delta.solve(energy);
    if (sys.khat.shift()) mu[0] += *sys.khat.shift();
    return mu;
}

void write_history_csv(std::ostream& out, const std::vector<StepRecord>& history, const std::string& tag,
                       bool header) {
    if (header) out << "tag,k,increment,mu_change,mu_mean,cg_iterations,cg_residual,newton_iterations,delta_rcond\n";
    const auto old = out.precision(17);
    for (const auto& r : history) {
        out << tag << ',' << r.k << ',' << r.increment << ',' << r.mu_change << ',' << r.mu_mean << ','
            << r.cg_iterations << ',' << r.cg_residual << ',' << r.newton_iterations << ',' << r.delta_rcond << '\n';
    }
    out.precision(old);
}

}  // namespace sgeig
