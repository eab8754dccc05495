#pragma once

// Spectral inverse iteration: inverse power iteration on chaos coefficients
// with every product and normalization replaced by its Galerkin projection.

#include "sgeig/stochastic_galerkin.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sgeig {

struct InverseIterationOptions {
    /// Stop once ||u^(k) - u^(k-1)|| < tol.
    double tol = 1e-10;
    int max_steps = 100;
    /// Keep iterating to max_steps even after the tolerance is met.
    bool run_all_steps = false;
    /// CG tolerance schedule max(cg_tol_min, cg_factor * previous increment).
    double cg_factor = 1e-2;
    double cg_tol_min = 1e-12;
    int cg_max_iterations = 1000;
    NewtonOptions newton{};
    double delta_rcond_min = 1e-13;
    /// Also extract the eigenvalue from the projected Rayleigh quotient.
    bool rayleigh = true;
};

struct IterationState {
    SpectralVector u;
    SpectralVector v;
    Eigen::VectorXd s;
    Eigen::VectorXd mu;
    int k = 0;
};

struct StepRecord {
    int k = 0;
    double increment = 0.0;
    /// ||mu^(k) - mu^(k-1)|| (Euclidean on coefficients).
    double mu_change = 0.0;
    double mu_mean = 0.0;
    int cg_iterations = 0;
    double cg_residual = 0.0;
    int newton_iterations = 0;
    double delta_rcond = 0.0;
};

struct EigenpairResult {
    SpectralVector u;
    /// From Delta(s) mu = e_1.
    Eigen::VectorXd mu;
    /// From Delta(F^v(u,u)) mu = F^I(u, K_hat u); empty when not requested.
    Eigen::VectorXd mu_rayleigh;
    Eigen::VectorXd s;
    bool converged = false;
    int steps = 0;
    std::vector<StepRecord> history;

    [[nodiscard]] double mean() const { return mu[0]; }
    [[nodiscard]] double variance() const { return mu.size() > 1 ? mu.tail(mu.size() - 1).squaredNorm() : 0.0; }
};

class SpectralInverseIteration {
public:
    using Observer = std::function<void(const IterationState&, const StepRecord&)>;

    SpectralInverseIteration(const GalerkinSystem& system, InverseIterationOptions options = {});

    /// Smallest eigenvector of (K^(0), M) in the alpha = 0 block, M-normalized,
    /// largest entry positive.
    [[nodiscard]] SpectralVector initial_guess() const;
    [[nodiscard]] IterationState initial_state(const SpectralVector& u0) const;

    /// One pass of steps (1)-(3); updates the state and returns the step record.
    StepRecord iterate_once(IterationState& state, double cg_tol) const;

    /// Iterates from u0 (default: initial_guess()). The observer sees every state.
    [[nodiscard]] EigenpairResult run(const std::optional<SpectralVector>& u0 = std::nullopt,
                                      const Observer& observer = {}) const;

    /// Rayleigh-quotient eigenvalue coefficients for an eigenvector expansion u.
    [[nodiscard]] Eigen::VectorXd rayleigh_eigenvalue(const SpectralVector& u) const;

    [[nodiscard]] const GalerkinSystem& system() const noexcept { return *system_; }
    [[nodiscard]] const InverseIterationOptions& options() const noexcept { return options_; }

private:
    const GalerkinSystem* system_;
    InverseIterationOptions options_;
};

/// CSV with header "tag,k,increment,mu_change,mu_mean,cg_iterations,cg_residual,newton_iterations,delta_rcond".
void write_history_csv(std::ostream& out, const std::vector<StepRecord>& history, const std::string& tag,
                       bool header = true);

}  // namespace sgeig
