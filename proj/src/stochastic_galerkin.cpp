#include "sgeig/stochastic_galerkin.hpp"

#include <cmath>
#include <sstream>

namespace sgeig {

double tensor_norm(const SpectralVector& v, const SparseMatrix& mass) {
    return std::sqrt(v.cwiseProduct(mass * v).sum());
}

SpectralVector apply_mass(const SparseMatrix& mass, const SpectralVector& v) { return mass * v; }

KroneckerOperator::KroneckerOperator(const ParametricOperator& op, const RaiseMomentMatrices& moments,
                                     std::optional<double> shift)
    : op_(&op), shift_(shift), n_(static_cast<Eigen::Index>(op.dof_count())),
      p_(static_cast<Eigen::Index>(moments.stochastic_size())) {
    const std::size_t active = moments.count() - 1;
    if (active > op.terms()) {
        throw std::invalid_argument("index set activates " + std::to_string(active) +
                                    " dimensions but the operator has only " + std::to_string(op.terms()) +
                                    " parametric terms");
    }
    for (std::size_t m = 1; m <= active; ++m) {
        Term term{&op.stiffness[m], &moments[m], {}, std::vector<Eigen::Index>(p_, -1)};
        const SparseMatrix& g = moments[m];
        for (Eigen::Index j = 0; j < g.outerSize(); ++j) {
            if (g.col(j).nonZeros() == 0) continue;
            term.slot[j] = static_cast<Eigen::Index>(term.columns.size());
            term.columns.push_back(j);
        }
        if (!term.columns.empty()) terms_.push_back(std::move(term));
    }
}

SpectralVector KroneckerOperator::apply(const SpectralVector& v) const {
    SpectralVector y = op_->stiffness.front() * v;
    if (shift_) y.noalias() -= *shift_ * (op_->mass * v);
    Eigen::MatrixXd gathered;
    Eigen::MatrixXd applied;
    for (const auto& term : terms_) {
        const auto c = static_cast<Eigen::Index>(term.columns.size());
        gathered.resize(n_, c);
        for (Eigen::Index k = 0; k < c; ++k) gathered.col(k) = v.col(term.columns[k]);
        applied.noalias() = *term.stiffness * gathered;
        // y_alpha += sum_beta [G^(m)]_{alpha beta} K^(m) v_beta, G^(m) symmetric.
        const SparseMatrix& g = *term.moment;
        for (Eigen::Index j = 0; j < g.outerSize(); ++j) {
            for (SparseMatrix::InnerIterator it(g, j); it; ++it) {
                y.col(j) += it.value() * applied.col(term.slot[it.row()]);
            }
        }
    }
    return y;
}

MeanPreconditioner::MeanPreconditioner(const SparseMatrix& k0) : llt_(k0) {
    if (llt_.info() != Eigen::Success) throw SolverError("mean stiffness matrix is not positive definite");
}

SpectralVector MeanPreconditioner::apply(const SpectralVector& r) const { return llt_.solve(r); }

namespace {

double frob(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

PcgResult pcg_solve(const KroneckerOperator& op, const MeanPreconditioner& pre, const SpectralVector& rhs,
                    const SpectralVector* initial, const PcgOptions& options) {
    PcgResult out;
    const double bnorm2 = frob(rhs, pre.apply(rhs));
    if (bnorm2 == 0.0) {
        out.x = SpectralVector::Zero(rhs.rows(), rhs.cols());
        out.converged = true;
        return out;
    }
    out.x = initial ? *initial : SpectralVector::Zero(rhs.rows(), rhs.cols());
    SpectralVector r = initial ? SpectralVector(rhs - op.apply(out.x)) : rhs;
    SpectralVector z = pre.apply(r);
    double rz = frob(r, z);
    out.relative_residual = std::sqrt(std::max(rz, 0.0) / bnorm2);
    out.history.push_back(out.relative_residual);
    SpectralVector p = z;
    while (out.relative_residual > options.tol) {
        if (out.iterations >= options.max_iterations) return out;
        const SpectralVector ap = op.apply(p);
        const double curvature = frob(p, ap);
        if (!(curvature > 0.0)) {
            out.negative_curvature = true;
            return out;
        }
        const double alpha = rz / curvature;
        out.x.noalias() += alpha * p;
        r.noalias() -= alpha * ap;
        z = pre.apply(r);
        const double rz_next = frob(r, z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
        ++out.iterations;
        out.relative_residual = std::sqrt(std::max(rz, 0.0) / bnorm2);
        out.history.push_back(out.relative_residual);
    }
    out.converged = true;
    return out;
}

double cg_tolerance(double increment, double factor, double tol_min) {
    return std::max(tol_min, factor * increment);
}

Eigen::VectorXd weighted_gram(const SpectralVector& v, const SpectralVector& w, const TripleProductTensor& g,
                              const SparseMatrix& mass) {
    const Eigen::MatrixXd h = v.transpose() * (mass * w);
    return g.contract(h);
}

Eigen::VectorXd weighted_gram(const SpectralVector& v, const SpectralVector& w, const TripleProductTensor& g) {
    const Eigen::MatrixXd h = v.transpose() * w;
    return g.contract(h);
}

SpectralVector galerkin_multiply(const TripleProductTensor& g, const Eigen::VectorXd& c, const SpectralVector& u) {
    return u * g.delta(c);
}

DeltaFactor::DeltaFactor(const TripleProductTensor& g, const Eigen::VectorXd& s, double rcond_min)
    : delta_(g.delta(s)), lu_(delta_) {
    rcond_ = lu_.rcond();
    if (!(rcond_ >= rcond_min)) {
        std::ostringstream msg;
        msg << "Delta(s) is numerically singular (rcond " << rcond_ << ", s_0 = " << s[0]
            << "); the scalar s has likely lost positivity";
        throw SolverError(msg.str());
    }
}

Eigen::VectorXd DeltaFactor::solve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }

SpectralVector DeltaFactor::solve_block(const SpectralVector& v) const {
    // Delta is symmetric: U Delta = V  <=>  Delta U^T = V^T.
    return lu_.solve(v.transpose()).transpose();
}

NewtonResult newton_normalize(const SpectralVector& v, const TripleProductTensor& g, const SparseMatrix& mass,
                              const NewtonOptions& options) {
    return newton_normalize(weighted_gram(v, v, g, mass), g, options);
}

NewtonResult newton_normalize(const Eigen::VectorXd& target, const TripleProductTensor& g,
                              const NewtonOptions& options) {
    const double norm2 = target[0];
    if (!(norm2 > 0.0)) throw SolverError("newton_normalize: zero spectral vector");
    NewtonResult out;
    out.s = Eigen::VectorXd::Zero(target.size());
    out.s[0] = std::sqrt(norm2);
    auto residual = [&](const Eigen::VectorXd& s) { return Eigen::VectorXd(g.contract(s, s) - target); };

    Eigen::VectorXd f = residual(out.s);
    double r = f.norm();
    out.residuals.push_back(r);
    while (r > options.tol * norm2) {
        if (out.iterations >= options.max_iterations) {
            std::ostringstream msg;
            msg << "newton_normalize: no convergence after " << out.iterations << " iterations, residual "
                << r / norm2 << " (relative)";
            throw SolverError(msg.str());
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> jac(2.0 * g.delta(out.s));
        if (!(jac.rcond() > 1e-14)) throw SolverError("newton_normalize: singular Jacobian 2 Delta(s)");
        const Eigen::VectorXd step = -jac.solve(f);
        double t = 1.0;
        Eigen::VectorXd trial = out.s + step;
        Eigen::VectorXd ft = residual(trial);
        for (int h = 0; h < options.max_halvings && !(ft.norm() < r); ++h) {
            t *= 0.5;
            trial = out.s + t * step;
            ft = residual(trial);
        }
        out.s = std::move(trial);
        f = std::move(ft);
        r = f.norm();
        out.residuals.push_back(r);
        ++out.iterations;
    }
    return out;
}

GalerkinSystem::GalerkinSystem(const ParametricOperator& op_, MultiIndexSet set_, std::optional<double> shift)
    : op(&op_), set(std::move(set_)), moments(build_moment_matrices(set)), triple(build_triple_tensor(set)),
      khat(op_, moments, shift), preconditioner(op_.stiffness.front()) {}

}  // namespace sgeig
