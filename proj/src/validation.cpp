#include "sgeig/validation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sgeig {

DeterministicEigensolver::DeterministicEigensolver(const ParametricOperator& op, DeterministicOptions options)
    : op_(&op), options_(options) {
    llt_.analyzePattern(op.stiffness.front());
}

PointwiseEigenSolution DeterministicEigensolver::solve(std::span<const double> y, int q) {
    const auto n = static_cast<Eigen::Index>(op_->dof_count());
    if (q < 1 || q > n) throw std::invalid_argument("deterministic_eigensolve: bad subspace size");
    std::vector<double> padded(op_->terms(), 0.0);
    std::copy_n(y.begin(), std::min(y.size(), padded.size()), padded.begin());
    const SparseMatrix k = assemble_pointwise(*op_, padded);
    const SparseMatrix& m = op_->mass;
    llt_.factorize(k);
    if (llt_.info() != Eigen::Success) throw std::runtime_error("K(y) is not positive definite");

    const Eigen::Index b = std::min<Eigen::Index>(q + options_.guard, n);
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(n, b);
    for (Eigen::Index j = 0; j < b; ++j)
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);

    PointwiseEigenSolution out;
    out.y.assign(y.begin(), y.end());
    Eigen::VectorXd values;
    for (out.sweeps = 1; out.sweeps <= options_.max_sweeps; ++out.sweeps) {
        const Eigen::MatrixXd z = llt_.solve(m * x);
        const Eigen::MatrixXd kz = k * z;
        const Eigen::MatrixXd mz = m * z;
        Eigen::MatrixXd a = z.transpose() * kz;
        Eigen::MatrixXd bb = z.transpose() * mz;
        a = 0.5 * (a + a.transpose()).eval();
        bb = 0.5 * (bb + bb.transpose()).eval();
        const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(a, bb);
        values = ritz.eigenvalues();
        x = z * ritz.eigenvectors();
        const Eigen::MatrixXd kx = kz * ritz.eigenvectors();
        const Eigen::MatrixXd mx = mz * ritz.eigenvectors();
        double worst = 0.0;
        for (Eigen::Index i = 0; i < q; ++i) {
            const double r = (kx.col(i) - values[i] * mx.col(i)).norm() / (values[i] * mx.col(i).norm());
            worst = std::max(worst, r);
        }
        out.residual = worst;
        if (worst <= options_.tol) break;
    }
    if (out.sweeps > options_.max_sweeps) throw std::runtime_error("deterministic_eigensolve: no convergence");
    out.values = values.head(q);
    out.vectors = x.leftCols(q);
    for (Eigen::Index i = 0; i < q; ++i) {
        auto col = out.vectors.col(i);
        col /= std::sqrt(col.dot(m * col));
        Eigen::Index arg = 0;
        col.cwiseAbs().maxCoeff(&arg);
        if (col[arg] < 0) col = -col;
    }
    return out;
}

PointwiseEigenSolution deterministic_eigensolve(const ParametricOperator& op, std::span<const double> y, int q,
                                                const DeterministicOptions& options) {
    DeterministicEigensolver solver(op, options);
    return solver.solve(y, q);
}

PointwiseError pointwise_error(const Eigen::MatrixXd& u, const Eigen::VectorXd& mu, const MultiIndexSet& set,
                               const SparseMatrix& mass, std::span<const double> y,
                               const PointwiseEigenSolution& oracle) {
    const Eigen::VectorXd basis = basis_values(set, y);
    const Eigen::VectorXd uy = u * basis;
    Eigen::VectorXd v = oracle.vectors.col(0);
    if (uy.dot(mass * v) < 0) v = -v;
    const Eigen::VectorXd d = uy - v;
    return {std::abs(mu.dot(basis) - oracle.values[0]), std::sqrt(d.dot(mass * d))};
}

SampleStatistics statistics_from_coefficients(const Eigen::VectorXd& c) {
    SampleStatistics s;
    s.mean = c[0];
    s.variance = c.size() > 1 ? c.tail(c.size() - 1).squaredNorm() : 0.0;
    return s;
}

SampleStatistics monte_carlo(const std::function<double(std::span<const double>)>& f, std::size_t dims,
                             std::size_t samples, std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("monte_carlo: need at least two samples");
    const auto points = random_points(dims, samples, seed);
    std::vector<double> values;
    values.reserve(samples);
    for (const auto& y : points) values.push_back(f(y));
    const double n = static_cast<double>(samples);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    SampleStatistics s;
    s.samples = samples;
    s.mean = mean;
    s.variance = m2 / (n - 1.0);
    s.mean_standard_error = std::sqrt(s.variance / n);
    const double mu2 = m2 / n, mu4 = m4 / n;
    s.variance_standard_error = std::sqrt(std::max(mu4 - mu2 * mu2, 0.0) / n);
    return s;
}

std::vector<std::vector<double>> quasi_random_points(std::size_t dims, std::size_t count) {
    // phi_d solves x^{d+1} = x + 1.
    double phi = 2.0;
    for (int it = 0; it < 100; ++it) phi = std::pow(1.0 + phi, 1.0 / static_cast<double>(dims + 1));
    std::vector<double> alpha(dims);
    for (std::size_t j = 0; j < dims; ++j) alpha[j] = std::fmod(std::pow(1.0 / phi, static_cast<double>(j + 1)), 1.0);
    std::vector<std::vector<double>> out(count, std::vector<double>(dims));
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < dims; ++j) {
            const double t = std::fmod(0.5 + static_cast<double>(i + 1) * alpha[j], 1.0);
            out[i][j] = 2.0 * t - 1.0;
        }
    return out;
}

std::vector<std::vector<double>> random_points(std::size_t dims, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<std::vector<double>> out(count, std::vector<double>(dims));
    for (auto& y : out)
        for (auto& v : y) v = uniform(rng);
    return out;
}

double subspace_angle(const std::vector<Eigen::MatrixXd>& basis, const MultiIndexSet& set, const SparseMatrix& mass,
                      std::span<const double> y, const Eigen::MatrixXd& oracle_vectors, bool normalize) {
    const auto q = static_cast<Eigen::Index>(basis.size());
    if (oracle_vectors.cols() != q) throw std::invalid_argument("subspace_angle: dimension mismatch");
    const Eigen::VectorXd lam = basis_values(set, y);
    Eigen::MatrixXd uy(oracle_vectors.rows(), q);
    for (Eigen::Index i = 0; i < q; ++i) uy.col(i) = basis[static_cast<std::size_t>(i)] * lam;
    const Eigen::MatrixXd muy = mass * uy;
    const Eigen::MatrixXd theta = muy.transpose() * oracle_vectors;
    const double det = std::abs(theta.determinant());
    if (!normalize) return det;
    const Eigen::MatrixXd gram = uy.transpose() * muy;
    return det / std::sqrt(gram.determinant());
}

AngleStatistics angle_statistics(const std::vector<double>& theta) {
    AngleStatistics s;
    s.samples = theta.size();
    if (theta.empty()) return s;
    for (double t : theta) s.mean += t;
    s.mean /= static_cast<double>(theta.size());
    for (double t : theta) s.variance += (t - s.mean) * (t - s.mean);
    s.variance /= static_cast<double>(theta.size());
    return s;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            ssr += r * r;
        }
        fit.slope_standard_error = std::sqrt(ssr / (n - 2.0) / sxx);
    }
    return fit;
}

LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    return fit_line(lx, ly);
}

namespace {

double tail_slope(const std::vector<double>& values, std::size_t tail_start) {
    std::vector<double> pos, val;
    for (std::size_t k = tail_start; k <= values.size(); ++k) {
        if (!(values[k - 1] > 0.0)) continue;
        pos.push_back(static_cast<double>(k));
        val.push_back(values[k - 1]);
    }
    if (pos.size() < 2) return 0.0;
    return fit_loglog(pos, val).slope;
}

// Smallest non-increasing majorant: running maximum taken from the right.
std::vector<double> upper_envelope(const std::vector<double>& values) {
    std::vector<double> env(values);
    for (std::size_t k = env.size(); k-- > 1;) env[k - 1] = std::max(env[k - 1], env[k]);
    return env;
}

}  // namespace

CoefficientDecay coefficient_decay_report(const Eigen::MatrixXd& u, const Eigen::VectorXd& mu,
                                          const SparseMatrix& mass, std::size_t tail_start) {
    if (tail_start < 1) throw std::invalid_argument("coefficient_decay_report: positions are 1-based");
    CoefficientDecay out;
    const Eigen::MatrixXd mu_blocks = mass * u;
    for (Eigen::Index a = 0; a < u.cols(); ++a) {
        out.eigenvector_norms.push_back(std::sqrt(std::max(u.col(a).dot(mu_blocks.col(a)), 0.0)));
        out.eigenvalue_norms.push_back(std::abs(mu[a]));
    }
    out.eigenvector_sorted = out.eigenvector_norms;
    out.eigenvalue_sorted = out.eigenvalue_norms;
    std::sort(out.eigenvector_sorted.begin(), out.eigenvector_sorted.end(), std::greater<>());
    std::sort(out.eigenvalue_sorted.begin(), out.eigenvalue_sorted.end(), std::greater<>());
    out.eigenvector_slope = tail_slope(out.eigenvector_norms, tail_start);
    out.eigenvector_sorted_slope = tail_slope(out.eigenvector_sorted, tail_start);
    out.eigenvector_envelope_slope = tail_slope(upper_envelope(out.eigenvector_norms), tail_start);
    out.eigenvalue_slope = tail_slope(out.eigenvalue_norms, tail_start);
    out.eigenvalue_sorted_slope = tail_slope(out.eigenvalue_sorted, tail_start);
    return out;
}

CrossingScan scan_crossing(const ParametricOperator& op, std::uint32_t m, int lower, int points, int q) {
    if (m < 1 || m > op.terms()) throw std::invalid_argument("scan_crossing: parameter out of range");
    if (lower < 0 || lower + 1 >= q || points < 2) throw std::invalid_argument("scan_crossing: bad arguments");
    DeterministicEigensolver solver(op);
    std::vector<double> y(op.terms(), 0.0);
    CrossingScan scan;
    int branch_a = lower, branch_b = lower + 1;
    Eigen::VectorXd prev_a, prev_b;
    for (int k = 0; k < points; ++k) {
        const double t = -1.0 + 2.0 * k / (points - 1);
        y[m - 1] = t;
        const auto sol = solver.solve(y, q);
        scan.parameter.push_back(t);
        scan.values.emplace_back(sol.values.data(), sol.values.data() + sol.values.size());
        if (k == 0) {
            prev_a = sol.vectors.col(branch_a);
            prev_b = sol.vectors.col(branch_b);
            continue;
        }
        const Eigen::VectorXd overlap_a = (sol.vectors.transpose() * (op.mass * prev_a)).cwiseAbs();
        const Eigen::VectorXd overlap_b = (sol.vectors.transpose() * (op.mass * prev_b)).cwiseAbs();
        Eigen::Index next_a = 0, next_b = 0;
        overlap_a.maxCoeff(&next_a);
        overlap_b.maxCoeff(&next_b);
        if (next_a == next_b) {
            // Both branches prefer one vector: give it to the stronger overlap.
            if (overlap_a[next_a] >= overlap_b[next_b]) {
                Eigen::VectorXd ob = overlap_b;
                ob[next_a] = -1.0;
                ob.maxCoeff(&next_b);
            } else {
                Eigen::VectorXd oa = overlap_a;
                oa[next_b] = -1.0;
                oa.maxCoeff(&next_a);
            }
        }
        if ((next_a < next_b) != (branch_a < branch_b)) {
            scan.swaps.push_back(t - 1.0 / (points - 1));
        }
        branch_a = static_cast<int>(next_a);
        branch_b = static_cast<int>(next_b);
        prev_a = sol.vectors.col(branch_a);
        prev_b = sol.vectors.col(branch_b);
    }
    return scan;
}

}  // namespace sgeig
