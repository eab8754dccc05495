#include "sgeig/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace sgeig {

namespace {

GaussRule compute_gauss_rule(std::size_t n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Newton on P_n from the usual cosine guess.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 1; k < n; ++k) {
                const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[n - 1 - i] = x;
        // Weight for the probability measure dx/2.
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Gauss rule needs at least one node");
    static std::mutex mutex;
    static std::map<std::size_t, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_rule(n)).first;
    return it->second;
}

double eval_univariate(unsigned p, double x) {
    double p0 = 1.0;
    if (p == 0) return 1.0;
    double p1 = x;
    for (unsigned k = 1; k < p; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return std::sqrt(2.0 * p + 1.0) * p1;
}

void eval_univariate_all(double x, std::span<double> out) {
    if (out.empty()) return;
    double p0 = 1.0;
    double p1 = x;
    out[0] = 1.0;
    if (out.size() > 1) out[1] = std::sqrt(3.0) * x;
    for (std::size_t k = 1; k + 1 < out.size(); ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
        out[k + 1] = std::sqrt(2.0 * (k + 1) + 1.0) * p2;
    }
}

double univariate_triple(unsigned a, unsigned b, unsigned c) {
    if ((a + b + c) % 2 != 0) return 0.0;
    if (a > b + c || b > a + c || c > a + b) return 0.0;
    const auto& rule = gauss_legendre((a + b + c + 1) / 2 + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes[i];
        sum += rule.weights[i] * eval_univariate(a, x) * eval_univariate(b, x) * eval_univariate(c, x);
    }
    return sum;
}

double univariate_raise(unsigned p) {
    const double q = static_cast<double>(p);
    return (q + 1.0) / std::sqrt((2.0 * q + 1.0) * (2.0 * q + 3.0));
}

std::size_t TripleProductTensor::nonzeros() const {
    std::size_t nnz = 0;
    for (const auto& g : g_) nnz += static_cast<std::size_t>(g.nonZeros());
    return nnz;
}

Eigen::MatrixXd TripleProductTensor::delta(const Eigen::VectorXd& s) const {
    const auto p = static_cast<Eigen::Index>(g_.size());
    if (s.size() != p) throw std::invalid_argument("delta: coefficient size mismatch");
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index a = 0; a < p; ++a) {
        const double sa = s[a];
        if (sa == 0.0) continue;
        const auto& g = g_[a];
        for (Eigen::Index col = 0; col < g.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(g, col); it; ++it) d(it.row(), col) += sa * it.value();
        }
    }
    return d;
}

Eigen::VectorXd TripleProductTensor::contract(const Eigen::VectorXd& s, const Eigen::VectorXd& t) const {
    return contract(Eigen::MatrixXd(s * t.transpose()));
}

Eigen::VectorXd TripleProductTensor::contract(const Eigen::MatrixXd& h) const {
    const auto p = static_cast<Eigen::Index>(g_.size());
    if (h.rows() != p || h.cols() != p) throw std::invalid_argument("contract: matrix size mismatch");
    Eigen::VectorXd out(p);
    for (Eigen::Index a = 0; a < p; ++a) {
        const auto& g = g_[a];
        double sum = 0.0;
        for (Eigen::Index col = 0; col < g.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(g, col); it; ++it) sum += it.value() * h(it.row(), col);
        }
        out[a] = sum;
    }
    return out;
}

RaiseMomentMatrices build_moment_matrices(const MultiIndexSet& set) {
    const auto p = static_cast<Eigen::Index>(set.size());
    const std::uint32_t dims = set.active_dimensions();
    std::vector<std::vector<Eigen::Triplet<double>>> entries(dims + 1);
    for (Eigen::Index a = 0; a < p; ++a) entries[0].emplace_back(a, a, 1.0);
    for (Eigen::Index a = 0; a < p; ++a) {
        const auto& alpha = set[static_cast<std::size_t>(a)];
        for (std::uint32_t m = 1; m <= dims; ++m) {
            const auto pos = set.position_of(alpha.incremented(m));
            if (!pos) continue;
            const double c = univariate_raise(alpha[m]);
            const auto b = static_cast<Eigen::Index>(*pos);
            entries[m].emplace_back(a, b, c);
            entries[m].emplace_back(b, a, c);
        }
    }
    std::vector<SparseMatrix> g;
    g.reserve(dims + 1);
    for (auto& list : entries) {
        SparseMatrix mat(p, p);
        mat.setFromTriplets(list.begin(), list.end());
        g.push_back(std::move(mat));
    }
    return RaiseMomentMatrices(std::move(g));
}

TripleProductTensor build_triple_tensor(const MultiIndexSet& set) {
    const std::size_t p = set.size();
    const unsigned dmax = set.max_degree();
    // Univariate table for degrees 0..dmax in each slot.
    const std::size_t w = dmax + 1;
    std::vector<double> table(w * w * w);
    for (unsigned a = 0; a <= dmax; ++a)
        for (unsigned b = 0; b <= dmax; ++b)
            for (unsigned c = 0; c <= dmax; ++c) table[(a * w + b) * w + c] = univariate_triple(a, b, c);
    auto univariate = [&](unsigned a, unsigned b, unsigned c) { return table[(a * w + b) * w + c]; };

    std::vector<std::vector<Eigen::Triplet<double>>> entries(p);
    std::vector<std::uint32_t> dims;
    std::vector<std::uint32_t> lo, hi, cur;
    for (std::size_t ia = 0; ia < p; ++ia) {
        const auto& alpha = set[ia];
        for (std::size_t ib = 0; ib < p; ++ib) {
            const auto& beta = set[ib];
            // Union of supports; gamma vanishes elsewhere.
            dims.clear();
            for (const auto& e : alpha.entries()) dims.push_back(e.dim);
            for (const auto& e : beta.entries()) dims.push_back(e.dim);
            std::sort(dims.begin(), dims.end());
            dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
            lo.resize(dims.size());
            hi.resize(dims.size());
            bool feasible = true;
            for (std::size_t k = 0; k < dims.size(); ++k) {
                const auto a = alpha[dims[k]];
                const auto b = beta[dims[k]];
                lo[k] = a > b ? a - b : b - a;
                hi[k] = std::min<std::uint32_t>(a + b, dmax);
                if (lo[k] > hi[k]) feasible = false;
            }
            if (!feasible) continue;
            cur = lo;
            while (true) {
                std::vector<MultiIndex::Entry> gamma_entries;
                double value = 1.0;
                for (std::size_t k = 0; k < dims.size(); ++k) {
                    if (cur[k] != 0) gamma_entries.push_back({dims[k], cur[k]});
                    value *= univariate(alpha[dims[k]], beta[dims[k]], cur[k]);
                }
                if (value != 0.0) {
                    const auto pos = set.position_of(MultiIndex::from_entries(std::move(gamma_entries)));
                    if (pos) entries[ia].emplace_back(static_cast<int>(ib), static_cast<int>(*pos), value);
                }
                // Advance the odometer in steps of two (parity).
                std::size_t k = 0;
                for (; k < dims.size(); ++k) {
                    if (cur[k] + 2 <= hi[k]) {
                        cur[k] += 2;
                        break;
                    }
                    cur[k] = lo[k];
                }
                if (k == dims.size()) break;
            }
        }
    }
    std::vector<SparseMatrix> g;
    g.reserve(p);
    for (auto& list : entries) {
        SparseMatrix mat(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
        mat.setFromTriplets(list.begin(), list.end());
        g.push_back(std::move(mat));
    }
    return TripleProductTensor(std::move(g));
}

Eigen::VectorXd basis_values(const MultiIndexSet& set, std::span<const double> y) {
    const std::uint32_t dims = set.active_dimensions();
    if (y.size() < dims) throw std::invalid_argument("parameter point has fewer entries than M(A)");
    const std::size_t w = set.max_degree() + 1;
    std::vector<double> table(static_cast<std::size_t>(dims) * w);
    for (std::uint32_t m = 0; m < dims; ++m) eval_univariate_all(y[m], std::span(table).subspan(m * w, w));
    Eigen::VectorXd values(static_cast<Eigen::Index>(set.size()));
    for (std::size_t k = 0; k < set.size(); ++k) {
        double v = 1.0;
        for (const auto& e : set[k].entries()) v *= table[(e.dim - 1) * w + e.exponent];
        values[static_cast<Eigen::Index>(k)] = v;
    }
    return values;
}

double evaluate_expansion(const Eigen::VectorXd& coeffs, const MultiIndexSet& set, std::span<const double> y) {
    if (coeffs.size() != static_cast<Eigen::Index>(set.size())) {
        throw std::invalid_argument("expansion has a different size than the index set");
    }
    return coeffs.dot(basis_values(set, y));
}

Eigen::VectorXd evaluate_expansion(const Eigen::MatrixXd& coeffs, const MultiIndexSet& set,
                                   std::span<const double> y) {
    if (coeffs.cols() != static_cast<Eigen::Index>(set.size())) {
        throw std::invalid_argument("expansion has a different size than the index set");
    }
    return coeffs * basis_values(set, y);
}

void write_coordinate(std::ostream& out, const SparseMatrix& m) {
    out.precision(17);
    for (Eigen::Index col = 0; col < m.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
}

}  // namespace sgeig
