#include "sgeig/multiindex.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace sgeig {

MultiIndex MultiIndex::from_dense(std::span<const unsigned> dense) {
    MultiIndex alpha;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != 0) {
            alpha.entries_.push_back({static_cast<std::uint32_t>(i + 1), dense[i]});
        }
    }
    return alpha;
}

MultiIndex MultiIndex::from_entries(std::vector<Entry> entries) {
    std::erase_if(entries, [](const Entry& e) { return e.exponent == 0; });
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.dim < b.dim; });
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].dim == 0) throw std::invalid_argument("multi-index dimensions are 1-based");
        if (i > 0 && entries[i].dim == entries[i - 1].dim) {
            throw std::invalid_argument("multi-index has a repeated dimension");
        }
    }
    MultiIndex alpha;
    alpha.entries_ = std::move(entries);
    return alpha;
}

MultiIndex MultiIndex::unit(std::uint32_t dim, std::uint32_t exponent) {
    return from_entries({{dim, exponent}});
}

std::uint32_t MultiIndex::operator[](std::uint32_t dim) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), dim,
                               [](const Entry& e, std::uint32_t d) { return e.dim < d; });
    return (it != entries_.end() && it->dim == dim) ? it->exponent : 0;
}

std::uint32_t MultiIndex::total_degree() const noexcept {
    std::uint32_t sum = 0;
    for (const auto& e : entries_) sum += e.exponent;
    return sum;
}

std::uint32_t MultiIndex::last_dimension() const noexcept {
    return entries_.empty() ? 0 : entries_.back().dim;
}

MultiIndex MultiIndex::incremented(std::uint32_t dim) const {
    if (dim == 0) throw std::invalid_argument("multi-index dimensions are 1-based");
    MultiIndex out = *this;
    auto it = std::lower_bound(out.entries_.begin(), out.entries_.end(), dim,
                               [](const Entry& e, std::uint32_t d) { return e.dim < d; });
    if (it != out.entries_.end() && it->dim == dim) {
        ++it->exponent;
    } else {
        out.entries_.insert(it, Entry{dim, 1});
    }
    return out;
}

MultiIndex MultiIndex::decremented(std::uint32_t dim) const {
    MultiIndex out = *this;
    auto it = std::lower_bound(out.entries_.begin(), out.entries_.end(), dim,
                               [](const Entry& e, std::uint32_t d) { return e.dim < d; });
    if (it == out.entries_.end() || it->dim != dim) {
        throw std::invalid_argument("cannot decrement a zero exponent");
    }
    if (--it->exponent == 0) out.entries_.erase(it);
    return out;
}

std::string MultiIndex::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) os << ' ';
        os << entries_[i].dim << ':' << entries_[i].exponent;
    }
    return os.str();
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
    const auto da = a.total_degree();
    const auto db = b.total_degree();
    if (da != db) return da < db;
    // Walk the sparse entries as if they were dense vectors.
    auto ea = a.entries();
    auto eb = b.entries();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ea.size() || j < eb.size()) {
        const std::uint32_t dim_a = i < ea.size() ? ea[i].dim : std::numeric_limits<std::uint32_t>::max();
        const std::uint32_t dim_b = j < eb.size() ? eb[j].dim : std::numeric_limits<std::uint32_t>::max();
        const std::uint32_t dim = std::min(dim_a, dim_b);
        const std::uint32_t xa = dim_a == dim ? ea[i].exponent : 0;
        const std::uint32_t xb = dim_b == dim ? eb[j].exponent : 0;
        if (xa != xb) return xa > xb;
        if (dim_a == dim) ++i;
        if (dim_b == dim) ++j;
    }
    return false;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& alpha) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& e : alpha.entries()) {
        h ^= (static_cast<std::size_t>(e.dim) << 20 | e.exponent) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

DecayWeights DecayWeights::algebraic(double varsigma) {
    if (!(varsigma > 1.0)) throw std::invalid_argument("decay exponent varsigma must exceed 1");
    DecayWeights w;
    w.varsigma_ = varsigma;
    return w;
}

DecayWeights DecayWeights::explicit_values(std::vector<double> eta) {
    for (std::size_t i = 0; i < eta.size(); ++i) {
        if (!(eta[i] > 0.0 && eta[i] < 1.0)) throw std::invalid_argument("weights must lie in (0,1)");
        if (i > 0 && eta[i] > eta[i - 1]) throw std::invalid_argument("weights must be non-increasing");
    }
    DecayWeights w;
    w.explicit_ = std::move(eta);
    return w;
}

double DecayWeights::operator()(std::uint32_t m) const {
    if (m == 0) throw std::invalid_argument("weight index is 1-based");
    if (varsigma_) {
        const double tau = std::pow(static_cast<double>(m) + 1.0, *varsigma_ - 1.0);
        return 1.0 / (tau + std::sqrt(1.0 + tau * tau));
    }
    return m <= explicit_.size() ? explicit_[m - 1] : 0.0;
}

std::vector<double> weight_sequence(double varsigma, std::size_t count) {
    if (count < 1) throw std::invalid_argument("weight_sequence needs count >= 1");
    const auto rule = DecayWeights::algebraic(varsigma);
    std::vector<double> eta(count);
    for (std::size_t m = 1; m <= count; ++m) eta[m - 1] = rule(static_cast<std::uint32_t>(m));
    return eta;
}

MultiIndexSet::MultiIndexSet(std::vector<MultiIndex> indices, std::vector<double> weights, double eps,
                             std::optional<double> varsigma)
    : indices_(std::move(indices)), weights_(std::move(weights)), eps_(eps), varsigma_(varsigma) {
    if (indices_.empty() || !indices_.front().is_zero()) {
        throw std::invalid_argument("multi-index set must start with the zero index");
    }
    if (weights_.size() != indices_.size()) {
        throw std::invalid_argument("one weight per multi-index required");
    }
    positions_.reserve(indices_.size());
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        if (!positions_.emplace(indices_[k], k).second) {
            throw std::invalid_argument("duplicate multi-index " + indices_[k].to_string());
        }
        for (const auto& e : indices_[k].entries()) {
            active_dims_ = std::max(active_dims_, e.dim);
            max_degree_ = std::max(max_degree_, e.exponent);
        }
    }
    if (!is_downward_closed()) throw std::invalid_argument("multi-index set is not downward closed");
}

std::optional<std::size_t> MultiIndexSet::position_of(const MultiIndex& alpha) const {
    auto it = positions_.find(alpha);
    if (it == positions_.end()) return std::nullopt;
    return it->second;
}

bool MultiIndexSet::is_downward_closed() const {
    for (const auto& alpha : indices_) {
        for (const auto& e : alpha.entries()) {
            if (!positions_.contains(alpha.decremented(e.dim))) return false;
        }
    }
    return true;
}

namespace {

double product_weight(const DecayWeights& eta, const MultiIndex& alpha) {
    double w = 1.0;
    for (const auto& e : alpha.entries()) {
        const double base = eta(e.dim);
        for (std::uint32_t p = 0; p < e.exponent; ++p) w *= base;
    }
    return w;
}

struct Candidate {
    double weight;
    MultiIndex alpha;
};

struct HeavierFirst {
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.weight != b.weight) return a.weight < b.weight;
        return graded_lex_less(b.alpha, a.alpha);
    }
};

// Every nonzero index is a nondecreasing sequence of dimensions d_1 <= ... <= d_k.
// Its children append d_k again or bump d_k to d_k + 1; this spans the whole
// lattice exactly once and children never outweigh their parent.
void push_children(const DecayWeights& eta, const Candidate& c, double floor,
                   std::priority_queue<Candidate, std::vector<Candidate>, HeavierFirst>& frontier) {
    auto push = [&](MultiIndex alpha) {
        const double w = product_weight(eta, alpha);
        if (w > floor) frontier.push({w, std::move(alpha)});
    };
    const std::uint32_t last = c.alpha.last_dimension();
    if (last == 0) {
        push(MultiIndex::unit(1));
        return;
    }
    push(c.alpha.incremented(last));
    push(c.alpha.decremented(last).incremented(last + 1));
}

MultiIndexSet finish(std::vector<Candidate> members, double eps, const DecayWeights& eta) {
    std::stable_sort(members.begin(), members.end(), [](const Candidate& a, const Candidate& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return graded_lex_less(a.alpha, b.alpha);
    });
    std::vector<MultiIndex> indices;
    std::vector<double> weights;
    indices.reserve(members.size());
    weights.reserve(members.size());
    for (auto& m : members) {
        indices.push_back(std::move(m.alpha));
        weights.push_back(m.weight);
    }
    return MultiIndexSet(std::move(indices), std::move(weights), eps, eta.varsigma());
}

}  // namespace

MultiIndexSet generate_index_set(const DecayWeights& weights, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive (eps = 0 gives an infinite set)");
    if (!(eps < 1.0)) throw std::invalid_argument("eps must be below 1 (the zero index has weight 1)");
    std::priority_queue<Candidate, std::vector<Candidate>, HeavierFirst> frontier;
    frontier.push({1.0, MultiIndex{}});
    std::vector<Candidate> members;
    while (!frontier.empty()) {
        Candidate c = frontier.top();
        frontier.pop();
        push_children(weights, c, eps, frontier);
        members.push_back(std::move(c));
    }
    return finish(std::move(members), eps, weights);
}

MultiIndexSet generate_index_set_with_size(const DecayWeights& weights, std::size_t target) {
    if (target < 1) throw std::invalid_argument("target cardinality must be at least 1");
    std::priority_queue<Candidate, std::vector<Candidate>, HeavierFirst> frontier;
    frontier.push({1.0, MultiIndex{}});
    std::vector<Candidate> members;
    while (!frontier.empty()) {
        if (members.size() >= target && frontier.top().weight < members.back().weight) break;
        Candidate c = frontier.top();
        frontier.pop();
        push_children(weights, c, 0.0, frontier);
        members.push_back(std::move(c));
    }
    const double last = members.back().weight;
    const double next = frontier.empty() ? 0.0 : frontier.top().weight;
    const double eps = next > 0.0 ? std::sqrt(last * next) : 0.5 * last;
    return finish(std::move(members), eps, weights);
}

void write_index_set(std::ostream& out, const MultiIndexSet& set) {
    out.precision(17);
    out << "# multiindex-set size=" << set.size() << " eps=" << set.eps();
    if (set.varsigma()) out << " varsigma=" << *set.varsigma();
    out << '\n';
    for (const auto& alpha : set) out << alpha.to_string() << '\n';
}

MultiIndexSet read_index_set(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("# multiindex-set", 0) != 0) {
        throw std::runtime_error("index set file: missing '# multiindex-set' header");
    }
    std::size_t size = 0;
    double eps = 0.0;
    std::optional<double> varsigma;
    std::istringstream hs(header.substr(16));
    std::string field;
    while (hs >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "size") size = std::stoul(value);
        else if (key == "eps") eps = std::stod(value);
        else if (key == "varsigma") varsigma = std::stod(value);
    }
    std::vector<MultiIndex> indices;
    std::string line;
    while (indices.size() < size && std::getline(in, line)) {
        std::vector<MultiIndex::Entry> entries;
        std::istringstream ls(line);
        std::string pair;
        while (ls >> pair) {
            const auto colon = pair.find(':');
            if (colon == std::string::npos) throw std::runtime_error("index set file: bad pair '" + pair + "'");
            entries.push_back({static_cast<std::uint32_t>(std::stoul(pair.substr(0, colon))),
                               static_cast<std::uint32_t>(std::stoul(pair.substr(colon + 1)))});
        }
        indices.push_back(MultiIndex::from_entries(std::move(entries)));
    }
    if (indices.size() != size) throw std::runtime_error("index set file: truncated");
    std::vector<double> weights(size, std::numeric_limits<double>::quiet_NaN());
    if (varsigma) {
        const auto eta = DecayWeights::algebraic(*varsigma);
        for (std::size_t k = 0; k < size; ++k) weights[k] = product_weight(eta, indices[k]);
    }
    return MultiIndexSet(std::move(indices), std::move(weights), eps, varsigma);
}

}  // namespace sgeig
