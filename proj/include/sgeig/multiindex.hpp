#pragma once

// Sparse multi-index sets over (N_0^inf)_c.
//
// A multi-index stores only its nonzero entries as (dimension, exponent)
// pairs with strictly increasing dimensions; dimensions are 1-based to
// match the parameter vector y = (y_1, y_2, ...).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sgeig {

class MultiIndex {
public:
    struct Entry {
        std::uint32_t dim = 0;
        std::uint32_t exponent = 0;
        friend bool operator==(const Entry&, const Entry&) = default;
    };

    MultiIndex() = default;

    /// dense[0] is the exponent of dimension 1. Trailing zeros are fine.
    static MultiIndex from_dense(std::span<const unsigned> dense);
    static MultiIndex from_entries(std::vector<Entry> entries);
    static MultiIndex unit(std::uint32_t dim, std::uint32_t exponent = 1);

    [[nodiscard]] std::uint32_t operator[](std::uint32_t dim) const noexcept;
    [[nodiscard]] std::span<const Entry> entries() const noexcept { return entries_; }
    [[nodiscard]] bool is_zero() const noexcept { return entries_.empty(); }
    [[nodiscard]] std::uint32_t total_degree() const noexcept;
    /// Largest active dimension, 0 for the zero index.
    [[nodiscard]] std::uint32_t last_dimension() const noexcept;

    [[nodiscard]] MultiIndex incremented(std::uint32_t dim) const;
    /// Requires (*this)[dim] >= 1.
    [[nodiscard]] MultiIndex decremented(std::uint32_t dim) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    std::vector<Entry> entries_;
};

/// Graded lexicographic order: lower total degree first, then the larger
/// dense exponent vector (compared from dimension 1 upward) first.
[[nodiscard]] bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

struct MultiIndexHash {
    std::size_t operator()(const MultiIndex& alpha) const noexcept;
};

/// Non-increasing sequence eta_1 >= eta_2 >= ... in (0, 1), evaluated lazily.
class DecayWeights {
public:
    /// eta_m = (tau_m + sqrt(1 + tau_m^2))^{-1}, tau_m = (m+1)^{varsigma-1}.
    static DecayWeights algebraic(double varsigma);
    /// Finite list; dimensions beyond the list never activate.
    static DecayWeights explicit_values(std::vector<double> eta);

    /// eta_m for m >= 1; 0 past the end of an explicit list.
    [[nodiscard]] double operator()(std::uint32_t m) const;
    [[nodiscard]] std::optional<double> varsigma() const noexcept { return varsigma_; }

private:
    std::optional<double> varsigma_;
    std::vector<double> explicit_;
};

/// eta_1..eta_count for the algebraic rule.
[[nodiscard]] std::vector<double> weight_sequence(double varsigma, std::size_t count);

class MultiIndexSet {
public:
    MultiIndexSet() = default;

    /// Builds a set from indices in their canonical order. The zero index
    /// must come first and the set must be downward closed.
    MultiIndexSet(std::vector<MultiIndex> indices, std::vector<double> weights, double eps,
                  std::optional<double> varsigma);

    [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
    [[nodiscard]] const MultiIndex& operator[](std::size_t k) const { return indices_[k]; }
    [[nodiscard]] const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
    [[nodiscard]] auto begin() const noexcept { return indices_.begin(); }
    [[nodiscard]] auto end() const noexcept { return indices_.end(); }

    [[nodiscard]] std::optional<std::size_t> position_of(const MultiIndex& alpha) const;
    [[nodiscard]] bool contains(const MultiIndex& alpha) const { return position_of(alpha).has_value(); }

    /// M(A): largest dimension active in some member, 0 for {0}.
    [[nodiscard]] std::uint32_t active_dimensions() const noexcept { return active_dims_; }
    /// Largest exponent used in any dimension.
    [[nodiscard]] std::uint32_t max_degree() const noexcept { return max_degree_; }

    /// Product weight prod eta_m^{alpha_m} of the k-th member (NaN if unknown).
    [[nodiscard]] double weight(std::size_t k) const { return weights_[k]; }
    [[nodiscard]] double eps() const noexcept { return eps_; }
    [[nodiscard]] std::optional<double> varsigma() const noexcept { return varsigma_; }

    [[nodiscard]] bool is_downward_closed() const;

private:
    std::vector<MultiIndex> indices_;
    std::vector<double> weights_;
    std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> positions_;
    double eps_ = 0.0;
    std::optional<double> varsigma_;
    std::uint32_t active_dims_ = 0;
    std::uint32_t max_degree_ = 0;
};

/// { alpha : prod eta_m^{alpha_m} > eps }, ordered by decreasing weight with
/// graded-lex tie-break. Throws std::invalid_argument unless 0 < eps < 1.
[[nodiscard]] MultiIndexSet generate_index_set(const DecayWeights& weights, double eps);

/// Smallest threshold set with at least `target` members (ties at the
/// boundary are kept together). The recorded eps sits strictly between the
/// last included and the first excluded weight.
[[nodiscard]] MultiIndexSet generate_index_set_with_size(const DecayWeights& weights,
                                                         std::size_t target);

// Plain-text format: a '#' header line with size, eps and varsigma, then one
// line per member of space-separated "dim:exponent" pairs (the zero index is
// an empty line).
void write_index_set(std::ostream& out, const MultiIndexSet& set);
[[nodiscard]] MultiIndexSet read_index_set(std::istream& in);

}  // namespace sgeig
