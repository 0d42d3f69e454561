#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace plurilab::forms {

/// Strictly increasing tuple of distinct indices in 1..n, at most 4 entries.
/// Used to label dz_I and dzbar_J slots of a form.
class MultiIndex {
public:
    MultiIndex() = default;
    /// From an already sorted strictly increasing list. Throws on violation.
    explicit MultiIndex(std::span<const int> sorted);

    /// Builds from arbitrary distinct entries; returns the index together with
    /// the sign of the permutation that sorts them. Sign 0 means a repeated
    /// entry (the wedge monomial vanishes).
    static std::pair<MultiIndex, int> from_unsorted(std::span<const int> entries);

    int size() const { return size_; }
    int operator[](int i) const { return idx_[size_t(i)]; }
    bool contains(int k) const;
    bool empty() const { return size_ == 0; }

    /// Merge with another disjoint index set; returns (merged, shuffle sign),
    /// sign 0 if the sets intersect.
    std::pair<MultiIndex, int> merge(const MultiIndex& other) const;

    /// Insert a single index; (result, sign), sign 0 if already present.
    std::pair<MultiIndex, int> insert(int k) const;

    /// All strictly increasing q-tuples in 1..n.
    static std::vector<MultiIndex> all(int n, int q);

    std::string to_string() const;

    auto operator<=>(const MultiIndex&) const = default;

private:
    std::array<std::uint8_t, 4> idx_{};
    int size_ = 0;
};

using IndexPair = std::pair<MultiIndex, MultiIndex>;

} // namespace plurilab::forms
