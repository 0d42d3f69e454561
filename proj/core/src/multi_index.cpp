#include "plurilab/multi_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace plurilab::forms {

MultiIndex::MultiIndex(std::span<const int> sorted) {
    if (sorted.size() > 4) throw std::invalid_argument("MultiIndex: at most 4 entries supported");
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] < 1 || sorted[i] > 255) throw std::invalid_argument("MultiIndex: entry out of range");
        if (i > 0 && sorted[i] <= sorted[i - 1])
            throw std::invalid_argument("MultiIndex: entries must be strictly increasing");
        idx_[i] = std::uint8_t(sorted[i]);
    }
    size_ = int(sorted.size());
}

std::pair<MultiIndex, int> MultiIndex::from_unsorted(std::span<const int> entries) {
    std::vector<int> v(entries.begin(), entries.end());
    int sign = 1;
    // insertion sort, tracking transposition parity
    for (size_t i = 1; i < v.size(); ++i) {
        for (size_t j = i; j > 0 && v[j] < v[j - 1]; --j) {
            std::swap(v[j], v[j - 1]);
            sign = -sign;
        }
    }
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] == v[i - 1]) return {MultiIndex{}, 0};
    return {MultiIndex(v), sign};
}

bool MultiIndex::contains(int k) const {
    for (int i = 0; i < size_; ++i)
        if (idx_[size_t(i)] == k) return true;
    return false;
}

std::pair<MultiIndex, int> MultiIndex::merge(const MultiIndex& other) const {
    std::vector<int> v;
    v.reserve(size_t(size_ + other.size_));
    for (int i = 0; i < size_; ++i) v.push_back((*this)[i]);
    for (int i = 0; i < other.size_; ++i) v.push_back(other[i]);
    return from_unsorted(v);
}

std::pair<MultiIndex, int> MultiIndex::insert(int k) const {
    std::vector<int> v;
    v.reserve(size_t(size_) + 1);
    v.push_back(k);
    for (int i = 0; i < size_; ++i) v.push_back((*this)[i]);
    return from_unsorted(v);
}

std::vector<MultiIndex> MultiIndex::all(int n, int q) {
    std::vector<MultiIndex> out;
    if (q < 0 || q > n) return out;
    std::vector<int> c(static_cast<size_t>(q), 0);
    for (int i = 0; i < q; ++i) c[size_t(i)] = i + 1;
    while (true) {
        out.emplace_back(MultiIndex(c));
        int i = q - 1;
        while (i >= 0 && c[size_t(i)] == n - (q - 1 - i)) --i;
        if (i < 0) break;
        ++c[size_t(i)];
        for (int j = i + 1; j < q; ++j) c[size_t(j)] = c[size_t(j - 1)] + 1;
    }
    return out;
}

std::string MultiIndex::to_string() const {
    std::string s = "(";
    for (int i = 0; i < size_; ++i) {
        if (i) s += ",";
        s += std::to_string((*this)[i]);
    }
    return s + ")";
}

} // namespace plurilab::forms
