#pragma once

// Compositions of an integer: ordered tuples of positive parts with a given
// length and sum.  The closed-form solution in projective_space.hpp sums over
// these; tests enumerate them directly.  Conventions: zero parts admit exactly
// the empty composition of 0 and nothing else; a positive count with sum
// below the count admits none.

#include <cstdint>
#include <utility>
#include <vector>

namespace dubrovin {

using Composition = std::vector<int>;

namespace detail {

template <typename F>
void compositions_rec(int parts_left, int total_left, Composition& prefix, F&& f) {
    if (parts_left == 0) {
        if (total_left == 0) f(const_cast<const Composition&>(prefix));
        return;
    }
    // each remaining part needs at least 1
    const int hi = total_left - (parts_left - 1);
    for (int v = 1; v <= hi; ++v) {
        prefix.push_back(v);
        compositions_rec(parts_left - 1, total_left - v, prefix, f);
        prefix.pop_back();
    }
}

}  // namespace detail

template <typename F>
void for_each_composition(int parts, int total, F&& f) {
    if (parts < 0 || total < 0) return;
    Composition prefix;
    prefix.reserve(static_cast<std::size_t>(parts));
    detail::compositions_rec(parts, total, prefix, std::forward<F>(f));
}

inline std::vector<Composition> compositions(int parts, int total) {
    std::vector<Composition> out;
    for_each_composition(parts, total, [&](const Composition& c) { out.push_back(c); });
    return out;
}

// binom(total-1, parts-1) for parts >= 1; 1 for parts == 0 && total == 0
inline std::uint64_t composition_count(int parts, int total) {
    if (parts < 0 || total < 0) return 0;
    if (parts == 0) return total == 0 ? 1 : 0;
    if (total < parts) return 0;
    const int n = total - 1, k = parts - 1;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
    return r;
}

}  // namespace dubrovin
