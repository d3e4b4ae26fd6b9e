#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace yamabe {

// Exponent vector alpha of a monomial x^alpha in n variables.
using MultiIndex = std::vector<std::uint8_t>;

inline int degree(const MultiIndex& a) {
    return std::accumulate(a.begin(), a.end(), 0);
}

inline bool all_even(const MultiIndex& a) {
    for (auto e : a)
        if (e % 2) return false;
    return true;
}

inline std::string to_string(const MultiIndex& a) {
    std::string s = "(";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(int(a[i]));
    }
    return s + ")";
}

} // namespace yamabe
