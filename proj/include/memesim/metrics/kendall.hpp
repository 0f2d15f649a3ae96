#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "memesim/error.hpp"

namespace memesim {

/// (quality, popularity) pairs entering the rank correlation.
using RankedPairs = std::vector<std::pair<double, double>>;

namespace detail {

// Sum of t(t-1)/2 over runs of equal adjacent values.
template <class It, class Eq>
std::int64_t tied_pairs(It first, It last, Eq eq)
{
    std::int64_t total = 0, run = 1;
    for (It it = first; it != last; ++it) {
        if (it != first && eq(*(it - 1), *it)) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total + run * (run - 1) / 2;
}

// Sorts v ascending and returns the number of strictly inverted pairs.
inline std::int64_t count_inversions(std::vector<double>& v)
{
    std::vector<double> buf(v.size());
    std::int64_t swaps = 0;
    for (std::size_t width = 1; width < v.size(); width *= 2) {
        for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, v.size());
            const std::size_t hi = std::min(lo + 2 * width, v.size());
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    swaps += static_cast<std::int64_t>(mid - i);
                    buf[k++] = v[j++];
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid)
                buf[k++] = v[i++];
            while (j < hi)
                buf[k++] = v[j++];
        }
        v.swap(buf);
    }
    return swaps;
}

} // namespace detail

/// Kendall tau-b with tie corrections in both variables, O(n log n)
/// (Knight's merge-sort algorithm). Throws UndefinedCorrelation when either
/// variable is constant.
inline double kendall_tau_b(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw DomainError("kendall_tau_b: x and y differ in length");
    const std::size_t n = x.size();
    if (n < 2)
        throw DomainError("kendall_tau_b needs at least two items");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });

    const auto ties_x =
        detail::tied_pairs(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
    const auto ties_xy = detail::tied_pairs(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] == x[b] && y[a] == y[b];
    });

    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i)
        ys[i] = y[order[i]];
    const auto swaps = detail::count_inversions(ys);
    const auto ties_y = detail::tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

    const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    if (ties_x == n0 || ties_y == n0)
        throw UndefinedCorrelation("kendall_tau_b undefined: a variable is constant");
    const auto numer = n0 - ties_x - ties_y + ties_xy - 2 * swaps;
    const double denom = std::sqrt(static_cast<double>(n0 - ties_x)) * std::sqrt(static_cast<double>(n0 - ties_y));
    return std::clamp(static_cast<double>(numer) / denom, -1.0, 1.0);
}

inline double kendall_tau_b(const RankedPairs& pairs)
{
    std::vector<double> x, y;
    x.reserve(pairs.size());
    y.reserve(pairs.size());
    for (auto [a, b] : pairs) {
        x.push_back(a);
        y.push_back(b);
    }
    return kendall_tau_b(x, y);
}

} // namespace memesim
