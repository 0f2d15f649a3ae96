#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "memesim/error.hpp"

namespace memesim {

/// Hurwitz zeta sum_{k>=0} (a+k)^-s for s > 1, a >= 1. Direct summation up
/// to a+k >= 16, then Euler-Maclaurin with seven Bernoulli corrections;
/// relative error well below 1e-12 over the fitting range.
inline double hurwitz_zeta(double s, double a)
{
    if (!(s > 1.0))
        throw DomainError("hurwitz_zeta requires s > 1");
    if (!(a > 0.0))
        throw DomainError("hurwitz_zeta requires a > 0");
    double sum = 0.0;
    double x = a;
    while (x < 16.0) {
        sum += std::pow(x, -s);
        x += 1.0;
    }
    // B_2k / (2k)!
    static constexpr double kB[] = {1.0 / 12.0,         -1.0 / 720.0,          1.0 / 30240.0,
                                    -1.0 / 1209600.0,   1.0 / 47900160.0,      -691.0 / 1307674368000.0,
                                    1.0 / 74724249600.0};
    const double xs = std::pow(x, -s);
    double tail = x * xs / (s - 1.0) + 0.5 * xs;
    // rising factorial s (s+1) ... (s+2k-2) times x^(-s-2k+1)
    double term = s * xs / x;
    const double inv_x2 = 1.0 / (x * x);
    for (int k = 0; k < 7; ++k) {
        tail += kB[k] * term;
        term *= (s + 2 * k + 1) * (s + 2 * k + 2) * inv_x2;
    }
    return sum + tail;
}

struct PowerLawFit {
    double beta = 0.0;
    std::uint64_t x_min = 1;
    double ks_distance = 0.0;
    std::size_t n_tail = 0;
    double log_likelihood = 0.0;
};

inline constexpr std::size_t kMinTailSamples = 50;

namespace detail {

// Discrete power-law MLE for a fixed x_min. Minimizes the convex negative
// log-likelihood n ln zeta(beta, x_min) + beta sum ln x by golden section.
inline double fit_exponent(std::uint64_t x_min, std::size_t n, double sum_log, double* nll_out = nullptr)
{
    const double xm = static_cast<double>(x_min);
    auto nll = [&](double b) { return static_cast<double>(n) * std::log(hurwitz_zeta(b, xm)) + b * sum_log; };
    double lo = 1.0 + 1e-6, hi = 12.0;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = nll(c), fd = nll(d);
    while (hi - lo > 1e-9) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = nll(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = nll(d);
        }
    }
    const double beta = 0.5 * (lo + hi);
    if (nll_out)
        *nll_out = nll(beta);
    return beta;
}

// KS distance between the empirical tail (sorted ascending, all >= x_min)
// and the fitted discrete power law. Both CDFs are step functions on the
// integers, so checking each observed value and the integer just before
// the next observed value covers every maximum.
inline double ks_tail(std::span<const std::uint64_t> tail, std::uint64_t x_min, double beta)
{
    const double norm = hurwitz_zeta(beta, static_cast<double>(x_min));
    auto model_cdf = [&](std::uint64_t v) { return 1.0 - hurwitz_zeta(beta, static_cast<double>(v) + 1.0) / norm; };
    const double n = static_cast<double>(tail.size());
    double d = 0.0;
    std::size_t i = 0;
    double prev_emp = 0.0;
    while (i < tail.size()) {
        const std::uint64_t v = tail[i];
        if (v > x_min) {
            // just before v the empirical CDF still equals prev_emp
            d = std::max(d, std::abs(model_cdf(v - 1) - prev_emp));
        }
        std::size_t j = i;
        while (j < tail.size() && tail[j] == v)
            ++j;
        const double emp = static_cast<double>(j) / n;
        d = std::max(d, std::abs(model_cdf(v) - emp));
        prev_emp = emp;
        i = j;
    }
    return d;
}

} // namespace detail

/// Discrete power-law fit: MLE exponent for each candidate x_min (distinct
/// values up to the 90th percentile that leave at least 50 tail samples),
/// choosing the x_min whose fitted tail has the smallest KS distance.
inline PowerLawFit fit_power_law(std::span<const std::uint64_t> samples)
{
    std::vector<std::uint64_t> xs(samples.begin(), samples.end());
    for (auto v : xs)
        if (v < 1)
            throw DomainError("power-law samples must be positive integers");
    std::sort(xs.begin(), xs.end());
    if (xs.size() < kMinTailSamples)
        throw FitUnavailable("power-law fit needs at least 50 samples, got " + std::to_string(xs.size()));

    const std::uint64_t cap = xs[static_cast<std::size_t>(0.9 * static_cast<double>(xs.size() - 1))];
    // suffix sums of ln x
    std::vector<double> suffix_log(xs.size() + 1, 0.0);
    for (std::size_t i = xs.size(); i-- > 0;)
        suffix_log[i] = suffix_log[i + 1] + std::log(static_cast<double>(xs[i]));

    PowerLawFit best;
    bool found = false;
    for (std::size_t i = 0; i < xs.size();) {
        const std::uint64_t x_min = xs[i];
        if (x_min > cap)
            break;
        const std::size_t n_tail = xs.size() - i;
        std::size_t next = i;
        while (next < xs.size() && xs[next] == x_min)
            ++next;
        if (n_tail < kMinTailSamples)
            break;
        if (next == xs.size()) // single distinct value left
            break;
        double nll = 0.0;
        const double beta = detail::fit_exponent(x_min, n_tail, suffix_log[i], &nll);
        const double ks = detail::ks_tail(std::span(xs).subspan(i), x_min, beta);
        if (!found || ks < best.ks_distance) {
            best = {beta, x_min, ks, n_tail, -nll};
            found = true;
        }
        i = next;
    }
    if (!found)
        throw FitUnavailable("power-law fit unavailable: no x_min candidate leaves a varied tail of 50 samples");
    return best;
}

} // namespace memesim
