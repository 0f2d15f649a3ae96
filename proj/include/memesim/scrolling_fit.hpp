#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "memesim/calib.hpp"
#include "memesim/error.hpp"
#include "memesim/random.hpp"
#include "memesim/scrolling.hpp"

namespace memesim {

enum class FitTarget { MuDist, AlphaDist };

inline FitTarget parse_fit_target(const std::string& s)
{
    if (s == "mu")
        return FitTarget::MuDist;
    if (s == "alpha")
        return FitTarget::AlphaDist;
    throw ConfigError("unknown fit target '" + s + "' (expected mu or alpha)");
}

/// Evenly spaced values lo..hi inclusive; steps == 1 pins the value at lo.
struct Range {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t steps = 1;

    std::vector<double> values() const
    {
        if (steps <= 1)
            return {lo};
        std::vector<double> out(steps);
        for (std::size_t i = 0; i < steps; ++i)
            out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
        return out;
    }
    bool fixed() const { return steps <= 1; }
};

/// Grid search followed by an optional Nelder-Mead polish. sigma is
/// searched as a fraction of its upper bound min(q_mean, 1 - q_mean).
struct SearchGrid {
    Range rho{0.05, 0.05, 1};
    Range q_mean{0.02, 0.5, 49};
    Range sigma_frac{0.0, 1.0, 11};
    bool refine = true;
    std::size_t max_refine_evals = 200;
    // mu target only: the model distribution is simulated with a fixed seed
    std::size_t model_users = 4000;
    std::size_t sessions_per_user = 200;
    std::size_t mu_bins = 20;
    std::uint64_t seed = 7;

    static SearchGrid defaults(FitTarget t)
    {
        SearchGrid g;
        if (t == FitTarget::MuDist) {
            g.rho = {0.80, 0.998, 34};
            g.q_mean = {0.05, 0.3, 6};
            g.sigma_frac = {0.0, 0.9, 4};
        }
        return g;
    }
};

struct FitTraceEntry {
    ScrollParams params;
    double discrepancy = 0.0;
};

struct FitResult {
    ScrollParams params;
    double discrepancy = 0.0;
    FitTarget target = FitTarget::AlphaDist;
    std::string criterion;
    std::vector<FitTraceEntry> trace;
};

/// KS distance between an empirical reshare-run histogram and the model CDF,
/// scanned over every integer up to the largest observation.
inline double alpha_ks(const EmpiricalDist& hist, const ScrollParams& p)
{
    const double total = hist.total_weight();
    const auto max_v = static_cast<std::int64_t>(hist.values.back());
    double cum = 0.0, d = 0.0;
    std::size_t k = 0;
    for (std::int64_t v = 1; v <= max_v; ++v) {
        while (k < hist.values.size() && hist.values[k] <= static_cast<double>(v))
            cum += hist.weights[k++];
        d = std::max(d, std::abs(cum / total - session_cdf(p, v)));
    }
    return d;
}

/// Histogram of mu values: `bins` equal bins over [0, 1) plus one bin for
/// mu == 1 exactly (users who never reshare).
inline std::vector<double> mu_histogram(const std::vector<double>& values, const std::vector<double>& weights,
                                        std::size_t bins)
{
    std::vector<double> h(bins + 1, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        const std::size_t b =
            v >= 1.0 ? bins : std::min(bins - 1, static_cast<std::size_t>(v * static_cast<double>(bins)));
        h[b] += weights[i];
    }
    return h;
}

/// Symmetric chi-square distance sum (p - q)^2 / (p + q) between two
/// normalized histograms, scaled by the empirical sample size.
inline double chi2_distance(const std::vector<double>& observed, const std::vector<double>& expected)
{
    double no = 0.0, ne = 0.0;
    for (double v : observed)
        no += v;
    for (double v : expected)
        ne += v;
    double chi = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double p = observed[i] / no, q = expected[i] / ne;
        if (p + q > 0.0)
            chi += (p - q) * (p - q) / (p + q);
    }
    return chi * no;
}

namespace detail {

inline ScrollParams make_params(double rho, double q, double frac)
{
    q = std::clamp(q, 1e-3, 1.0 - 1e-3);
    frac = std::clamp(frac, 0.0, 1.0);
    ScrollParams p{std::clamp(rho, 0.0, 1.0), q, frac * std::min(q, 1.0 - q)};
    p.sigma = std::min(p.sigma, std::min(p.q_mean, 1.0 - p.q_mean));
    return p;
}

// Nelder-Mead over the free coordinates of (rho, q_mean, sigma_frac).
inline std::array<double, 3> nelder_mead(const std::function<double(const std::array<double, 3>&)>& f,
                                         std::array<double, 3> start, const std::array<bool, 3>& free,
                                         const std::array<double, 3>& scale, std::size_t max_evals)
{
    std::vector<int> dims;
    for (int i = 0; i < 3; ++i)
        if (free[i])
            dims.push_back(i);
    const std::size_t nd = dims.size();
    if (nd == 0)
        return start;
    using Point = std::array<double, 3>;
    std::vector<Point> simplex(nd + 1, start);
    std::vector<double> fv(nd + 1);
    for (std::size_t i = 0; i < nd; ++i)
        simplex[i + 1][dims[i]] += scale[dims[i]];
    for (std::size_t i = 0; i <= nd; ++i)
        fv[i] = f(simplex[i]);
    std::size_t evals = nd + 1;

    auto blend = [&](const Point& a, const Point& b, double t) {
        Point r = a;
        for (int d : dims)
            r[d] = a[d] + t * (b[d] - a[d]);
        return r;
    };
    while (evals < max_evals) {
        std::vector<std::size_t> idx(nd + 1);
        for (std::size_t i = 0; i <= nd; ++i)
            idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = idx.front(), worst = idx.back(), second = idx[nd - 1];
        if (std::abs(fv[worst] - fv[best]) <= 1e-10 * (std::abs(fv[best]) + 1e-12))
            break;
        Point centroid = start;
        for (int d : dims) {
            centroid[d] = 0.0;
            for (std::size_t i = 0; i <= nd; ++i)
                if (i != worst)
                    centroid[d] += simplex[i][d] / static_cast<double>(nd);
        }
        const Point refl = blend(centroid, simplex[worst], -1.0);
        const double fr = f(refl);
        ++evals;
        if (fr < fv[best]) {
            const Point exp = blend(centroid, simplex[worst], -2.0);
            const double fe = f(exp);
            ++evals;
            if (fe < fr) {
                simplex[worst] = exp;
                fv[worst] = fe;
            } else {
                simplex[worst] = refl;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            simplex[worst] = refl;
            fv[worst] = fr;
        } else {
            const Point con = blend(centroid, simplex[worst], 0.5);
            const double fc = f(con);
            ++evals;
            if (fc < fv[worst]) {
                simplex[worst] = con;
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= nd; ++i)
                    if (i != best) {
                        simplex[i] = blend(simplex[best], simplex[i], 0.5);
                        fv[i] = f(simplex[i]);
                        ++evals;
                    }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= nd; ++i)
        if (fv[i] < fv[best])
            best = i;
    return simplex[best];
}

} // namespace detail

/// Fits scrolling parameters to an empirical distribution. AlphaDist
/// minimizes the KS distance to the reshare-run CDF (rho is not identified
/// and stays at its grid value); MuDist minimizes a binned chi-square
/// distance to a simulated per-user mu distribution.
inline FitResult fit_scrolling(const EmpiricalDist& empirical, FitTarget target, const SearchGrid& grid)
{
    if (empirical.values.empty() || empirical.total_weight() <= 0.0)
        throw InputError("cannot fit an empty histogram");
    empirical.validate();

    FitResult res;
    res.target = target;
    res.criterion = target == FitTarget::AlphaDist ? "ks" : "chi2";

    std::vector<double> observed;
    if (target == FitTarget::MuDist)
        observed = mu_histogram(empirical.values, empirical.weights, grid.mu_bins);

    auto objective = [&](const ScrollParams& p) {
        double d = 0.0;
        if (target == FitTarget::AlphaDist) {
            d = alpha_ks(empirical, p);
        } else {
            Rng rng(grid.seed);
            auto mu = simulate_user_mu(p, grid.sessions_per_user, grid.model_users, rng);
            d = chi2_distance(observed, mu_histogram(mu, std::vector<double>(mu.size(), 1.0), grid.mu_bins));
        }
        res.trace.push_back({p, d});
        return d;
    };

    const bool fit_rho = target == FitTarget::MuDist;
    std::array<double, 3> best_point{grid.rho.lo, grid.q_mean.lo, grid.sigma_frac.lo};
    double best = std::numeric_limits<double>::infinity();
    for (double r : fit_rho ? grid.rho.values() : std::vector<double>{grid.rho.lo})
        for (double q : grid.q_mean.values())
            for (double s : grid.sigma_frac.values()) {
                const double d = objective(detail::make_params(r, q, s));
                if (d < best) {
                    best = d;
                    best_point = {r, q, s};
                }
            }

    if (grid.refine) {
        auto step = [](const Range& r) {
            return r.steps > 1 ? (r.hi - r.lo) / static_cast<double>(r.steps - 1) : 0.0;
        };
        const std::array<bool, 3> free{fit_rho && !grid.rho.fixed(), !grid.q_mean.fixed(),
                                       !grid.sigma_frac.fixed()};
        const std::array<double, 3> scale{0.5 * step(grid.rho), 0.5 * step(grid.q_mean),
                                          0.5 * step(grid.sigma_frac)};
        auto f = [&](const std::array<double, 3>& x) {
            return objective(detail::make_params(x[0], x[1], x[2]));
        };
        auto x = detail::nelder_mead(f, best_point, free, scale, grid.max_refine_evals);
        const double d = f(x);
        if (d < best) {
            best = d;
            best_point = x;
        }
    }
    res.params = detail::make_params(best_point[0], best_point[1], best_point[2]);
    res.discrepancy = best;
    return res;
}

} // namespace memesim
