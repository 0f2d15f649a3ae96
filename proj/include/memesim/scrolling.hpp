#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "memesim/error.hpp"
#include "memesim/random.hpp"

namespace memesim {

/// Scrolling-session attention model. A session is a single new post with
/// probability rho; otherwise the user reshares messages one after another
/// and stops after each with probability q, where q ~ U[q_mean - sigma,
/// q_mean + sigma] is drawn once per session.
struct ScrollParams {
    double rho = 0.0;
    double q_mean = 0.1;
    double sigma = 0.0;

    double q_lo() const noexcept { return q_mean - sigma; }
    double q_hi() const noexcept { return q_mean + sigma; }

    void validate() const
    {
        if (!(rho >= 0.0 && rho <= 1.0))
            throw ConfigError("scroll rho must lie in [0, 1]");
        if (!(q_mean > 0.0 && q_mean < 1.0))
            throw ConfigError("scroll q_mean must lie in (0, 1)");
        if (!(sigma >= 0.0 && sigma <= std::min(q_mean, 1.0 - q_mean)))
            throw ConfigError("scroll sigma must lie in [0, min(q_mean, 1 - q_mean)]");
    }

    bool operator==(const ScrollParams&) const = default;
};

struct SessionOutcome {
    enum class Kind { NewPost, ReshareRun };
    Kind kind = Kind::NewPost;
    std::uint64_t length = 0; ///< reshare count; 0 for NewPost

    bool is_post() const noexcept { return kind == Kind::NewPost; }
};

/// Hard ceiling on a sampled run length; only reachable when q is within
/// ~1e-9 of zero, which has probability below 1e-8 for any valid params.
inline constexpr std::uint64_t kMaxRunLength = 1'000'000'000ULL;

/// Geometric length on {1, 2, ...} with per-step stop probability q.
inline std::uint64_t sample_geometric_run(double q, Rng& rng)
{
    if (q >= 1.0)
        return 1;
    const double u = uniform_open_closed(rng);
    const double len = 1.0 + std::floor(std::log(u) / std::log1p(-q));
    if (!(len < static_cast<double>(kMaxRunLength)))
        return kMaxRunLength;
    return static_cast<std::uint64_t>(len);
}

/// Reshare-run length of a scrolling session (conditional on not posting).
inline std::uint64_t sample_run_length(const ScrollParams& p, Rng& rng)
{
    // q on (lo, hi] so that q > 0 even when sigma == q_mean
    const double q = p.q_hi() - (p.q_hi() - p.q_lo()) * uniform01(rng);
    return sample_geometric_run(q, rng);
}

inline SessionOutcome sample_session(const ScrollParams& p, Rng& rng)
{
    if (bernoulli(rng, p.rho))
        return {SessionOutcome::Kind::NewPost, 0};
    return {SessionOutcome::Kind::ReshareRun, sample_run_length(p, rng)};
}

namespace detail {

// Adaptive Simpson on [a, b].
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double eps, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
        return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

} // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps,
                               int max_depth = 50)
{
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, eps, max_depth);
}

/// Below this sigma the closed form loses digits to cancellation and the
/// pmf is integrated numerically instead.
inline constexpr double kClosedFormMinSigma = 1e-3;

/// Probability that a reshare run has exactly `alpha` reshares:
/// (1/2sigma) * integral over [q_lo, q_hi] of q (1-q)^(alpha-1) dq.
inline double session_pmf(const ScrollParams& p, std::int64_t alpha)
{
    if (alpha < 1)
        throw DomainError("session_pmf requires alpha >= 1");
    const double a = static_cast<double>(alpha);
    if (p.sigma == 0.0)
        return p.q_mean * std::pow(1.0 - p.q_mean, a - 1.0);
    if (p.sigma < kClosedFormMinSigma) {
        auto f = [a](double q) { return q * std::pow(1.0 - q, a - 1.0); };
        return adaptive_simpson(f, p.q_lo(), p.q_hi(), 2.0 * p.sigma * 1e-14) / (2.0 * p.sigma);
    }
    // antiderivative of q(1-q)^(a-1) is -(1-q)^a (1 + a q) / (a (a+1))
    auto g = [a](double q) { return std::pow(1.0 - q, a) * (1.0 + a * q); };
    return (g(p.q_lo()) - g(p.q_hi())) / (2.0 * p.sigma * a * (a + 1.0));
}

/// P(run length > alpha), alpha >= 0.
inline double session_survival(const ScrollParams& p, std::int64_t alpha)
{
    if (alpha < 0)
        throw DomainError("session_survival requires alpha >= 0");
    const double a = static_cast<double>(alpha);
    if (p.sigma == 0.0)
        return std::pow(1.0 - p.q_mean, a);
    if (p.sigma < kClosedFormMinSigma) {
        auto f = [a](double q) { return std::pow(1.0 - q, a); };
        return adaptive_simpson(f, p.q_lo(), p.q_hi(), 2.0 * p.sigma * 1e-14) / (2.0 * p.sigma);
    }
    return (std::pow(1.0 - p.q_lo(), a + 1.0) - std::pow(1.0 - p.q_hi(), a + 1.0)) / (2.0 * p.sigma * (a + 1.0));
}

inline double session_cdf(const ScrollParams& p, std::int64_t alpha)
{
    return 1.0 - session_survival(p, alpha);
}

/// Mean reshare-run length E[1/q], truncated at q > 0.
inline double mean_run_length(const ScrollParams& p)
{
    if (p.sigma == 0.0)
        return 1.0 / p.q_mean;
    if (p.q_lo() <= 0.0)
        return std::numeric_limits<double>::infinity();
    return std::log(p.q_hi() / p.q_lo()) / (2.0 * p.sigma);
}

/// Per-user (n_t, n_r) counts after a fixed number of sessions each.
struct UserCounts {
    std::uint64_t posts = 0;
    std::uint64_t reshares = 0;
};

inline std::vector<UserCounts> simulate_user_counts(const ScrollParams& p, std::size_t sessions_per_user,
                                                    std::size_t users, Rng& rng)
{
    if (sessions_per_user < 1)
        throw ConfigError("sessions_per_user must be >= 1");
    std::vector<UserCounts> out(users);
    for (auto& c : out)
        for (std::size_t s = 0; s < sessions_per_user; ++s) {
            auto outcome = sample_session(p, rng);
            if (outcome.is_post())
                ++c.posts;
            else
                c.reshares += outcome.length;
        }
    return out;
}

/// Per-user information load mu = n_t / (n_t + n_r). Every session produces
/// at least one event, so the denominator is never zero.
inline std::vector<double> simulate_user_mu(const ScrollParams& p, std::size_t sessions_per_user,
                                            std::size_t users, Rng& rng)
{
    std::vector<double> mu;
    mu.reserve(users);
    for (auto c : simulate_user_counts(p, sessions_per_user, users, rng))
        mu.push_back(static_cast<double>(c.posts) / static_cast<double>(c.posts + c.reshares));
    return mu;
}

} // namespace memesim
