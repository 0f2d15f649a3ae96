#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "memesim/diffusion.hpp"
#include "memesim/error.hpp"

namespace memesim {

/// Shannon entropy (nats) of the share distribution given message counts
/// per meme. Zero counts are ignored.
inline double diversity_entropy(std::span<const std::uint64_t> counts)
{
    std::uint64_t total = 0;
    for (auto c : counts)
        total += c;
    if (total == 0)
        throw DomainError("diversity_entropy needs at least one message");
    const double t = static_cast<double>(total);
    double h = 0.0;
    for (auto c : counts)
        if (c > 0) {
            const double p = static_cast<double>(c) / t;
            h -= p * std::log(p);
        }
    return h < 0.0 ? 0.0 : h;
}

inline double diversity_entropy(const std::map<MemeId, std::uint64_t>& snapshot)
{
    std::vector<std::uint64_t> counts;
    counts.reserve(snapshot.size());
    for (auto [id, c] : snapshot)
        counts.push_back(c);
    return diversity_entropy(counts);
}

namespace detail {

inline void check_same_setting(const RunResult& run, const RunResult& baseline)
{
    if (!(run.net == baseline.net))
        throw ConfigError("diversity baseline uses a different network spec");
    if (run.alpha_mode != baseline.alpha_mode)
        throw ConfigError("diversity baseline uses a different attention mode (" + baseline.alpha_mode + " vs " +
                          run.alpha_mode + ")");
}

} // namespace detail

/// Time-averaged entropy of `run` over that of a mu = 1 baseline with the
/// same network and attention mode.
inline double normalized_diversity(const RunResult& run, const RunResult& baseline)
{
    detail::check_same_setting(run, baseline);
    const double base = baseline.mean_entropy();
    if (!(base > 0.0))
        throw DomainError("diversity baseline has zero entropy");
    return run.mean_entropy() / base;
}

/// Replica version: mean entropy over runs divided by mean over baselines.
inline double normalized_diversity(std::span<const RunResult> runs, std::span<const RunResult> baselines)
{
    if (runs.empty() || baselines.empty())
        throw DomainError("normalized_diversity needs at least one run and one baseline");
    double num = 0.0, den = 0.0;
    for (const auto& r : runs) {
        detail::check_same_setting(r, baselines.front());
        num += r.mean_entropy();
    }
    for (const auto& b : baselines) {
        detail::check_same_setting(runs.front(), b);
        den += b.mean_entropy();
    }
    num /= static_cast<double>(runs.size());
    den /= static_cast<double>(baselines.size());
    if (!(den > 0.0))
        throw DomainError("diversity baseline has zero entropy");
    return num / den;
}

} // namespace memesim
