#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "memesim/diffusion.hpp"
#include "memesim/harness/output.hpp"
#include "memesim/harness/pool.hpp"
#include "memesim/metrics.hpp"

namespace memesim::harness {

/// One simulation setting, run for `cfg.replicas` replicas.
struct CellSpec {
    std::string condition; ///< free label, e.g. "grid", "baseline", "naive"
    std::string mu_label;
    std::string alpha_label;
    ModelConfig cfg;
    bool keep_records = false;
};

struct ReplicaSummary {
    std::size_t cell = 0;
    std::size_t replica = 0;
    std::uint64_t seed = 0;
    double tau = std::numeric_limits<double>::quiet_NaN();
    double mean_entropy = 0.0;
    std::size_t n_memes = 0;
    Step steady_step = 0;
    Step total_steps = 0;
    double wall_seconds = 0.0;
    std::vector<MemeRecord> records;        ///< kept only when requested
    std::vector<DiversitySample> diversity; ///< kept only when requested
};

/// Aggregates over the replicas of one cell.
struct CellResult {
    CellSpec spec;
    std::vector<ReplicaSummary> replicas;
    double tau_mean = std::numeric_limits<double>::quiet_NaN();
    double tau_sd = std::numeric_limits<double>::quiet_NaN();
    double tau_pooled = std::numeric_limits<double>::quiet_NaN();
    double mi_pooled = 0.0;
    double entropy_mean = 0.0;
    std::size_t n_memes = 0;
    std::map<std::uint64_t, std::uint64_t> popularity_hist;
    std::vector<MemeRecord> records; ///< pooled, when kept
};

/// Mean and sample standard deviation of the finite entries.
inline std::pair<double, double> mean_sd(const std::vector<double>& xs)
{
    double s = 0.0;
    std::size_t n = 0;
    for (double x : xs)
        if (std::isfinite(x)) {
            s += x;
            ++n;
        }
    if (n == 0)
        return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    const double m = s / static_cast<double>(n);
    if (n == 1)
        return {m, 0.0};
    double ss = 0.0;
    for (double x : xs)
        if (std::isfinite(x))
            ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / static_cast<double>(n - 1))};
}

/// tau_b, or NaN when undefined (fewer than two memes or a constant variable).
inline double tau_or_nan(const RankedPairs& pairs)
{
    if (pairs.size() < 2)
        return std::numeric_limits<double>::quiet_NaN();
    try {
        return kendall_tau_b(pairs);
    } catch (const UndefinedCorrelation&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

inline std::string describe_cell(const CellSpec& c)
{
    return c.condition + " (mu=" + c.mu_label + ", alpha=" + c.alpha_label + ")";
}

/// Runs every cell x replica on a worker pool. Replica seeds are
/// derive_seed(master, {cell, replica}), so results are independent of the
/// number of workers. Each cell is aggregated by whichever worker finishes
/// its last replica, and per-meme data is dropped unless the cell keeps it.
inline std::vector<CellResult> run_cells(const std::vector<CellSpec>& cells, const Graph& graph,
                                         std::uint64_t master_seed, std::size_t jobs)
{
    std::vector<std::size_t> first(cells.size() + 1, 0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        cells[c].cfg.validate();
        first[c + 1] = first[c] + cells[c].cfg.replicas;
    }
    const std::size_t total = first.back();

    std::vector<CellResult> results(cells.size());
    std::vector<ReplicaSummary> summaries(total);
    std::vector<RankedPairs> pairs(total);
    auto remaining = std::make_unique<std::atomic<std::size_t>[]>(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
        remaining[c] = cells[c].cfg.replicas;

    auto aggregate = [&](std::size_t c) {
        CellResult& out = results[c];
        out.spec = cells[c];
        RankedPairs pooled;
        std::vector<double> taus;
        double ent = 0.0;
        for (std::size_t i = first[c]; i < first[c + 1]; ++i) {
            auto& s = summaries[i];
            taus.push_back(s.tau);
            ent += s.mean_entropy;
            out.n_memes += s.n_memes;
            pooled.insert(pooled.end(), pairs[i].begin(), pairs[i].end());
            for (auto [q, p] : pairs[i])
                ++out.popularity_hist[static_cast<std::uint64_t>(p)];
            RankedPairs().swap(pairs[i]);
            if (cells[c].keep_records)
                out.records.insert(out.records.end(), s.records.begin(), s.records.end());
            out.replicas.push_back(std::move(s));
        }
        std::tie(out.tau_mean, out.tau_sd) = mean_sd(taus);
        out.entropy_mean = ent / static_cast<double>(cells[c].cfg.replicas);
        out.tau_pooled = tau_or_nan(pooled);
        out.mi_pooled = pooled.empty() ? 0.0 : mutual_information(pooled);
    };

    std::function<char(std::size_t)> task = [&](std::size_t i) -> char {
        std::size_t c = 0;
        while (first[c + 1] <= i)
            ++c;
        const std::size_t r = i - first[c];
        ModelConfig cfg = cells[c].cfg;
        cfg.seed = derive_seed(master_seed, {c, r});

        ReplicaSummary s;
        s.cell = c;
        s.replica = r;
        s.seed = cfg.seed;
        Stopwatch watch;
        RunResult res;
        try {
            res = run(cfg, graph);
        } catch (const SteadyStateNotReached& e) {
            throw SteadyStateNotReached(describe_cell(cells[c]) + " replica " + std::to_string(r) + ": " + e.what());
        }
        s.wall_seconds = watch.seconds();
        pairs[i] = ranked_pairs(res.memes);
        s.tau = tau_or_nan(pairs[i]);
        s.mean_entropy = res.mean_entropy();
        s.n_memes = res.memes.size();
        s.steady_step = res.steady_step;
        s.total_steps = res.total_steps;
        if (cells[c].keep_records) {
            s.records = std::move(res.memes);
            s.diversity = std::move(res.diversity);
        }
        summaries[i] = std::move(s);
        if (remaining[c].fetch_sub(1) == 1)
            aggregate(c);
        return 0;
    };
    parallel_map<char>(total, jobs, task);
    return results;
}

} // namespace memesim::harness
