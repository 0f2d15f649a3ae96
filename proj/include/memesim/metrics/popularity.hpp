#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "memesim/diffusion.hpp"
#include "memesim/error.hpp"
#include "memesim/metrics/kendall.hpp"

namespace memesim {

inline RankedPairs ranked_pairs(std::span<const MemeRecord> records)
{
    RankedPairs out;
    out.reserve(records.size());
    for (const auto& r : records)
        out.emplace_back(r.meme.quality, static_cast<double>(r.popularity));
    return out;
}

inline std::vector<std::uint64_t> popularities(std::span<const MemeRecord> records)
{
    std::vector<std::uint64_t> out;
    out.reserve(records.size());
    for (const auto& r : records)
        out.push_back(r.popularity);
    return out;
}

struct QualityBin {
    double quality_mid = 0.0;
    double mean_popularity = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Equal-width bins over (0, 1]: bin b holds qualities in (b/bins, (b+1)/bins].
inline std::size_t quality_bin(double quality, std::size_t bins)
{
    const double pos = std::ceil(quality * static_cast<double>(bins)) - 1.0;
    return static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
}

/// Mean popularity per equal-width quality bin; empty bins are omitted.
inline std::vector<QualityBin> mean_popularity_by_quality(std::span<const MemeRecord> records,
                                                          std::size_t bins = 20)
{
    if (bins < 1)
        throw DomainError("need at least one quality bin");
    std::vector<double> sum(bins, 0.0), sum_sq(bins, 0.0);
    std::vector<std::size_t> n(bins, 0);
    for (const auto& r : records) {
        const auto b = quality_bin(r.meme.quality, bins);
        const double p = static_cast<double>(r.popularity);
        sum[b] += p;
        sum_sq[b] += p * p;
        ++n[b];
    }
    std::vector<QualityBin> out;
    for (std::size_t b = 0; b < bins; ++b) {
        if (n[b] == 0)
            continue;
        const double cnt = static_cast<double>(n[b]);
        const double mean = sum[b] / cnt;
        double se = 0.0;
        if (n[b] > 1) {
            const double var = std::max(0.0, (sum_sq[b] - cnt * mean * mean) / (cnt - 1.0));
            se = std::sqrt(var / cnt);
        }
        out.push_back({(static_cast<double>(b) + 0.5) / static_cast<double>(bins), mean, se, n[b]});
    }
    return out;
}

struct CcdfPoint {
    std::uint64_t value = 0;
    double survival = 0.0; ///< P(p >= value)
};

/// Complementary CDF at each distinct value.
inline std::vector<CcdfPoint> ccdf(std::vector<std::uint64_t> xs)
{
    std::sort(xs.begin(), xs.end());
    std::vector<CcdfPoint> out;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size();) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i])
            ++j;
        out.push_back({xs[i], static_cast<double>(xs.size() - i) / n});
        i = j;
    }
    return out;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b)
{
    if (a.empty() || b.empty())
        throw DomainError("ks_two_sample needs two non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() || j < b.size()) {
        std::uint64_t v = std::numeric_limits<std::uint64_t>::max();
        if (i < a.size())
            v = a[i];
        if (j < b.size())
            v = std::min(v, b[j]);
        while (i < a.size() && a[i] == v)
            ++i;
        while (j < b.size() && b[j] == v)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

struct QualityGroups {
    double threshold = 0.0;
    std::vector<std::uint64_t> high; ///< popularities with quality >= threshold
    std::vector<std::uint64_t> low;
    std::vector<CcdfPoint> high_ccdf;
    std::vector<CcdfPoint> low_ccdf;

    bool high_empty() const { return high.empty(); }
    bool low_empty() const { return low.empty(); }
    std::uint64_t max_high() const { return high.empty() ? 0 : *std::max_element(high.begin(), high.end()); }
    std::uint64_t max_low() const { return low.empty() ? 0 : *std::max_element(low.begin(), low.end()); }

    /// KS distance between the groups; NaN when either is empty.
    double ks_distance() const
    {
        if (high.empty() || low.empty())
            return std::numeric_limits<double>::quiet_NaN();
        return ks_two_sample(high, low);
    }
};

inline QualityGroups popularity_by_quality_group(std::span<const MemeRecord> records, double threshold)
{
    if (!(threshold > 0.0 && threshold < 1.0))
        throw DomainError("quality threshold must lie in (0, 1)");
    QualityGroups g;
    g.threshold = threshold;
    for (const auto& r : records)
        (r.meme.quality >= threshold ? g.high : g.low).push_back(r.popularity);
    g.high_ccdf = ccdf(g.high);
    g.low_ccdf = ccdf(g.low);
    return g;
}

struct DensityBin {
    std::uint64_t lo = 0; ///< first integer in the bin
    std::uint64_t hi = 0; ///< one past the last
    double center = 0.0;  ///< geometric mean of first and last integer
    double density = 0.0;
    std::size_t count = 0;
};

/// Logarithmically binned PDF of positive integers. Bin edges are
/// ceil(factor^k); density is count / (samples * integers in bin). Empty
/// bins are omitted.
inline std::vector<DensityBin> log_binned_pdf(std::span<const std::uint64_t> samples, double factor = 2.0)
{
    if (!(factor > 1.0))
        throw DomainError("log bin factor must exceed 1");
    std::vector<DensityBin> out;
    if (samples.empty())
        return out;
    std::uint64_t max_v = 0;
    for (auto v : samples) {
        if (v < 1)
            throw DomainError("log_binned_pdf needs positive samples");
        max_v = std::max(max_v, v);
    }
    std::vector<std::uint64_t> edges{1};
    double e = 1.0;
    while (edges.back() <= max_v) {
        e *= factor;
        const auto next = static_cast<std::uint64_t>(std::ceil(e - 1e-9));
        if (next > edges.back())
            edges.push_back(next);
    }
    std::vector<std::size_t> counts(edges.size() - 1, 0);
    for (auto v : samples) {
        auto it = std::upper_bound(edges.begin(), edges.end(), v);
        ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
    const double n = static_cast<double>(samples.size());
    for (std::size_t b = 0; b < counts.size(); ++b) {
        if (counts[b] == 0)
            continue;
        const auto lo = edges[b], hi = edges[b + 1];
        const double width = static_cast<double>(hi - lo);
        out.push_back({lo, hi, std::sqrt(static_cast<double>(lo) * static_cast<double>(hi - 1)),
                       static_cast<double>(counts[b]) / (n * width), counts[b]});
    }
    return out;
}

/// Contingency table for plug-in mutual information.
struct JointHistogram {
    std::size_t rows = 0, cols = 0;
    std::vector<double> counts; ///< row-major

    JointHistogram(std::size_t r, std::size_t c)
        : rows(r)
        , cols(c)
        , counts(r * c, 0.0)
    {
    }
    double& at(std::size_t r, std::size_t c) { return counts[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return counts[r * cols + c]; }
};

/// Plug-in mutual information (nats). Zero when at most one cell is occupied.
inline double mutual_information(const JointHistogram& h)
{
    double total = 0.0;
    std::size_t occupied = 0;
    std::vector<double> row(h.rows, 0.0), col(h.cols, 0.0);
    for (std::size_t r = 0; r < h.rows; ++r)
        for (std::size_t c = 0; c < h.cols; ++c) {
            const double v = h.at(r, c);
            row[r] += v;
            col[c] += v;
            total += v;
            occupied += v > 0.0;
        }
    if (occupied <= 1)
        return 0.0;
    double mi = 0.0;
    for (std::size_t r = 0; r < h.rows; ++r)
        for (std::size_t c = 0; c < h.cols; ++c) {
            const double v = h.at(r, c);
            if (v > 0.0)
                mi += v / total * std::log(v * total / (row[r] * col[c]));
        }
    return std::max(0.0, mi);
}

/// Popularity bin: floor(log2 p), capped at p_bins - 1.
inline std::size_t log2_bin(double p, std::size_t p_bins)
{
    const double b = std::floor(std::log2(std::max(1.0, p)));
    return static_cast<std::size_t>(std::min(b, static_cast<double>(p_bins - 1)));
}

/// MI between equal-width quality bins over (0, 1] and log2 popularity bins.
inline double mutual_information(const RankedPairs& pairs, std::size_t q_bins = 10, std::size_t p_bins = 24)
{
    if (q_bins < 1 || p_bins < 1)
        throw DomainError("mutual_information needs at least one bin per variable");
    JointHistogram h(q_bins, p_bins);
    for (auto [q, p] : pairs)
        h.at(quality_bin(q, q_bins), log2_bin(p, p_bins)) += 1.0;
    return mutual_information(h);
}

} // namespace memesim
