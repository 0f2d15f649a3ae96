#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "memesim/csv.hpp"
#include "memesim/error.hpp"
#include "memesim/random.hpp"
#include "memesim/scrolling.hpp"

namespace memesim {

/// Weighted empirical distribution over a sorted support.
struct EmpiricalDist {
    enum class Kind { MuPerUser, AlphaPerSession, PopularityCounts };

    Kind kind = Kind::MuPerUser;
    std::vector<double> values;  ///< strictly increasing
    std::vector<double> weights; ///< same length, >= 0, positive sum
    std::size_t sample_count = 0;

    /// Builds from raw observations, merging equal values.
    static EmpiricalDist from_samples(Kind kind, const std::vector<double>& samples)
    {
        std::map<double, double> hist;
        for (double v : samples)
            hist[v] += 1.0;
        EmpiricalDist d;
        d.kind = kind;
        for (auto [v, w] : hist) {
            d.values.push_back(v);
            d.weights.push_back(w);
        }
        d.sample_count = samples.size();
        d.validate();
        return d;
    }

    void validate() const
    {
        if (values.empty() || values.size() != weights.size())
            throw InputError("empirical distribution has no support");
        double total = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(weights[i] >= 0.0))
                throw InputError("negative weight in empirical distribution");
            if (i > 0 && !(values[i] > values[i - 1]))
                throw InputError("empirical support must be strictly increasing");
            total += weights[i];
        }
        if (!(total > 0.0))
            throw InputError("empirical distribution weights sum to zero");
        if (kind == Kind::MuPerUser && (values.front() < 0.0 || values.back() > 1.0))
            throw InputError("mu values must lie in [0, 1]");
        if (kind != Kind::MuPerUser)
            for (double v : values)
                if (v < 1.0 || v != std::floor(v))
                    throw InputError("alpha and popularity values must be integers >= 1");
    }

    double total_weight() const
    {
        double t = 0.0;
        for (double w : weights)
            t += w;
        return t;
    }

    double mean() const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            s += values[i] * weights[i];
        return s / total_weight();
    }

    bool is_point_mass() const { return values.size() == 1; }
};

/// Result of ingesting a CSV; invalid rows are skipped and counted.
struct Ingested {
    EmpiricalDist dist;
    std::size_t rows_read = 0;
    std::size_t rows_skipped = 0;
};

/// Per-user mu = n_t / (n_t + n_r) from a `user_id,n_t,n_r` table. Rows
/// with n_t + n_r = 0 (or unparsable) are skipped.
inline Ingested ingest_mu(std::istream& is)
{
    auto t = csv::read(is);
    const auto ct = t.column("n_t"), cr = t.column("n_r");
    Ingested out;
    std::vector<double> mu;
    for (const auto& r : t.rows) {
        ++out.rows_read;
        std::int64_t nt = -1, nr = -1;
        if (r.size() <= std::max(ct, cr) || !csv::parse(r[ct], nt) || !csv::parse(r[cr], nr) || nt < 0 ||
            nr < 0 || nt + nr < 1) {
            ++out.rows_skipped;
            continue;
        }
        mu.push_back(static_cast<double>(nt) / static_cast<double>(nt + nr));
    }
    if (mu.empty())
        throw InputError("no valid rows in mu CSV");
    out.dist = EmpiricalDist::from_samples(EmpiricalDist::Kind::MuPerUser, mu);
    return out;
}

namespace detail {

inline Ingested ingest_counts(std::istream& is, const char* column, EmpiricalDist::Kind kind, const char* what)
{
    auto t = csv::read(is);
    const auto c = t.column(column);
    Ingested out;
    std::vector<double> vals;
    for (const auto& r : t.rows) {
        ++out.rows_read;
        std::int64_t v = 0;
        if (r.size() <= c || !csv::parse(r[c], v) || v < 1) {
            ++out.rows_skipped;
            continue;
        }
        vals.push_back(static_cast<double>(v));
    }
    if (vals.empty())
        throw InputError(std::string("no valid rows in ") + what + " CSV");
    out.dist = EmpiricalDist::from_samples(kind, vals);
    return out;
}

} // namespace detail

/// Per-session attention from a `session_id,stops` table; zero counts are
/// dropped and reported.
inline Ingested ingest_alpha(std::istream& is)
{
    return detail::ingest_counts(is, "stops", EmpiricalDist::Kind::AlphaPerSession, "alpha");
}

/// Share counts from an `item,count` table.
inline Ingested ingest_popularity(std::istream& is)
{
    return detail::ingest_counts(is, "count", EmpiricalDist::Kind::PopularityCounts, "popularity");
}

/// Inverse-CDF sampler over an EmpiricalDist. Holds no RNG.
class Sampler {
public:
    explicit Sampler(const EmpiricalDist& d)
        : values_(d.values)
    {
        d.validate();
        cumulative_.reserve(d.weights.size());
        double acc = 0.0;
        for (double w : d.weights)
            cumulative_.push_back(acc += w);
    }

    double operator()(Rng& rng) const
    {
        const double u = uniform01(rng) * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end())
            --it;
        // zero-weight entries share a cumulative value with their predecessor
        // and upper_bound never lands on them
        return values_[static_cast<std::size_t>(it - cumulative_.begin())];
    }

    double min() const { return values_.front(); }
    double max() const { return values_.back(); }

private:
    std::vector<double> values_;
    std::vector<double> cumulative_;
};

struct NaiveParams {
    double mu = 0.0;
    std::size_t alpha = 1;
};

/// Mean-based calibration: weighted means, alpha rounded to an integer >= 1.
inline NaiveParams naive_params(const EmpiricalDist& mu_dist, const EmpiricalDist& alpha_dist)
{
    mu_dist.validate();
    alpha_dist.validate();
    NaiveParams p;
    p.mu = mu_dist.mean();
    p.alpha = static_cast<std::size_t>(std::max(1.0, std::round(alpha_dist.mean())));
    return p;
}

/// Synthetic `user_id,n_t,n_r` table drawn from the scrolling model.
inline void write_mu_standin(std::ostream& os, const ScrollParams& p, std::size_t users,
                             std::size_t sessions_per_user, Rng& rng)
{
    os << "user_id,n_t,n_r\n";
    auto counts = simulate_user_counts(p, sessions_per_user, users, rng);
    for (std::size_t i = 0; i < counts.size(); ++i)
        csv::row(os, i, counts[i].posts, counts[i].reshares);
}

/// Synthetic `session_id,stops` table; new-post sessions record 0 stops.
inline void write_alpha_standin(std::ostream& os, const ScrollParams& p, std::size_t sessions, Rng& rng)
{
    os << "session_id,stops\n";
    for (std::size_t i = 0; i < sessions; ++i) {
        auto s = sample_session(p, rng);
        csv::row(os, i, s.length);
    }
}

} // namespace memesim
