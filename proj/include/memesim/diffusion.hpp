#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "memesim/calib.hpp"
#include "memesim/error.hpp"
#include "memesim/feed.hpp"
#include "memesim/netgen.hpp"
#include "memesim/random.hpp"
#include "memesim/scrolling.hpp"

namespace memesim {

struct Meme {
    MemeId id = 0;
    double quality = 1.0; ///< in (0, 1]
};

struct MemeRecord {
    Meme meme;
    std::uint64_t popularity = 0; ///< injection counts as the first share
    Step birth_step = 0;
    Step death_step = -1; ///< -1 while any feed still carries the meme
    bool tracked = false;
};

// Information-load modes.
struct FixedMu {
    double mu = 0.1;
};
struct EmpiricalMu {
    std::shared_ptr<const EmpiricalDist> dist;
};
using MuMode = std::variant<FixedMu, EmpiricalMu>;

// Attention modes.
struct FixedAlpha {
    std::size_t alpha = 10;
};
/// Per-agent feed capacity drawn once at start, or (per_activation) a
/// depth redrawn at every reshare over a feed of `max_feed` messages.
struct EmpiricalAlpha {
    std::shared_ptr<const EmpiricalDist> dist;
    bool per_activation = false;
};
/// Reshare depth drawn per activation from the scrolling session model.
struct ScrollingAlpha {
    ScrollParams params;
};
using AlphaMode = std::variant<FixedAlpha, EmpiricalAlpha, ScrollingAlpha>;

struct SteadyStatePolicy {
    std::size_t sample_interval = 0; ///< 0 means one sample per N activations
    std::size_t window = 20;
    double tolerance = 0.02;
    std::size_t min_burn_in = 50;
    Step step_cap = 0; ///< 0 means kDefaultCapPerNode * N

    static constexpr Step kDefaultCapPerNode = 200'000;

    void validate() const
    {
        if (window < 2)
            throw ConfigError("steady-state window must be >= 2");
        if (!(tolerance > 0.0))
            throw ConfigError("steady-state tolerance must be > 0");
        if (step_cap < 0)
            throw ConfigError("step cap must be non-negative");
    }
};

struct ModelConfig {
    NetSpec net;
    MuMode mu = FixedMu{};
    AlphaMode alpha = FixedAlpha{};
    SteadyStatePolicy steady;
    std::size_t tracked_memes = 10'000;
    std::size_t replicas = 5;
    std::uint64_t seed = 1;
    std::size_t max_feed = 1000; ///< feed capacity when depth is drawn per activation

    void validate() const
    {
        net.validate();
        steady.validate();
        if (tracked_memes < 1)
            throw ConfigError("tracked_memes must be >= 1");
        if (replicas < 1)
            throw ConfigError("replicas must be >= 1");
        if (max_feed < 1)
            throw ConfigError("max_feed must be >= 1");
        if (auto* f = std::get_if<FixedMu>(&mu); f && !(f->mu >= 0.0 && f->mu <= 1.0))
            throw ConfigError("mu must lie in [0, 1]");
        if (auto* e = std::get_if<EmpiricalMu>(&mu); e && !e->dist)
            throw ConfigError("empirical mu mode needs a distribution");
        if (auto* f = std::get_if<FixedAlpha>(&alpha); f && f->alpha < 1)
            throw ConfigError("alpha must be >= 1");
        if (auto* e = std::get_if<EmpiricalAlpha>(&alpha); e && !e->dist)
            throw ConfigError("empirical alpha mode needs a distribution");
        if (auto* s = std::get_if<ScrollingAlpha>(&alpha))
            s->params.validate();
    }
};

/// Short human-readable label for an attention mode; two runs are
/// comparable for diversity normalization only when labels match.
inline std::string describe(const AlphaMode& a)
{
    struct V {
        std::string operator()(const FixedAlpha& f) const { return "fixed:" + std::to_string(f.alpha); }
        std::string operator()(const EmpiricalAlpha& e) const
        {
            return std::string("empirical:") + (e.per_activation ? "activation" : "agent") + ":" +
                   std::to_string(e.dist ? e.dist->mean() : 0.0);
        }
        std::string operator()(const ScrollingAlpha& s) const
        {
            return "scrolling:" + std::to_string(s.params.q_mean) + ":" + std::to_string(s.params.sigma);
        }
    };
    return std::visit(V{}, a);
}

inline std::string describe(const MuMode& m)
{
    if (auto* f = std::get_if<FixedMu>(&m))
        return "fixed:" + std::to_string(f->mu);
    return "empirical:" + std::to_string(std::get<EmpiricalMu>(m).dist->mean());
}

struct StepOutcome {
    NodeId agent = 0;
    MemeId meme = 0;
    bool injected = false;
    bool fallback = false; ///< reshare branch hit an empty feed
};

struct ShareEvent {
    Step step = 0;
    MemeId meme = 0;
    bool injected = false;
};

struct NodeState {
    NodeId node = 0;
    MemeId meme_id = 0;
    double quality = 0.0;
};

/// Picks a feed position among the `depth` newest messages with probability
/// proportional to the quality of the carried meme. Each message counts
/// separately, so a meme present twice is twice as likely.
template <class QualityOf>
std::size_t select_from_feed(const Feed& feed, std::size_t depth, QualityOf&& quality_of, Rng& rng)
{
    const std::size_t n = std::min(depth, feed.size());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += quality_of(feed[i].meme_id);
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        u -= quality_of(feed[i].meme_id);
        if (u < 0.0)
            return i;
    }
    return n - 1;
}

/// Complete mutable state of one simulation: feeds, agent traits, and the
/// registry of every meme created so far. Confined to a single thread.
class World {
public:
    World(const Graph& graph, const ModelConfig& cfg, Rng& init_rng, bool record_events = false)
        : graph_(&graph)
        , mu_(graph.node_count())
        , last_shared_(graph.node_count(), kNone)
        , record_events_(record_events)
    {
        cfg.validate();
        const std::size_t n = graph.node_count();
        if (n == 0)
            throw ConfigError("graph has no nodes");

        if (auto* f = std::get_if<FixedMu>(&cfg.mu)) {
            std::fill(mu_.begin(), mu_.end(), f->mu);
        } else {
            Sampler s(*std::get<EmpiricalMu>(cfg.mu).dist);
            for (auto& m : mu_)
                m = s(init_rng);
        }

        std::vector<std::size_t> caps(n, 1);
        if (auto* f = std::get_if<FixedAlpha>(&cfg.alpha)) {
            std::fill(caps.begin(), caps.end(), f->alpha);
        } else if (auto* e = std::get_if<EmpiricalAlpha>(&cfg.alpha)) {
            depth_sampler_.emplace(*e->dist);
            if (e->per_activation) {
                std::fill(caps.begin(), caps.end(), cfg.max_feed);
            } else {
                for (auto& c : caps)
                    c = static_cast<std::size_t>((*depth_sampler_)(init_rng));
                depth_sampler_.reset();
            }
        } else {
            scroll_ = std::get<ScrollingAlpha>(cfg.alpha).params;
            std::fill(caps.begin(), caps.end(), cfg.max_feed);
        }
        feeds_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            feeds_.emplace_back(caps[i]);
            if (graph.degree(static_cast<NodeId>(i)) > 0)
                ++empty_feeds_;
        }
        can_inject_ = std::any_of(mu_.begin(), mu_.end(), [](double m) { return m > 0.0; });
    }

    Step now() const noexcept { return now_; }
    const Graph& graph() const noexcept { return *graph_; }
    const Feed& feed(NodeId i) const noexcept { return feeds_[i]; }
    double agent_mu(NodeId i) const noexcept { return mu_[i]; }
    std::size_t distinct_memes() const noexcept { return live_.size(); }
    std::size_t memes_created() const noexcept { return memes_.size(); }
    std::uint64_t messages_in_feeds() const noexcept { return total_messages_; }
    bool any_agent_injects() const noexcept { return can_inject_; }
    bool all_feeds_filled() const noexcept { return empty_feeds_ == 0; }

    const MemeRecord& record(MemeId id) const { return memes_.at(id).record; }
    std::uint32_t copies(MemeId id) const { return memes_.at(id).copies; }
    double quality(MemeId id) const { return memes_[id].record.meme.quality; }
    const std::vector<ShareEvent>& events() const noexcept { return events_; }

    /// Number of messages per live meme, over every feed.
    std::vector<std::pair<MemeId, std::uint32_t>> feed_snapshot() const
    {
        std::vector<std::pair<MemeId, std::uint32_t>> out;
        out.reserve(live_.size());
        for (MemeId id : live_)
            out.emplace_back(id, memes_[id].copies);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Shannon entropy (nats) of the meme shares over all feed messages.
    double entropy() const noexcept
    {
        if (live_.size() <= 1)
            return 0.0;
        double s = 0.0;
        for (MemeId id : live_) {
            const double c = memes_[id].copies;
            s += c * std::log(c);
        }
        const double t = static_cast<double>(total_messages_);
        return std::max(0.0, std::log(t) - s / t);
    }

    /// From now on the next `count` injected memes are tracked.
    void begin_tracking(std::size_t count) noexcept { track_budget_ = count; }
    std::size_t tracked_born() const noexcept { return tracked_born_; }
    std::size_t tracked_alive() const noexcept { return tracked_born_ - finished_.size(); }
    const std::vector<MemeRecord>& finished_tracked() const noexcept { return finished_; }

    /// Last meme shared by each agent that has shared anything.
    std::vector<NodeState> snapshot_node_states() const
    {
        std::vector<NodeState> rows;
        for (NodeId i = 0; i < last_shared_.size(); ++i)
            if (last_shared_[i] != kNone)
                rows.push_back({i, last_shared_[i], memes_[last_shared_[i]].record.meme.quality});
        return rows;
    }

    /// One agent activation.
    StepOutcome step(Rng& rng)
    {
        StepOutcome out;
        out.agent = static_cast<NodeId>(uniform_index(rng, feeds_.size()));
        const Feed& own = feeds_[out.agent];
        out.injected = bernoulli(rng, mu_[out.agent]);
        if (!out.injected && own.empty()) {
            out.injected = true;
            out.fallback = true;
        }

        if (out.injected) {
            out.meme = create_meme(rng);
        } else {
            std::size_t depth = own.size();
            if (scroll_)
                depth = static_cast<std::size_t>(std::min<std::uint64_t>(sample_run_length(*scroll_, rng), depth));
            else if (depth_sampler_)
                depth = std::min(static_cast<std::size_t>((*depth_sampler_)(rng)), depth);
            auto q = [this](MemeId id) { return memes_[id].record.meme.quality; };
            out.meme = own[select_from_feed(own, depth, q, rng)].meme_id;
        }

        ++memes_[out.meme].record.popularity;
        last_shared_[out.agent] = out.meme;
        if (record_events_)
            events_.push_back({now_, out.meme, out.injected});

        const Message msg{out.meme, now_};
        for (NodeId nb : graph_->neighbors(out.agent)) {
            Feed& f = feeds_[nb];
            if (f.empty())
                --empty_feeds_;
            ++memes_[out.meme].copies;
            ++total_messages_;
            if (auto ev = f.push(msg)) {
                --total_messages_;
                release(ev->meme_id);
            }
        }
        // an isolated agent's post reaches nobody
        if (memes_[out.meme].copies == 0)
            kill(out.meme);
        ++now_;
        return out;
    }

private:
    static constexpr MemeId kNone = ~MemeId{0};

    struct MemeState {
        MemeRecord record;
        std::uint32_t copies = 0;
        std::size_t live_pos = 0;
    };

    MemeId create_meme(Rng& rng)
    {
        const MemeId id = memes_.size();
        MemeState s;
        s.record.meme = {id, uniform_open_closed(rng)};
        s.record.birth_step = now_;
        if (tracked_born_ < track_budget_) {
            s.record.tracked = true;
            ++tracked_born_;
        }
        s.live_pos = live_.size();
        live_.push_back(id);
        memes_.push_back(s);
        return id;
    }

    void release(MemeId id)
    {
        if (--memes_[id].copies == 0)
            kill(id);
    }

    void kill(MemeId id)
    {
        MemeState& s = memes_[id];
        s.record.death_step = now_;
        const MemeId moved = live_.back();
        live_[s.live_pos] = moved;
        memes_[moved].live_pos = s.live_pos;
        live_.pop_back();
        if (s.record.tracked)
            finished_.push_back(s.record);
    }

    const Graph* graph_;
    std::vector<Feed> feeds_;
    std::vector<double> mu_;
    std::optional<Sampler> depth_sampler_;
    std::optional<ScrollParams> scroll_;
    std::vector<MemeState> memes_;
    std::vector<MemeId> live_;
    std::vector<MemeId> last_shared_;
    std::vector<MemeRecord> finished_;
    std::vector<ShareEvent> events_;
    std::uint64_t total_messages_ = 0;
    std::size_t empty_feeds_ = 0;
    std::size_t track_budget_ = 0;
    std::size_t tracked_born_ = 0;
    Step now_ = 0;
    bool can_inject_ = true;
    bool record_events_ = false;
};

struct DiversitySample {
    Step sample_step = 0;
    double entropy = 0.0;
    std::size_t distinct_memes = 0;
};

struct RunResult {
    std::vector<MemeRecord> memes; ///< tracked memes, ordered by id
    std::vector<DiversitySample> diversity;
    Step steady_step = 0;
    Step total_steps = 0;
    NetSpec net;
    std::string mu_mode;
    std::string alpha_mode;

    /// Time-averaged entropy over samples taken at or after steady state.
    double mean_entropy() const
    {
        double s = 0.0;
        std::size_t n = 0;
        for (const auto& d : diversity)
            if (d.sample_step >= steady_step) {
                s += d.entropy;
                ++n;
            }
        return n == 0 ? 0.0 : s / static_cast<double>(n);
    }
};

/// Declares steady state once two consecutive windows of distinct-meme
/// samples have means within a relative tolerance, after a minimum burn-in.
class SteadyStateDetector {
public:
    explicit SteadyStateDetector(const SteadyStatePolicy& p)
        : policy_(p)
    {
    }

    bool add(double distinct)
    {
        samples_.push_back(distinct);
        const std::size_t n = samples_.size(), w = policy_.window;
        if (n < policy_.min_burn_in || n < 2 * w)
            return false;
        double prev = 0.0, last = 0.0;
        for (std::size_t i = n - 2 * w; i < n - w; ++i)
            prev += samples_[i];
        for (std::size_t i = n - w; i < n; ++i)
            last += samples_[i];
        prev /= static_cast<double>(w);
        last /= static_cast<double>(w);
        const double scale = std::max(prev, 1e-12);
        return std::abs(last - prev) / scale < policy_.tolerance;
    }

private:
    SteadyStatePolicy policy_;
    std::vector<double> samples_;
};

/// Runs to steady state, then until the first `tracked_memes` memes born
/// after steady state have all gone extinct. When no agent can ever inject
/// (mu = 0 everywhere) steady state is absorption into a single meme, and
/// the run ends one window of samples later with no tracked memes.
inline RunResult run(const ModelConfig& cfg, const Graph& graph, std::vector<ShareEvent>* event_log = nullptr)
{
    cfg.validate();
    Rng init_rng(derive_seed(cfg.seed, {0}));
    Rng rng(derive_seed(cfg.seed, {1}));
    World world(graph, cfg, init_rng, event_log != nullptr);

    const auto n = static_cast<Step>(graph.node_count());
    const Step interval = cfg.steady.sample_interval ? static_cast<Step>(cfg.steady.sample_interval) : n;
    const Step cap = cfg.steady.step_cap ? cfg.steady.step_cap : SteadyStatePolicy::kDefaultCapPerNode * n;

    RunResult res;
    res.net = cfg.net;
    res.mu_mode = describe(cfg.mu);
    res.alpha_mode = describe(cfg.alpha);

    SteadyStateDetector detector(cfg.steady);
    bool steady = false;
    std::size_t samples_after_absorption = 0;
    const bool absorbing = !world.any_agent_injects();

    for (;;) {
        if (world.now() >= cap) {
            if (!steady)
                throw SteadyStateNotReached("steady state not reached within step cap of " + std::to_string(cap) +
                                            " activations");
            throw SteadyStateNotReached("tracked memes still alive at step cap of " + std::to_string(cap) +
                                        " activations (" + std::to_string(world.tracked_alive()) + " alive)");
        }
        world.step(rng);
        if (world.now() % interval == 0) {
            res.diversity.push_back({world.now(), world.entropy(), world.distinct_memes()});
            if (!steady) {
                const bool reached = absorbing ? (world.distinct_memes() == 1 && world.all_feeds_filled())
                                               : detector.add(static_cast<double>(world.distinct_memes()));
                if (reached) {
                    steady = true;
                    res.steady_step = world.now();
                    if (!absorbing)
                        world.begin_tracking(cfg.tracked_memes);
                }
            } else if (absorbing && ++samples_after_absorption >= cfg.steady.window) {
                break;
            }
        }
        if (steady && !absorbing && world.tracked_born() == cfg.tracked_memes && world.tracked_alive() == 0)
            break;
    }

    res.total_steps = world.now();
    res.memes = world.finished_tracked();
    std::sort(res.memes.begin(), res.memes.end(),
              [](const MemeRecord& a, const MemeRecord& b) { return a.meme.id < b.meme.id; });
    if (event_log)
        *event_log = world.events();
    return res;
}

} // namespace memesim
