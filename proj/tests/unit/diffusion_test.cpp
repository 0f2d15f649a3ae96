#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "memesim/diffusion.hpp"

using namespace memesim;

namespace {

ModelConfig small_config(double mu, std::size_t alpha, std::uint64_t seed = 3)
{
    ModelConfig c;
    c.net.n = 200;
    c.net.m = 4;
    c.net.seed = 11;
    c.mu = FixedMu{mu};
    c.alpha = FixedAlpha{alpha};
    c.tracked_memes = 300;
    c.seed = seed;
    return c;
}

/// Recounts every feed and compares with the world's bookkeeping.
void check_feed_accounting(const World& w)
{
    std::map<MemeId, std::uint32_t> counted;
    std::uint64_t total = 0;
    for (NodeId i = 0; i < w.graph().node_count(); ++i) {
        const Feed& f = w.feed(i);
        ASSERT_LE(f.size(), f.capacity());
        for (std::size_t k = 0; k < f.size(); ++k) {
            ++counted[f[k].meme_id];
            ++total;
            if (k > 0) {
                ASSERT_LE(f[k].created_step, f[k - 1].created_step);
            }
        }
    }
    ASSERT_EQ(total, w.messages_in_feeds());
    auto snap = w.feed_snapshot();
    ASSERT_EQ(snap.size(), counted.size());
    for (auto [id, c] : snap) {
        ASSERT_EQ(counted[id], c);
        ASSERT_EQ(w.copies(id), c);
        ASSERT_EQ(w.record(id).death_step, -1);
    }
    ASSERT_EQ(w.distinct_memes(), counted.size());
}

} // namespace

TEST(SelectFromFeed, FrequenciesFollowQuality)
{
    Feed f(5);
    const std::vector<double> q{0.9, 0.1, 0.5, 0.3, 0.7};
    for (MemeId i = 0; i < 5; ++i)
        f.push({i, 0});
    // feed[k] carries meme 4 - k
    auto qual = [&](MemeId id) { return q[id]; };
    Rng rng(31);
    const int n = 100'000;
    std::vector<int> hits(5, 0);
    for (int i = 0; i < n; ++i)
        ++hits[f[select_from_feed(f, 5, qual, rng)].meme_id];
    const double total = 0.9 + 0.1 + 0.5 + 0.3 + 0.7;
    for (MemeId id = 0; id < 5; ++id) {
        const double p = q[id] / total;
        EXPECT_NEAR(hits[id] / static_cast<double>(n), p, 3 * std::sqrt(p * (1 - p) / n)) << id;
    }
}

TEST(SelectFromFeed, MultiplicityCounts)
{
    Feed f(3);
    f.push({0, 0});
    f.push({1, 1});
    f.push({0, 2});
    auto qual = [](MemeId) { return 0.5; };
    Rng rng(32);
    const int n = 100'000;
    int zero = 0;
    for (int i = 0; i < n; ++i)
        zero += f[select_from_feed(f, 3, qual, rng)].meme_id == 0;
    EXPECT_NEAR(zero / static_cast<double>(n), 2.0 / 3, 3 * std::sqrt(2.0 / 9 / n));
}

TEST(SelectFromFeed, OnlyTopDepth)
{
    Feed f(10);
    for (MemeId i = 0; i < 10; ++i)
        f.push({i, static_cast<Step>(i)});
    auto qual = [](MemeId) { return 1.0; };
    Rng rng(33);
    for (int i = 0; i < 1000; ++i)
        EXPECT_LT(select_from_feed(f, 3, qual, rng), 3u);
}

TEST(World, AccountingInvariantsHold)
{
    auto cfg = small_config(0.2, 5);
    auto g = generate(cfg.net);
    Rng init(1), rng(2);
    World w(g, cfg, init, true);
    for (int i = 0; i < 20'000; ++i) {
        w.step(rng);
        if (i % 997 == 0)
            check_feed_accounting(w);
    }
    check_feed_accounting(w);

    // popularity equals the number of share events of each meme
    std::map<MemeId, std::uint64_t> shares;
    std::size_t injections = 0;
    for (const auto& e : w.events()) {
        ++shares[e.meme];
        injections += e.injected;
    }
    EXPECT_EQ(injections, w.memes_created());
    for (MemeId id = 0; id < w.memes_created(); ++id)
        ASSERT_EQ(w.record(id).popularity, shares[id]);
}

TEST(World, EmptyFeedFallsBackToInjection)
{
    auto cfg = small_config(0.0, 5);
    auto g = generate(cfg.net);
    Rng init(1), rng(2);
    World w(g, cfg, init);
    EXPECT_FALSE(w.any_agent_injects());
    auto out = w.step(rng);
    EXPECT_TRUE(out.injected);
    EXPECT_TRUE(out.fallback);
    EXPECT_EQ(w.record(out.meme).popularity, 1u);
    EXPECT_EQ(w.copies(out.meme), g.degree(out.agent));
}

TEST(World, EntropyMatchesSnapshot)
{
    auto cfg = small_config(0.3, 8);
    auto g = generate(cfg.net);
    Rng init(1), rng(2);
    World w(g, cfg, init);
    for (int i = 0; i < 5000; ++i)
        w.step(rng);
    double t = 0, s = 0;
    for (auto [id, c] : w.feed_snapshot())
        t += c;
    for (auto [id, c] : w.feed_snapshot())
        s -= c / t * std::log(c / t);
    EXPECT_NEAR(w.entropy(), s, 1e-10);
}

TEST(Run, DeterministicPerSeed)
{
    auto cfg = small_config(0.2, 5);
    auto g = generate(cfg.net);
    auto a = run(cfg, g), b = run(cfg, g);
    ASSERT_EQ(a.memes.size(), b.memes.size());
    for (std::size_t i = 0; i < a.memes.size(); ++i) {
        EXPECT_EQ(a.memes[i].meme.id, b.memes[i].meme.id);
        EXPECT_EQ(a.memes[i].popularity, b.memes[i].popularity);
    }
    EXPECT_EQ(a.total_steps, b.total_steps);
    cfg.seed = 4;
    auto c = run(cfg, g);
    EXPECT_NE(a.total_steps, c.total_steps);
}

TEST(Run, TracksMemesBornAfterSteadyState)
{
    auto cfg = small_config(0.2, 5);
    auto g = generate(cfg.net);
    std::vector<ShareEvent> log;
    auto r = run(cfg, g, &log);
    ASSERT_EQ(r.memes.size(), cfg.tracked_memes);
    EXPECT_GT(r.steady_step, 0);
    std::map<MemeId, std::uint64_t> shares;
    for (const auto& e : log)
        ++shares[e.meme];
    for (const auto& m : r.memes) {
        EXPECT_TRUE(m.tracked);
        EXPECT_GE(m.birth_step, r.steady_step);
        EXPECT_GE(m.death_step, m.birth_step);
        EXPECT_GE(m.popularity, 1u);
        EXPECT_EQ(m.popularity, shares[m.meme.id]);
        EXPECT_GT(m.meme.quality, 0.0);
        EXPECT_LE(m.meme.quality, 1.0);
    }
    for (std::size_t i = 1; i < r.memes.size(); ++i)
        EXPECT_LT(r.memes[i - 1].meme.id, r.memes[i].meme.id);
}

TEST(Run, FullLoadMeansNoResharing)
{
    auto r = run(small_config(1.0, 5), generate(small_config(1.0, 5).net));
    for (const auto& m : r.memes)
        EXPECT_EQ(m.popularity, 1u);
}

TEST(Run, ZeroLoadAbsorbs)
{
    auto cfg = small_config(0.0, 5);
    auto r = run(cfg, generate(cfg.net));
    EXPECT_TRUE(r.memes.empty());
    ASSERT_FALSE(r.diversity.empty());
    EXPECT_EQ(r.diversity.back().distinct_memes, 1u);
    EXPECT_EQ(r.mean_entropy(), 0.0);
}

TEST(Run, StepCapRaises)
{
    auto cfg = small_config(0.2, 5);
    cfg.steady.step_cap = 1000;
    EXPECT_THROW(run(cfg, generate(cfg.net)), SteadyStateNotReached);
}

TEST(Run, ScrollingAndEmpiricalModes)
{
    auto cfg = small_config(0.2, 5);
    auto g = generate(cfg.net);
    cfg.alpha = ScrollingAlpha{{0.0, 0.1, 0.09}};
    cfg.max_feed = 100;
    EXPECT_EQ(run(cfg, g).memes.size(), cfg.tracked_memes);

    auto dist = std::make_shared<const EmpiricalDist>(
        EmpiricalDist::from_samples(EmpiricalDist::Kind::AlphaPerSession, {1, 3, 3, 20}));
    auto mu = std::make_shared<const EmpiricalDist>(
        EmpiricalDist::from_samples(EmpiricalDist::Kind::MuPerUser, {0.1, 0.5, 0.9}));
    cfg.mu = EmpiricalMu{mu};
    for (bool per_activation : {false, true}) {
        cfg.alpha = EmpiricalAlpha{dist, per_activation};
        auto r = run(cfg, g);
        EXPECT_EQ(r.memes.size(), cfg.tracked_memes);
        EXPECT_NE(r.alpha_mode.find(per_activation ? "activation" : "agent"), std::string::npos);
    }

    Rng init(1);
    cfg.alpha = EmpiricalAlpha{dist, false};
    World w(g, cfg, init);
    for (NodeId i = 0; i < g.node_count(); ++i) {
        const auto cap = w.feed(i).capacity();
        EXPECT_TRUE(cap == 1 || cap == 3 || cap == 20);
        const double m = w.agent_mu(i);
        EXPECT_TRUE(m == 0.1 || m == 0.5 || m == 0.9);
    }
}

TEST(Run, InvalidConfig)
{
    auto cfg = small_config(1.5, 5);
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = small_config(0.5, 0);
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = small_config(0.5, 5);
    cfg.mu = EmpiricalMu{};
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(SteadyState, DetectorNeedsTwoCloseWindows)
{
    SteadyStatePolicy p;
    p.window = 3;
    p.min_burn_in = 6;
    SteadyStateDetector d(p);
    for (double v : {10.0, 20.0, 30.0, 40.0, 50.0})
        EXPECT_FALSE(d.add(v));
    // windows (20,30,40) vs (50,...) far apart
    EXPECT_FALSE(d.add(60.0));
    SteadyStateDetector flat(p);
    for (int i = 0; i < 5; ++i)
        EXPECT_FALSE(flat.add(100.0));
    EXPECT_TRUE(flat.add(100.5));
}
