#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "memesim/csv.hpp"
#include "memesim/harness/config.hpp"
#include "memesim/harness/engine.hpp"
#include "memesim/harness/experiments.hpp"
#include "memesim/harness/pool.hpp"
#include "memesim/harness/settings.hpp"
#include "memesim/random.hpp"

using namespace memesim;
using namespace memesim::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("memesim_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

Settings tiny()
{
    Settings s;
    s.model.net.n = 150;
    s.model.net.m = 3;
    s.model.replicas = 2;
    s.model.tracked_memes = 50;
    return s;
}

} // namespace

TEST(Csv, SplitTrimParse)
{
    EXPECT_EQ(csv::split("a, b ,c"), (std::vector<std::string>{"a", "b", "c"}));
    double d = 0;
    EXPECT_TRUE(csv::parse(" 0.25", d));
    EXPECT_EQ(d, 0.25);
    int i = 0;
    EXPECT_FALSE(csv::parse("3x", i));
    EXPECT_EQ(csv::fmt(0.1), "0.1");
    std::istringstream in("\xEF\xBB\xBFx,y\n1,2\n\n3,4\n");
    auto t = csv::read(in);
    EXPECT_EQ(t.header, (std::vector<std::string>{"x", "y"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.line_numbers[1], 4u);
    EXPECT_THROW(t.column("z"), InputError);
}

TEST(Config, SectionsListsComments)
{
    std::istringstream in(R"(seed = 7   # master
[net]
n = 300
generator = "hk"
[sweep]
mu = [0.1, 0.5]
)");
    auto kv = KeyValueConfig::parse(in);
    EXPECT_EQ(kv.get<std::uint64_t>("seed"), 7u);
    EXPECT_EQ(kv.get<std::string>("net.generator"), "hk");
    EXPECT_EQ(kv.get_list<double>("sweep.mu"), (std::vector<double>{0.1, 0.5}));
    EXPECT_FALSE(kv.has("net.m"));
    std::istringstream bad("[net\n");
    EXPECT_THROW(KeyValueConfig::parse(bad), ConfigError);
    std::istringstream bad2("n 3\n");
    EXPECT_THROW(KeyValueConfig::parse(bad2), ConfigError);
    std::istringstream bad3("n = x\n");
    EXPECT_THROW(KeyValueConfig::parse(bad3).get<int>("n"), ConfigError);
}

TEST(Settings, PrecedenceAndValidation)
{
    Settings s;
    apply_preset("fig2b", s);
    EXPECT_EQ(s.alpha_grid.size(), 6u);
    s.apply_full_scale();
    EXPECT_EQ(s.model.replicas, 20u);
    std::istringstream file("[model]\nreplicas = 3\n[sweep]\nalpha = [4]\n");
    s.apply(KeyValueConfig::parse(file));
    EXPECT_EQ(s.model.replicas, 3u);
    EXPECT_EQ(s.alpha_grid, (std::vector<std::size_t>{4}));
    KeyValueConfig cli;
    cli.set("model.replicas", "2");
    s.apply(cli);
    EXPECT_EQ(s.model.replicas, 2u);

    KeyValueConfig bad;
    bad.set("model.alpha_mode", "huge");
    EXPECT_THROW(s.apply(bad), ConfigError);
    EXPECT_THROW(apply_preset("fig9", s), ConfigError);
}

TEST(Seeds, DerivedStreamsDiffer)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t c = 0; c < 50; ++c)
        for (std::uint64_t r = 0; r < 20; ++r)
            EXPECT_TRUE(seen.insert(derive_seed(42, {c, r})).second);
    EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
    EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
}

TEST(Pool, ResultsInIndexOrder)
{
    std::function<int(std::size_t)> sq = [](std::size_t i) { return static_cast<int>(i * i); };
    auto a = parallel_map<int>(100, 1, sq), b = parallel_map<int>(100, 7, sq);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a[9], 81);
    std::function<int(std::size_t)> boom = [](std::size_t i) -> int {
        if (i == 13)
            throw std::runtime_error("13");
        return 0;
    };
    EXPECT_THROW(parallel_map<int>(50, 4, boom), std::runtime_error);
}

TEST(Engine, IndependentOfWorkerCount)
{
    Settings s = tiny();
    auto g = generate(s.resolved_model().net);
    std::vector<CellSpec> cells{fixed_cell(s, "grid", 0.2, 3), fixed_cell(s, "grid", 0.6, 6)};
    auto a = run_cells(cells, g, 5, 1), b = run_cells(cells, g, 5, 4);
    ASSERT_EQ(a.size(), 2u);
    for (std::size_t c = 0; c < 2; ++c) {
        EXPECT_EQ(a[c].replicas.size(), 2u);
        EXPECT_EQ(a[c].tau_mean, b[c].tau_mean);
        EXPECT_EQ(a[c].tau_pooled, b[c].tau_pooled);
        EXPECT_EQ(a[c].popularity_hist, b[c].popularity_hist);
        for (std::size_t r = 0; r < 2; ++r)
            EXPECT_EQ(a[c].replicas[r].seed, derive_seed(5, {c, r}));
    }
}

TEST(Engine, AggregatesRecomputable)
{
    Settings s = tiny();
    s.model.replicas = 3;
    auto g = generate(s.resolved_model().net);
    auto res = run_cells({fixed_cell(s, "grid", 0.3, 4)}, g, 9, 2);
    std::vector<double> taus;
    std::uint64_t hist_total = 0;
    for (const auto& r : res[0].replicas)
        taus.push_back(r.tau);
    for (auto [p, n] : res[0].popularity_hist)
        hist_total += n;
    auto [m, sd] = mean_sd(taus);
    EXPECT_DOUBLE_EQ(res[0].tau_mean, m);
    EXPECT_DOUBLE_EQ(res[0].tau_sd, sd);
    EXPECT_EQ(hist_total, res[0].n_memes);
    EXPECT_EQ(res[0].n_memes, 3 * s.model.tracked_memes);
}

TEST(Engine, StepCapCarriesCellIdentity)
{
    Settings s = tiny();
    s.model.steady.step_cap = 500;
    auto g = generate(s.resolved_model().net);
    try {
        run_cells({fixed_cell(s, "grid", 0.3, 4)}, g, 1, 1);
        FAIL() << "expected SteadyStateNotReached";
    } catch (const SteadyStateNotReached& e) {
        EXPECT_NE(std::string(e.what()).find("mu=0.3"), std::string::npos);
    }
}

TEST(Experiment, CustomSmokeWithManifest)
{
    Settings s = tiny();
    s.model.replicas = 1;
    s.model.tracked_memes = 100;
    auto dir = scratch("custom");
    auto m = run_experiment("custom", s, dir);
    EXPECT_EQ(m["experiment"], "custom");
    std::set<std::string> listed;
    for (const auto& f : m["files"]) {
        const std::string name = f["name"];
        listed.insert(name);
        EXPECT_EQ(f["fnv1a64"], hex64(fnv1a64(slurp(dir / name))));
    }
    for (const char* name : {"memes.csv", "diversity.csv", "cells.csv", "replicas.csv", "summary.txt"})
        EXPECT_TRUE(listed.count(name)) << name;
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    auto head = slurp(dir / "memes.csv").substr(0, 56);
    EXPECT_EQ(head, "meme_id,quality,popularity,birth_step,death_step,replica");
    fs::remove_all(dir);
}

TEST(Experiment, RerunIsByteIdentical)
{
    Settings s = tiny();
    s.mu_grid = {0.2, 0.5};
    s.alpha_grid = {2, 5};
    auto d1 = scratch("rerun1"), d2 = scratch("rerun2");
    s.jobs = 1;
    run_experiment("custom", s, d1);
    s.jobs = 3;
    run_experiment("custom", s, d2);
    for (const char* name : {"cells.csv", "replicas.csv", "popularity_hist.csv"})
        EXPECT_EQ(slurp(d1 / name), slurp(d2 / name)) << name;
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST(Experiment, SigmaSweepOneRowPerPoint)
{
    Settings s = tiny();
    s.model.replicas = 1;
    s.model.max_feed = 100;
    s.sigma_grid = {0.05};
    auto dir = scratch("sigma");
    run_experiment("custom", s, dir);
    auto t = slurp(dir / "sigma_tau.csv");
    EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 2);
    fs::remove_all(dir);
}

TEST(Experiment, UnwritableOrUnknown)
{
    Settings s = tiny();
    EXPECT_THROW(run_experiment("fig9", s, scratch("unknown")), ConfigError);
    EXPECT_THROW(OutputSet("/proc/memesim_cannot_write"), std::runtime_error);
}
