#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "memesim/csv.hpp"
#include "memesim/diffusion.hpp"
#include "memesim/harness/config.hpp"
#include "memesim/scrolling.hpp"

#ifndef MEMESIM_DATA_DIR
#define MEMESIM_DATA_DIR "data"
#endif

namespace memesim::harness {

/// Everything an experiment needs. Resolution order, later wins:
/// built-in defaults, experiment preset, --full-scale, config file, CLI flags.
struct Settings {
    ModelConfig model;
    std::uint64_t seed = 42;
    std::optional<std::uint64_t> net_seed; ///< defaults to seed
    std::size_t jobs = 1;
    bool full_scale = false;

    enum class MuKind { Fixed, Empirical };
    enum class AlphaKind { Fixed, Empirical, Scrolling };
    MuKind mu_kind = MuKind::Fixed;
    AlphaKind alpha_kind = AlphaKind::Fixed;
    double mu = 0.1;
    std::size_t alpha = 10;
    bool alpha_per_activation = false;

    std::vector<double> mu_grid;
    std::vector<std::size_t> alpha_grid;
    std::vector<double> sigma_grid;

    std::string mu_data = std::string(MEMESIM_DATA_DIR) + "/mu_standin.csv";
    std::string alpha_data = std::string(MEMESIM_DATA_DIR) + "/alpha_standin_s009.csv";
    std::string alpha_data_alt = std::string(MEMESIM_DATA_DIR) + "/alpha_standin_s002.csv";

    ScrollParams scroll{0.05, 0.1, 0.09};    ///< scrolling attention mode and sigma sweeps
    ScrollParams scroll_mu{0.978, 0.1, 0.09}; ///< mu-distribution model
    std::size_t sessions_per_user = 200;
    std::size_t model_users = 10'000;

    double reference_mu = 0.05;
    std::size_t reference_alpha = 64;
    double quality_threshold = 0.34;
    std::size_t quality_bins = 20;

    static constexpr std::size_t kDeskReplicas = 5;
    static constexpr std::size_t kDeskTracked = 10'000;
    static constexpr std::size_t kFullReplicas = 20;
    static constexpr std::size_t kFullTracked = 100'000;

    Settings()
    {
        model.replicas = kDeskReplicas;
        model.tracked_memes = kDeskTracked;
    }

    void apply_full_scale()
    {
        full_scale = true;
        model.replicas = kFullReplicas;
        model.tracked_memes = kFullTracked;
    }

    void apply(const KeyValueConfig& kv)
    {
        if (auto v = kv.get<std::uint64_t>("seed"))
            seed = *v;
        if (auto v = kv.get<std::size_t>("jobs"))
            jobs = *v;
        if (auto v = kv.get<bool>("full_scale"); v && *v)
            apply_full_scale();

        if (auto v = kv.get<std::string>("net.generator"))
            model.net.generator = parse_generator(*v);
        if (auto v = kv.get<std::size_t>("net.n"))
            model.net.n = *v;
        if (auto v = kv.get<std::size_t>("net.m"))
            model.net.m = *v;
        if (auto v = kv.get<double>("net.triad_prob"))
            model.net.triad_prob = *v;
        if (auto v = kv.get<std::uint64_t>("net.seed"))
            net_seed = *v;

        if (auto v = kv.get<std::string>("model.mu_mode"))
            mu_kind = *v == "empirical" ? MuKind::Empirical
                      : *v == "fixed"   ? MuKind::Fixed
                                        : throw ConfigError("model.mu_mode must be fixed or empirical");
        if (auto v = kv.get<std::string>("model.alpha_mode"))
            alpha_kind = *v == "empirical"   ? AlphaKind::Empirical
                         : *v == "scrolling" ? AlphaKind::Scrolling
                         : *v == "fixed"     ? AlphaKind::Fixed
                                             : throw ConfigError("model.alpha_mode must be fixed, empirical or scrolling");
        if (auto v = kv.get<double>("model.mu"))
            mu = *v;
        if (auto v = kv.get<std::size_t>("model.alpha"))
            alpha = *v;
        if (auto v = kv.get<bool>("model.alpha_per_activation"))
            alpha_per_activation = *v;
        if (auto v = kv.get<std::size_t>("model.tracked_memes"))
            model.tracked_memes = *v;
        if (auto v = kv.get<std::size_t>("model.replicas"))
            model.replicas = *v;
        if (auto v = kv.get<std::size_t>("model.max_feed"))
            model.max_feed = *v;

        if (auto v = kv.get<std::size_t>("steady_state.sample_interval"))
            model.steady.sample_interval = *v;
        if (auto v = kv.get<std::size_t>("steady_state.window"))
            model.steady.window = *v;
        if (auto v = kv.get<double>("steady_state.tolerance"))
            model.steady.tolerance = *v;
        if (auto v = kv.get<std::size_t>("steady_state.min_burn_in"))
            model.steady.min_burn_in = *v;
        if (auto v = kv.get<std::int64_t>("steady_state.step_cap"))
            model.steady.step_cap = *v;

        if (auto v = kv.get<std::string>("data.mu"))
            mu_data = *v;
        if (auto v = kv.get<std::string>("data.alpha"))
            alpha_data = *v;
        if (auto v = kv.get<std::string>("data.alpha_alt"))
            alpha_data_alt = *v;

        if (auto v = kv.get_list<double>("sweep.mu"))
            mu_grid = *v;
        if (auto v = kv.get_list<std::size_t>("sweep.alpha"))
            alpha_grid = *v;
        if (auto v = kv.get_list<double>("sweep.sigma"))
            sigma_grid = *v;

        read_scroll(kv, "scroll", scroll);
        read_scroll(kv, "scroll_mu", scroll_mu);
        if (auto v = kv.get<std::size_t>("scroll_mu.sessions_per_user"))
            sessions_per_user = *v;
        if (auto v = kv.get<std::size_t>("scroll_mu.users"))
            model_users = *v;

        if (auto v = kv.get<double>("calibration.reference_mu"))
            reference_mu = *v;
        if (auto v = kv.get<std::size_t>("calibration.reference_alpha"))
            reference_alpha = *v;
        if (auto v = kv.get<double>("calibration.quality_threshold"))
            quality_threshold = *v;
        if (auto v = kv.get<std::size_t>("metrics.quality_bins"))
            quality_bins = *v;
    }

    /// Base model config with the seeds resolved and fixed modes applied.
    /// Empirical modes need distributions and are filled in by the caller.
    ModelConfig resolved_model() const
    {
        ModelConfig m = model;
        m.seed = seed;
        m.net.seed = net_seed.value_or(seed);
        m.mu = FixedMu{mu};
        if (alpha_kind == AlphaKind::Scrolling)
            m.alpha = ScrollingAlpha{scroll};
        else
            m.alpha = FixedAlpha{alpha};
        return m;
    }

    /// Canonical text of the effective settings, hashed into the manifest.
    std::string canonical() const
    {
        std::ostringstream os;
        auto list = [&](const auto& v) {
            std::string s = "[";
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? "," : "") + csv::fmt(v[i]);
            return s + "]";
        };
        os << "seed=" << seed << "\nnet=" << to_string(model.net.generator) << "," << model.net.n << ","
           << model.net.m << "," << csv::fmt(model.net.triad_prob) << "," << net_seed.value_or(seed)
           << "\nmu_kind=" << static_cast<int>(mu_kind) << "\nalpha_kind=" << static_cast<int>(alpha_kind)
           << "\nmu=" << csv::fmt(mu) << "\nalpha=" << alpha << "\nalpha_per_activation=" << alpha_per_activation
           << "\ntracked=" << model.tracked_memes << "\nreplicas=" << model.replicas
           << "\nmax_feed=" << model.max_feed << "\nsteady=" << model.steady.sample_interval << ","
           << model.steady.window << "," << csv::fmt(model.steady.tolerance) << "," << model.steady.min_burn_in
           << "," << model.steady.step_cap << "\nmu_grid=" << list(mu_grid) << "\nalpha_grid=" << list(alpha_grid)
           << "\nsigma_grid=" << list(sigma_grid) << "\nmu_data=" << mu_data << "\nalpha_data=" << alpha_data
           << "\nscroll=" << csv::fmt(scroll.rho) << "," << csv::fmt(scroll.q_mean) << "," << csv::fmt(scroll.sigma)
           << "\nscroll_mu=" << csv::fmt(scroll_mu.rho) << "," << csv::fmt(scroll_mu.q_mean) << ","
           << csv::fmt(scroll_mu.sigma) << "," << sessions_per_user << "," << model_users
           << "\nreference=" << csv::fmt(reference_mu) << "," << reference_alpha
           << "\nthreshold=" << csv::fmt(quality_threshold) << "\nquality_bins=" << quality_bins << "\n";
        return os.str();
    }

private:
    static void read_scroll(const KeyValueConfig& kv, const std::string& section, ScrollParams& p)
    {
        if (auto v = kv.get<double>(section + ".rho"))
            p.rho = *v;
        if (auto v = kv.get<double>(section + ".q_mean"))
            p.q_mean = *v;
        if (auto v = kv.get<double>(section + ".sigma"))
            p.sigma = *v;
    }
};

} // namespace memesim::harness
