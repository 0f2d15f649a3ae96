#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "memesim/calib.hpp"
#include "memesim/csv.hpp"
#include "memesim/diffusion.hpp"
#include "memesim/harness/engine.hpp"
#include "memesim/harness/output.hpp"
#include "memesim/harness/settings.hpp"
#include "memesim/metrics.hpp"
#include "memesim/netgen.hpp"
#include "memesim/scrolling_fit.hpp"

namespace memesim::harness {

inline const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names{"fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a",
                                                "fig4b", "fig4c", "fig4d", "fig5",  "custom"};
    return names;
}

/// Grid defaults for each named experiment; config and CLI may override.
inline void apply_preset(const std::string& name, Settings& s)
{
    std::vector<double> mu_fine;
    for (int i = 1; i <= 19; ++i)
        mu_fine.push_back(5.0 * i / 100.0);
    if (name == "fig1b") {
        s.mu_grid = {0.1, 0.5, 0.9};
        s.alpha_grid = {10};
    } else if (name == "fig2a") {
        s.mu_grid = {0.05, 0.1, 0.25, 0.5, 0.75, 0.9};
        s.alpha_grid = {10};
    } else if (name == "fig2b") {
        s.mu_grid = {0.1};
        s.alpha_grid = {2, 4, 8, 16, 32, 64};
    } else if (name == "fig3a" || name == "fig3b") {
        s.mu_grid = mu_fine;
        s.alpha_grid = {1, 2, 4, 8, 16, 32, 64};
    } else if (name == "fig4a") {
        s.mu_grid = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
        s.alpha_grid = {2, 4, 8, 16, 32, 64};
    } else if (name == "custom" || name == "fig4b" || name == "fig4c" || name == "fig4d" || name == "fig5") {
        // driven by config
    } else {
        throw ConfigError("unknown experiment '" + name + "'");
    }
}

inline std::shared_ptr<const EmpiricalDist> load_dist(const std::string& path, EmpiricalDist::Kind kind)
{
    std::ifstream f(path);
    if (!f)
        throw InputError("cannot open data file '" + path +
                         "' (generate stand-ins with `memesim calibrate --generate-standins <dir>`)");
    Ingested in = kind == EmpiricalDist::Kind::MuPerUser ? ingest_mu(f) : ingest_alpha(f);
    return std::make_shared<const EmpiricalDist>(std::move(in.dist));
}

/// Shared state of one experiment invocation.
struct Context {
    std::string name;
    Settings settings;
    Graph graph;
    OutputSet out;
    nlohmann::json seeds = nlohmann::json::array();
    std::ostringstream summary;
    Stopwatch clock;
    std::size_t next_cell = 0; ///< cell indices stay unique across batches

    Context(std::string n, Settings s, const std::filesystem::path& dir)
        : name(std::move(n))
        , settings(std::move(s))
        , out(dir)
    {
        graph = generate(settings.resolved_model().net);
    }

    /// Runs a batch of cells with globally unique cell indices.
    std::vector<CellResult> run(std::vector<CellSpec> cells)
    {
        const std::uint64_t batch_seed = derive_seed(settings.seed, {next_cell});
        auto results = run_cells(cells, graph, batch_seed, settings.jobs);
        for (const auto& c : results)
            for (const auto& r : c.replicas)
                seeds.push_back({{"cell", next_cell + r.cell},
                                 {"condition", c.spec.condition},
                                 {"mu", c.spec.mu_label},
                                 {"alpha", c.spec.alpha_label},
                                 {"replica", r.replica},
                                 {"seed", r.seed}});
        next_cell += cells.size();
        return results;
    }
};

inline CellSpec fixed_cell(const Settings& s, std::string condition, double mu, std::size_t alpha)
{
    CellSpec c;
    c.condition = std::move(condition);
    c.cfg = s.resolved_model();
    c.cfg.mu = FixedMu{mu};
    c.cfg.alpha = FixedAlpha{alpha};
    c.mu_label = csv::fmt(mu);
    c.alpha_label = std::to_string(alpha);
    return c;
}

inline std::vector<CellSpec> grid_cells(const Settings& s, const std::string& condition, bool keep_records)
{
    std::vector<CellSpec> cells;
    for (std::size_t a : s.alpha_grid)
        for (double m : s.mu_grid) {
            cells.push_back(fixed_cell(s, condition, m, a));
            cells.back().keep_records = keep_records;
        }
    return cells;
}

/// Per-cell, per-replica and popularity-histogram tables.
inline void write_sweep_tables(Context& ctx, const std::vector<CellResult>& cells, const std::string& prefix = "")
{
    std::ostringstream cs, rs, hs;
    cs << "condition,mu,alpha,replicas,tau_mean,tau_sd,tau_pooled,mi_pooled,entropy_mean,n_memes\n";
    rs << "condition,mu,alpha,replica,seed,tau,mean_entropy,n_memes,steady_step,total_steps\n";
    hs << "condition,mu,alpha,popularity,count\n";
    for (const auto& c : cells) {
        csv::row(cs, c.spec.condition, c.spec.mu_label, c.spec.alpha_label, c.replicas.size(), c.tau_mean, c.tau_sd,
                 c.tau_pooled, c.mi_pooled, c.entropy_mean, c.n_memes);
        for (const auto& r : c.replicas)
            csv::row(rs, c.spec.condition, c.spec.mu_label, c.spec.alpha_label, r.replica, r.seed, r.tau,
                     r.mean_entropy, r.n_memes, r.steady_step, r.total_steps);
        for (auto [p, n] : c.popularity_hist)
            csv::row(hs, c.spec.condition, c.spec.mu_label, c.spec.alpha_label, p, n);
    }
    ctx.out.write(prefix + "cells.csv", cs.str());
    ctx.out.write(prefix + "replicas.csv", rs.str());
    ctx.out.write(prefix + "popularity_hist.csv", hs.str());
}

/// RunResult serialization: tracked memes and diversity samples.
inline void write_run_tables(OutputSet& out, const std::vector<CellResult>& cells)
{
    std::ostringstream ms, ds;
    const bool multi = cells.size() > 1;
    ms << (multi ? "mu,alpha," : "") << "meme_id,quality,popularity,birth_step,death_step,replica\n";
    ds << (multi ? "mu,alpha," : "") << "sample_step,entropy,distinct_memes,replica\n";
    for (const auto& c : cells)
        for (const auto& r : c.replicas) {
            for (const auto& m : r.records) {
                if (multi)
                    ms << c.spec.mu_label << ',' << c.spec.alpha_label << ',';
                csv::row(ms, m.meme.id, m.meme.quality, m.popularity, m.birth_step, m.death_step, r.replica);
            }
            for (const auto& d : r.diversity) {
                if (multi)
                    ds << c.spec.mu_label << ',' << c.spec.alpha_label << ',';
                csv::row(ds, d.sample_step, d.entropy, d.distinct_memes, r.replica);
            }
        }
    out.write("memes.csv", ms.str());
    out.write("diversity.csv", ds.str());
}

inline nlohmann::json finish(Context& ctx)
{
    nlohmann::json m;
    m["experiment"] = ctx.name;
    m["version"] = kVersion;
    m["compiler"] = __VERSION__;
    m["master_seed"] = ctx.settings.seed;
    m["config_hash"] = hex64(fnv1a64(ctx.settings.canonical()));
    m["config"] = ctx.settings.canonical();
    m["full_scale"] = ctx.settings.full_scale;
    m["jobs"] = ctx.settings.jobs;
    m["graph"] = {{"nodes", ctx.graph.node_count()},
                  {"edges", ctx.graph.edge_count()},
                  {"mean_degree", ctx.graph.mean_degree()}};
    m["seeds"] = ctx.seeds;
    ctx.out.write("summary.txt", ctx.summary.str());
    m["files"] = ctx.out.file_list();
    m["wall_seconds"] = ctx.clock.seconds();
    std::ofstream f(ctx.out.dir() / "manifest.json");
    f << m.dump(2) << '\n';
    if (!f)
        throw std::runtime_error("failed writing manifest.json");
    return m;
}

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationReport {
    NaiveParams naive;
    CellResult naive_cell;
    CellResult distributional_cell;
    CellResult reference_cell;

    double tau_naive() const { return naive_cell.tau_mean; }
    double tau_distributional() const { return distributional_cell.tau_mean; }
    double tau_reference() const { return reference_cell.tau_mean; }
};

/// Runs naive means, per-agent empirical draws, and the low-load /
/// high-attention reference corner under the same settings.
inline CalibrationReport calibration_report(Context& ctx, std::shared_ptr<const EmpiricalDist> mu_dist,
                                            std::shared_ptr<const EmpiricalDist> alpha_dist)
{
    const Settings& s = ctx.settings;
    CalibrationReport rep;
    rep.naive = naive_params(*mu_dist, *alpha_dist);

    CellSpec naive = fixed_cell(s, "naive", rep.naive.mu, rep.naive.alpha);
    CellSpec dist;
    dist.condition = "distributional";
    dist.cfg = s.resolved_model();
    dist.cfg.mu = EmpiricalMu{mu_dist};
    dist.cfg.alpha = EmpiricalAlpha{alpha_dist, s.alpha_per_activation};
    dist.mu_label = "empirical";
    dist.alpha_label = s.alpha_per_activation ? "empirical-activation" : "empirical-agent";
    CellSpec ref = fixed_cell(s, "reference", s.reference_mu, s.reference_alpha);
    for (auto* c : {&naive, &dist, &ref})
        c->keep_records = true;

    auto cells = ctx.run({naive, dist, ref});
    rep.naive_cell = std::move(cells[0]);
    rep.distributional_cell = std::move(cells[1]);
    rep.reference_cell = std::move(cells[2]);
    return rep;
}

inline void write_calibration(Context& ctx, const CalibrationReport& rep)
{
    std::ostringstream rs, ss;
    rs << "condition,mu,alpha,replica,seed,tau\n";
    ss << "condition,mu,alpha,tau_mean,tau_sd,tau_pooled,ratio_to_reference\n";
    for (const auto* c : {&rep.naive_cell, &rep.distributional_cell, &rep.reference_cell}) {
        for (const auto& r : c->replicas)
            csv::row(rs, c->spec.condition, c->spec.mu_label, c->spec.alpha_label, r.replica, r.seed, r.tau);
        csv::row(ss, c->spec.condition, c->spec.mu_label, c->spec.alpha_label, c->tau_mean, c->tau_sd,
                 c->tau_pooled, c->tau_mean / rep.tau_reference());
    }
    ctx.out.write("calibration_replicas.csv", rs.str());
    ctx.out.write("calibration.csv", ss.str());
    ctx.summary << "naive calibration: mu=" << rep.naive.mu << " alpha=" << rep.naive.alpha << "\n"
                << "tau naive=" << rep.tau_naive() << " distributional=" << rep.tau_distributional()
                << " reference=" << rep.tau_reference() << "\n"
                << "naive/reference=" << rep.tau_naive() / rep.tau_reference() << "\n";
}

inline void write_quality_groups(Context& ctx, const std::vector<const CellResult*>& cells)
{
    std::ostringstream cs, ss;
    cs << "condition,group,popularity,ccdf\n";
    ss << "condition,threshold,n_high,n_low,ks_distance,max_high,max_low\n";
    for (const auto* c : cells) {
        auto g = popularity_by_quality_group(c->records, ctx.settings.quality_threshold);
        for (const auto& p : g.high_ccdf)
            csv::row(cs, c->spec.condition, "high", p.value, p.survival);
        for (const auto& p : g.low_ccdf)
            csv::row(cs, c->spec.condition, "low", p.value, p.survival);
        csv::row(ss, c->spec.condition, g.threshold, g.high.size(), g.low.size(), g.ks_distance(), g.max_high(),
                 g.max_low());
        ctx.summary << c->spec.condition << ": groups high=" << g.high.size() << " low=" << g.low.size()
                    << (g.high_empty() ? " (high group empty)" : "") << (g.low_empty() ? " (low group empty)" : "")
                    << " ks=" << g.ks_distance() << " max_high=" << g.max_high() << " max_low=" << g.max_low()
                    << "\n";
    }
    ctx.out.write("quality_groups_ccdf.csv", cs.str());
    ctx.out.write("quality_groups.csv", ss.str());
}

// ---------------------------------------------------------------------------
// Scrolling attention dynamics

struct SigmaRow {
    double sigma = 0.0;
    CellResult cell;
};

/// Diffusion with per-activation scrolling attention across sigma values at
/// fixed q_mean; information load comes from the base mu setting.
inline std::vector<SigmaRow> scrolling_dynamics_experiment(Context& ctx, const std::vector<double>& sigmas)
{
    if (sigmas.empty())
        throw ConfigError("sigma grid is empty");
    std::vector<CellSpec> cells;
    for (double sg : sigmas) {
        ScrollParams p = ctx.settings.scroll;
        p.sigma = sg;
        p.validate();
        CellSpec c;
        c.condition = "scrolling";
        c.cfg = ctx.settings.resolved_model();
        c.cfg.alpha = ScrollingAlpha{p};
        c.mu_label = csv::fmt(ctx.settings.mu);
        c.alpha_label = "scroll:q=" + csv::fmt(p.q_mean) + ":sigma=" + csv::fmt(sg);
        cells.push_back(std::move(c));
    }
    auto results = ctx.run(cells);
    std::vector<SigmaRow> rows;
    for (std::size_t i = 0; i < sigmas.size(); ++i)
        rows.push_back({sigmas[i], std::move(results[i])});
    return rows;
}

inline void write_sigma_table(Context& ctx, const std::vector<SigmaRow>& rows)
{
    std::ostringstream os;
    os << "sigma,q_mean,mu,tau_mean,tau_sd,tau_pooled,replicas\n";
    for (const auto& r : rows)
        csv::row(os, r.sigma, ctx.settings.scroll.q_mean, ctx.settings.mu, r.cell.tau_mean, r.cell.tau_sd,
                 r.cell.tau_pooled, r.cell.replicas.size());
    ctx.out.write("sigma_tau.csv", os.str());
}

// ---------------------------------------------------------------------------
// Named experiments

namespace detail {

inline void popularity_outputs(Context& ctx, const std::vector<CellResult>& cells)
{
    std::ostringstream pdf, fits;
    pdf << "mu,alpha,bin_lo,bin_hi,center,density,count\n";
    fits << "mu,alpha,beta,x_min,ks_distance,n_tail,status\n";
    auto js = nlohmann::json::array();
    for (const auto& c : cells) {
        auto pop = popularities(c.records);
        for (const auto& b : log_binned_pdf(pop))
            csv::row(pdf, c.spec.mu_label, c.spec.alpha_label, b.lo, b.hi, b.center, b.density, b.count);
        try {
            auto f = fit_power_law(pop);
            csv::row(fits, c.spec.mu_label, c.spec.alpha_label, f.beta, f.x_min, f.ks_distance, f.n_tail, "ok");
            js.push_back({{"mu", c.spec.mu_label},
                          {"alpha", c.spec.alpha_label},
                          {"beta", f.beta},
                          {"x_min", f.x_min},
                          {"ks", f.ks_distance},
                          {"n_tail", f.n_tail}});
            ctx.summary << "mu=" << c.spec.mu_label << " alpha=" << c.spec.alpha_label << ": beta=" << f.beta
                        << " x_min=" << f.x_min << " n_tail=" << f.n_tail << "\n";
        } catch (const FitUnavailable& e) {
            csv::row(fits, c.spec.mu_label, c.spec.alpha_label, "", "", "", "", "unavailable");
            js.push_back({{"mu", c.spec.mu_label}, {"alpha", c.spec.alpha_label}, {"error", e.what()}});
        }
    }
    ctx.out.write("popularity_pdf.csv", pdf.str());
    ctx.out.write("powerlaw_fit.csv", fits.str());
    ctx.out.write("powerlaw_fit.json", js.dump(2) + "\n");
}

inline void quality_curves(Context& ctx, const std::vector<CellResult>& cells)
{
    std::ostringstream os;
    os << "mu,alpha,quality_mid,mean_popularity,std_error,count\n";
    for (const auto& c : cells)
        for (const auto& b : mean_popularity_by_quality(c.records, ctx.settings.quality_bins))
            csv::row(os, c.spec.mu_label, c.spec.alpha_label, b.quality_mid, b.mean_popularity, b.std_error,
                     b.count);
    ctx.out.write("quality_popularity.csv", os.str());
}

/// Grid cells plus a mu = 1 baseline per alpha; writes normalized diversity.
inline std::vector<CellResult> diversity_sweep(Context& ctx, bool tradeoff)
{
    auto cells = grid_cells(ctx.settings, "grid", false);
    for (std::size_t a : ctx.settings.alpha_grid)
        cells.push_back(fixed_cell(ctx.settings, "baseline", 1.0, a));
    auto results = ctx.run(cells);

    std::map<std::string, double> baseline;
    for (const auto& c : results)
        if (c.spec.condition == "baseline")
            baseline[c.spec.alpha_label] = c.entropy_mean;

    std::ostringstream os;
    if (tradeoff)
        os << "alpha,mu,normalized_diversity,tau_mean,tau_sd\n";
    else
        os << "mu,alpha,entropy_mean,entropy_baseline,normalized_diversity\n";
    for (const auto& c : results) {
        if (c.spec.condition != "grid")
            continue;
        const double base = baseline.at(c.spec.alpha_label);
        const double norm = base > 0.0 ? c.entropy_mean / base : std::numeric_limits<double>::quiet_NaN();
        if (tradeoff)
            csv::row(os, c.spec.alpha_label, c.spec.mu_label, norm, c.tau_mean, c.tau_sd);
        else
            csv::row(os, c.spec.mu_label, c.spec.alpha_label, c.entropy_mean, base, norm);
    }
    ctx.out.write(tradeoff ? "tradeoff.csv" : "diversity_matrix.csv", os.str());
    return results;
}

inline void mu_distribution(Context& ctx)
{
    const auto& s = ctx.settings;
    auto emp = load_dist(s.mu_data, EmpiricalDist::Kind::MuPerUser);
    Rng rng(derive_seed(s.seed, {0x4b}));
    auto model = simulate_user_mu(s.scroll_mu, s.sessions_per_user, s.model_users, rng);
    constexpr std::size_t bins = 20;
    auto he = mu_histogram(emp->values, emp->weights, bins);
    auto hm = mu_histogram(model, std::vector<double>(model.size(), 1.0), bins);
    const double ne = emp->total_weight(), nm = static_cast<double>(model.size());
    std::ostringstream os;
    os << "bin_lo,bin_hi,empirical_fraction,model_fraction\n";
    for (std::size_t b = 0; b <= bins; ++b) {
        const double lo = b == bins ? 1.0 : static_cast<double>(b) / bins;
        const double hi = b == bins ? 1.0 : static_cast<double>(b + 1) / bins;
        csv::row(os, lo, hi, he[b] / ne, hm[b] / nm);
    }
    ctx.out.write("mu_distribution.csv", os.str());
    double model_mean = 0.0;
    for (double m : model)
        model_mean += m;
    model_mean /= nm;
    ctx.summary << "empirical mean mu=" << emp->mean() << " model mean mu=" << model_mean << " (rho=" << s.scroll_mu.rho
                << " q_mean=" << s.scroll_mu.q_mean << " sigma=" << s.scroll_mu.sigma
                << " sessions/user=" << s.sessions_per_user << ")\n";
}

inline void alpha_distribution(Context& ctx)
{
    const auto& s = ctx.settings;
    auto emp = load_dist(s.alpha_data, EmpiricalDist::Kind::AlphaPerSession);
    std::shared_ptr<const EmpiricalDist> alt;
    if (std::filesystem::exists(s.alpha_data_alt))
        alt = load_dist(s.alpha_data_alt, EmpiricalDist::Kind::AlphaPerSession);
    ScrollParams wide = s.scroll, narrow = s.scroll;
    wide.sigma = 0.09;
    narrow.sigma = 0.02;
    const auto max_a = static_cast<std::int64_t>(std::max(emp->values.back(), alt ? alt->values.back() : 0.0));

    auto pmf_of = [](const EmpiricalDist& d) {
        std::map<std::int64_t, double> m;
        const double t = d.total_weight();
        for (std::size_t i = 0; i < d.values.size(); ++i)
            m[static_cast<std::int64_t>(d.values[i])] = d.weights[i] / t;
        return m;
    };
    auto pe = pmf_of(*emp);
    auto pa = alt ? pmf_of(*alt) : std::map<std::int64_t, double>{};
    std::ostringstream os;
    os << "alpha,empirical,empirical_alt,model_sigma_0.09,model_sigma_0.02,geometric\n";
    ScrollParams geo = s.scroll;
    geo.sigma = 0.0;
    for (std::int64_t a = 1; a <= max_a; ++a)
        csv::row(os, a, pe.count(a) ? pe[a] : 0.0, pa.count(a) ? pa[a] : 0.0, session_pmf(wide, a),
                 session_pmf(narrow, a), session_pmf(geo, a));
    ctx.out.write("alpha_distribution.csv", os.str());

    auto fit = fit_scrolling(*emp, FitTarget::AlphaDist, SearchGrid::defaults(FitTarget::AlphaDist));
    nlohmann::json j{{"target", "alpha"},
                     {"criterion", fit.criterion},
                     {"q_mean", fit.params.q_mean},
                     {"sigma", fit.params.sigma},
                     {"discrepancy", fit.discrepancy},
                     {"evaluations", fit.trace.size()}};
    ctx.out.write("alpha_fit.json", j.dump(2) + "\n");
    ctx.summary << "empirical mean alpha=" << emp->mean() << "; fitted q_mean=" << fit.params.q_mean
                << " sigma=" << fit.params.sigma << " ks=" << fit.discrepancy << "\n";
}

} // namespace detail

/// Runs a named experiment into `dir` and returns its manifest.
inline nlohmann::json run_experiment(const std::string& name, const Settings& settings,
                                     const std::filesystem::path& dir)
{
    Context ctx(name, settings, dir);
    auto& s = ctx.settings;
    ctx.summary << "experiment " << name << " seed=" << s.seed << " replicas=" << s.model.replicas
                << " tracked_memes=" << s.model.tracked_memes << (s.full_scale ? " (full scale)" : " (desk scale)")
                << "\n";

    if (name == "fig1b" || name == "fig2a" || name == "fig2b") {
        auto results = ctx.run(grid_cells(s, "grid", true));
        write_sweep_tables(ctx, results);
        if (name == "fig1b")
            detail::popularity_outputs(ctx, results);
        else
            detail::quality_curves(ctx, results);
    } else if (name == "fig3a") {
        auto results = ctx.run(grid_cells(s, "grid", false));
        write_sweep_tables(ctx, results);
        std::ostringstream os;
        os << "mu,alpha,tau_mean,tau_sd,tau_pooled,mi_pooled\n";
        for (const auto& c : results)
            csv::row(os, c.spec.mu_label, c.spec.alpha_label, c.tau_mean, c.tau_sd, c.tau_pooled, c.mi_pooled);
        ctx.out.write("tau_matrix.csv", os.str());
    } else if (name == "fig3b" || name == "fig4a") {
        write_sweep_tables(ctx, detail::diversity_sweep(ctx, name == "fig4a"));
    } else if (name == "fig4b") {
        detail::mu_distribution(ctx);
    } else if (name == "fig4c") {
        detail::alpha_distribution(ctx);
    } else if (name == "fig4d" || name == "fig5") {
        auto mu = load_dist(s.mu_data, EmpiricalDist::Kind::MuPerUser);
        auto alpha = load_dist(s.alpha_data, EmpiricalDist::Kind::AlphaPerSession);
        auto rep = calibration_report(ctx, mu, alpha);
        write_calibration(ctx, rep);
        if (name == "fig5")
            write_quality_groups(ctx, {&rep.distributional_cell, &rep.reference_cell});
    } else if (name == "custom") {
        if (!s.sigma_grid.empty()) {
            auto rows = scrolling_dynamics_experiment(ctx, s.sigma_grid);
            write_sigma_table(ctx, rows);
        } else {
            std::vector<CellSpec> cells;
            if (s.mu_kind == Settings::MuKind::Empirical || s.alpha_kind != Settings::AlphaKind::Fixed) {
                CellSpec c;
                c.condition = "custom";
                c.cfg = s.resolved_model();
                c.mu_label = csv::fmt(s.mu);
                c.alpha_label = std::to_string(s.alpha);
                if (s.mu_kind == Settings::MuKind::Empirical) {
                    c.cfg.mu = EmpiricalMu{load_dist(s.mu_data, EmpiricalDist::Kind::MuPerUser)};
                    c.mu_label = "empirical";
                }
                if (s.alpha_kind == Settings::AlphaKind::Empirical) {
                    c.cfg.alpha = EmpiricalAlpha{load_dist(s.alpha_data, EmpiricalDist::Kind::AlphaPerSession),
                                                 s.alpha_per_activation};
                    c.alpha_label = "empirical";
                } else if (s.alpha_kind == Settings::AlphaKind::Scrolling) {
                    c.alpha_label = "scrolling";
                }
                cells.push_back(std::move(c));
            } else {
                Settings g = s;
                if (g.mu_grid.empty())
                    g.mu_grid = {s.mu};
                if (g.alpha_grid.empty())
                    g.alpha_grid = {s.alpha};
                cells = grid_cells(g, "custom", false);
            }
            const bool single = cells.size() == 1;
            cells.front().keep_records = single;
            auto results = ctx.run(cells);
            write_sweep_tables(ctx, results);
            if (single)
                write_run_tables(ctx.out, results);
        }
    } else {
        throw ConfigError("unknown experiment '" + name + "'");
    }
    return finish(ctx);
}

} // namespace memesim::harness
