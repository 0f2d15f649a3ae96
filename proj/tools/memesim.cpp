// memesim command-line interface.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "memesim/calib.hpp"
#include "memesim/csv.hpp"
#include "memesim/harness/config.hpp"
#include "memesim/harness/experiments.hpp"
#include "memesim/harness/settings.hpp"
#include "memesim/metrics.hpp"
#include "memesim/netgen.hpp"
#include "memesim/scrolling_fit.hpp"

namespace fs = std::filesystem;
using namespace memesim;
using namespace memesim::harness;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kFit = 3 };

struct Global {
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out = "out";
    std::optional<std::size_t> jobs;
    bool full_scale = false;
};

/// Flags mapped onto config keys so they pass through the same parser and
/// land after the config file.
struct Overrides {
    KeyValueConfig kv;

    template <class T>
    void put(const std::string& key, const std::optional<T>& v)
    {
        if (v) {
            if constexpr (std::is_same_v<T, std::string>)
                kv.set(key, *v);
            else if constexpr (std::is_same_v<T, bool>)
                kv.set(key, *v ? "true" : "false");
            else
                kv.set(key, csv::fmt(*v));
        }
    }

    template <class T>
    void put_list(const std::string& key, const std::vector<T>& v)
    {
        if (v.empty())
            return;
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + csv::fmt(v[i]);
        kv.set(key, s + "]");
    }
};

Settings resolve(const Global& g, const std::string& preset, const Overrides& o)
{
    Settings s;
    if (!preset.empty())
        apply_preset(preset, s);
    if (g.full_scale)
        s.apply_full_scale();
    if (!g.config.empty())
        s.apply(KeyValueConfig::load(g.config));
    s.apply(o.kv);
    if (g.seed)
        s.seed = *g.seed;
    if (g.jobs)
        s.jobs = *g.jobs;
    if (s.jobs < 1)
        throw ConfigError("--jobs must be >= 1");
    s.resolved_model().validate();
    return s;
}

void print_manifest_summary(const nlohmann::json& m, const fs::path& dir)
{
    std::cout << "wrote " << m["files"].size() << " files to " << dir.string() << " in " << m["wall_seconds"].get<double>()
              << " s\n";
}

void write_json(const fs::path& dir, const std::string& name, const nlohmann::json& j)
{
    OutputSet out(dir);
    out.write(name, j.dump(2) + "\n");
}

std::ifstream open_input(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw InputError("cannot open '" + path + "'");
    return f;
}

/// Reads the meme table written by `run`: quality and popularity columns.
std::vector<MemeRecord> read_memes(const std::string& path)
{
    auto f = open_input(path);
    auto t = csv::read(f);
    const auto qc = t.column("quality"), pc = t.column("popularity");
    std::vector<MemeRecord> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        MemeRecord r;
        if (!csv::parse(t.rows[i][qc], r.meme.quality) || !csv::parse(t.rows[i][pc], r.popularity))
            throw InputError(path + ":" + std::to_string(t.line_numbers[i]) + ": bad quality/popularity value");
        r.meme.id = i;
        out.push_back(r);
    }
    if (out.empty())
        throw InputError(path + ": no meme rows");
    return out;
}

void generate_standins(const fs::path& dir, std::uint64_t seed, const Settings& s)
{
    OutputSet out(dir);
    {
        Rng rng(derive_seed(seed, {0x6d75}));
        std::ostringstream os;
        write_mu_standin(os, s.scroll_mu, 10'000, s.sessions_per_user, rng);
        out.write("mu_standin.csv", os.str());
    }
    for (double sigma : {0.09, 0.02}) {
        ScrollParams p{0.05, 0.1, sigma};
        Rng rng(derive_seed(seed, {0x616c, static_cast<std::uint64_t>(std::lround(sigma * 100))}));
        std::ostringstream os;
        write_alpha_standin(os, p, 100'000, rng);
        out.write(sigma > 0.05 ? "alpha_standin_s009.csv" : "alpha_standin_s002.csv", os.str());
    }
    for (const auto& n : out.names())
        std::cout << (dir / n).string() << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"memesim: meme diffusion under limited attention and information load"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--config", g.config, "TOML-style config file");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--jobs", g.jobs, "worker threads");
    app.add_flag("--full-scale", g.full_scale, "20 replicas x 100k tracked memes");

    // shared model flags
    std::optional<std::string> generator, mu_mode, alpha_mode;
    std::optional<std::size_t> n, m, alpha, replicas, tracked;
    std::optional<double> triad, mu;
    std::optional<bool> per_activation;
    auto model_flags = [&](CLI::App* c) {
        c->add_option("--generator", generator, "ba or hk");
        c->add_option("--n", n, "nodes");
        c->add_option("--m", m, "edges per new node");
        c->add_option("--triad-prob", triad, "triad formation probability (hk)");
        c->add_option("--mu", mu, "information load");
        c->add_option("--alpha", alpha, "feed depth");
        c->add_option("--mu-mode", mu_mode, "fixed or empirical");
        c->add_option("--alpha-mode", alpha_mode, "fixed, empirical or scrolling");
        c->add_flag("--alpha-per-activation", per_activation, "redraw empirical alpha on each activation");
        c->add_option("--replicas", replicas, "replicas per cell");
        c->add_option("--tracked", tracked, "tracked memes per replica");
    };
    auto model_overrides = [&](Overrides& o) {
        o.put("net.generator", generator);
        o.put("net.n", n);
        o.put("net.m", m);
        o.put("net.triad_prob", triad);
        o.put("model.mu", mu);
        o.put("model.alpha", alpha);
        o.put("model.mu_mode", mu_mode);
        o.put("model.alpha_mode", alpha_mode);
        o.put("model.alpha_per_activation", per_activation);
        o.put("model.replicas", replicas);
        o.put("model.tracked_memes", tracked);
    };

    auto* net = app.add_subcommand("net", "generate or inspect a network");
    std::string edges_in, edges_out;
    net->add_option("--input", edges_in, "inspect an existing edge list");
    net->add_option("--edges", edges_out, "write the generated edge list here");
    net->add_option("--generator", generator, "ba or hk");
    net->add_option("--n", n, "nodes");
    net->add_option("--m", m, "edges per new node");
    net->add_option("--triad-prob", triad, "triad formation probability (hk)");

    auto* run_cmd = app.add_subcommand("run", "run a single configuration");
    model_flags(run_cmd);

    auto* exp = app.add_subcommand("experiment", "run a named figure experiment");
    std::string exp_name;
    exp->add_option("name", exp_name, "experiment name")->required()->check(CLI::IsMember(experiment_names()));
    model_flags(exp);

    auto* sweep = app.add_subcommand("sweep", "sweep mu x alpha, or sigma in scrolling mode");
    std::vector<double> mu_grid, sigma_grid;
    std::vector<std::size_t> alpha_grid;
    sweep->add_option("--mu-grid", mu_grid, "mu values")->delimiter(',');
    sweep->add_option("--alpha-grid", alpha_grid, "alpha values")->delimiter(',');
    sweep->add_option("--sigma-grid", sigma_grid, "scrolling sigma values")->delimiter(',');
    model_flags(sweep);

    auto* calib = app.add_subcommand("calibrate", "naive vs distributional vs reference calibration");
    std::optional<std::string> mu_data, alpha_data, standins;
    calib->add_option("--mu-data", mu_data, "per-user user_id,n_t,n_r CSV");
    calib->add_option("--alpha-data", alpha_data, "per-session session_id,stops CSV");
    calib->add_option("--generate-standins", standins, "write synthetic stand-in datasets to this directory");
    model_flags(calib);

    auto* fit = app.add_subcommand("scrollfit", "fit scrolling parameters to an empirical distribution");
    std::string fit_target = "alpha", fit_data;
    fit->add_option("--target", fit_target, "mu or alpha")->check(CLI::IsMember({"mu", "alpha"}));
    fit->add_option("--data", fit_data, "input CSV (default: shipped stand-in)");

    auto* met = app.add_subcommand("metrics", "compute metrics from a meme or popularity CSV");
    std::string memes_in, pop_in;
    std::size_t quality_bins = 20;
    met->add_option("--memes", memes_in, "meme table with quality,popularity columns");
    met->add_option("--popularity", pop_in, "item,count table (power-law fit only)");
    met->add_option("--quality-bins", quality_bins, "bins for mean popularity by quality");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        const fs::path out_dir = g.out;
        Overrides o;
        model_overrides(o);

        if (net->parsed()) {
            Graph graph;
            if (!edges_in.empty()) {
                auto f = open_input(edges_in);
                graph = read_edge_list(f);
            } else {
                Settings s = resolve(g, "", o);
                graph = generate(s.resolved_model().net);
                if (!edges_out.empty()) {
                    std::ofstream f(edges_out);
                    if (!f)
                        throw std::runtime_error("cannot write '" + edges_out + "'");
                    write_edge_list(f, graph);
                }
            }
            std::size_t max_deg = 0;
            for (NodeId i = 0; i < graph.node_count(); ++i)
                max_deg = std::max(max_deg, graph.degree(i));
            std::cout << "nodes " << graph.node_count() << "\nedges " << graph.edge_count() << "\nmean_degree "
                      << graph.mean_degree() << "\nmax_degree " << max_deg << "\nclustering "
                      << clustering_coefficient(graph) << "\n";
        } else if (run_cmd->parsed()) {
            Settings s = resolve(g, "", o);
            s.mu_grid.clear();
            s.alpha_grid.clear();
            s.sigma_grid.clear();
            print_manifest_summary(run_experiment("custom", s, out_dir), out_dir);
        } else if (exp->parsed()) {
            Settings s = resolve(g, exp_name, o);
            auto mfst = run_experiment(exp_name, s, out_dir);
            std::cout << fs::path(out_dir / "summary.txt").string() << ":\n";
            std::ifstream f(out_dir / "summary.txt");
            std::cout << f.rdbuf();
            print_manifest_summary(mfst, out_dir);
        } else if (sweep->parsed()) {
            o.put_list("sweep.mu", mu_grid);
            o.put_list("sweep.alpha", alpha_grid);
            o.put_list("sweep.sigma", sigma_grid);
            if (!sigma_grid.empty())
                o.kv.set("model.alpha_mode", "scrolling");
            Settings s = resolve(g, "", o);
            if (s.sigma_grid.empty() && s.mu_grid.empty() && s.alpha_grid.empty())
                throw ConfigError("sweep needs --mu-grid, --alpha-grid or --sigma-grid");
            print_manifest_summary(run_experiment("custom", s, out_dir), out_dir);
        } else if (calib->parsed()) {
            o.put("data.mu", mu_data);
            o.put("data.alpha", alpha_data);
            Settings s = resolve(g, "", o);
            if (standins) {
                generate_standins(*standins, g.seed.value_or(20210101), s);
                return kOk;
            }
            auto mfst = run_experiment("fig4d", s, out_dir);
            std::ifstream f(out_dir / "summary.txt");
            std::cout << f.rdbuf();
            print_manifest_summary(mfst, out_dir);
        } else if (fit->parsed()) {
            Settings s = resolve(g, "", o);
            const auto target = parse_fit_target(fit_target);
            std::string path = fit_data.empty() ? (target == FitTarget::MuDist ? s.mu_data : s.alpha_data) : fit_data;
            auto f = open_input(path);
            auto in = target == FitTarget::MuDist ? ingest_mu(f) : ingest_alpha(f);
            auto grid = SearchGrid::defaults(target);
            grid.seed = s.seed;
            auto res = fit_scrolling(in.dist, target, grid);
            nlohmann::json j{{"target", fit_target},
                             {"data", path},
                             {"rows_read", in.rows_read},
                             {"rows_skipped", in.rows_skipped},
                             {"rho", res.params.rho},
                             {"q_mean", res.params.q_mean},
                             {"sigma", res.params.sigma},
                             {"criterion", res.criterion},
                             {"discrepancy", res.discrepancy},
                             {"evaluations", res.trace.size()}};
            write_json(out_dir, "scrollfit.json", j);
            std::cout << j.dump(2) << "\n";
        } else if (met->parsed()) {
            nlohmann::json j;
            std::vector<std::uint64_t> pops;
            if (!memes_in.empty()) {
                auto records = read_memes(memes_in);
                pops = popularities(records);
                j["n_memes"] = records.size();
                j["tau_b"] = tau_or_nan(ranked_pairs(records));
                j["mutual_information"] = mutual_information(ranked_pairs(records));
                std::ostringstream os;
                os << "quality_mid,mean_popularity,std_error,count\n";
                for (const auto& b : mean_popularity_by_quality(records, quality_bins))
                    csv::row(os, b.quality_mid, b.mean_popularity, b.std_error, b.count);
                OutputSet(out_dir).write("quality_popularity.csv", os.str());
            } else if (!pop_in.empty()) {
                auto f = open_input(pop_in);
                auto in = ingest_popularity(f);
                for (std::size_t i = 0; i < in.dist.values.size(); ++i)
                    pops.insert(pops.end(), static_cast<std::size_t>(in.dist.weights[i]),
                                static_cast<std::uint64_t>(in.dist.values[i]));
                j["n_items"] = pops.size();
            } else {
                throw ConfigError("metrics needs --memes or --popularity");
            }
            std::ostringstream pdf;
            pdf << "bin_lo,bin_hi,center,density,count\n";
            for (const auto& b : log_binned_pdf(pops))
                csv::row(pdf, b.lo, b.hi, b.center, b.density, b.count);
            OutputSet out(out_dir);
            out.write("popularity_pdf.csv", pdf.str());
            int code = kOk;
            try {
                auto pl = fit_power_law(pops);
                j["powerlaw"] = {
                    {"beta", pl.beta}, {"x_min", pl.x_min}, {"ks", pl.ks_distance}, {"n_tail", pl.n_tail}};
            } catch (const FitUnavailable& e) {
                j["powerlaw"] = {{"error", e.what()}};
                code = kFit;
            }
            out.write("metrics.json", j.dump(2) + "\n");
            std::cout << j.dump(2) << "\n";
            return code;
        }
        return kOk;
    } catch (const FitUnavailable& e) {
        std::cerr << "fit unavailable: " << e.what() << "\n";
        return kFit;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
}
