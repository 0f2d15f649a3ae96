// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   acceptance --cli <path to memesim> --work <scratch dir> [--jobs N] [--only K]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "memesim/calib.hpp"
#include "memesim/diffusion.hpp"
#include "memesim/harness/engine.hpp"
#include "memesim/harness/experiments.hpp"
#include "memesim/harness/settings.hpp"
#include "memesim/metrics.hpp"
#include "memesim/scrolling.hpp"

using namespace memesim;
using namespace memesim::harness;
namespace fs = std::filesystem;

namespace {

struct Args {
    std::string cli;
    fs::path work = "acceptance_work";
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    int only = 0;
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int prec = 4)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

std::string join(const std::vector<double>& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + num(v[i]);
    return s + "]";
}

Settings base_settings(const Args& a)
{
    Settings s; // desk scale: N=1000, m=10, 5 replicas x 10k tracked memes
    s.jobs = a.jobs;
    return s;
}

std::vector<CellResult> run_grid(const Settings& s, const std::vector<std::pair<double, std::size_t>>& points,
                                 std::uint64_t batch)
{
    std::vector<CellSpec> cells;
    for (auto [mu, alpha] : points)
        cells.push_back(fixed_cell(s, "grid", mu, alpha));
    static const Graph graph = generate(s.resolved_model().net);
    return run_cells(cells, graph, derive_seed(s.seed, {0xacce, batch}), s.jobs);
}

// 1 ------------------------------------------------------------------------
Outcome popularity_exponent(const Args& a)
{
    Stopwatch w;
    Settings s = base_settings(a);
    auto cell = run_grid(s, {{0.1, 10}}, 1);
    std::vector<std::uint64_t> pops;
    for (auto [p, n] : cell[0].popularity_hist)
        pops.insert(pops.end(), n, p);
    auto fit = fit_power_law(pops);
    const double secs = w.seconds();
    const bool ok = fit.beta >= 1.8 && fit.beta <= 2.1 && secs < 300;
    return {ok, "beta=" + num(fit.beta) + " (x_min=" + std::to_string(fit.x_min) + ", n_tail=" +
                    std::to_string(fit.n_tail) + ") target [1.8, 2.1]; " + num(secs, 3) + " s, target < 300 s"};
}

// 2 ------------------------------------------------------------------------
Outcome discriminative_monotonicity(const Args& a)
{
    Settings s = base_settings(a);
    const std::vector<double> mus{0.1, 0.3, 0.5, 0.75, 0.9};
    const std::vector<std::size_t> alphas{2, 8, 32};
    std::vector<std::pair<double, std::size_t>> pts;
    for (double m : mus)
        pts.emplace_back(m, 10);
    for (std::size_t al : alphas)
        pts.emplace_back(0.1, al);
    auto cells = run_grid(s, pts, 2);
    std::vector<double> tau_mu, tau_alpha;
    for (std::size_t i = 0; i < mus.size(); ++i)
        tau_mu.push_back(cells[i].tau_mean);
    for (std::size_t i = 0; i < alphas.size(); ++i)
        tau_alpha.push_back(cells[mus.size() + i].tau_mean);
    bool dec = true, inc = true;
    for (std::size_t i = 1; i < tau_mu.size(); ++i)
        dec = dec && tau_mu[i] < tau_mu[i - 1];
    for (std::size_t i = 1; i < tau_alpha.size(); ++i)
        inc = inc && tau_alpha[i] > tau_alpha[i - 1];
    return {dec && inc, "alpha=10, mu {0.1,0.3,0.5,0.75,0.9}: tau " + join(tau_mu) +
                            (dec ? " strictly decreasing" : " NOT strictly decreasing") +
                            "; mu=0.1, alpha {2,8,32}: tau " + join(tau_alpha) +
                            (inc ? " strictly increasing" : " NOT strictly increasing")};
}

// 3 ------------------------------------------------------------------------
Outcome diversity(const Args& a)
{
    Settings s = base_settings(a);
    const std::vector<double> mus{0.0, 0.1, 0.25, 0.5, 0.75, 1.0};
    std::vector<std::pair<double, std::size_t>> pts;
    for (double m : mus)
        pts.emplace_back(m, 10);
    auto cells = run_grid(s, pts, 3);
    const double base = cells.back().entropy_mean;
    std::vector<double> norm;
    for (const auto& c : cells)
        norm.push_back(c.entropy_mean / base);
    bool mono = true;
    for (std::size_t i = 2; i < norm.size(); ++i)
        mono = mono && norm[i] >= norm[i - 1];
    const bool ok = norm.back() == 1.0 && norm.front() == 0.0 && mono;
    return {ok, "alpha=10, mu {0,0.1,0.25,0.5,0.75,1}: normalized H " + join(norm) +
                    (mono ? " (non-decreasing over 0.1..1)" : " (NOT non-decreasing over 0.1..1)")};
}

// 4 and 7 share the calibration runs ---------------------------------------
struct Calibration {
    std::unique_ptr<Context> ctx;
    CalibrationReport rep;
};

Calibration& calibration(const Args& a)
{
    static Calibration cal = [&] {
        Calibration c;
        Settings s = base_settings(a);
        c.ctx = std::make_unique<Context>("acceptance", s, a.work / "calibration");
        c.rep = calibration_report(*c.ctx, load_dist(s.mu_data, EmpiricalDist::Kind::MuPerUser),
                                   load_dist(s.alpha_data, EmpiricalDist::Kind::AlphaPerSession));
        return c;
    }();
    return cal;
}

Outcome calibration_ordering(const Args& a)
{
    const auto& rep = calibration(a).rep;
    const double ratio = rep.tau_naive() / rep.tau_reference();
    const bool ok = ratio >= 0.55 && ratio <= 0.85 && rep.tau_distributional() < rep.tau_naive() &&
                    rep.tau_distributional() >= 0.05 && rep.tau_distributional() <= 0.30;
    return {ok, "naive (mu=" + num(rep.naive.mu) + ", alpha=" + std::to_string(rep.naive.alpha) +
                    ") tau=" + num(rep.tau_naive()) + ", distributional tau=" + num(rep.tau_distributional()) +
                    ", reference tau=" + num(rep.tau_reference()) + "; naive/reference=" + num(ratio) +
                    " target [0.55, 0.85]; distributional < naive and in [0.05, 0.30]"};
}

Outcome quality_groups(const Args& a)
{
    const auto& rep = calibration(a).rep;
    const double thr = 0.34;
    auto d = popularity_by_quality_group(rep.distributional_cell.records, thr);
    auto r = popularity_by_quality_group(rep.reference_cell.records, thr);
    const double ratio = d.max_low() ? static_cast<double>(d.max_high()) / static_cast<double>(d.max_low())
                                     : std::numeric_limits<double>::infinity();
    const double ks_d = d.ks_distance(), ks_r = r.ks_distance();
    const bool ok = ks_d < 0.15 && ratio < 10.0 && ks_r >= 2.0 * ks_d;
    return {ok, "distributional KS=" + num(ks_d) + " (< 0.15), max_high/max_low=" + std::to_string(d.max_high()) +
                    "/" + std::to_string(d.max_low()) + "=" + num(ratio) + " (< 10); reference KS=" + num(ks_r) +
                    " (>= " + num(2 * ks_d) + ")"};
}

// 5 ------------------------------------------------------------------------
Outcome scrolling_limits(const Args&)
{
    ScrollParams geo{0.0, 0.1, 0.0};
    double max_err = 0.0;
    for (std::int64_t k = 1; k <= 2000; ++k)
        max_err = std::max(max_err, std::abs(session_pmf(geo, k) - 0.1 * std::pow(0.9, static_cast<double>(k - 1))));
    double max_slope_err = 0.0;
    for (std::int64_t k = 1; k < 500; ++k) {
        const double s = std::log(session_pmf(geo, k + 1)) - std::log(session_pmf(geo, k));
        max_slope_err = std::max(max_slope_err, std::abs(s - std::log(0.9)));
    }
    ScrollParams wide{0.0, 0.1, 0.1};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::int64_t k = 100; k <= 1000; ++k) {
        const double x = std::log(static_cast<double>(k)), y = std::log(session_pmf(wide, k));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const bool ok = max_err <= 1e-12 && max_slope_err <= 1e-6 && slope >= -2.3 && slope <= -1.7;
    return {ok, "sigma=0 max |pmf - geometric|=" + num(max_err, 3) + " (<= 1e-12), max |log-slope - ln 0.9|=" +
                    num(max_slope_err, 3) + " (<= 1e-6); sigma=0.1 tail slope on [100, 1000]=" + num(slope) +
                    " target [-2.3, -1.7]"};
}

// 6 ------------------------------------------------------------------------
double brute_tau_b(const std::vector<double>& x, const std::vector<double>& y)
{
    long long c = 0, d = 0, tx = 0, ty = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0 && dy == 0)
                continue;
            if (dx == 0)
                ++tx;
            else if (dy == 0)
                ++ty;
            else if ((dx > 0) == (dy > 0))
                ++c;
            else
                ++d;
        }
    return static_cast<double>(c - d) / std::sqrt(static_cast<double>(c + d + tx) * static_cast<double>(c + d + ty));
}

std::vector<std::uint64_t> discrete_power_law(double beta, std::size_t n, std::uint64_t seed)
{
    const std::uint64_t cut = 200'000;
    std::vector<double> cdf(cut);
    double z = std::pow(cut + 0.5, 1 - beta) / (beta - 1);
    for (std::uint64_t k = 1; k <= cut; ++k)
        z += std::pow(static_cast<double>(k), -beta);
    double acc = 0.0;
    for (std::uint64_t k = 1; k <= cut; ++k)
        cdf[k - 1] = acc += std::pow(static_cast<double>(k), -beta) / z;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::uint64_t> out(n);
    for (auto& x : out) {
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u(rng));
        x = it != cdf.end() ? static_cast<std::uint64_t>(it - cdf.begin()) + 1
                            : static_cast<std::uint64_t>(
                                  std::floor((cut + 0.5) * std::pow(1 - u(rng), -1 / (beta - 1)) + 0.5));
    }
    return out;
}

Outcome oracles(const Args&)
{
    std::mt19937_64 rng(2024);
    int tau_mismatch = 0, tau_cases = 0;
    while (tau_cases < 1000) {
        const std::size_t n = 2 + rng() % 300;
        const auto lx = 1 + rng() % 15, ly = 1 + rng() % 15;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % lx);
            y[i] = static_cast<double>(rng() % ly);
        }
        if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
            std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; }))
            continue;
        ++tau_cases;
        // same arithmetic on integer counts on both sides, so agreement is exact
        if (std::abs(kendall_tau_b(x, y) - brute_tau_b(x, y)) > 1e-12)
            ++tau_mismatch;
    }

    std::vector<double> betas;
    bool beta_ok = true;
    for (double b : {1.5, 2.0, 2.5, 3.0}) {
        auto fit = fit_power_law(discrete_power_law(b, 100'000, static_cast<std::uint64_t>(b * 100)));
        betas.push_back(fit.beta);
        beta_ok = beta_ok && std::abs(fit.beta - b) <= 0.1;
    }

    Feed f(6);
    const std::vector<double> q{0.05, 0.9, 0.4, 0.4, 0.75, 0.2};
    for (MemeId i = 0; i < 6; ++i)
        f.push({i, 0});
    Rng r(77);
    const int draws = 100'000;
    std::vector<int> hits(6, 0);
    for (int i = 0; i < draws; ++i)
        ++hits[f[select_from_feed(f, 6, [&](MemeId id) { return q[id]; }, r)].meme_id];
    double total = 0.0, worst_z = 0.0;
    for (double v : q)
        total += v;
    for (MemeId id = 0; id < 6; ++id) {
        const double p = q[id] / total;
        worst_z = std::max(worst_z, std::abs(hits[id] / double(draws) - p) / std::sqrt(p * (1 - p) / draws));
    }

    const bool ok = tau_mismatch == 0 && beta_ok && worst_z <= 3.0;
    return {ok, "tau_b vs brute force: " + std::to_string(tau_mismatch) + "/1000 mismatches; power-law fits " +
                    join(betas) + " for {1.5, 2, 2.5, 3} (+-0.1); feed selection worst |z|=" + num(worst_z, 3) +
                    " (<= 3)"};
}

// 8 ------------------------------------------------------------------------
Outcome determinism(const Args& a)
{
    if (a.cli.empty())
        return {false, "no --cli given"};
    const fs::path d1 = a.work / "fig3a_jobs1", d8 = a.work / "fig3a_jobs8";
    fs::remove_all(d1);
    fs::remove_all(d8);
    for (auto [dir, jobs] : {std::pair{d1, 1}, std::pair{d8, 8}}) {
        const std::string cmd = "\"" + a.cli + "\" experiment fig3a --seed 42 --jobs " + std::to_string(jobs) +
                                " --out \"" + dir.string() + "\" > \"" + dir.string() + ".log\" 2>&1";
        if (std::system(cmd.c_str()) != 0)
            return {false, "command failed: " + cmd};
    }
    std::size_t compared = 0;
    std::vector<std::string> differing;
    for (const auto& e : fs::directory_iterator(d1)) {
        if (e.path().extension() != ".csv")
            continue;
        auto read = [](const fs::path& p) {
            std::ifstream f(p, std::ios::binary);
            std::ostringstream os;
            os << f.rdbuf();
            return os.str();
        };
        const auto other = d8 / e.path().filename();
        ++compared;
        if (!fs::exists(other) || read(e.path()) != read(other))
            differing.push_back(e.path().filename().string());
    }
    std::string detail = std::to_string(compared) + " CSV files compared between --jobs 1 and --jobs 8";
    if (!differing.empty()) {
        detail += "; differing:";
        for (const auto& d : differing)
            detail += " " + d;
    } else {
        detail += ", all byte-identical";
    }
    return {compared > 0 && differing.empty(), detail};
}

} // namespace

int main(int argc, char** argv)
{
    Args a;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string k = argv[i], v = argv[i + 1];
        if (k == "--cli")
            a.cli = v;
        else if (k == "--work")
            a.work = v;
        else if (k == "--jobs")
            a.jobs = std::stoul(v);
        else if (k == "--only")
            a.only = std::stoi(v);
        else {
            std::cerr << "unknown argument " << k << "\n";
            return 2;
        }
    }
    fs::create_directories(a.work);

    const std::vector<std::pair<std::string, std::function<Outcome(const Args&)>>> criteria{
        {"popularity exponent", popularity_exponent},
        {"discriminative-power monotonicity", discriminative_monotonicity},
        {"diversity normalization and monotonicity", diversity},
        {"calibration ordering", calibration_ordering},
        {"scrolling limits", scrolling_limits},
        {"oracle equivalences", oracles},
        {"quality-group virality", quality_groups},
        {"determinism across worker counts", determinism},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (a.only && a.only != static_cast<int>(i + 1))
            continue;
        Outcome o;
        try {
            o = criteria[i].second(a);
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
