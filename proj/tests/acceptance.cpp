// Acceptance run: one PASS/FAIL line per criterion.
// Exit status is 0 when the set of failing criteria equals the --expect-fail list.
#include "acs/cli_io.hpp"
#include "acs/diagnostics.hpp"
#include "acs/errors.hpp"
#include "acs/family_flows.hpp"
#include "acs/ma_solver.hpp"
#include "acs/reduction.hpp"
#include "oracles/shooting.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <set>

using namespace acs;
namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

namespace {

double since(clk::time_point t) { return std::chrono::duration<double>(clk::now() - t).count(); }

double sup_abs(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

struct Line {
    bool pass;
    std::string detail;
};

std::map<int, Line> results;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    results[id] = {pass, detail};
    fmt::print("criterion {:>2} {} {}: {}\n", id, pass ? "PASS" : "FAIL", name, detail);
    std::fflush(stdout);
}

SolverConfig ladder(std::vector<int> levels) {
    SolverConfig c;
    c.ladder = std::move(levels);
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

// relative sup error of tau and tau_x against the shooting profile on [x_min + 1, x_max - 2]
double oracle_error(const SolitonSolution& sol) {
    oracle::ShootingParams p;
    p.nb = sol.spec.nb();
    p.q = sol.spec.q();
    p.a = sol.spec.a;
    p.c = sol.spec.c;
    p.tau0 = sol.spec.tau0_star();
    oracle::Shooting sh(p);
    const auto xs = sol.grid.nodes();
    std::vector<double> tau, tau_x;
    sh.sample(xs, tau, tau_x);
    double err = 0;
    for (int j = 0; j < sol.grid.N; ++j) {
        if (xs[j] < sol.grid.x_min + 1.0 || xs[j] > sol.grid.x_max - 2.0) continue;
        err = std::max({err, std::abs(sol.tau[j] / tau[j] - 1.0), std::abs(sol.tau_x[j] / tau_x[j] - 1.0)});
    }
    return err;
}

std::vector<double> bump_sum(const RadialGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> centre(g.x_min + 2.0, g.x_max - 6.0), width(0.5, 2.0), amp(-1.0, 1.0);
    std::vector<double> psi(g.N, 0.0);
    for (int b = 0; b < 3; ++b) {
        const double c = centre(rng), w = width(rng), A = amp(rng);
        for (int j = 0; j < g.N; ++j) psi[j] += A * std::exp(-0.5 * std::pow((g.x(j) - c) / w, 2));
    }
    return psi;
}

std::vector<double> diff(std::vector<double> a, const std::vector<double>& b, double s = 1.0) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] - b[i]) * s;
    return a;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> expect_fail;
    std::string work = (fs::temp_directory_path() / "acs_acceptance").string();
    app.add_option("--expect-fail", expect_fail, "criteria whose failure is documented");
    app.add_option("--work", work, "scratch directory for CLI runs");
    CLI11_PARSE(app, argc, argv);

    std::vector<std::pair<std::string, double>> apriori;   // (run, sup phi - sup F)
    auto track = [&](const std::string& name, const SolitonSolution& s) {
        if (s.report.diagnostics) {
            const auto& a = s.report.diagnostics->apriori;
            apriori.emplace_back(name, a.sup_phi - a.sup_F);
        }
    };

    // 1. flat
    {
        bool ok = true;
        double worst_phi = 0, worst_diag = 0, worst_metric = 0, worst_t = 0;
        for (double c : {0.5, 1.0, 2.0}) {
            const ConeSpec spec = ConeSpec::euclidean(2, 1.0, c);
            const auto t0 = clk::now();
            const auto sol = solve_soliton(spec, ladder({512}));
            worst_t = std::max(worst_t, since(t0));
            track(fmt::format("flat c={}", c), sol);
            worst_phi = std::max(worst_phi, sup_abs(sol.phi.values()));
            for (int j = 0; j < sol.grid.N; ++j) {
                const auto cp = cone_profile_eval(spec, std::exp(sol.grid.x(j)));
                worst_metric = std::max({worst_metric, std::abs(sol.metric.alpha[j] / (c * cp.alpha0) - 1.0),
                                         std::abs(sol.metric.beta[j] / (c * cp.beta0) - 1.0)});
            }
            const auto& d = *sol.report.diagnostics;
            const auto& r = d.residuals;
            worst_diag = std::max({worst_diag, d.solution_residual, r.soliton_alpha, r.soliton_beta, r.trace,
                                   r.first_order, r.normalization_variation, d.apriori.sup_phi, d.apriori.sup_f_phi,
                                   d.apriori.sup_X_phi, d.apriori.sup_f_drift, std::abs(d.apriori.max_ratio - 1.0)});
        }
        ok = worst_phi < 1e-10 && worst_metric < 1e-10 && worst_diag < 1e-10 && worst_t < 1.0;
        report(1, "flat recovery", ok,
               fmt::format("sup|phi| {:.2e}, metric vs c*flat {:.2e}, diagnostics {:.2e}, slowest {:.3f} s (c in 0.5, 1, 2; N=512)",
                           worst_phi, worst_metric, worst_diag, worst_t));
    }

    // 2, 3, 6, 8 on the Cao soliton
    const ConeSpec cao = ConeSpec::euclidean(2, 0.5, 1.0);
    SolitonSolution cao_sol;
    {
        SolveOptions opt;
        opt.uniqueness_seeds = 3;
        opt.seed = 17;
        const auto t0 = clk::now();
        cao_sol = solve_soliton(cao, ladder({512, 1024, 2048}), opt);
        const double t = since(t0);
        track("cao", cao_sol);
        const double err = oracle_error(cao_sol);
        report(2, "Cao benchmark", err <= 1e-6 && t < 30.0,
               fmt::format("relative sup error vs shooting {:.2e}, {:.2f} s at N=2048 (with diagnostics)", err, t));
        const auto& d = cao_sol.report.diagnostics->decay;
        const bool ok = d.defined && d.rate >= 3.5 && d.rate <= 4.5 && d.rate_without_ricci >= 1.7 &&
                        d.rate_without_ricci <= 2.3;
        report(3, "decay rate", ok,
               fmt::format("rate {:.4f} (r2 {:.6f}), without Ricci {:.4f}, over x in [{:.2f}, {:.2f}]", d.rate, d.r2,
                           d.rate_without_ricci, d.x_lo, d.x_hi));
    }

    // 4. line bundles
    SolitonSolution k4_sol;
    {
        bool ok = true;
        std::string detail;
        for (int k = 1; k <= 5; ++k) {
            const ConeSpec spec = ConeSpec::line_bundle(2, k, 1.0, 1.0);
            SolveOptions opt;
            opt.curvature = false;
            opt.uniqueness_seeds = k == 4 ? 3 : 0;
            opt.seed = 23;
            const auto t0 = clk::now();
            std::string what;
            bool good;
            try {
                auto sol = solve_soliton(spec, ladder({512, 1024}), opt);
                track(fmt::format("O(-{})", k), sol);
                good = k >= 3 && sol.report.diagnostics->pass;
                what = fmt::format("converged{}", sol.report.diagnostics->pass ? ", diagnostics pass" : ", diagnostics FAIL");
                if (k == 4) k4_sol = std::move(sol);
            } catch (const PathStallError& e) {
                good = k <= 2;
                what = fmt::format("path-stall at t={:.3f}", e.t_stall);
            } catch (const std::exception& e) {
                good = false;
                what = e.what();
            }
            const double t = since(t0);
            good = good && t < 60.0;
            ok = ok && good;
            detail += fmt::format("{}k={} {} ({:.2f} s)", k > 1 ? "; " : "", k, what, t);
        }
        report(4, "line-bundle existence threshold", ok, detail);
    }

    // 5. a priori
    {
        bool hard = true;
        std::string worst = "";
        double worst_gap = -1e300;
        for (const auto& [name, gap] : apriori) {
            hard = hard && gap <= 0.0;
            if (gap > worst_gap) worst_gap = gap, worst = name;
        }
        // every level on a core-adapted background, so phi means the same thing on all three
        std::vector<std::array<double, 4>> q;
        for (std::vector<int> lv : {std::vector<int>{256, 512}, {256, 512, 1024}, {256, 512, 1024, 2048}}) {
            SolveOptions opt;
            opt.curvature = false;
            const auto s = solve_soliton(cao, ladder(lv), opt);
            const auto& a = s.report.diagnostics->apriori;
            q.push_back({a.sup_f_phi, a.sup_X_phi, a.sup_f_drift, a.max_ratio});
        }
        double spread = 1.0;
        for (int i = 0; i < 4; ++i) {
            double lo = 1e300, hi = 0;
            for (const auto& r : q) lo = std::min(lo, r[i]), hi = std::max(hi, r[i]);
            spread = std::max(spread, hi / lo);
        }
        report(5, "a priori bounds", hard && spread <= 2.0 && std::isfinite(spread),
               fmt::format("sup|phi| <= sup|F| on {} runs (closest {} gap {:.3e}); weighted sups on N=512/1024/2048: "
                           "f|phi| {:.4f}/{:.4f}/{:.4f}, |X phi| {:.4f}/{:.4f}/{:.4f}, f|drift| {:.4f}/{:.4f}/{:.4f}, "
                           "max spread {:.6f}",
                           apriori.size(), worst, worst_gap, q[0][0], q[1][0], q[2][0], q[0][1], q[1][1], q[2][1],
                           q[0][2], q[1][2], q[2][2], spread));
    }

    // 6. identities
    {
        bool ok = true;
        std::string detail;
        for (const auto* s : {&cao_sol, &k4_sol}) {
            if (!s->report.diagnostics) {
                ok = false;
                detail += "missing run; ";
                continue;
            }
            const auto& r = s->report.diagnostics->residuals;
            const double m = std::max({r.trace, r.first_order, r.normalization_variation});
            ok = ok && m <= 1e-5;
            detail += fmt::format("{}: trace {:.2e}, first order {:.2e}, normalization variation {:.2e}; ",
                                  s->spec.describe(), r.trace, r.first_order, r.normalization_variation);
        }
        detail.resize(detail.size() - 2);
        report(6, "soliton identities", ok, detail);
    }

    // 7. linearization
    {
        const auto& g = cao_sol.grid;
        std::mt19937_64 rng(1234);
        const double eps = 1e-5;
        const Derivs D(g);
        double fd = 0, sv = -1e300, taylor = 0;
        for (int i = 0; i < 20; ++i) {
            // unit size against the solved metric: max(|psi_x| / tau, |psi_xx| / tau_x) = 1
            PotentialProfile psi = zero_potential(cao, g);
            psi.phi = bump_sum(g, rng);
            double size = 0;
            for (int j = 0; j < g.N; ++j)
                size = std::max({size, std::abs(D.D1.apply_at(psi.phi, j)) / cao_sol.tau[j],
                                 std::abs(D.D2.apply_at(psi.phi, j)) / cao_sol.tau_x[j]});
            for (double& v : psi.phi) v /= size;
            PotentialProfile plus = cao_sol.phi, minus = cao_sol.phi;
            for (int j = 0; j < g.N; ++j) plus.phi[j] += eps * psi.phi[j], minus.phi[j] -= eps * psi.phi[j];
            const auto num = diff(ma_operator(cao, g, cao_sol.bg, plus), ma_operator(cao, g, cao_sol.bg, minus),
                                  0.5 / eps);
            const auto lin = linearized_apply(cao, g, cao_sol.metric, psi);
            fd = std::max(fd, sup_abs(diff(num, lin)) / sup_abs(lin));
            for (double v : second_variation_check(cao, g, cao_sol.metric, psi)) sv = std::max(sv, v);
            // small against the background: |psi_x| <= tau / 2 and |psi_xx| <= tau_x / 2
            double ratio = 0;
            for (int j = 0; j < g.N; ++j)
                ratio = std::max({ratio, std::abs(D.D1.apply_at(psi.phi, j)) / cao_sol.bg.tau[j],
                                  std::abs(D.D2.apply_at(psi.phi, j)) / cao_sol.bg.tau_x[j]});
            PotentialProfile small = psi;
            for (double& v : small.phi) v *= 0.5 / ratio;
            taylor = std::max(taylor, taylor_identity_check(cao, g, cao_sol.bg, small).max_abs);
        }
        taylor = std::max(taylor, taylor_identity_check(cao, g, cao_sol.bg, cao_sol.phi).max_abs);
        report(7, "linearization and concavity", fd <= 1e-6 && sv <= 0.0 && taylor <= 1e-8,
               fmt::format("FD mismatch {:.2e} (eps 1e-5, 20 psi), max second variation {:.2e}, Taylor residual {:.2e}",
                           fd, sv, taylor));
    }

    // 8. uniqueness
    {
        bool ok = true;
        std::string detail;
        for (const auto* s : {&cao_sol, &k4_sol}) {
            if (!s->report.diagnostics || !s->report.diagnostics->uniqueness) {
                ok = false;
                continue;
            }
            const auto& u = *s->report.diagnostics->uniqueness;
            const double tol = 10.0 * SolverConfig{}.newton_tol;
            ok = ok && u.seeds == 3 && u.succeeded == 3 && u.max_distance <= tol;
            detail += fmt::format("{}{}: {}/{} converged, max distance {:.2e} (limit {:.0e})", detail.empty() ? "" : "; ",
                                  s->spec.describe(), u.succeeded, u.seeds, u.max_distance, tol);
        }
        report(8, "uniqueness", ok, detail);
    }

    // 9. chart oracle
    {
        bool ok = true;
        std::string detail;
        for (const ConeSpec& spec : {cao, ConeSpec::line_bundle(2, 4, 1.0, 1.0)}) {
            SolveOptions opt;
            opt.diagnostics = false;
            const auto sol = solve_soliton(spec, ladder({512, 1024}), opt);
            const auto cc = chart_oracle_check(sol, 10, 31);
            ok = ok && cc.pass && cc.samples.size() == 10;
            detail += fmt::format("{}{}: max difference {:.2e} vs 5h^2 = {:.2e}", detail.empty() ? "" : "; ",
                                  spec.describe(), cc.max_difference, cc.bound);
        }
        report(9, "reduction vs full chart", ok, detail);
    }

    // 10. family
    {
        const auto t0 = clk::now();
        const ConeSpec s0 = ConeSpec::euclidean(2, 0.9, 1.0), s1 = ConeSpec::euclidean(2, 0.5, 1.0);
        const SolverConfig cfg;
        bool conv = true, pos = true, lim = true;
        double min_eig = 1e300, worst_lim = 1e300, trans = 1e300;
        int radii = 0;
        try {
            const auto fam = family_solve(s0, s1, 8, RadialGrid(cfg.x_min, cfg.x_max, 1024), cfg);
            conv = fam.size() == 9;
            for (const auto& m : fam) {
                conv = conv && m.sol.report.converged;
                const auto cs = curvature_spectrum(m.sol, default_radii());
                radii = int(cs.samples.size());
                pos = pos && cs.positive && radii >= 6;
                lim = lim && cs.radial_limit_positive;
                min_eig = std::min(min_eig, cs.min_eigenvalue);
                worst_lim = std::min(worst_lim, cs.radial_limit);
                trans = std::min(trans, cs.transverse_limit);
            }
        } catch (const std::exception& e) {
            conv = false;
        }
        const double t = since(t0);
        report(10, "curvature along the family", conv && pos && lim && t < 600.0,
               fmt::format("9 members converged {}, min eigenvalue {:.3e} over {} radii ({}), radial-floor limit "
                           "min {:.3e} ({}), transverse-floor limit min {:.4f}, {:.2f} s",
                           conv ? "yes" : "no", min_eig, radii, pos ? "positive" : "NOT positive", worst_lim,
                           lim ? "positive" : "not positive", trans, t));
    }

    // 11. transverse flow
    {
        const auto r = transverse_krf_run(perturbed_state(201, 0.2, 0.1), 10.0);
        double drift = 0;
        for (const auto& s : r.trace) drift = std::max(drift, std::abs(s.area - r.trace.front().area));
        const auto fs_run = transverse_krf_run(fubini_study_state(201), 10.0);
        const double dev = r.trace.back().sup_dev;
        report(11, "transverse Kaehler-Ricci flow", dev < 1e-4 && drift < 1e-8 && fs_run.max_change <= 1e-8,
               fmt::format("sup|s - 2| at t=10 {:.2e} (start {:.2e}), area drift {:.2e}, Fubini-Study change {:.2e}", dev,
                           r.trace.front().sup_dev, drift, fs_run.max_change));
    }

    // 12. determinism through the CLI pipeline
    {
        io::RunConfig cfg = io::parse_config(R"({"schema_version": 1, "command": "solve",
            "cone": {"kind": "euclidean", "n": 2, "a": 0.5, "c": 1.0},
            "grid": {"N": 1024}, "diagnostics": {"curvature": true, "uniqueness_seeds": 3}, "seed": 99})");
        bool same = true;
        int rc[2];
        for (int i = 0; i < 2; ++i) rc[i] = io::run_command(cfg, (fs::path(work) / ("run" + std::to_string(i))).string());
        std::string detail = fmt::format("exit codes {}/{}", rc[0], rc[1]);
        for (const char* f : {"report.json", "profile.csv", "rates.csv", "potential.csv"}) {
            const auto a = slurp(fs::path(work) / "run0" / f), b = slurp(fs::path(work) / "run1" / f);
            same = same && !a.empty() && a == b;
            detail += fmt::format(", {} {} bytes {}", f, a.size(), a == b ? "identical" : "DIFFER");
        }
        report(12, "determinism", same && rc[0] == 0 && rc[1] == 0, detail);
    }

    std::set<int> failed, expected(expect_fail.begin(), expect_fail.end());
    for (const auto& [id, l] : results)
        if (!l.pass) failed.insert(id);
    fmt::print("{} of {} criteria pass\n", results.size() - failed.size(), results.size());
    if (failed != expected) {
        fmt::print("failing set differs from the documented one\n");
        return 1;
    }
    return 0;
}
