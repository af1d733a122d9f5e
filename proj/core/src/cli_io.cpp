#include "acs/cli_io.hpp"
#include "acs/diagnostics.hpp"
#include "acs/errors.hpp"
#include "acs/family_flows.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace acs::io {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;
namespace fs = std::filesystem;

std::vector<int> GridBlock::levels() const {
    if (!ladder.empty()) return ladder;
    std::vector<int> out;
    for (int n : {N / 4, N / 2, N})
        if (n >= 64) out.push_back(n);
    return out;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ValidationError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void take(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("bad value for '") + key + "' in " + where);
    }
}

ConeSpec parse_cone(const json& j) {
    check_keys(j, {"kind", "n", "m", "k", "a", "c", "base_curvature_scale"}, "cone");
    std::string kind = "euclidean";
    take(j, "kind", kind, "cone");
    ConeSpec s;
    if (kind == "euclidean") {
        int n = 2;
        double a = 1.0, c = 1.0;
        take(j, "n", n, "cone");
        take(j, "a", a, "cone");
        take(j, "c", c, "cone");
        if (j.contains("m") || j.contains("k")) throw ValidationError("m and k apply to line_bundle cones");
        s = ConeSpec::euclidean(n, a, c);
    } else if (kind == "line_bundle") {
        int m = 2, k = 1;
        double a = 1.0, c = 1.0;
        take(j, "m", m, "cone");
        take(j, "k", k, "cone");
        take(j, "a", a, "cone");
        take(j, "c", c, "cone");
        if (j.contains("n")) throw ValidationError("n applies to euclidean cones");
        s = ConeSpec::line_bundle(m, k, a, c);
    } else {
        throw ValidationError("cone kind must be 'euclidean' or 'line_bundle'");
    }
    take(j, "base_curvature_scale", s.base_curvature_scale, "cone");
    s.validate();
    return s;
}

ojson cone_json(const ConeSpec& s) {
    ojson j;
    if (s.kind == ConeKind::EuclideanResolution) {
        j["kind"] = "euclidean";
        j["n"] = s.n;
    } else {
        j["kind"] = "line_bundle";
        j["m"] = s.m;
        j["k"] = s.k;
    }
    j["a"] = s.a;
    j["c"] = s.c;
    j["base_curvature_scale"] = s.base_curvature_scale;
    return j;
}

void parse_solver(const json& j, SolverConfig& c) {
    const std::string w = "solver";
    check_keys(j,
               {"newton_tol", "newton_max_iter", "lambda_min", "safeguard", "floor_factor", "section_tol",
                "dt_init", "dt_min", "dt_max", "dt_grow", "easy_iters", "band", "adapt_core"},
               w);
    take(j, "newton_tol", c.newton_tol, w);
    take(j, "newton_max_iter", c.newton_max_iter, w);
    take(j, "lambda_min", c.lambda_min, w);
    take(j, "safeguard", c.safeguard, w);
    take(j, "floor_factor", c.floor_factor, w);
    take(j, "section_tol", c.section_tol, w);
    take(j, "dt_init", c.dt_init, w);
    take(j, "dt_min", c.dt_min, w);
    take(j, "dt_max", c.dt_max, w);
    take(j, "dt_grow", c.dt_grow, w);
    take(j, "easy_iters", c.easy_iters, w);
    take(j, "band", c.band, w);
    take(j, "adapt_core", c.adapt_core, w);
}

ojson solver_json(const SolverConfig& c) {
    ojson j;
    j["newton_tol"] = c.newton_tol;
    j["newton_max_iter"] = c.newton_max_iter;
    j["lambda_min"] = c.lambda_min;
    j["safeguard"] = c.safeguard;
    j["floor_factor"] = c.floor_factor;
    j["section_tol"] = c.section_tol;
    j["dt_init"] = c.dt_init;
    j["dt_min"] = c.dt_min;
    j["dt_max"] = c.dt_max;
    j["dt_grow"] = c.dt_grow;
    j["easy_iters"] = c.easy_iters;
    j["band"] = c.band;
    j["adapt_core"] = c.adapt_core;
    return j;
}

ojson config_json(const RunConfig& c) {
    ojson j;
    j["schema_version"] = c.schema_version;
    j["command"] = c.command;
    j["cone"] = cone_json(c.spec);
    j["grid"] = {{"N", c.grid.N}, {"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"ladder", c.grid.levels()}};
    j["solver"] = solver_json(c.solver);
    j["diagnostics"] = {{"curvature", c.diagnostics.curvature}, {"uniqueness_seeds", c.diagnostics.uniqueness_seeds}};
    j["family"] = {{"a_end", c.family.a_end}, {"scale_end", c.family.scale_end}, {"steps", c.family.steps}};
    j["flow"] = {{"nodes", c.flow.nodes}, {"eps", c.flow.eps},       {"eps2", c.flow.eps2},
                 {"t_end", c.flow.t_end}, {"dt", c.flow.dt},         {"round_start", c.flow.round_start}};
    j["verify"] = {{"run_dir", c.verify.run_dir}, {"tolerance", c.verify.tolerance}};
    j["oracle"] = {{"points", c.oracle.points}, {"h", c.oracle.h}};
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    return j;
}

void validate(RunConfig& c) {
    static const std::set<std::string> commands = {"solve", "family", "flow", "verify", "oracle"};
    if (c.schema_version != kSchemaVersion)
        throw ValidationError("schema_version " + std::to_string(c.schema_version) + " not supported (expected " +
                              std::to_string(kSchemaVersion) + ")");
    if (!commands.count(c.command)) throw ValidationError("unknown command '" + c.command + "'");
    c.spec.validate();
    if (!(c.grid.x_min < c.grid.x_max)) throw ValidationError("grid needs x_min < x_max");
    for (int n : c.grid.levels())
        if (n < 64) throw ValidationError("grid levels need at least 64 nodes");
    if (c.grid.levels().empty()) throw ValidationError("grid ladder is empty");
    c.solver.ladder = c.grid.levels();
    c.solver.x_min = c.grid.x_min;
    c.solver.x_max = c.grid.x_max;
    c.solver.validate();
    if (c.diagnostics.uniqueness_seeds < 0) throw ValidationError("uniqueness_seeds must be >= 0");
    if (c.family.steps < 1) throw ValidationError("family steps must be >= 1");
    if (!(c.family.a_end > 0.0 && c.family.a_end <= 1.0)) throw ValidationError("family a_end must be in (0, 1]");
    if (c.flow.nodes < 9) throw ValidationError("flow needs at least 9 nodes");
    if (!(c.flow.t_end > 0.0) || !(c.flow.dt > 0.0)) throw ValidationError("flow t_end and dt must be positive");
    if (c.oracle.points < 1) throw ValidationError("oracle points must be >= 1");
    if (c.threads < 1) throw ValidationError("threads must be >= 1");
    if (c.command == "verify" && c.verify.run_dir.empty()) throw ValidationError("verify needs verify.run_dir");
}

std::string num(double v) { return fmt::format("{:.17e}", v); }

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << s;
}

void write_json(const fs::path& p, const ojson& j) { write_text(p, j.dump(2) + "\n"); }

ojson path_json(const std::vector<PathStep>& path) {
    ojson a = ojson::array();
    for (const auto& s : path)
        a.push_back({{"t", s.t},
                     {"dt", s.dt},
                     {"iterations", s.iterations},
                     {"damping_events", s.damping_events},
                     {"residual", s.residual},
                     {"accepted", s.accepted}});
    return a;
}

ojson failure_json(const FailureRecord& f) {
    return {{"kind", f.kind}, {"message", f.message}, {"t_stall", f.t_stall}, {"node", f.node}};
}

ojson report_json(const SolveReport& r) {
    ojson j;
    j["ladder"] = r.ladder;
    j["path"] = path_json(r.path);
    j["newton_history"] = r.newton_history;
    j["final_residual"] = r.final_residual;
    j["floor_limited"] = r.floor_limited;
    j["converged"] = r.converged;
    j["converged_with_rate"] = r.converged_with_rate;
    j["failure"] = r.failure ? failure_json(*r.failure) : ojson(nullptr);
    return j;
}

ojson sample_json(const CurvatureSample& s) {
    return {{"r", s.r},
            {"x", s.x},
            {"min_eigenvalue", s.min_eigenvalue},
            {"radial_floor", s.radial_floor},
            {"transverse_floor", s.transverse_floor},
            {"ricci_floor", s.ricci_floor},
            {"eigenvalues", s.eigenvalues}};
}

ojson curvature_json(const CurvatureSpectrum& c) {
    ojson j;
    j["positive"] = c.positive;
    j["min_eigenvalue"] = c.min_eigenvalue;
    j["radial_limit"] = c.radial_limit;
    j["transverse_limit"] = c.transverse_limit;
    j["limit_threshold"] = c.limit_threshold;
    j["radial_limit_positive"] = c.radial_limit_positive;
    j["samples"] = ojson::array();
    for (const auto& s : c.samples) j["samples"].push_back(sample_json(s));
    j["outer"] = ojson::array();
    for (const auto& s : c.outer) j["outer"].push_back(sample_json(s));
    j["notes"] = c.notes;
    return j;
}

ojson diagnostics_json(const DiagnosticsBundle& b) {
    ojson j;
    j["pass"] = b.pass;
    j["solution_residual"] = b.solution_residual;
    const auto& r = b.residuals;
    j["identities"] = {{"soliton_alpha", r.soliton_alpha},
                       {"soliton_beta", r.soliton_beta},
                       {"trace", r.trace},
                       {"first_order", r.first_order},
                       {"normalization_variation", r.normalization_variation},
                       {"normalization_value", r.normalization_value}};
    const auto& d = b.decay;
    j["decay"] = {{"defined", d.defined},
                  {"rate", d.rate},
                  {"r2", d.r2},
                  {"rate_without_ricci", d.rate_without_ricci},
                  {"r2_without_ricci", d.r2_without_ricci},
                  {"x_lo", d.x_lo},
                  {"x_hi", d.x_hi},
                  {"points", d.points},
                  {"max_difference", d.max_difference}};
    const auto& a = b.apriori;
    ojson checks = ojson::array();
    for (const auto& c : a.checks) checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}});
    j["apriori"] = {{"pass", a.pass},
                    {"sup_phi", a.sup_phi},
                    {"sup_F", a.sup_F},
                    {"sup_f_phi", a.sup_f_phi},
                    {"sup_X_phi", a.sup_X_phi},
                    {"sup_f_drift", a.sup_f_drift},
                    {"max_ratio", a.max_ratio},
                    {"checks", checks}};
    j["curvature"] = b.curvature ? curvature_json(*b.curvature) : ojson(nullptr);
    if (b.uniqueness) {
        const auto& u = *b.uniqueness;
        j["uniqueness"] = {{"seeds", u.seeds},
                           {"succeeded", u.succeeded},
                           {"max_distance", u.max_distance},
                           {"seed_sup", u.seed_sup},
                           {"failures", u.failures}};
    } else {
        j["uniqueness"] = nullptr;
    }
    return j;
}

ojson background_json(const BackgroundMetric& bg) {
    const auto& p = bg.params();
    return {{"flat", p.flat}, {"tau0", p.tau0}, {"mu", p.mu}, {"lambda", p.lambda}, {"x1", p.x1}, {"width", p.width}};
}

void write_profile(const fs::path& p, const SolitonSolution& s) {
    std::string out = "x,rho,phi,alpha,beta,F,residual\n";
    const auto phi = s.phi.values();
    for (int j = 0; j < s.grid.N; ++j) {
        const double x = s.grid.x(j);
        out += fmt::format("{},{},{},{},{},{},{}\n", num(x), num(std::exp(x)), num(phi[j]), num(s.metric.alpha[j]),
                           num(s.metric.beta[j]), num(s.rhs.F[j]), num(s.residual[j]));
    }
    write_text(p, out);
}

// the offset-free part of phi, needed bit-exactly to rebuild the core
void write_potential(const fs::path& p, const SolitonSolution& s) {
    std::string out = "x,phi_rel\n";
    for (int j = 0; j < s.grid.N; ++j) out += fmt::format("{},{}\n", num(s.grid.x(j)), num(s.phi.phi[j]));
    write_text(p, out);
}

std::vector<double> read_potential(const fs::path& p, int N) {
    std::ifstream f(p);
    if (!f) throw ValidationError("cannot read " + p.string());
    std::string line;
    std::getline(f, line);
    if (line != "x,phi_rel") throw ValidationError("unexpected header in " + p.string());
    std::vector<double> v;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ValidationError("short row in " + p.string());
        v.push_back(std::stod(line.substr(comma + 1)));
    }
    if (int(v.size()) != N) throw ValidationError("potential.csv and profile.csv differ in length");
    return v;
}

void write_rates(const fs::path& p, const DecayFit& d) {
    std::string out = "fit,rate,r2,x_lo,x_hi,points\n";
    out += fmt::format("with_ricci,{},{},{},{},{}\n", num(d.rate), num(d.r2), num(d.x_lo), num(d.x_hi), d.points);
    out += fmt::format("without_ricci,{},{},{},{},{}\n", num(d.rate_without_ricci), num(d.r2_without_ricci),
                       num(d.x_lo), num(d.x_hi), d.points);
    write_text(p, out);
}

ojson base_report(const RunConfig& c) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = c.command;
    j["config"] = config_json(c);
    return j;
}

ojson solution_json(const SolitonSolution& s) {
    double sup = 0;
    for (double v : s.phi.values()) sup = std::max(sup, std::abs(v));
    ojson j;
    j["N"] = s.grid.N;
    j["sup_phi"] = sup;
    j["phi_offset"] = s.phi.offset;
    j["f_const"] = s.f_const;
    j["final_residual"] = s.report.final_residual;
    if (s.spec.kind == ConeKind::LineBundle || s.spec.a != 1.0) {
        const CoreFit cf = core_fit(s.grid, s.tau);
        j["core_fit"] = {{"section_moment", cf.T}, {"slope", cf.B}};
    }
    return j;
}

int finish(ojson& rep, const fs::path& dir, const std::string& status, int code) {
    rep["status"] = status;
    rep["exit_code"] = code;
    write_json(dir / "report.json", rep);
    return code;
}

int failure(ojson& rep, const fs::path& dir, const std::string& kind, const std::string& msg, int code,
            double t_stall = -1.0, int node = -1) {
    rep["failure"] = {{"kind", kind}, {"message", msg}, {"t_stall", t_stall}, {"node", node}};
    return finish(rep, dir, kind, code);
}

int run_solve(const RunConfig& c, const fs::path& dir, ojson& rep) {
    SolveOptions opt;
    opt.diagnostics = true;
    opt.curvature = c.diagnostics.curvature;
    opt.uniqueness_seeds = c.diagnostics.uniqueness_seeds;
    opt.seed = c.seed;
    opt.threads = c.threads;
    SolveReport partial;
    try {
        const SolitonSolution sol = solve_soliton(c.spec, c.solver, opt, &partial);
        rep["background"] = background_json(sol.bg);
        rep["solution"] = solution_json(sol);
        rep["report"] = report_json(sol.report);
        const auto& d = *sol.report.diagnostics;
        rep["diagnostics"] = diagnostics_json(d);
        write_profile(dir / "profile.csv", sol);
        write_potential(dir / "potential.csv", sol);
        write_rates(dir / "rates.csv", d.decay);
        return d.pass ? finish(rep, dir, "converged", kOk) : finish(rep, dir, "diagnostics_failure", kDiagnostics);
    } catch (const PathStallError& e) {
        rep["report"] = report_json(partial);
        return failure(rep, dir, "path_stall", e.what(), kPathStall, e.t_stall, e.node);
    }
}

int run_family(const RunConfig& c, const fs::path& dir, ojson& rep) {
    ConeSpec s1 = c.spec;
    s1.a = c.family.a_end;
    if (c.family.scale_end > 0.0) s1.base_curvature_scale = c.family.scale_end;
    const int N = c.grid.levels().back();
    const RadialGrid grid(c.grid.x_min, c.grid.x_max, N);
    std::vector<FamilyMember> fam;
    try {
        fam = family_solve(c.spec, s1, c.family.steps, grid, c.solver);
    } catch (const PathStallError& e) {
        return failure(rep, dir, "path_stall", e.what(), kPathStall, e.t_stall, e.node);
    }
    bool positive = true, limits = true;
    ojson members = ojson::array();
    std::string csv = "t,a,residual,dphi_dt,dtau_dt,min_eigenvalue,radial_limit,transverse_limit\n";
    for (const auto& m : fam) {
        ojson jm = {{"t", m.t},
                    {"a", m.spec.a},
                    {"residual", m.sol.report.final_residual},
                    {"dphi_dt", m.dphi_dt},
                    {"dtau_dt", m.dtau_dt}};
        double mn = 0, rl = 0, tl = 0;
        if (c.diagnostics.curvature && m.spec.kind == ConeKind::EuclideanResolution) {
            const auto cs = curvature_spectrum(m.sol, default_radii());
            jm["curvature"] = curvature_json(cs);
            positive = positive && cs.positive;
            limits = limits && cs.radial_limit_positive;
            mn = cs.min_eigenvalue;
            rl = cs.radial_limit;
            tl = cs.transverse_limit;
        }
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", num(m.t), num(m.spec.a), num(m.sol.report.final_residual),
                           num(m.dphi_dt), num(m.dtau_dt), num(mn), num(rl), num(tl));
        members.push_back(jm);
    }
    write_text(dir / "family.csv", csv);
    write_profile(dir / "profile.csv", fam.back().sol);
    rep["members"] = members;
    rep["all_converged"] = true;
    rep["all_positive"] = positive;
    rep["all_radial_limits_positive"] = limits;
    return positive ? finish(rep, dir, "converged", kOk) : finish(rep, dir, "diagnostics_failure", kDiagnostics);
}

int run_flow(const RunConfig& c, const fs::path& dir, ojson& rep) {
    const FlowState init =
        c.flow.round_start ? fubini_study_state(c.flow.nodes) : perturbed_state(c.flow.nodes, c.flow.eps, c.flow.eps2);
    FlowOptions opt;
    opt.dt = c.flow.dt;
    const FlowResult r = transverse_krf_run(init, c.flow.t_end, opt);
    std::string csv = "t,sup_dev,min_curvature,area,gauss_bonnet\n";
    double drift = 0, min_curv = std::numeric_limits<double>::infinity();
    const double area0 = r.trace.front().area;
    for (const auto& s : r.trace) {
        csv += fmt::format("{},{},{},{},{}\n", num(s.t), num(s.sup_dev), num(s.min_curvature), num(s.area),
                           num(s.gauss_bonnet));
        drift = std::max(drift, std::abs(s.area - area0));
        min_curv = std::min(min_curv, s.min_curvature);
    }
    write_text(dir / "flow.csv", csv);
    const double dev = r.trace.back().sup_dev;
    rep["flow"] = {{"final_sup_dev", dev},
                   {"initial_sup_dev", r.trace.front().sup_dev},
                   {"area_drift", drift},
                   {"max_change", r.max_change},
                   {"min_curvature", min_curv},
                   {"rejected_steps", r.rejected},
                   {"samples", r.trace.size()}};
    const bool pass = c.flow.round_start ? r.max_change <= 1e-8 : dev < 1e-4;
    rep["pass"] = pass && drift < 1e-8;
    return rep["pass"].get<bool>() ? finish(rep, dir, "converged", kOk)
                                   : finish(rep, dir, "diagnostics_failure", kDiagnostics);
}

// numeric leaves of two JSON trees; worst relative difference
void compare(const json& a, const json& b, const std::string& key, double& worst, std::string& where) {
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>(), y = b.get<double>();
        const double d = std::abs(x - y) / std::max(1.0, std::abs(x));
        if (d > worst || std::isnan(d)) {
            worst = std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
            where = key;
        }
    } else if (a.is_object() && b.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it)
            if (b.contains(it.key())) compare(it.value(), b.at(it.key()), key + "." + it.key(), worst, where);
    } else if (a.is_array() && b.is_array()) {
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
            compare(a[i], b[i], key + "[" + std::to_string(i) + "]", worst, where);
    }
}

int run_verify(const RunConfig& c, const fs::path& dir, ojson& rep) {
    const fs::path run(c.verify.run_dir);
    std::ifstream rf(run / "report.json");
    if (!rf) throw ValidationError("no report.json in " + run.string());
    json stored;
    try {
        rf >> stored;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("report.json does not parse: ") + e.what());
    }
    if (!stored.contains("background") || !stored.contains("diagnostics"))
        throw ValidationError("stored report has no converged solution");
    const RunConfig sc = parse_config(stored.at("config").dump());
    const auto rows = read_profile((run / "profile.csv").string());
    const int N = int(rows.size());
    const RadialGrid grid(sc.grid.x_min, sc.grid.x_max, N);
    for (int j = 0; j < N; ++j)
        if (std::abs(rows[j].x - grid.x(j)) > 1e-12 * std::max(1.0, std::abs(grid.x(j))))
            throw ValidationError("profile.csv x column does not match the stored grid");

    const json& bj = stored.at("background");
    GlueParams gp;
    gp.flat = bj.at("flat").get<bool>();
    gp.tau0 = bj.at("tau0").get<double>();
    gp.mu = bj.at("mu").get<double>();
    gp.lambda = bj.at("lambda").get<double>();
    gp.x1 = bj.at("x1").get<double>();
    gp.width = bj.at("width").get<double>();
    BackgroundMetric bg(sc.spec, gp);
    bg.sample(grid);
    const RHSProfile rhs = build_rhs(sc.spec, grid, bg);
    PotentialProfile phi = zero_potential(sc.spec, grid);
    if (fs::exists(run / "potential.csv")) {
        phi.phi = read_potential(run / "potential.csv", N);
        phi.offset = stored.at("solution").at("phi_offset").get<double>();
        for (int j = 0; j < N; ++j)
            if (phi.value(j) != rows[j].phi) throw ValidationError("potential.csv does not match profile.csv");
    } else {
        for (int j = 0; j < N; ++j) phi.phi[j] = rows[j].phi;
        phi.recenter();
    }
    SolitonSolution sol = assemble_solution(sc.spec, bg, rhs, phi);

    DiagnosticsOptions dopt;
    dopt.curvature = sc.diagnostics.curvature && sc.spec.kind == ConeKind::EuclideanResolution;
    dopt.uniqueness_seeds = 0;
    dopt.cfg = sc.solver;
    const DiagnosticsBundle b = run_diagnostics(sol, dopt);
    const ojson dj = diagnostics_json(b);
    json fresh = json::parse(dj.dump()), old = stored.at("diagnostics");
    fresh.erase("uniqueness");
    old.erase("uniqueness");
    double worst = 0;
    std::string where = "";
    compare(old, fresh, "diagnostics", worst, where);
    rep["verified_run"] = stored.at("config");
    rep["diagnostics"] = dj;
    rep["max_deviation"] = worst;
    rep["worst_key"] = where;
    rep["tolerance"] = c.verify.tolerance;
    const bool ok = b.pass && worst <= c.verify.tolerance;
    return ok ? finish(rep, dir, "verified", kOk) : finish(rep, dir, "diagnostics_failure", kDiagnostics);
}

int run_oracle(const RunConfig& c, const fs::path& dir, ojson& rep) {
    SolveOptions opt;
    opt.diagnostics = false;
    SolitonSolution sol;
    try {
        sol = solve_soliton(c.spec, c.solver, opt);
    } catch (const PathStallError& e) {
        return failure(rep, dir, "path_stall", e.what(), kPathStall, e.t_stall, e.node);
    }
    ChartOracleOptions co;
    co.h = c.oracle.h;
    const ChartCheck cc = chart_oracle_check(sol, c.oracle.points, c.seed, co);
    ojson pts = ojson::array();
    for (const auto& s : cc.samples)
        pts.push_back({{"x", s.x}, {"reduced", s.reduced}, {"chart", s.chart}, {"difference", s.difference}});
    rep["chart"] = {{"bound", cc.bound}, {"max_difference", cc.max_difference}, {"pass", cc.pass}, {"samples", pts}};
    return cc.pass ? finish(rep, dir, "agreed", kOk) : finish(rep, dir, "diagnostics_failure", kDiagnostics);
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config does not parse: ") + e.what());
    }
    check_keys(j,
               {"schema_version", "command", "cone", "grid", "solver", "diagnostics", "family", "flow", "verify",
                "oracle", "seed", "threads", "output"},
               "config");
    if (!j.contains("schema_version")) throw ValidationError("config needs schema_version");
    RunConfig c;
    take(j, "schema_version", c.schema_version, "config");
    take(j, "command", c.command, "config");
    take(j, "seed", c.seed, "config");
    take(j, "threads", c.threads, "config");
    take(j, "output", c.output, "config");
    if (j.contains("cone")) c.spec = parse_cone(j["cone"]);
    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, {"N", "x_min", "x_max", "ladder"}, "grid");
        take(g, "N", c.grid.N, "grid");
        take(g, "x_min", c.grid.x_min, "grid");
        take(g, "x_max", c.grid.x_max, "grid");
        take(g, "ladder", c.grid.ladder, "grid");
        if (!c.grid.ladder.empty() && g.contains("N") && c.grid.ladder.back() != c.grid.N)
            throw ValidationError("grid N must equal the last ladder level");
        if (!c.grid.ladder.empty()) c.grid.N = c.grid.ladder.back();
    }
    if (j.contains("solver")) parse_solver(j["solver"], c.solver);
    if (j.contains("diagnostics")) {
        const json& d = j["diagnostics"];
        check_keys(d, {"curvature", "uniqueness_seeds"}, "diagnostics");
        take(d, "curvature", c.diagnostics.curvature, "diagnostics");
        take(d, "uniqueness_seeds", c.diagnostics.uniqueness_seeds, "diagnostics");
    }
    if (j.contains("family")) {
        const json& f = j["family"];
        check_keys(f, {"a_end", "scale_end", "steps"}, "family");
        take(f, "a_end", c.family.a_end, "family");
        take(f, "scale_end", c.family.scale_end, "family");
        take(f, "steps", c.family.steps, "family");
    }
    if (j.contains("flow")) {
        const json& f = j["flow"];
        check_keys(f, {"nodes", "eps", "eps2", "t_end", "dt", "round_start"}, "flow");
        take(f, "nodes", c.flow.nodes, "flow");
        take(f, "eps", c.flow.eps, "flow");
        take(f, "eps2", c.flow.eps2, "flow");
        take(f, "t_end", c.flow.t_end, "flow");
        take(f, "dt", c.flow.dt, "flow");
        take(f, "round_start", c.flow.round_start, "flow");
    }
    if (j.contains("verify")) {
        const json& v = j["verify"];
        check_keys(v, {"run_dir", "tolerance"}, "verify");
        take(v, "run_dir", c.verify.run_dir, "verify");
        take(v, "tolerance", c.verify.tolerance, "verify");
    }
    if (j.contains("oracle")) {
        const json& o = j["oracle"];
        check_keys(o, {"points", "h"}, "oracle");
        take(o, "points", c.oracle.points, "oracle");
        take(o, "h", c.oracle.h, "oracle");
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) { return config_json(cfg).dump(2); }

std::vector<ProfileRow> read_profile(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read " + path);
    std::string line;
    std::getline(f, line);
    if (line != "x,rho,phi,alpha,beta,F,residual") throw ValidationError("unexpected profile header in " + path);
    std::vector<ProfileRow> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        double v[7];
        for (int i = 0; i < 7; ++i) {
            if (!std::getline(ss, cell, ',')) throw ValidationError("short profile row in " + path);
            try {
                v[i] = std::stod(cell);
            } catch (const std::exception&) {
                throw ValidationError("bad number '" + cell + "' in " + path);
            }
        }
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
    }
    if (rows.size() < 64) throw ValidationError("profile too short in " + path);
    return rows;
}

int write_failure(const std::string& out_dir, const std::string& kind, const std::string& message, int code) {
    try {
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        ojson rep;
        rep["schema_version"] = kSchemaVersion;
        rep["command"] = nullptr;
        return failure(rep, dir, kind, message, code);
    } catch (const std::exception&) {
        return code;
    }
}

int run_command(const RunConfig& cfg, const std::string& out_dir) {
    const fs::path dir(out_dir);
    ojson rep = base_report(cfg);
    try {
        fs::create_directories(dir);
    } catch (const std::exception&) {
        return kInternal;
    }
    try {
        if (cfg.command == "solve") return run_solve(cfg, dir, rep);
        if (cfg.command == "family") return run_family(cfg, dir, rep);
        if (cfg.command == "flow") return run_flow(cfg, dir, rep);
        if (cfg.command == "verify") return run_verify(cfg, dir, rep);
        if (cfg.command == "oracle") return run_oracle(cfg, dir, rep);
        return failure(rep, dir, "validation", "unknown command " + cfg.command, kValidation);
    } catch (const ValidationError& e) {
        return failure(rep, dir, "validation", e.what(), kValidation);
    } catch (const std::exception& e) {
        return failure(rep, dir, "error", e.what(), kInternal);
    }
}

} // namespace acs::io
