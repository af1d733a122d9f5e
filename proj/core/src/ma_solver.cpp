#include "acs/ma_solver.hpp"
#include "acs/banded.hpp"
#include "acs/diagnostics.hpp"
#include "acs/errors.hpp"
#include "acs/reduction.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace acs {

void SolverConfig::validate() const {
    if (!(newton_tol > 0)) throw ValidationError("newton_tol must be positive");
    if (newton_max_iter < 1) throw ValidationError("newton_max_iter must be >= 1");
    if (!(safeguard > 0 && safeguard < 1)) throw ValidationError("safeguard must lie in (0,1)");
    if (!(lambda_min > 0 && lambda_min <= 1)) throw ValidationError("lambda_min must lie in (0,1]");
    if (!(dt_min > 0) || !(dt_init >= dt_min) || !(dt_max >= dt_init)) throw ValidationError("bad continuity steps");
    if (!(dt_grow >= 1)) throw ValidationError("dt_grow must be >= 1");
    if (!(floor_factor >= 0)) throw ValidationError("floor_factor must be >= 0");
    if (!(section_tol > 0)) throw ValidationError("section_tol must be > 0");
    if (band < 8) throw ValidationError("band must be >= 8");
    if (ladder.empty()) throw ValidationError("empty grid ladder");
    for (int n : ladder)
        if (n < 64) throw ValidationError("ladder grids need N >= 64");
    if (!(x_max > x_min + 16.0)) throw ValidationError("x range too short");
}

double interior_residual(const std::vector<double>& r) {
    double m = 0;
    for (std::size_t j = 1; j + 1 < r.size(); ++j) m = std::max(m, std::abs(r[j]));
    if (!std::isfinite(m)) return std::numeric_limits<double>::infinity();
    return m;
}

namespace {

std::vector<double> full_residual(const ConeSpec& spec, const BackgroundMetric& bg, const Derivs& D,
                                  const std::vector<double>& F, const PotentialProfile& p, const Stencil& c0,
                                  const Stencil& cN) {
    const auto& phi = p.phi;
    auto r = ma_operator(spec, bg, D, phi, p.offset);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] -= F[j];
    auto apply = [&](const Stencil& s) {
        double acc = 0;
        for (std::size_t i = 0; i < s.w.size(); ++i) acc += s.w[i] * phi[s.first + int(i)];
        return acc;
    };
    double wsum = 0;
    for (double w : cN.w) wsum += w;
    r.front() = apply(c0);
    r.back() = apply(cN) + wsum * p.offset;
    return r;
}

void set_row(BandedMatrix& A, int row, const Stencil& s) {
    const int N = A.size();
    for (int j = std::max(0, row - A.kl()); j <= std::min(N - 1, row + A.ku()); ++j) A.at(row, j) = 0.0;
    for (std::size_t i = 0; i < s.w.size(); ++i) A.at(row, s.first + int(i)) += s.w[i];
}

// index minimizing min(tau/tau_bg, tau_x/tau_bg_x)
int weakest_node(const BackgroundMetric& bg, const Derivs& D, const std::vector<double>& phi) {
    const auto m = moments(bg, D, phi);
    int best = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < phi.size(); ++j) {
        const double v = std::min(m.tau[j] / bg.tau[j], m.tau_x[j] / bg.tau_x[j]);
        if (v < worst) {
            worst = v;
            best = int(j);
        }
    }
    return best;
}

// per-node size of the rounding error in MA(phi) - F
std::vector<double> rounding_floor(const ConeSpec& spec, const BackgroundMetric& bg, const Derivs& D,
                                   const std::vector<double>& F, const PotentialProfile& p) {
    const auto& phi = p.phi;
    const int N = int(phi.size());
    const auto m = moments(bg, D, phi);
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<double> fl(N);
    for (int j = 0; j < N; ++j) {
        double s1 = 0, s2 = 0;
        const Stencil& a1 = D.D1.row(j);
        const Stencil& a2 = D.D2.row(j);
        for (std::size_t i = 0; i < a1.w.size(); ++i) s1 += std::abs(a1.w[i] * phi[a1.first + int(i)]);
        for (std::size_t i = 0; i < a2.w.size(); ++i) s2 += std::abs(a2.w[i] * phi[a2.first + int(i)]);
        fl[j] = eps * ((spec.nb() / m.tau[j] + 1.0 / spec.a) * s1 + s2 / m.tau_x[j] + std::abs(p.value(j)) + std::abs(F[j]));
    }
    return fl;
}

} // namespace

PotentialProfile newton_solve(const ConeSpec& spec, const BackgroundMetric& bg, const std::vector<double>& F_target,
                              const PotentialProfile& phi0, const SolverConfig& cfg, NewtonTrace* trace) {
    const RadialGrid& g = bg.grid();
    const int N = g.N;
    if (int(phi0.phi.size()) != N || int(F_target.size()) != N) throw DomainError("profile size mismatch");
    Derivs D(g);
    const Stencil c0 = core_closure(g, phi0.closure);
    const Stencil cN = far_closure(g, phi0.decay_order);

    PotentialProfile out = phi0;
    out.recenter();
    auto& phi = out.phi;
    NewtonTrace local;
    NewtonTrace& tr = trace ? *trace : local;
    tr = NewtonTrace{};

    for (int it = 0;; ++it) {
        const auto r = full_residual(spec, bg, D, F_target, out, c0, cN);
        const double res = interior_residual(r);
        tr.residuals.push_back(res);
        if (res <= cfg.newton_tol) return out;
        if (std::isfinite(res)) {
            const auto fl = rounding_floor(spec, bg, D, F_target, out);
            bool at_floor = true;
            for (int j = 1; j + 1 < N && at_floor; ++j)
                at_floor = std::abs(r[j]) <= std::max(cfg.newton_tol, cfg.floor_factor * fl[j]);
            if (at_floor) {
                tr.floor_limited = true;
                return out;
            }
        }
        if (it >= cfg.newton_max_iter || !std::isfinite(res)) {
            std::ostringstream os;
            os << "Newton did not converge; residual history:";
            for (double v : tr.residuals) os << ' ' << v;
            throw NoConvergenceError(os.str());
        }

        BandedMatrix A = assemble_linearized(spec, g, metric_of(bg, D, phi), D, cfg.band, cfg.band);
        set_row(A, 0, c0);
        set_row(A, N - 1, cN);
        std::vector<double> rhs(N);
        for (int j = 0; j < N; ++j) rhs[j] = -r[j];
        const auto delta = A.solve(rhs);

        // largest lambda keeping both eigenvalues above safeguard * current
        const auto m = moments(bg, D, phi);
        const auto dx = D.D1.apply(delta), dxx = D.D2.apply(delta);
        double lam = 1.0;
        int node = -1;
        for (int j = 0; j < N; ++j) {
            const double lim1 = dx[j] < 0 ? (1.0 - cfg.safeguard) * m.tau[j] / -dx[j] : 1.0;
            const double lim2 = dxx[j] < 0 ? (1.0 - cfg.safeguard) * m.tau_x[j] / -dxx[j] : 1.0;
            const double lim = std::min(lim1, lim2);
            if (lim < lam) {
                lam = lim;
                node = j;
            }
        }
        if (!(lam >= cfg.lambda_min))
            throw StepFailureError("positivity unreachable for lambda >= lambda_min at node " +
                                       std::to_string(node),
                                   node);
        if (lam < 1.0) ++tr.damping_events;
        tr.lambdas.push_back(lam);
        for (int j = 0; j < N; ++j) phi[j] += lam * delta[j];
        out.recenter();
    }
}

std::vector<double> gradient_excess(const ConeSpec& spec, const BackgroundMetric& bg, const PotentialProfile& phi) {
    const RadialGrid& g = bg.grid();
    Derivs D(g);
    const double a = spec.a;
    std::vector<double> e(g.N);
    // tau_end,x - a tau_end = a kappa
    for (int j = 0; j < g.N; ++j) {
        const double d = bg.dtau_end_x[j] - a * bg.dtau_end[j] + D.D2.apply_at(phi.phi, j) - a * D.D1.apply_at(phi.phi, j);
        e[j] = (a * spec.kappa() + d) / (a * a);
    }
    return e;
}

SolitonSolution assemble_solution(const ConeSpec& spec, const BackgroundMetric& bg, const RHSProfile& rhs,
                                  const PotentialProfile& phi) {
    SolitonSolution s;
    s.spec = spec;
    s.grid = bg.grid();
    s.bg = bg;
    s.rhs = rhs;
    s.phi = phi;
    const RadialGrid& g = s.grid;
    const int N = g.N;
    Derivs D(g);
    s.metric = metric_of(bg, D, phi.phi);
    const auto m = moments(bg, D, phi.phi);
    s.tau = m.tau;
    s.tau_x = m.tau_x;
    s.residual = ma_operator(spec, bg, D, phi.phi, phi.offset);
    for (int j = 0; j < N; ++j) s.residual[j] -= rhs.F[j];
    s.residual.front() = 0.0;
    s.residual.back() = 0.0;

    // |grad f|^2 + s/2 = f at the outermost node
    const auto rd = ricci_data(spec, g, s.metric);
    const double a = spec.a;
    const int e = N - 1;
    s.f_const = gradient_excess(spec, bg, phi)[e] + 0.5 * rd.s[e];
    s.f.resize(N);
    for (int j = 0; j < N; ++j) s.f[j] = s.tau[j] / a + s.f_const;
    s.report.final_residual = interior_residual(s.residual);
    s.report.converged = true;
    return s;
}

SolitonSolution continuity_solve(const ConeSpec& spec, const BackgroundMetric& bg, const RHSProfile& F,
                                 const SolverConfig& cfg, const PotentialProfile* phi_start, SolveReport* partial) {
    const RadialGrid& g = bg.grid();
    Derivs D(g);
    PotentialProfile phi = phi_start ? *phi_start : zero_potential(spec, g);
    SolveReport rep;
    double t = 0.0, dt = cfg.dt_init;
    std::vector<double> Ft(g.N);
    NewtonTrace last;
    // moment of the zero section, outside the grid
    const bool section = phi.closure != ClosureKind::Origin;
    double T = section ? core_fit(g, moments(bg, D, phi.phi).tau).T : 0.0;
    while (t < 1.0) {
        const double tn = std::min(1.0, t + dt);
        for (int j = 0; j < g.N; ++j) Ft[j] = tn * F.F[j];
        NewtonTrace tr;
        try {
            auto p = newton_solve(spec, bg, Ft, phi, cfg, &tr);
            if (section) {
                // class value (1-t) tau0_bg + t tau0*, which the solution has to realize
                const double Tc = (1.0 - tn) * bg.params().tau0 + tn * spec.tau0_star();
                const double Tn = core_fit(g, moments(bg, D, p.phi).tau).T;
                if (!(Tn > cfg.safeguard * T) || !(Tc > 0.0) || std::abs(Tn - Tc) > cfg.section_tol * T)
                    throw NonKahlerError("zero-section moment " + std::to_string(Tn) + " (class value " +
                                             std::to_string(Tc) + ") at t=" + std::to_string(tn),
                                         0);
                T = Tn;
            }
            const int iters = int(tr.residuals.size()) - 1;
            rep.path.push_back({tn, tn - t, iters, tr.damping_events, tr.residuals.back(), true});
            phi = std::move(p);
            t = tn;
            last = tr;
            if (iters <= cfg.easy_iters) dt = std::min(cfg.dt_max, dt * cfg.dt_grow);
        } catch (const Error& e) {
            if (!dynamic_cast<const NoConvergenceError*>(&e) && !dynamic_cast<const StepFailureError*>(&e) &&
                !dynamic_cast<const NonKahlerError*>(&e))
                throw;
            const int iters = std::max(0, int(tr.residuals.size()) - 1);
            const double res = tr.residuals.empty() ? std::numeric_limits<double>::infinity() : tr.residuals.back();
            rep.path.push_back({tn, tn - t, iters, tr.damping_events, res, false});
            dt *= 0.5;
            if (dt < cfg.dt_min) {
                const int node = weakest_node(bg, D, phi.phi);
                FailureRecord fr{"path_stall", e.what(), t, node};
                rep.failure = fr;
                rep.newton_history = last.residuals;
                if (partial) *partial = rep;
                throw PathStallError("continuity path stalled at t=" + std::to_string(t) + " near node " +
                                         std::to_string(node) + " (x=" + std::to_string(g.x(node)) + ")",
                                     t, node);
            }
        }
    }
    SolitonSolution s = assemble_solution(spec, bg, F, phi);
    rep.newton_history = last.residuals;
    rep.floor_limited = last.floor_limited;
    rep.final_residual = s.report.final_residual;
    rep.converged = true;
    s.report = rep;
    if (partial) *partial = rep;
    return s;
}

PotentialProfile transfer(const PotentialProfile& p, const RadialGrid& from, const RadialGrid& to) {
    PotentialProfile q = p;
    q.phi.resize(to.N);
    for (int j = 0; j < to.N; ++j) q.phi[j] = interpolate(from, p.phi, to.x(j))[0];
    return q;
}

PotentialProfile transfer(const PotentialProfile& p, const BackgroundMetric& from, const BackgroundMetric& to) {
    const RadialGrid& gf = from.grid();
    const RadialGrid& gt = to.grid();
    // u - u_end stays bounded, unlike u itself
    std::vector<double> rel(gf.N);
    for (int j = 0; j < gf.N; ++j) rel[j] = p.phi[j] + from.du_end[j];
    PotentialProfile q = p;
    q.phi.resize(gt.N);
    for (int j = 0; j < gt.N; ++j) q.phi[j] = interpolate(gf, rel, gt.x(j))[0] - to.du_end[j];
    q.recenter();
    return q;
}

CoreFit core_fit(const RadialGrid& g, const std::vector<double>& tau) {
    const int j1 = std::min(g.N - 1, int(std::lround(0.5 / g.h()))), j2 = std::min(g.N - 1, 2 * j1);
    Eigen::Matrix3d A;
    Eigen::Vector3d b;
    int r = 0;
    for (int j : {0, j1, j2}) {
        const double rho = std::exp(g.x(j));
        A.row(r) << 1.0, rho, rho * rho;
        b(r++) = tau[j];
    }
    const Eigen::Vector3d c = A.fullPivLu().solve(b);
    return {c(0), c(1), c(2)};
}

double core_slope(const SolitonSolution& sol) { return core_fit(sol.grid, sol.tau).B; }

SolitonSolution solve_on_grid(const ConeSpec& spec, const RadialGrid& grid, const SolverConfig& cfg,
                              const PotentialProfile* warm, SolveReport* partial) {
    return solve_on_background(spec, build_background(spec, grid), cfg, warm, partial);
}

SolitonSolution solve_on_background(const ConeSpec& spec, const BackgroundMetric& bg, const SolverConfig& cfg,
                                    const PotentialProfile* warm, SolveReport* partial) {
    const RadialGrid& grid = bg.grid();
    RHSProfile rhs = build_rhs(spec, grid, bg);
    if (warm) {
        NewtonTrace tr;
        try {
            auto phi = newton_solve(spec, bg, rhs.F, *warm, cfg, &tr);
            SolitonSolution s = assemble_solution(spec, bg, rhs, phi);
            const int iters = int(tr.residuals.size()) - 1;
            s.report.path.push_back({1.0, 0.0, iters, tr.damping_events, tr.residuals.back(), true});
            s.report.newton_history = tr.residuals;
            s.report.floor_limited = tr.floor_limited;
            if (partial) *partial = s.report;
            return s;
        } catch (const NoConvergenceError&) {
        } catch (const StepFailureError&) {
        } catch (const NonKahlerError&) {
        }
    }
    return continuity_solve(spec, bg, rhs, cfg, nullptr, partial);
}

SolitonSolution solve_soliton(const ConeSpec& spec, const SolverConfig& cfg, const SolveOptions& opt,
                              SolveReport* partial) {
    spec.validate();
    cfg.validate();
    std::vector<PathStep> path;
    SolitonSolution sol;
    bool have = false;
    for (int n : cfg.ladder) {
        RadialGrid g(cfg.x_min, cfg.x_max, n);
        SolveReport part;
        try {
            if (have) {
                const double slope = cfg.adapt_core ? core_slope(sol) : 0.0;
                BackgroundMetric bg = build_background(spec, g, {}, slope > 0.0 ? slope : 0.0);
                auto warm = transfer(sol.phi, sol.bg, bg);
                sol = solve_on_background(spec, bg, cfg, &warm, &part);
            } else {
                sol = solve_on_grid(spec, g, cfg, nullptr, &part);
            }
        } catch (const PathStallError&) {
            part.path.insert(part.path.begin(), path.begin(), path.end());
            part.ladder.assign(cfg.ladder.begin(), cfg.ladder.end());
            if (partial) *partial = part;
            throw;
        }
        path.insert(path.end(), sol.report.path.begin(), sol.report.path.end());
        have = true;
    }
    sol.report.path = path;
    sol.report.ladder = cfg.ladder;
    if (opt.diagnostics) {
        DiagnosticsOptions dopt;
        dopt.curvature = opt.curvature && spec.kind == ConeKind::EuclideanResolution;
        dopt.uniqueness_seeds = opt.uniqueness_seeds;
        dopt.seed = opt.seed;
        dopt.threads = opt.threads;
        dopt.cfg = cfg;
        auto bundle = std::make_shared<DiagnosticsBundle>(run_diagnostics(sol, dopt));
        sol.report.converged_with_rate = !bundle->decay.defined || bundle->decay.rate >= 3.5;
        sol.report.diagnostics = bundle;
    }
    if (partial) *partial = sol.report;
    return sol;
}

std::vector<FamilyMember> family_solve(const ConeSpec& s0, const ConeSpec& s1, int steps, const RadialGrid& grid,
                                       const SolverConfig& cfg) {
    if (steps < 1) throw ValidationError("family needs at least one step");
    std::vector<FamilyMember> out;
    for (int i = 0; i <= steps; ++i) {
        const double t = double(i) / double(steps);
        FamilyMember m{t, cone_path(s0, s1, t), {}, 0.0, 0.0};
        try {
            m.sol = out.empty() ? solve_on_grid(m.spec, grid, cfg) : solve_on_grid(m.spec, grid, cfg, &out.back().sol.phi);
        } catch (const PathStallError& e) {
            throw PathStallError("family member t=" + std::to_string(t) + ": " + e.what(), t, e.node);
        }
        if (!out.empty()) {
            const auto& p = out.back().sol;
            const double dt = t - out.back().t;
            for (int j = 0; j < grid.N; ++j) {
                m.dphi_dt = std::max(m.dphi_dt, std::abs(m.sol.phi.value(j) - p.phi.value(j)) / dt);
                m.dtau_dt = std::max(m.dtau_dt, std::abs(m.sol.tau[j] - p.tau[j]) / (m.sol.tau[j] * dt));
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace acs
