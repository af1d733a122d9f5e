#include "acs/family_flows.hpp"
#include "acs/diagnostics.hpp"
#include "acs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace acs {

namespace {

std::vector<double> mu_grid(int nodes) {
    if (nodes < 9) throw ValidationError("flow grid needs at least 9 nodes");
    std::vector<double> mu(nodes);
    for (int j = 0; j < nodes; ++j) mu[j] = -1.0 + 2.0 * double(j) / double(nodes - 1);
    return mu;
}

void rhs(const std::vector<double>& mu, const std::vector<double>& th, std::vector<double>& out) {
    const int M = int(mu.size());
    const double h = mu[1] - mu[0];
    out.assign(M, 0.0);
    for (int j = 1; j < M - 1; ++j) {
        const double d1 = (th[j + 1] - th[j - 1]) / (2.0 * h);
        const double d2 = (th[j + 1] - 2.0 * th[j] + th[j - 1]) / (h * h);
        out[j] = 0.5 * (th[j] * d2 - d1 * d1) + th[j] - mu[j] * d1;
    }
}

std::vector<double> second_derivative(const std::vector<double>& mu, const std::vector<double>& th) {
    const int M = int(mu.size());
    const double h = mu[1] - mu[0];
    std::vector<double> d2(M);
    for (int j = 1; j < M - 1; ++j) d2[j] = (th[j + 1] - 2.0 * th[j] + th[j - 1]) / (h * h);
    d2[0] = (2.0 * th[0] - 5.0 * th[1] + 4.0 * th[2] - th[3]) / (h * h);
    d2[M - 1] = (2.0 * th[M - 1] - 5.0 * th[M - 2] + 4.0 * th[M - 3] - th[M - 4]) / (h * h);
    return d2;
}

} // namespace

FlowState fubini_study_state(int nodes) { return perturbed_state(nodes, 0.0); }

FlowState perturbed_state(int nodes, double eps, double eps2) {
    FlowState s;
    s.mu = mu_grid(nodes);
    s.theta.resize(nodes);
    for (int j = 0; j < nodes; ++j) {
        const double m = s.mu[j], b = 1.0 - m * m;
        s.theta[j] = b * (1.0 + eps * b + eps2 * m * b);
    }
    s.theta.front() = s.theta.back() = 0.0;
    return s;
}

FlowSample flow_sample(const FlowState& s) {
    const auto d2 = second_derivative(s.mu, s.theta);
    const int M = int(s.mu.size());
    const double h = s.mu[1] - s.mu[0];
    FlowSample f{s.t, 0.0, std::numeric_limits<double>::infinity(), 0.0, 0.0};
    double gb = 0;
    for (int j = 0; j < M; ++j) {
        const double sc = -d2[j];
        f.sup_dev = std::max(f.sup_dev, std::abs(sc - 2.0));
        f.min_curvature = std::min(f.min_curvature, 0.5 * sc);
        const double w = (j == 0 || j == M - 1) ? 0.5 : 1.0;
        gb += w * sc * h;
        f.area += w * h;
    }
    const double pi = std::numbers::pi;
    f.area *= 2.0 * pi;
    f.gauss_bonnet = 2.0 * pi * gb / (8.0 * pi);
    return f;
}

FlowResult transverse_krf_run(const FlowState& initial, double t_end, const FlowOptions& opt) {
    const int M = int(initial.mu.size());
    if (M < 9 || initial.theta.size() != initial.mu.size()) throw ValidationError("bad flow state");
    for (int j = 1; j < M - 1; ++j)
        if (!(initial.theta[j] > 0.0)) throw FlowError("initial profile not positive");
    FlowResult res;
    FlowState s = initial;
    double dt = opt.dt;
    res.trace.push_back(flow_sample(s));
    double next_record = s.t + opt.record_every;
    std::vector<double> k1, k2, k3, k4, tmp(M), cand(M);
    while (s.t < t_end - 1e-12) {
        const double step = std::min({dt, t_end - s.t, next_record - s.t});
        rhs(s.mu, s.theta, k1);
        for (int j = 0; j < M; ++j) tmp[j] = s.theta[j] + 0.5 * step * k1[j];
        rhs(s.mu, tmp, k2);
        for (int j = 0; j < M; ++j) tmp[j] = s.theta[j] + 0.5 * step * k2[j];
        rhs(s.mu, tmp, k3);
        for (int j = 0; j < M; ++j) tmp[j] = s.theta[j] + step * k3[j];
        rhs(s.mu, tmp, k4);
        bool ok = true;
        for (int j = 0; j < M; ++j) {
            cand[j] = s.theta[j] + step / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            if (j > 0 && j < M - 1 && !(cand[j] > 0.0)) ok = false;
        }
        if (!ok) {
            ++res.rejected;
            dt *= 0.5;
            if (dt < opt.dt_min) throw FlowError("flow timestep underflow at t=" + std::to_string(s.t));
            continue;
        }
        s.theta.swap(cand);
        s.t += step;
        for (int j = 0; j < M; ++j) res.max_change = std::max(res.max_change, std::abs(s.theta[j] - initial.theta[j]));
        if (s.t >= next_record - 1e-12) {
            res.trace.push_back(flow_sample(s));
            next_record += opt.record_every;
        }
    }
    if (res.trace.back().t < s.t) res.trace.push_back(flow_sample(s));
    res.final = s;
    return res;
}

FamilyFlowRecord family_with_flow(const ConeSpec& s0, const ConeSpec& s1, const std::vector<FlowSample>& trace,
                                  int members, const RadialGrid& grid, const SolverConfig& cfg,
                                  const std::vector<double>& radii) {
    if (trace.empty() || members < 1) throw ValidationError("family_with_flow needs a trace and members >= 1");
    FamilyFlowRecord rec;
    rec.note = "radially basic surrogate: the flow enters only through a(progress); non-invariant deformations "
               "are not coupled";
    const double dev0 = trace.front().sup_dev;
    const double t0 = trace.front().t, t1 = trace.back().t;
    PotentialProfile warm;
    bool have = false;
    rec.all_converged = rec.all_positive = true;
    for (int i = 0; i <= members; ++i) {
        const double tf = t0 + (t1 - t0) * double(i) / double(members);
        auto it = std::min_element(trace.begin(), trace.end(), [&](const FlowSample& a, const FlowSample& b) {
            return std::abs(a.t - tf) < std::abs(b.t - tf);
        });
        FamilyFlowMember m;
        m.flow_t = it->t;
        m.progress = dev0 > 0 ? std::clamp(1.0 - it->sup_dev / dev0, 0.0, 1.0) : 0.0;
        const ConeSpec spec = cone_path(s0, s1, m.progress);
        m.a = spec.a;
        try {
            SolitonSolution sol = solve_on_grid(spec, grid, cfg, have ? &warm : nullptr);
            m.converged = true;
            m.residual = sol.report.final_residual;
            warm = sol.phi;
            have = true;
            if (spec.kind == ConeKind::EuclideanResolution) {
                const auto cs = curvature_spectrum(sol, radii);
                m.min_eigenvalue = cs.min_eigenvalue;
                m.outer_radial_limit = cs.radial_limit;
                if (!(cs.positive)) rec.all_positive = false;
            }
        } catch (const Error& e) {
            m.failure = e.what();
            rec.all_converged = false;
            rec.all_positive = false;
        }
        rec.members.push_back(m);
    }
    return rec;
}

} // namespace acs
