#include "specflow/flows.hpp"
#include "specflow/error.hpp"
#include "specflow/spectral.hpp"
#include "specflow/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace specflow {
namespace {

struct Rates {
    Field du, df, dV;
};

Rates rates(const FlowState& s, const Field& psi) {
    Rates r;
    r.du = 0.5 * psi;
    if (s.n != 2) r.df = (0.5 * s.n - 1.0) * psi;
    r.dV = -(psi.array() * s.V.array()).matrix();
    return r;
}

FlowState advance(const FlowState& s, const Rates& r, double h) {
    FlowState out = s;
    out.metric = s.metric.with_u(s.metric.u() + h * r.du);
    if (s.n != 2) out.f = s.f + h * r.df;
    out.V = s.V + h * r.dV;
    out.t = s.t + h;
    return out;
}

void check_state(const FlowState& s) {
    const int n = s.metric.num_vertices();
    if (s.f.size() != n || s.V.size() != n) throw ValidationError("flow fields do not match vertex count");
    if (!(s.tau > 0.0)) throw ValidationError("tau must be positive");
}

FlowRecord sample(const FlowState& s, const std::vector<Probe>& probes, int chi, bool with_log_det) {
    FlowRecord r;
    r.t = s.t;
    r.tau = s.tau;
    r.S = entropy_conformal(1.0 / s.tau, chi);
    r.dS_dtau = entropy_rate_tau(s.tau, chi);
    for (const Probe& p : probes) r.probe_energies.push_back(probe_energy(s, p));
    r.gauss_bonnet_residual = gauss_bonnet_residual(s.metric);
    r.area = total_area(s.metric);
    if (with_log_det) r.log_det = log_det_laplacian(s.metric).zeta.log_det;
    return r;
}

} // namespace

FlowState FlowState::start(ConformalMetric metric, double tau) {
    const int n = metric.num_vertices();
    return {std::move(metric), Field::Zero(n), Field::Zero(n), tau, 0.0, 2, true};
}

Field PsiSource::evaluate(const ConformalMetric& metric, double t) const {
    Field psi;
    if (mode == PsiMode::ricci2d) {
        psi = -curvature(metric).R;
    } else {
        if (!fn) throw ValidationError("prescribed psi source without a function");
        psi = fn(metric, t);
        if (psi.size() != metric.num_vertices()) throw ValidationError("psi size does not match vertex count");
    }
    if (!psi.allFinite()) throw NumericalError("non-finite psi");
    return psi;
}

FlowState step(const FlowState& s, const PsiSource& psi, double dt) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    check_state(s);
    if (s.coupled && !(s.tau - dt > 0.0)) throw NumericalError("step would take tau to zero");

    const Field psi1 = psi.evaluate(s.metric, s.t);
    if (psi.mode == PsiMode::ricci2d) {
        const double rmax = psi1.cwiseAbs().maxCoeff();
        if (dt * rmax > kRicciGuard)
            throw NumericalError("Ricci flow stability guard: dt = " + std::to_string(dt) + " exceeds " +
                                 std::to_string(kRicciGuard / rmax));
    }

    const Rates k1 = rates(s, psi1);
    const FlowState s2 = advance(s, k1, 0.5 * dt);
    const Rates k2 = rates(s2, psi.evaluate(s2.metric, s2.t));
    const FlowState s3 = advance(s, k2, 0.5 * dt);
    const Rates k3 = rates(s3, psi.evaluate(s3.metric, s3.t));
    const FlowState s4 = advance(s, k3, dt);
    const Rates k4 = rates(s4, psi.evaluate(s4.metric, s4.t));

    FlowState out = s;
    const double w = dt / 6.0;
    out.metric = s.metric.with_u(s.metric.u() + w * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du));
    if (s.n != 2) out.f = s.f + w * (k1.df + 2.0 * k2.df + 2.0 * k3.df + k4.df);
    out.V = s.V + w * (k1.dV + 2.0 * k2.dV + 2.0 * k3.dV + k4.dV);
    out.t = s.t + dt;
    if (s.coupled) out.tau = s.tau - dt;

    if (!out.metric.u().allFinite() || !out.f.allFinite() || !out.V.allFinite())
        throw NumericalError("non-finite flow state");
    return out;
}

double probe_energy(const FlowState& s, const Probe& p) {
    if (p.phi.size() != s.metric.num_vertices()) throw ValidationError("probe " + p.id + " size does not match mesh");
    if (p.kind == OperatorKind::laplacian) return p.phi.dot(s.metric.base().stiffness * p.phi);
    const OperatorSpec spec =
        p.kind == OperatorKind::drifted ? OperatorSpec::drifted(s.f) : OperatorSpec::schrodinger(s.f, s.V);
    return dirichlet_energy(assemble(s.metric, spec), p.phi);
}

FlowTrace run_flow(const FlowState& initial, const PsiSource& psi, const std::vector<Probe>& probes,
                   const FlowOptions& opt) {
    if (!(opt.dt > 0.0)) throw ValidationError("dt must be positive");
    if (opt.sample_every < 1) throw ValidationError("sample_every must be at least 1");
    if (!(opt.t_end > initial.t)) throw ValidationError("t_end must exceed the initial time");
    check_state(initial);

    FlowTrace trace;
    trace.chi = initial.metric.base().chi;
    for (const Probe& p : probes) trace.probe_ids.push_back(p.id);

    const long steps = std::lround((opt.t_end - initial.t) / opt.dt);
    int samples = 0;
    auto record = [&](const FlowState& s) {
        const bool ld = opt.log_det_every > 0 && samples % opt.log_det_every == 0;
        trace.records.push_back(sample(s, probes, trace.chi, ld));
        ++samples;
    };

    FlowState s = initial;
    record(s);
    for (long k = 1; k <= steps; ++k) {
        if (s.coupled && !(s.tau - opt.dt > 0.0)) {
            trace.halted = true;
            break;
        }
        s = step(s, psi, opt.dt);
        if (k % opt.sample_every == 0 || k == steps) record(s);
    }
    if (trace.halted && trace.records.back().t != s.t) record(s);
    trace.final_state = std::move(s);
    return trace;
}

InvarianceReport invariance_report(const FlowTrace& trace) {
    if (trace.records.size() < 2) throw ValidationError("invariance report needs at least two samples");
    InvarianceReport rep;
    for (std::size_t p = 0; p < trace.probe_ids.size(); ++p) {
        const double e0 = trace.records.front().probe_energies[p];
        double drift = 0.0;
        for (const FlowRecord& r : trace.records) {
            const double d = std::abs(r.probe_energies[p] - e0);
            drift = std::max(drift, e0 != 0.0 ? d / std::abs(e0) : d);
        }
        rep.per_probe[trace.probe_ids[p]] = drift;
        rep.max_rel_energy_drift = std::max(rep.max_rel_energy_drift, drift);
    }
    return rep;
}

MonotonicityReport monotonicity_report(const FlowTrace& trace) {
    const auto& rec = trace.records;
    if (rec.size() < 3) throw ValidationError("monotonicity report needs at least three samples");
    MonotonicityReport rep;
    rep.is_monotone = true;
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
        const double dt = rec[k + 1].t - rec[k].t;
        if (!(dt > 0.0)) throw ValidationError("trace times are not strictly increasing");
        const double tau_rate = (rec[k + 1].tau - rec[k].tau) / dt;
        const double expected = entropy_rate_tau(rec[k].tau, trace.chi) * tau_rate;
        const double dS = rec[k + 1].S - rec[k].S;
        double violation = 0.0;
        if (expected > 0.0) violation = std::max(0.0, -dS);
        else if (expected < 0.0) violation = std::max(0.0, dS);
        else violation = std::abs(dS);
        const bool ok = expected == 0.0 ? violation <= 1e-14 : violation == 0.0 && dS != 0.0;
        rep.is_monotone = rep.is_monotone && ok;
        rep.max_violation = std::max(rep.max_violation, violation);

        // Local stencil along tau(t) = tau_k + tau_rate (t - t_k).
        const double tk = rec[k].t, tauk = rec[k].tau;
        const ScalarFunction S_of_t = [&](double t) {
            return entropy_conformal(1.0 / (tauk + tau_rate * (t - tk)), trace.chi);
        };
        const double numeric = numeric_derivative(S_of_t, tk);
        rep.numeric_vs_closed_form = std::max(rep.numeric_vs_closed_form, std::abs(numeric - expected));
    }
    return rep;
}

void write_trace_csv(std::ostream& out, const FlowTrace& trace) {
    const bool ld = std::any_of(trace.records.begin(), trace.records.end(), [](const FlowRecord& r) { return r.log_det.has_value(); });
    const auto prec = out.precision(17);
    out << "t,tau,S,dS_dtau,area,gb_residual";
    for (const auto& id : trace.probe_ids) out << ",probe_" << id;
    if (ld) out << ",log_det";
    out << '\n';
    for (const FlowRecord& r : trace.records) {
        out << r.t << ',' << r.tau << ',' << r.S << ',' << r.dS_dtau << ',' << r.area << ',' << r.gauss_bonnet_residual;
        for (double e : r.probe_energies) out << ',' << e;
        if (ld) {
            out << ',';
            if (r.log_det) out << *r.log_det;
        }
        out << '\n';
    }
    out.precision(prec);
}

} // namespace specflow
