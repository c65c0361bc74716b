// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "specflow/flows.hpp"
#include "specflow/oracle.hpp"
#include "specflow/spectral.hpp"
#include "specflow/thermo.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace specflow;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [FAIL]");
    }
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

bool report(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < limit_s, fmt("runtime %.1fs", secs) + fmt(" < %.0fs", limit_s));
    std::printf("criterion %d %s: %s (%s)\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    return o.pass;
}

// 1 ----------------------------------------------------------------------

Outcome appendix_suite() {
    Outcome o;
    const double betas[] = {0.5, 1.0, 2.0, 4.0};
    bool classic = true;
    double scaling = 0.0, cocycle = 0.0, gibbs = 0.0;
    for (int k = 0; k < 100; ++k) {
        const int n = 1 + k % 8;
        const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(k);
        const FiniteModel m = FiniteModel::random(n, seed);
        const MeasureFrame f = MeasureFrame::of(m);
        for (double b : betas) {
            classic = classic && verify_classic(m, b).equal;
            const double expect = std::pow(b, -0.5 * n);
            scaling = std::max(scaling, std::abs(jacobian(f, f.rescaled(b)) - expect) / expect);
            const double tau = 1.0 / b;
            const double dS = numeric_derivative([&m](double t) { return entropy(m, 1.0 / t); }, tau);
            const GibbsStats g = gibbs_stats(m, b);
            const double closed = g.std_energy * g.std_energy / (tau * tau * tau);
            gibbs = std::max(gibbs, std::abs(dS - closed) / closed);
        }
        const MeasureFrame f1 = MeasureFrame::of(FiniteModel::random(n, seed + 5000));
        const MeasureFrame f2 = MeasureFrame::of(FiniteModel::random(n, seed + 9000));
        const double j02 = jacobian(f, f2);
        cocycle = std::max(cocycle, std::abs(j02 - jacobian(f, f1) * jacobian(f1, f2)) / j02);
    }
    o.require(classic, "classic equality 100 models x 4 betas within 1e-12");
    o.require(scaling <= 1e-12, fmt("jacobian scaling err %.1e", scaling));
    o.require(cocycle <= 1e-10, fmt("cocycle err %.1e", cocycle));
    o.require(gibbs <= 1e-10, fmt("dS/dtau vs sigma^2/tau^3 err %.1e", gibbs));

    int mc_ok = 0;
    for (int k = 0; k < 3; ++k) {
        const FiniteModel m = FiniteModel::random(2 + 3 * k, 77 + static_cast<std::uint64_t>(k));
        const double beta = betas[k + 1];
        const McGibbsStats mg = mc_gibbs_stats(m, beta, 1000000, 31 + static_cast<std::uint64_t>(k));
        const GibbsStats g = gibbs_stats(m, beta);
        const double var = g.std_energy * g.std_energy;
        const McEstimate z = mc_partition(m, beta, 1000000, 41 + static_cast<std::uint64_t>(k));
        if (std::abs(mg.variance - var) <= 3.0 * mg.variance_error &&
            std::abs(z.estimate - exact_partition(m, beta)) <= 3.0 * z.std_error)
            ++mc_ok;
    }
    o.require(mc_ok == 3, std::to_string(mc_ok) + "/3 MC (1e6 samples) within 3 sigma");
    return o;
}

// 2 ----------------------------------------------------------------------

Outcome zeta_backbone() {
    Outcome o;
    struct Fixture {
        const char* name;
        Spectrum s;
        double zeta0;
    };
    const Fixture fixtures[] = {{"sphere", analytic_sphere_spectrum(200), -2.0 / 3.0},
                                {"torus", analytic_torus_spectrum(60), -1.0}};
    for (const Fixture& fx : fixtures) {
        const ZetaResult base = log_det_zeta(fx.s);
        o.require(std::abs(base.zeta0_empirical - fx.zeta0) <= 0.01,
                  std::string(fx.name) + fmt(" zeta(0) %.6f", base.zeta0_empirical));
        double scaling = 0.0;
        for (double beta : {0.5, 2.0, 10.0}) {
            const double d = log_det_zeta(fx.s.scaled(beta)).log_det - base.log_det;
            scaling = std::max(scaling, std::abs(d - fx.zeta0 * std::log(beta)));
        }
        o.require(scaling <= 1e-6, std::string(fx.name) + fmt(" scaling err %.1e", scaling));
        double lo = INFINITY, hi = -INFINITY;
        for (int k = 0; k <= 6; ++k) {
            ZetaOptions z;
            z.t0 = 0.5 + 0.25 * k;
            const double ld = log_det_zeta(fx.s, z).log_det;
            lo = std::min(lo, ld);
            hi = std::max(hi, ld);
        }
        o.require(hi - lo < 1e-4, std::string(fx.name) + fmt(" t0 spread %.1e", hi - lo));
    }
    return o;
}

// 3 ----------------------------------------------------------------------

Field low_frequency(const TriMesh& m, double amplitude) {
    Field f(m.num_vertices());
    for (int i = 0; i < f.size(); ++i) {
        const auto p = m.vertices().row(i);
        f[i] = 2.0 * p(0) * p(1) + 0.5 * p(2);
    }
    return f * (amplitude / f.cwiseAbs().maxCoeff());
}

double polyakov_error(int subdivisions, bool constant) {
    const ConformalMetric h = base_metric(generate_icosphere(subdivisions));
    const Field psi = constant ? Field::Constant(h.num_vertices(), 0.3) : Field(0.3 * h.mesh().vertices().col(2));
    const double lhs = log_det_laplacian(scale_conformal(h, 0.5 * psi)).zeta.log_det - log_det_laplacian(h).zeta.log_det;
    const double rhs = polyakov_rhs(h, psi);
    return std::abs(lhs - rhs) / std::abs(rhs);
}

Outcome polyakov() {
    Outcome o;
    const double e4 = polyakov_error(4, false), e5 = polyakov_error(5, false);
    o.require(e4 <= 0.05, fmt("psi = 0.3 z, subdivision 4 rel err %.3e", e4));
    o.require(e5 < e4, fmt("subdivision 5 rel err %.3e", e5));
    const double ec = polyakov_error(4, true);
    o.require(ec <= 1e-3, fmt("constant psi rel err %.1e", ec));
    return o;
}

// 4 ----------------------------------------------------------------------

Outcome entropy_closed_forms() {
    Outcome o;
    double gibbs = 0.0, sf = 0.0, rate = 0.0;
    for (int chi : {-4, -2, 0, 2, 6}) {
        const auto logZ = [chi](double b) { return log_partition_conformal(b, chi); };
        for (int k = 0; k <= 40; ++k) {
            const double beta = 0.1 * std::pow(100.0, k / 40.0);
            const double closed = (0.5 - chi / 12.0) * (std::log(beta) - 1.0);
            gibbs = std::max(gibbs, std::abs(gibbs_entropy(logZ, beta) - closed));
            const auto F = [&logZ](double tau) { return -tau * logZ(1.0 / tau); };
            sf = std::max(sf, std::abs(entropy_from_free_energy(F, 1.0 / beta) - closed));
        }
    }
    for (int genus : {0, 1, 2})
        for (double tau : {0.2, 1.0, 5.0}) {
            const double expect = -((2.0 + genus) / 6.0) / tau;
            rate = std::max(rate, std::abs(entropy_rate_tau(tau, 2 - 2 * genus) - expect));
        }
    o.require(gibbs <= 1e-10, fmt("gibbs route err %.1e", gibbs));
    o.require(sf <= 1e-8, fmt("free energy route err %.1e", sf));
    o.require(rate <= 1e-14, fmt("rate err %.1e", rate));
    return o;
}

// 5 ----------------------------------------------------------------------

Outcome flow_harness() {
    Outcome o;
    const TriMesh mesh = generate_icosphere(3);
    // Radius sqrt(2): area 8 pi, which survives the 8 pi per unit time loss up to t = 0.8.
    const ConformalMetric g = scale_conformal(base_metric(mesh), Field::Constant(mesh.num_vertices(), 0.5 * std::log(2.0)));
    const FlowState s0 = FlowState::start(g, 1.0);
    std::vector<Probe> probes;
    for (int k = 0; k < 3; ++k) probes.push_back({std::string(1, "xyz"[k]), OperatorKind::laplacian, mesh.vertices().col(k)});
    probes.push_back({"harmonic", OperatorKind::laplacian, low_frequency(mesh, 1.0)});

    FlowOptions opt;
    opt.t_end = 0.8;
    opt.dt = 0.002;
    opt.sample_every = 10;
    const FlowTrace tr = run_flow(s0, PsiSource::ricci2d(), probes, opt);
    o.require(!tr.halted && std::abs(tr.records.back().tau - 0.2) < 1e-9, fmt("final tau %.3f", tr.records.back().tau));

    const double drift = invariance_report(tr).max_rel_energy_drift;
    o.require(drift <= 1e-10, fmt("(a) probe drift %.1e", drift));

    const MonotonicityReport mono = monotonicity_report(tr);
    bool increasing = true;
    for (std::size_t k = 0; k + 1 < tr.records.size(); ++k) increasing = increasing && tr.records[k + 1].S > tr.records[k].S;
    o.require(mono.is_monotone && increasing, "(b) S strictly increasing");
    o.require(mono.numeric_vs_closed_form <= 1e-8, fmt("(b) dS/dt err %.1e", mono.numeric_vs_closed_form));

    double gb = 0.0;
    for (const FlowRecord& r : tr.records) gb = std::max(gb, std::abs(r.gauss_bonnet_residual));
    o.require(gb <= 1e-6, fmt("(c) Gauss-Bonnet residual %.1e", gb));

    auto final_u = [&](double dt) {
        FlowOptions q = opt;
        q.dt = dt;
        q.sample_every = 1 << 30;
        return run_flow(s0, PsiSource::ricci2d(), {}, q).final_state->metric.u();
    };
    const Field u1 = final_u(opt.dt), u2 = final_u(opt.dt / 2), u4 = final_u(opt.dt / 4);
    const double ratio = (u1 - u4).cwiseAbs().maxCoeff() / (u2 - u4).cwiseAbs().maxCoeff();
    o.require(ratio >= 12.0, fmt("(d) RK4 error reduction %.1fx", ratio));
    return o;
}

// 6 ----------------------------------------------------------------------

Outcome drifted_reduction() {
    Outcome o;
    const TriMesh mesh = generate_icosphere(2);
    const ConformalMetric g = base_metric(mesh);
    const int n = g.num_vertices();

    const Spectrum lap = eigen_spectrum(assemble(g, OperatorSpec::laplacian()));
    const Spectrum drf = eigen_spectrum(assemble(g, OperatorSpec::drifted(Field::Zero(n))));
    double spec = 0.0;
    for (int i = 1; i < lap.size(); ++i)
        spec = std::max(spec, std::abs(drf.eigenvalues[i] - lap.eigenvalues[i]) / lap.eigenvalues[i]);
    o.require(spec <= 1e-10, fmt("f=0 spectrum rel err %.1e", spec));

    std::mt19937_64 rng(2718);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto random_field = [&](double scale) {
        Field x(n);
        for (auto& v : x) v = scale * nd(rng);
        return x;
    };

    FlowState s = FlowState::start(g, 1.0);
    s.f = random_field(0.3);
    const Field z = mesh.vertices().col(2);
    const PsiSource psi = PsiSource::prescribed([z](const ConformalMetric&, double t) -> Field { return (0.5 + t) * z; });
    FlowOptions fo;
    fo.t_end = 0.5;
    fo.dt = 0.01;
    const FlowTrace tr = run_flow(s, psi, {{"drifted", OperatorKind::drifted, random_field(1.0)}}, fo);
    const bool frozen = tr.final_state->f == s.f;
    const double drift = invariance_report(tr).max_rel_energy_drift;
    o.require(frozen && drift <= 1e-10, fmt("n=2 f frozen, drifted probe drift %.1e", drift));

    double worst_order = INFINITY;
    for (int k = 0; k < 20; ++k) {
        const Field phi = random_field(1.0), u = random_field(0.2), f = random_field(0.3), V = random_field(1.0);
        const EnergyRates r{random_field(0.5), random_field(0.5), random_field(0.5), std::nullopt};
        const ConformalMetric m = g.with_u(u);
        auto E = [&](double t) {
            const OperatorSpec spec = OperatorSpec::schrodinger(f + t * r.f_dot, V + t * r.V_dot);
            return dirichlet_energy(assemble(m.with_u(u + 0.5 * t * r.psi), spec), phi);
        };
        const double exact = energy_variation(m, OperatorSpec::schrodinger(f, V), phi, r);
        auto err = [&](double h) { return std::abs((E(h) - E(-h)) / (2 * h) - exact); };
        worst_order = std::min(worst_order, std::log2(err(2e-2) / err(1e-2)));
    }
    o.require(worst_order >= 1.9, fmt("energy_variation min observed order %.2f over 20 cases", worst_order));
    return o;
}

} // namespace

int main() {
    bool ok = true;
    ok &= report(1, "appendix suite", 30, appendix_suite);
    ok &= report(2, "zeta backbone", 60, zeta_backbone);
    ok &= report(3, "Polyakov identity", 600, polyakov);
    ok &= report(4, "entropy closed forms", 1, entropy_closed_forms);
    ok &= report(5, "flow harness", 120, flow_harness);
    ok &= report(6, "drifted reduction", 120, drifted_reduction);
    std::printf("%s\n", ok ? "ALL PASS" : "SOME FAILED");
    return ok ? 0 : 1;
}
