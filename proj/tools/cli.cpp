#include "cli.hpp"

#include "specflow/error.hpp"
#include "specflow/flows.hpp"
#include "specflow/io.hpp"
#include "specflow/mesh.hpp"
#include "specflow/oracle.hpp"
#include "specflow/spectral.hpp"
#include "specflow/thermo.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace specflow::cli {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Context {
    Config config;
    fs::path out_dir;
};

// ---------------------------------------------------------------------------
// Inputs

std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> w;
    for (std::string x; in >> x;) w.push_back(x);
    return w;
}

long to_long(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(what + " is not an integer: '" + s + "'");
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(what + " is not a number: '" + s + "'");
}

/// mesh = icosphere <k> | torus <m> <n> [aspect] | <path.off>
std::shared_ptr<const TriMesh> load_mesh(const Config& c) {
    const auto w = words(c.str("mesh"));
    if (w.empty()) throw ValidationError("empty mesh source");
    if (w[0] == "icosphere") {
        if (w.size() != 2) throw ValidationError("mesh = icosphere <subdivisions>");
        return std::make_shared<const TriMesh>(generate_icosphere(static_cast<int>(to_long(w[1], "subdivisions"))));
    }
    if (w[0] == "torus") {
        if (w.size() != 3 && w.size() != 4) throw ValidationError("mesh = torus <m> <n> [aspect]");
        const double aspect = w.size() == 4 ? to_double(w[3], "aspect") : 1.0;
        return std::make_shared<const TriMesh>(generate_flat_torus(static_cast<int>(to_long(w[1], "m")),
                                                                   static_cast<int>(to_long(w[2], "n")), aspect));
    }
    if (w.size() != 1) throw ValidationError("unrecognized mesh source '" + c.str("mesh") + "'");
    return std::make_shared<const TriMesh>(load_off(w[0]));
}

/// Initial metric: base metric scaled uniformly to `radius` (length scale).
ConformalMetric load_metric(const Config& c) {
    const ConformalMetric base = base_metric(load_mesh(c));
    const double radius = c.num("radius", 1.0);
    if (!(radius > 0.0)) throw ValidationError("radius must be positive");
    return scale_conformal(base, Field::Constant(base.num_vertices(), std::log(radius)));
}

Field max_normalized(Field x, double amplitude) {
    const double m = x.cwiseAbs().maxCoeff();
    if (m > 0.0) x *= amplitude / m;
    return x;
}

/// Per-vertex fields from the base embedding:
///   constant <c> | coord <c> <x|y|z> | harmonic <c> | sin <c>
/// coord and harmonic are scaled so that max |field| = c.
Field make_field(const ConformalMetric& metric, const std::string& spec) {
    const auto w = words(spec);
    if (w.size() < 2) throw ValidationError("field spec '" + spec + "' needs a kind and an amplitude");
    const double c = to_double(w[1], "field amplitude");
    const auto& p = metric.mesh().vertices();
    const int n = metric.num_vertices();
    Field f(n);
    if (w[0] == "constant" && w.size() == 2) {
        f.setConstant(c);
        return f;
    }
    if (w[0] == "coord" && w.size() == 3) {
        const int axis = w[2] == "x" ? 0 : w[2] == "y" ? 1 : w[2] == "z" ? 2 : -1;
        if (axis < 0) throw ValidationError("coord axis must be x, y or z");
        return max_normalized(p.col(axis), c);
    }
    if (w[0] == "harmonic" && w.size() == 2) {
        for (int i = 0; i < n; ++i) f[i] = 2.0 * p(i, 0) * p(i, 1) + 0.5 * p(i, 2);
        return max_normalized(f, c);
    }
    if (w[0] == "sin" && w.size() == 2) {
        for (int i = 0; i < n; ++i) f[i] = c * std::sin(std::atan2(p(i, 1), p(i, 0)));
        return f;
    }
    throw ValidationError("unrecognized field spec '" + spec + "'");
}

OperatorKind operator_kind(const std::string& s) {
    if (s == "laplacian") return OperatorKind::laplacian;
    if (s == "drifted") return OperatorKind::drifted;
    if (s == "schrodinger") return OperatorKind::schrodinger;
    throw ValidationError("unknown operator '" + s + "'");
}

OperatorSpec operator_spec(const Config& c, const ConformalMetric& m) {
    const OperatorKind kind = operator_kind(c.str("operator", "laplacian"));
    if (kind == OperatorKind::laplacian) return OperatorSpec::laplacian();
    const Field f = make_field(m, c.str("f", "constant 0"));
    if (kind == OperatorKind::drifted) return OperatorSpec::drifted(f);
    return OperatorSpec::schrodinger(f, make_field(m, c.str("V", "constant 0")));
}

// ---------------------------------------------------------------------------
// Outputs

void write_file(const Context& ctx, const std::string& name, const std::string& text) {
    fs::create_directories(ctx.out_dir);
    std::ofstream f(ctx.out_dir / name);
    if (!f) throw ValidationError("cannot write '" + (ctx.out_dir / name).string() + "'");
    f << text;
}

void write_json(const Context& ctx, const ordered_json& j) { write_file(ctx, "result.json", j.dump(2) + "\n"); }

ordered_json zeta_json(const ZetaResult& z) {
    return {{"zeta0", z.zeta0},
            {"zeta0_empirical", z.zeta0_empirical},
            {"zeta_prime0", z.zeta_prime0},
            {"log_det", z.log_det},
            {"t0", z.t0},
            {"tail_bound", z.tail_bound},
            {"quad_error", z.quad_error},
            {"warnings", z.warnings}};
}

// ---------------------------------------------------------------------------
// Commands

ordered_json cmd_mesh_info(const Context& ctx) {
    const ConformalMetric m = load_metric(ctx.config);
    const Topology t = topology(m.mesh());
    return {{"V", t.V}, {"E", t.E}, {"F", t.F}, {"chi", t.chi}, {"genus", t.genus}, {"area", total_area(m)},
            {"gauss_bonnet_residual", gauss_bonnet_residual(m)}};
}

struct SpectrumRun {
    Spectrum spectrum;
    std::optional<HeatRemainder> remainder;
    double t0_unit = 1.0; // t0 is given in these units
};

SpectrumRun logdet_spectrum(const Config& c) {
    const std::string source = c.str("spectrum", "mesh");
    if (source == "sphere")
        return {analytic_sphere_spectrum(static_cast<int>(c.integer("l_max", 200)), c.num("radius", 1.0)), {}, 1.0};
    if (source == "torus")
        return {analytic_torus_spectrum(static_cast<int>(c.integer("k_max", 60)), c.num("area", 1.0)), {}, 1.0};
    if (source != "mesh") throw ValidationError("spectrum must be mesh, sphere or torus");

    const ConformalMetric m = load_metric(c);
    const OperatorSpec spec = operator_spec(c, m);
    const OperatorAssembly a = assemble(m, spec);
    SpectrumRun run;
    run.t0_unit = a.area / (4.0 * std::numbers::pi);
    // Enough modes for lambda t0 >= cutoff at the smallest swept t0 (Weyl estimate).
    double t0_min = c.num("t0", 0.5);
    if (c.has("t0_sweep"))
        for (double t : c.nums("t0_sweep")) t0_min = std::min(t0_min, t);
    const double cutoff = c.num("cutoff", 40.0);
    const int count = std::min(a.size(), static_cast<int>(std::ceil(1.5 * cutoff / t0_min)) + 24);
    run.spectrum = a.size() <= kDenseVertexCap && c.flag("dense", false) ? eigen_spectrum(a) : lowest_spectrum(a, count);
    if (spec.kind == OperatorKind::laplacian) run.remainder = heat_remainder(m);
    return run;
}

ZetaOptions zeta_options(const SpectrumRun& run, double t0_rel, double beta) {
    ZetaOptions zo;
    zo.t0 = t0_rel * run.t0_unit / beta;
    if (run.spectrum.source == SpectrumSource::mesh) {
        zo.small_t_cutoff = std::numeric_limits<double>::infinity();
        if (run.remainder) zo.remainder = HeatRemainder{run.remainder->a2 * beta, run.remainder->a3 * beta * beta};
    }
    return zo;
}

ordered_json cmd_logdet(const Context& ctx) {
    const Config& c = ctx.config;
    const SpectrumRun run = logdet_spectrum(c);
    const double beta = c.num("beta", 1.0);
    if (!(beta > 0.0)) throw ValidationError("beta must be positive");
    const Spectrum s = beta == 1.0 ? run.spectrum : run.spectrum.scaled(beta);
    const double t0 = c.num("t0", run.spectrum.source == SpectrumSource::mesh ? 0.5 : 1.0);

    ordered_json j = zeta_json(log_det_zeta(s, zeta_options(run, t0, beta)));
    j["source"] = to_string(s.source);
    j["beta"] = beta;
    j["chi"] = s.chi;
    j["area"] = s.area;
    j["eigenvalues"] = s.size();
    if (run.spectrum.source == SpectrumSource::mesh) j["t0_units"] = "area/(4 pi)";

    if (c.has("t0_sweep")) {
        std::ostringstream csv;
        csv << "t0,log_det,zeta0_empirical\n";
        double lo = INFINITY, hi = -INFINITY;
        for (double t : c.nums("t0_sweep")) {
            const ZetaResult z = log_det_zeta(s, zeta_options(run, t, beta));
            csv << format_double(t) << ',' << format_double(z.log_det) << ',' << format_double(z.zeta0_empirical) << '\n';
            lo = std::min(lo, z.log_det);
            hi = std::max(hi, z.log_det);
        }
        write_file(ctx, "sensitivity.csv", csv.str());
        j["t0_sensitivity"] = hi - lo;
    }
    return j;
}

struct PolyakovRun {
    double lhs, rhs, log_det_h, log_det_g;
    double abs_error() const { return std::abs(lhs - rhs); }
    double rel_error() const { return rhs != 0.0 ? abs_error() / std::abs(rhs) : abs_error(); }
};

PolyakovRun polyakov_once(const Config& c) {
    const ConformalMetric h = load_metric(c);
    const Field psi = make_field(h, c.str("psi"));
    const ConformalMetric g = scale_conformal(h, 0.5 * psi);
    MeshZetaOptions mo;
    mo.relative_t0 = c.num("t0", mo.relative_t0);
    mo.cutoff = c.num("cutoff", mo.cutoff);
    const double ldh = log_det_laplacian(h, mo).zeta.log_det;
    const double ldg = psi.isZero(0.0) ? ldh : log_det_laplacian(g, mo).zeta.log_det;
    return {ldg - ldh, polyakov_rhs(h, psi), ldh, ldg};
}

ordered_json polyakov_json(const PolyakovRun& r) {
    return {{"lhs_det_difference", r.lhs}, {"rhs_integral", r.rhs}, {"abs_error", r.abs_error()},
            {"rel_error", r.rel_error()}, {"log_det_h", r.log_det_h}, {"log_det_g", r.log_det_g}};
}

ordered_json cmd_polyakov(const Context& ctx) {
    const Config& c = ctx.config;
    const PolyakovRun r = polyakov_once(c);
    ordered_json j = polyakov_json(r);
    j["convention"] = "lhs = log det A_g - log det A_h for g = e^psi h";
    if (c.flag("refine", false)) {
        const auto w = words(c.str("mesh"));
        if (w.size() != 2 || w[0] != "icosphere") throw ValidationError("refine needs mesh = icosphere <k>");
        Config finer = c;
        finer.set("mesh", "icosphere " + std::to_string(to_long(w[1], "subdivisions") + 1));
        const PolyakovRun f = polyakov_once(finer);
        j["refined"] = polyakov_json(f);
        j["error_decreased"] = f.abs_error() < r.abs_error();
        if (!(f.abs_error() < r.abs_error())) throw NumericalError("Polyakov error did not decrease under refinement");
    }
    return j;
}

std::vector<Probe> make_probes(const Config& c, const ConformalMetric& m) {
    std::vector<Probe> probes;
    if (!c.has("probes")) return probes;
    const OperatorKind kind = operator_kind(c.str("probe_operator", "laplacian"));
    std::stringstream ss(c.str("probes"));
    for (std::string id; std::getline(ss, id, ',');) {
        const auto w = words(id);
        if (w.size() != 1) throw ValidationError("probe ids are comma separated: x, y, z, harmonic or sin");
        const std::string spec = w[0] == "x" || w[0] == "y" || w[0] == "z" ? "coord 1 " + w[0] : w[0] + " 1";
        probes.push_back({w[0], kind, make_field(m, spec)});
    }
    return probes;
}

struct FlowSetup {
    FlowState state;
    PsiSource psi;
    FlowOptions options;
};

FlowSetup flow_setup(const Config& c) {
    const ConformalMetric m = load_metric(c);
    FlowState s = FlowState::start(m, c.num("tau0", 1.0));
    s.n = static_cast<int>(c.integer("n", 2));
    s.coupled = c.flag("coupled", true);
    if (c.has("f")) s.f = make_field(m, c.str("f"));
    if (c.has("V")) s.V = make_field(m, c.str("V"));
    const std::string mode = c.str("psi", "ricci2d");
    PsiSource psi = PsiSource::ricci2d();
    if (mode != "ricci2d") {
        const Field fixed = make_field(m, mode);
        psi = PsiSource::prescribed([fixed](const ConformalMetric&, double) { return fixed; });
    }
    FlowOptions o;
    o.dt = c.num("dt", 0.01);
    o.t_end = c.num("t_end", 0.8);
    o.sample_every = static_cast<int>(c.integer("sample_every", 1));
    o.log_det_every = static_cast<int>(c.integer("log_det_every", 0));
    return {std::move(s), std::move(psi), o};
}

ordered_json cmd_flow(const Context& ctx) {
    const Config& c = ctx.config;
    const FlowSetup setup = flow_setup(c);
    const std::vector<Probe> probes = make_probes(c, setup.state.metric);
    const FlowTrace trace = run_flow(setup.state, setup.psi, probes, setup.options);

    std::ostringstream csv;
    write_trace_csv(csv, trace);
    write_file(ctx, "trace.csv", csv.str());

    ordered_json j;
    j["chi"] = trace.chi;
    j["samples"] = trace.records.size();
    j["halted"] = trace.halted;
    j["final_t"] = trace.records.back().t;
    j["final_tau"] = trace.records.back().tau;
    double gb = 0.0;
    for (const FlowRecord& r : trace.records) gb = std::max(gb, std::abs(r.gauss_bonnet_residual));
    j["max_gauss_bonnet_residual"] = gb;
    if (!probes.empty() && trace.records.size() >= 2) {
        const InvarianceReport inv = invariance_report(trace);
        j["invariance"] = {{"max_rel_energy_drift", inv.max_rel_energy_drift}, {"per_probe", inv.per_probe}};
    }
    if (trace.records.size() >= 3) {
        const MonotonicityReport mono = monotonicity_report(trace);
        j["monotonicity"] = {{"is_monotone", mono.is_monotone},
                             {"max_violation", mono.max_violation},
                             {"numeric_vs_closed_form", mono.numeric_vs_closed_form}};
    }
    if (c.flag("order_check", false)) {
        auto final_u = [&](double dt) {
            FlowSetup s = setup;
            s.options.dt = dt;
            s.options.sample_every = 1 << 30;
            return run_flow(s.state, s.psi, {}, s.options).final_state->metric.u();
        };
        const double dt = setup.options.dt;
        const Field u1 = final_u(dt), u2 = final_u(dt / 2), u4 = final_u(dt / 4);
        const double e1 = (u1 - u4).cwiseAbs().maxCoeff(), e2 = (u2 - u4).cwiseAbs().maxCoeff();
        const double ratio = e1 / e2;
        j["order"] = {{"error_dt", e1}, {"error_dt_half", e2}, {"reduction", ratio}, {"reference", "dt/4"},
                      {"meets_12x", ratio >= 12.0}};
    }
    j["note"] = "the Gibbs variance gives dS/dtau = sigma^2/tau^3 >= 0 while the conformal closed form gives "
                "dS/dtau < 0 for chi < 6; both are reported, "
                "neither is adjudicated";
    return j;
}

ordered_json cmd_oracle(const Context& ctx) {
    const Config& c = ctx.config;
    const long models = c.integer("models", 100);
    const std::uint64_t seed = static_cast<std::uint64_t>(c.integer("seed", 12345));
    const long samples = c.integer("samples", 1000000);
    const std::vector<double> betas = {0.5, 1.0, 2.0, 4.0};

    bool classic_ok = true;
    double classic_worst = 0.0, scaling_worst = 0.0, cocycle_worst = 0.0, dS_worst = 0.0;
    for (long k = 0; k < models; ++k) {
        const int n = 1 + static_cast<int>(k % 8);
        const FiniteModel m = FiniteModel::random(n, seed + static_cast<std::uint64_t>(k));
        for (double b : betas) {
            const ClassicCheck cc = verify_classic(m, b);
            classic_ok = classic_ok && cc.equal;
            classic_worst = std::max(classic_worst, std::abs(cc.lhs - cc.rhs) / cc.lhs);
            const MeasureFrame f = MeasureFrame::of(m);
            const double expect = std::pow(b, -0.5 * n);
            scaling_worst = std::max(scaling_worst, std::abs(jacobian(f, f.rescaled(b)) - expect) / expect);
            const double tau = 1.0 / b;
            const auto S = [&](double t) { return entropy(m, 1.0 / t); };
            const GibbsStats gs = gibbs_stats(m, b);
            dS_worst = std::max(dS_worst,
                                std::abs(numeric_derivative(S, tau) - gs.std_energy * gs.std_energy / (tau * tau * tau)));
        }
        const MeasureFrame f0 = MeasureFrame::of(m);
        const MeasureFrame f1 = MeasureFrame::of(FiniteModel::random(n, seed + 1000 + static_cast<std::uint64_t>(k)));
        const MeasureFrame f2 = MeasureFrame::of(FiniteModel::random(n, seed + 2000 + static_cast<std::uint64_t>(k)));
        const double j02 = jacobian(f0, f2);
        cocycle_worst = std::max(cocycle_worst, std::abs(j02 - jacobian(f0, f1) * jacobian(f1, f2)) / j02);
    }

    const FiniteModel ref = FiniteModel::diagonal(Eigen::Vector2d(1.0, 4.0));
    const McEstimate mc = mc_partition(ref, 1.0, samples, seed);
    const double exact = exact_partition(ref, 1.0);
    const McGibbsStats mg = mc_gibbs_stats(ref, 1.0, samples, seed);
    const GibbsStats cg = gibbs_stats(ref, 1.0);
    const double var_exact = cg.std_energy * cg.std_energy;

    ordered_json j;
    j["classic"] = {{"models", models}, {"betas", betas}, {"all_equal", classic_ok}, {"max_rel_difference", classic_worst}};
    j["jacobian_scaling_max_rel_error"] = scaling_worst;
    j["cocycle_max_rel_error"] = cocycle_worst;
    j["dS_identity_max_residual"] = dS_worst;
    j["mc_partition"] = {{"estimate", mc.estimate}, {"std_error", mc.std_error}, {"samples", mc.samples},
                         {"seed", mc.seed}, {"exact", exact},
                         {"within_3_sigma", std::abs(mc.estimate - exact) <= 3.0 * mc.std_error}};
    j["mc_gibbs"] = {{"variance", mg.variance}, {"variance_error", mg.variance_error}, {"exact_variance", var_exact},
                     {"within_3_sigma", std::abs(mg.variance - var_exact) <= 3.0 * mg.variance_error}};
    return j;
}

ordered_json cmd_entropy(const Context& ctx) {
    const Config& c = ctx.config;
    std::optional<ConformalMetric> metric;
    if (c.has("mesh")) metric = load_metric(c);
    const int chi = c.has("chi") ? static_cast<int>(c.integer("chi"))
                    : metric ? metric->base().chi
                             : throw ValidationError("entropy needs chi or a mesh");
    const double log_det_g0 = c.num("log_det_g0", 0.0);

    std::vector<double> betas;
    if (c.has("betas")) {
        betas = c.nums("betas");
    } else {
        const double lo = c.num("beta_min", 0.5), hi = c.num("beta_max", 4.0);
        const long count = c.integer("beta_count", 8);
        if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw ValidationError("beta sweep needs 0 < beta_min < beta_max, count >= 2");
        for (long k = 0; k < count; ++k) betas.push_back(lo * std::pow(hi / lo, double(k) / double(count - 1)));
    }
    std::optional<Field> f;
    if (c.has("f")) {
        if (!metric) throw ValidationError("the W column needs a mesh");
        f = make_field(*metric, c.str("f"));
    }

    const ScalarFunction log_Z = [&](double b) { return log_partition_conformal(b, chi) - 0.5 * log_det_g0; };
    std::ostringstream csv;
    csv << "beta,tau,logZ,S,F,dS_dtau" << (f ? ",W" : "") << '\n';
    for (double b : betas) {
        const ThermoState s = ThermoState::at(log_Z, b);
        csv << format_double(s.beta) << ',' << format_double(s.tau) << ',' << format_double(s.log_Z) << ','
            << format_double(s.S) << ',' << format_double(s.F) << ',' << format_double(entropy_rate_tau(s.tau, chi));
        if (f) csv << ',' << format_double(evaluate_W(*metric, *f, s.tau));
        csv << '\n';
    }
    write_file(ctx, "sweep.csv", csv.str());

    ordered_json j;
    j["chi"] = chi;
    j["rows"] = betas.size();
    j["log_det_g0"] = log_det_g0;
    j["provenance"] = {{"logZ", "(1/2 - chi/12) ln beta - (1/2) log_det_g0"},
                       {"S", "log Z - beta d/dbeta log Z, numeric"},
                       {"F", "-tau log Z"},
                       {"dS_dtau", "(chi/12 - 1/2)/tau"},
                       {"W", "int (tau (R + |grad f|^2) + f - 2) (4 pi tau)^-1 e^-f dA at tau = 1/beta"}};
    j["unknown_constant"] = "log int e^{-E} Dphi_g0 is not included";
    j["note"] = "the Gibbs variance gives dS/dtau = sigma^2/tau^3 >= 0 while the conformal closed form gives "
                "dS/dtau < 0 for chi < 6; both are reported, "
                "neither is adjudicated";
    return j;
}

void report_error(std::ostream& err, const char* type, const std::string& message, ordered_json extra = {}) {
    ordered_json e = {{"type", type}, {"message", message}};
    for (auto& [k, v] : extra.items()) e[k] = v;
    err << ordered_json{{"error", e}}.dump() << '\n';
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"specflow: spectral geometry experiments"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    std::vector<std::string> commands = {"mesh-info", "logdet", "polyakov", "flow", "oracle", "entropy"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key=value configuration file");
        sub->add_option("--out", out_dir, "output directory");
        sub->allow_extras();
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        Context ctx;
        if (!config_path.empty()) ctx.config = Config::load(config_path);
        const auto extras = sub->remaining();
        for (std::size_t k = 0; k < extras.size(); ++k) {
            const std::string& key = extras[k];
            if (key.rfind("--", 0) != 0 || key.size() < 3 || k + 1 >= extras.size())
                throw ValidationError("overrides are --key value pairs, got '" + key + "'");
            ctx.config.set(key.substr(2), extras[++k]);
        }
        ctx.out_dir = out_dir;

        const std::string name = sub->get_name();
        ordered_json result;
        if (name == "mesh-info") result = cmd_mesh_info(ctx);
        else if (name == "logdet") result = cmd_logdet(ctx);
        else if (name == "polyakov") result = cmd_polyakov(ctx);
        else if (name == "flow") result = cmd_flow(ctx);
        else if (name == "oracle") result = cmd_oracle(ctx);
        else result = cmd_entropy(ctx);
        ordered_json full = {{"command", name}};
        full.update(result);
        write_json(ctx, full);
        out << full.dump(2) << '\n';
        return 0;
    } catch (const ParseError& e) {
        report_error(err, "parse", e.what(), {{"line", e.line()}});
        return 2;
    } catch (const ValidationError& e) {
        report_error(err, "validation", e.what(), {{"index", e.index()}});
        return 2;
    } catch (const NumericalError& e) {
        report_error(err, "numerical", e.what());
        return 3;
    } catch (const std::exception& e) {
        report_error(err, "numerical", e.what());
        return 3;
    }
}

} // namespace specflow::cli
