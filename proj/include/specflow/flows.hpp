#pragma once

#include "specflow/metric.hpp"
#include "specflow/operators.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace specflow {

/// dg/dt = psi g, i.e. du/dt = psi/2, with df/dt = (n/2 - 1) psi and
/// dV/dt = -psi V. In coupled mode dtau/dt = -1.
struct FlowState {
    ConformalMetric metric;
    Field f;
    Field V;
    double tau = 1.0;
    double t = 0.0;
    int n = 2;
    bool coupled = true;

    /// f = V = 0, tau = 1, t = 0.
    static FlowState start(ConformalMetric metric, double tau = 1.0);
};

enum class PsiMode { prescribed, ricci2d };

using PsiFunction = std::function<Field(const ConformalMetric& metric, double t)>;

struct PsiSource {
    PsiMode mode = PsiMode::ricci2d;
    PsiFunction fn;

    /// psi = -R of the current metric, unnormalized.
    static PsiSource ricci2d() { return {}; }
    static PsiSource prescribed(PsiFunction fn) { return {PsiMode::prescribed, std::move(fn)}; }

    Field evaluate(const ConformalMetric& metric, double t) const;
};

/// Ricci flow steps must satisfy dt <= kRicciGuard / max|R|.
inline constexpr double kRicciGuard = 0.5;

/// One classical RK4 step. psi is re-evaluated at every stage.
FlowState step(const FlowState& state, const PsiSource& psi, double dt);

/// A microstate whose energy is tracked along the flow, measured with the
/// operator of `kind` built from the current f and V.
struct Probe {
    std::string id;
    OperatorKind kind = OperatorKind::laplacian;
    Field phi;
};

struct FlowRecord {
    double t = 0.0;
    double tau = 0.0;
    double S = 0.0;
    double dS_dtau = 0.0;
    std::vector<double> probe_energies; // aligned with FlowTrace::probe_ids
    double gauss_bonnet_residual = 0.0;
    double area = 0.0;
    std::optional<double> log_det;
};

struct FlowTrace {
    int chi = 0;
    std::vector<std::string> probe_ids;
    std::vector<FlowRecord> records;
    /// Set when integration stopped early because tau would reach zero.
    bool halted = false;
    std::optional<FlowState> final_state;
};

struct FlowOptions {
    double t_end = 1.0;
    double dt = 0.01;
    int sample_every = 1;
    /// Sample log det of the Laplacian every this many samples; 0 disables.
    int log_det_every = 0;
};

/// Integrates from initial.t to t_end. S and dS/dtau are the closed forms at
/// the current tau; probes are evaluated with their operator at each sample.
FlowTrace run_flow(const FlowState& initial, const PsiSource& psi, const std::vector<Probe>& probes,
                   const FlowOptions& options);

/// Dirichlet energy of a probe in the given state.
double probe_energy(const FlowState& state, const Probe& probe);

struct InvarianceReport {
    double max_rel_energy_drift = 0.0;
    std::map<std::string, double> per_probe;
};

/// max_k |E_k - E_0| / |E_0| per probe.
InvarianceReport invariance_report(const FlowTrace& trace);

struct MonotonicityReport {
    bool is_monotone = false;
    /// Largest step of S against the expected direction.
    double max_violation = 0.0;
    /// max |numeric dS/dt - (dS/dtau)(dtau/dt)| over samples.
    double numeric_vs_closed_form = 0.0;
};

/// The sign of sample-to-sample changes of S is checked against the closed
/// rate (chi/12 - 1/2)/tau times dtau/dt. The numeric rate differentiates
/// S along the sampled tau(t) by a local Richardson stencil.
MonotonicityReport monotonicity_report(const FlowTrace& trace);

/// "t,tau,S,dS_dtau,area,gb_residual,probe_<id>..." (+ ",log_det" when sampled).
void write_trace_csv(std::ostream& out, const FlowTrace& trace);

} // namespace specflow
