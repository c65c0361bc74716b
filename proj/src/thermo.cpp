#include "specflow/thermo.hpp"
#include "specflow/error.hpp"
#include "specflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace specflow {
namespace {

double conformal_coefficient(int chi) { return 0.5 - chi / 12.0; }

void check_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(std::string(name) + " must be positive and finite");
}

} // namespace

double numeric_derivative(const ScalarFunction& fn, double x) {
    const double h = kDerivativeStep * std::max(std::abs(x), 1e-3);
    auto central = [&](double step) { return (fn(x + step) - fn(x - step)) / (2.0 * step); };
    const double d1 = central(h), d2 = central(0.5 * h);
    const double d = (4.0 * d2 - d1) / 3.0;
    if (!std::isfinite(d)) throw NumericalError("non-finite numeric derivative");
    return d;
}

ThermoState ThermoState::at(const ScalarFunction& log_Z_of_beta, double beta) {
    check_positive(beta, "beta");
    ThermoState s;
    s.beta = beta;
    s.tau = 1.0 / beta;
    s.log_Z = log_Z_of_beta(beta);
    s.S = gibbs_entropy(log_Z_of_beta, beta);
    s.F = free_energy(s);
    return s;
}

double log_partition_conformal(double beta, int chi) {
    check_positive(beta, "beta");
    return conformal_coefficient(chi) * std::log(beta);
}

double entropy_conformal(double beta, int chi) {
    check_positive(beta, "beta");
    return conformal_coefficient(chi) * (std::log(beta) - 1.0);
}

double entropy_rate_tau(double tau, int chi) {
    check_positive(tau, "tau");
    return -conformal_coefficient(chi) / tau;
}

double entropy_fixed_class(double beta, int chi, double log_det_g0) {
    return entropy_conformal(beta, chi) - 0.5 * log_det_g0;
}

double relative_entropy(const ConformalMetric& g0, const Field& psi, double beta) {
    check_positive(beta, "beta");
    if (psi.size() != g0.num_vertices()) throw ValidationError("psi size does not match vertex count");
    if (!psi.allFinite()) throw ValidationError("non-finite psi");
    const CurvatureField c = curvature(g0);
    const double gradient = psi.dot(g0.base().stiffness * psi);
    const double curvature_term = 2.0 * (psi.array() * c.R.array() * c.vertex_areas.array()).sum();
    const double area_ratio = total_area(scale_conformal(g0, 0.5 * psi)) / total_area(g0);
    return (gradient + curvature_term) / (96.0 * std::numbers::pi) - 0.5 * std::log(area_ratio);
}

double gibbs_entropy(const ScalarFunction& log_Z_of_beta, double beta) {
    check_positive(beta, "beta");
    return log_Z_of_beta(beta) - beta * numeric_derivative(log_Z_of_beta, beta);
}

double free_energy(const ThermoState& state) { return -state.tau * state.log_Z; }

double entropy_from_free_energy(const ScalarFunction& F_of_tau, double tau) {
    check_positive(tau, "tau");
    return -numeric_derivative(F_of_tau, tau);
}

DriftedEntropy entropy_drifted(double beta, const Spectrum& s, const DriftedEntropyOptions& opt) {
    check_positive(beta, "beta");
    if (!std::isfinite(s.complete_below)) throw ValidationError("drifted entropy needs a mesh spectrum");
    if (opt.band.empty()) throw ValidationError("empty sensitivity band");
    DriftedEntropy out;
    const double t_ref = opt.small_t_cutoff / s.complete_below;
    out.zeta0 = zeta0_extrapolated(s, t_ref);
    out.zeta0_min = out.zeta0_max = out.zeta0;
    for (double m : opt.band) {
        const double z = zeta0_extrapolated(s, m * t_ref);
        out.zeta0_min = std::min(out.zeta0_min, z);
        out.zeta0_max = std::max(out.zeta0_max, z);
    }
    // G(beta) = zeta(0) ln beta, so -(1/2)(G - beta G') = -(1/2) zeta(0)(ln beta - 1).
    const double w = -0.5 * (std::log(beta) - 1.0);
    out.S = w * out.zeta0;
    out.S_min = std::min(w * out.zeta0_min, w * out.zeta0_max);
    out.S_max = std::max(w * out.zeta0_min, w * out.zeta0_max);
    out.notes.push_back("excludes the unknown additive term log int e^{-E} Dphi_theta0");
    out.notes.push_back("zeta_theta(0) extrapolated from the heat trace; no heat coefficient assumed");
    return out;
}

double evaluate_W(const ConformalMetric& metric, const Field& f, double tau) {
    check_positive(tau, "tau");
    if (f.size() != metric.num_vertices()) throw ValidationError("f size does not match vertex count");
    if (!f.allFinite()) throw ValidationError("non-finite f");
    const CurvatureField c = curvature(metric);
    const Eigen::ArrayXd w = (-f.array()).exp();
    const double pointwise = ((tau * c.R.array() + f.array() - 2.0) * w * c.vertex_areas.array()).sum();
    const double gradient = tau * weighted_gradient_integral(metric, w.matrix(), f);
    return (pointwise + gradient) / (4.0 * std::numbers::pi * tau);
}

} // namespace specflow
