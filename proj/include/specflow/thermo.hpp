#pragma once

#include "specflow/metric.hpp"
#include "specflow/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace specflow {

using ScalarFunction = std::function<double(double)>;

struct ThermoState {
    double beta = 1.0;
    double tau = 1.0;
    double log_Z = 0.0;
    double S = 0.0;
    double F = 0.0;

    /// State at beta from a log partition function; S by gibbs_entropy.
    static ThermoState at(const ScalarFunction& log_Z_of_beta, double beta);
};

struct GibbsStats {
    double mean_energy = 0.0;
    double std_energy = 0.0;
};

/// Relative step of numeric_derivative.
inline constexpr double kDerivativeStep = 1e-3;

/// Central difference with relative step kDerivativeStep, Richardson
/// extrapolated once (fourth order).
double numeric_derivative(const ScalarFunction& fn, double x);

/// (1/2 - chi/12) ln beta.
double log_partition_conformal(double beta, int chi);

/// (1/2 - chi/12)(ln beta - 1).
double entropy_conformal(double beta, int chi);

/// dS/dtau = (chi/12 - 1/2)/tau.
double entropy_rate_tau(double tau, int chi);

/// Entropy within a fixed conformal class: entropy_conformal - log_det_g0/2.
double entropy_fixed_class(double beta, int chi, double log_det_g0);

/// S_{g1} - S_{g0} for g1 = e^psi g0:
///   (1/96 pi) int (|grad psi|^2 + 2 psi R_g0) dA_g0 - (1/2) log(Area(g1)/Area(g0)).
/// Independent of beta.
double relative_entropy(const ConformalMetric& metric_g0, const Field& psi, double beta);

/// S = log Z - beta d/dbeta log Z.
double gibbs_entropy(const ScalarFunction& log_Z_of_beta, double beta);

/// F = -tau log Z.
double free_energy(const ThermoState& state);

/// S = -dF/dtau.
double entropy_from_free_energy(const ScalarFunction& F_of_tau, double tau);

struct DriftedEntropyOptions {
    /// Extrapolation time in units of 1/complete_below.
    double small_t_cutoff = 30.0;
    /// Multipliers of the extrapolation time spanning the sensitivity band.
    std::vector<double> band = {0.5, 1.0, 2.0};
};

struct DriftedEntropy {
    /// -(1/2) zeta_theta(0) (ln beta - 1), up to the unknown additive
    /// constant from log int e^{-E} Dphi_theta0, which is not included.
    double S = 0.0;
    double zeta0 = 0.0;
    double zeta0_min = 0.0;
    double zeta0_max = 0.0;
    double S_min = 0.0;
    double S_max = 0.0;
    std::vector<std::string> notes;
};

DriftedEntropy entropy_drifted(double beta, const Spectrum& spectrum_theta, const DriftedEntropyOptions& options = {});

/// int (tau (R + |grad f|^2) + f - 2) (4 pi tau)^{-1} e^{-f} dA.
double evaluate_W(const ConformalMetric& metric, const Field& f, double tau);

} // namespace specflow
