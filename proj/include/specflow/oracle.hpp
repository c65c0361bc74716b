#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "specflow/thermo.hpp"

namespace specflow {

/// R^n with inner product <x, y> = x^T G y and an operator A self-adjoint
/// with respect to it (G A symmetric), positive definite.
struct FiniteModel {
    Eigen::MatrixXd G;
    Eigen::MatrixXd A;

    int dim() const { return static_cast<int>(G.rows()); }

    /// Throws ValidationError unless G and GA are symmetric and both
    /// positive definite.
    void validate() const;

    /// Eigenvalues of A, ascending.
    Eigen::VectorXd eigenvalues() const;

    /// G = I, A = diag(lambda).
    static FiniteModel diagonal(const Eigen::VectorXd& lambda);
    /// Seeded random SPD metric and operator with eigenvalues in [0.5, 4].
    static FiniteModel random(int dim, std::uint64_t seed);
};

/// G-orthonormal eigenbasis of A (columns) and the metric it is
/// orthonormal for. Coordinates c of phi = basis c carry the measure
/// pi^{-n/2} dc_1...dc_n.
struct MeasureFrame {
    Eigen::MatrixXd basis;
    Eigen::MatrixXd G;

    static MeasureFrame of(const FiniteModel& model);
    /// Frame of the metric G/beta: basis scaled by sqrt(beta).
    MeasureFrame rescaled(double beta) const;
};

/// prod_i (beta lambda_i)^{-1/2}.
double exact_partition(const FiniteModel& model, double beta);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    long samples = 0;
    std::uint64_t seed = 0;
};

inline constexpr long kMinMcSamples = 10000;
inline constexpr int kMaxMcDim = 8;

/// Importance-sampled int e^{-beta sum lambda_i c_i^2} pi^{-n/2} dc. The
/// proposal is N(0, I/2) in coordinates rescaled by sqrt(beta lambda_min),
/// so every weight has finite variance; the rescaling is undone analytically.
/// Deterministic for a fixed seed (std::mt19937_64).
McEstimate mc_partition(const FiniteModel& model, double beta, long samples, std::uint64_t seed);

struct ClassicCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool equal = false;
};

/// Both sides of int e^{-<phi, A_{g/beta} phi>_g} Dphi_g =
/// int e^{-<phi, A_g phi>_g} Dphi_{g/beta}: the left from the spectrum of
/// beta A in g, the right from the spectrum of A times the Jacobian
/// between the g and g/beta frames. Equal within 1e-12 relative.
ClassicCheck verify_classic(const FiniteModel& model, double beta);

/// |det(a^{ij})| with phi = frame1.basis c~ = frame0.basis c, c~ = a^{ij} c.
double jacobian(const MeasureFrame& frame0, const MeasureFrame& frame1);

/// Closed-form Gaussian moments of E = <phi, A phi> under e^{-beta E}:
/// <E> = n/(2 beta), var = n/(2 beta^2).
GibbsStats gibbs_stats(const FiniteModel& model, double beta);

struct McGibbsStats {
    GibbsStats stats;
    double mean_error = 0.0;
    double variance = 0.0;
    double variance_error = 0.0;
};

/// Moments by direct sampling of the Gaussian Gibbs measure in
/// eigen-coordinates.
McGibbsStats mc_gibbs_stats(const FiniteModel& model, double beta, long samples, std::uint64_t seed);

/// log Z(beta) of a model: -(1/2) sum ln(beta lambda_i).
double log_partition(const FiniteModel& model, double beta);

/// S = log Z - beta d/dbeta log Z = log Z + n/2.
double entropy(const FiniteModel& model, double beta);

using ModelPath = std::function<FiniteModel(double t)>;

struct NormalizedPartition {
    std::vector<double> t;
    std::vector<double> ratio;        // Z_g(beta)/Z_g(1)
    std::vector<double> phi;          // d/dt log Z_g(1), central differences
    std::vector<double> measure_rate; // d/dt log J(g(t_0), g(t)), central differences
    double max_measure_residual = 0.0;
};

/// Along the path on the interior of `grid` (at least three points).
NormalizedPartition normalized_partition(const ModelPath& path, const std::vector<double>& grid, double beta);

} // namespace specflow
