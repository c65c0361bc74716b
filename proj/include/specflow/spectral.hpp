#pragma once

#include "specflow/metric.hpp"
#include "specflow/operators.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace specflow {

enum class SpectrumSource { mesh, analytic_sphere, analytic_torus };

const char* to_string(SpectrumSource s);

/// Ascending eigenvalues of a self-adjoint non-negative operator.
///
/// `trusted` leading eigenvalues are considered accurate (all of them for
/// analytic spectra; the low end of a mesh spectrum). Every eigenvalue below
/// `complete_below` is present, so the heat trace may be completed above it
/// by the two-dimensional Weyl density Area/(4 pi).
struct Spectrum {
    Eigen::VectorXd eigenvalues;
    int kernel_dim = 0;
    SpectrumSource source = SpectrumSource::mesh;
    double area = 0.0;
    int chi = 0;
    int trusted = 0;
    double complete_below = std::numeric_limits<double>::infinity();

    int size() const { return static_cast<int>(eigenvalues.size()); }

    /// All eigenvalues multiplied by beta; area divided by beta, which is the
    /// spectrum of beta*A = A for the metric g/beta.
    Spectrum scaled(double beta) const;
};

/// Fraction of a mesh spectrum, counted from the bottom, treated as trusted.
inline constexpr double kMeshTrustedFraction = 0.25;
/// Largest vertex count accepted by the dense solver.
inline constexpr int kDenseVertexCap = 4000;

/// Dense generalized eigensolve S x = lambda M x with diagonal M, reduced to
/// the standard symmetric problem with M^{-1/2}. `count` limits the returned
/// eigenvalues to the lowest ones (all when empty).
Spectrum eigen_spectrum(const OperatorAssembly& assembly, std::optional<int> count = std::nullopt);

/// Lowest `count` eigenvalues through shift-invert block subspace iteration
/// on a sparse Cholesky factorization. For meshes past the dense cap.
Spectrum lowest_spectrum(const OperatorAssembly& assembly, int count, double tolerance = 1e-10);

/// l(l+1)/r^2 with multiplicity 2l+1, l = 0..l_max.
Spectrum analytic_sphere_spectrum(int l_max, double radius = 1.0);

/// 4 pi^2 (p^2 + q^2)/area_scale for |p|,|q| <= k_max on the square torus.
Spectrum analytic_torus_spectrum(int k_max, double area_scale = 1.0);

/// Sum over nonzero eigenvalues of e^{-lambda t}.
double heat_trace(const Spectrum& spectrum, double t);

/// Linear extrapolation to t = 0 of theta(t) - A/(4 pi t) from t and 2t.
/// Meaningful for mesh spectra only where t * complete_below is large, so
/// the Weyl completion does not feed the analytic value back in.
double zeta0_extrapolated(const Spectrum& spectrum, double t);

/// Coefficients of t and t^2 in the heat trace remainder r(t).
struct HeatRemainder {
    double a2 = 0.0;
    double a3 = 0.0;
};

struct ZetaOptions {
    double t0 = 1.0;
    /// Relative tolerance requested from the adaptive quadrature.
    double quad_tolerance = 1e-10;
    /// Required bound on e^{-Lambda t0} for spectra that are not completed
    /// by the Weyl density (analytic fixtures).
    double tail_tolerance = 1e-12;
    /// The heat trace is evaluated from eigenvalues only for
    /// t >= small_t_cutoff / complete_below.
    double small_t_cutoff = 30.0;
    /// Heat invariants modelling r(t) ~ a2 t + a3 t^2 below the evaluable
    /// range. When empty, that quadratic is fitted to r at the range's start.
    std::optional<HeatRemainder> remainder;
};

struct ZetaResult {
    double zeta0 = 0.0;           // chi/6 - 1
    double zeta0_empirical = 0.0; // extrapolated from the heat trace
    double zeta_prime0 = 0.0;
    double log_det = 0.0;         // -zeta_prime0
    double t0 = 0.0;
    double tail_bound = 0.0;      // e^{-Lambda t0}
    double quad_error = 0.0;
    std::vector<std::string> warnings;
};

/// Zeta-regularized log determinant over the nonzero spectrum, through the
/// Mellin transform of the heat trace split at t0:
///   zeta'(0) = int_0^t0 r(t)/t dt - A/(4 pi t0) + z0 ln t0
///              + int_t0^inf theta(t)/t dt + gamma_E z0
/// with r(t) = theta(t) - A/(4 pi t) - z0 and z0 = chi/6 - 1.
ZetaResult log_det_zeta(const Spectrum& spectrum, const ZetaOptions& options = {});

/// Surface heat invariants of the current metric:
///   a2 = (1/(240 pi)) int R^2 dA
///   a3 = (1/(4 pi 7!)) int (8 R^3 - 18 |grad R|^2) dA
HeatRemainder heat_remainder(const ConformalMetric& metric);

struct MeshZetaOptions {
    /// t0 in units of Area/(4 pi), so the split is scale covariant.
    double relative_t0 = 0.5;
    /// Eigenvalues are computed until lambda * t0 reaches this value; above
    /// it the Weyl completion carries the (exponentially small) rest.
    double cutoff = 40.0;
};

struct MeshLogDet {
    ZetaResult zeta;
    Spectrum spectrum;
};

/// log det of the Laplacian of a mesh metric: low spectrum by shift-invert
/// iteration, small-t remainder from the heat invariants, Weyl completion
/// above the computed modes.
MeshLogDet log_det_laplacian(const ConformalMetric& metric, const MeshZetaOptions& options = {});

/// Right side of the Polyakov formula for g = e^psi h:
///   -(1/48 pi) int (|grad psi|_h^2 + 2 psi R_h) dA_h + log(Area(g)/Area(h)).
double polyakov_rhs(const ConformalMetric& metric_h, const Field& psi);

/// d/dt log det A along dg/dt = psi g:  -int psi (R/(24 pi) - 1/Area) dA.
double conformal_variation_logdet(const ConformalMetric& metric, const Field& psi);

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);

} // namespace specflow
