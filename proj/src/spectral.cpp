#include "specflow/spectral.hpp"
#include "specflow/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace specflow {
namespace {

constexpr double kZeroThreshold = 1e-9; // relative to lambda_max

int count_kernel(Eigen::VectorXd& eigenvalues, double scale) {
    int kernel = 0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        if (std::abs(eigenvalues[i]) < kZeroThreshold * scale) {
            eigenvalues[i] = 0.0;
            ++kernel;
        }
    }
    return kernel;
}

double e1(double x) { return boost::math::expint(1, x); }

/// Weyl completion of the heat trace above the completeness bound.
double weyl_tail(const Spectrum& s, double t) {
    if (!std::isfinite(s.complete_below)) return 0.0;
    return s.area / (4.0 * std::numbers::pi * t) * std::exp(-s.complete_below * t);
}

/// Sum over trusted nonzero eigenvalues below the completeness bound.
template <typename Fn>
double sum_trusted(const Spectrum& s, Fn&& fn) {
    double total = 0.0;
    for (int i = s.kernel_dim; i < s.trusted; ++i) {
        const double lambda = s.eigenvalues[i];
        if (lambda >= s.complete_below) break;
        total += fn(lambda);
    }
    return total;
}

/// Weyl count A Lambda/(4 pi) + z0 minus the eigenvalues actually summed;
/// placed as a point mass at the completeness bound.
double count_mismatch(const Spectrum& s) {
    if (!std::isfinite(s.complete_below)) return 0.0;
    const double summed = sum_trusted(s, [](double) { return 1.0; });
    return s.area * s.complete_below / (4.0 * std::numbers::pi) + (s.chi / 6.0 - 1.0) - summed;
}

/// Index one past the last trusted eigenvalue below the completeness bound.
int trusted_end(const Spectrum& s) {
    const double* first = s.eigenvalues.data() + s.kernel_dim;
    const double* last = s.eigenvalues.data() + std::max(s.trusted, s.kernel_dim);
    return static_cast<int>(std::lower_bound(first, last, s.complete_below) - s.eigenvalues.data());
}

double completed_heat_trace(const Spectrum& s, double t) {
    const int end = trusted_end(s);
    // Eigen's reduction sums pairwise, which keeps the cancellation against
    // the Weyl term at the rounding level.
    const double discrete = (-t * s.eigenvalues.segment(s.kernel_dim, end - s.kernel_dim).array()).exp().sum();
    return discrete + weyl_tail(s, t) +
           count_mismatch(s) * std::exp(-s.complete_below * t);
}

} // namespace

const char* to_string(SpectrumSource s) {
    switch (s) {
    case SpectrumSource::mesh: return "mesh";
    case SpectrumSource::analytic_sphere: return "analytic_sphere";
    case SpectrumSource::analytic_torus: return "analytic_torus";
    }
    return "unknown";
}

Spectrum Spectrum::scaled(double beta) const {
    Spectrum s = *this;
    s.eigenvalues *= beta;
    s.area /= beta;
    s.complete_below *= beta;
    return s;
}

// ---------------------------------------------------------------------------
// Mesh spectra

namespace {

Spectrum finish_mesh_spectrum(Eigen::VectorXd eigenvalues, const OperatorAssembly& a, int full_dim, double scale) {
    Spectrum s;
    s.source = SpectrumSource::mesh;
    s.area = a.area;
    s.chi = a.chi;
    s.kernel_dim = count_kernel(eigenvalues, scale);
    const int n = static_cast<int>(eigenvalues.size());
    const int trusted = std::max(s.kernel_dim + 1, static_cast<int>(std::ceil(kMeshTrustedFraction * full_dim)));
    if (n > trusted) {
        s.trusted = trusted;
        s.complete_below = eigenvalues[trusted];
    } else {
        // Everything computed is trusted; the last eigenvalue bounds the
        // complete part and is itself left to the Weyl completion.
        s.trusted = n - 1;
        s.complete_below = eigenvalues[n - 1];
    }
    s.eigenvalues = std::move(eigenvalues);
    return s;
}

} // namespace

Spectrum eigen_spectrum(const OperatorAssembly& assembly, std::optional<int> count) {
    const int n = assembly.size();
    if (n > kDenseVertexCap)
        throw ValidationError("dense eigensolve capped at " + std::to_string(kDenseVertexCap) + " vertices", n);
    if (count && (*count < 1 || *count > n)) throw ValidationError("requested eigenvalue count out of range");
    if (!(assembly.mass.array() > 0.0).all()) throw ValidationError("mass matrix not strictly positive");

    const Eigen::VectorXd inv_sqrt_mass = assembly.mass.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd b = Eigen::MatrixXd(assembly.energy_matrix());
    b = inv_sqrt_mass.asDiagonal() * b * inv_sqrt_mass.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
    Eigen::VectorXd values = solver.eigenvalues();
    const double scale = std::max(std::abs(values[n - 1]), std::abs(values[0]));
    if (count) values.conservativeResize(*count);
    return finish_mesh_spectrum(std::move(values), assembly, n, scale);
}

Spectrum lowest_spectrum(const OperatorAssembly& assembly, int count, double tolerance) {
    const int n = assembly.size();
    if (count < 1 || count > n) throw ValidationError("requested eigenvalue count out of range");
    if (!(assembly.mass.array() > 0.0).all()) throw ValidationError("mass matrix not strictly positive");

    const SparseMatrix k = assembly.energy_matrix();
    const Eigen::VectorXd& m = assembly.mass;
    // K - sigma M is positive definite for sigma < 0; a shift on the scale
    // of the first nonzero eigenvalue keeps the low end well separated.
    const double sigma = -4.0 * std::numbers::pi / assembly.area;
    SparseMatrix shifted = k;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma * m[i];
    Eigen::SimplicialLLT<SparseMatrix> chol(shifted);
    if (chol.info() != Eigen::Success) throw NumericalError("shifted operator factorization failed");

    const int guard = std::max(16, count / 2);
    const int block = std::min(n, count + guard);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(n, block);
    Eigen::VectorXd ritz;
    Eigen::VectorXd previous = Eigen::VectorXd::Constant(count, std::numeric_limits<double>::infinity());

    for (int iter = 0; iter < 500; ++iter) {
        const Eigen::MatrixXd rhs = m.asDiagonal() * x;
        x = chol.solve(rhs);
        // Rayleigh-Ritz in the M inner product.
        const Eigen::MatrixXd mx = m.asDiagonal() * x;
        Eigen::MatrixXd gram = x.transpose() * mx;
        Eigen::MatrixXd kr = x.transpose() * (k * x);
        kr = 0.5 * (kr + kr.transpose()).eval();
        gram = 0.5 * (gram + gram.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> rr(kr, gram);
        if (rr.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz step failed");
        x = x * rr.eigenvectors();
        ritz = rr.eigenvalues();

        const Eigen::VectorXd head = ritz.head(count);
        const double scale = std::max(1.0, head.cwiseAbs().maxCoeff());
        const double change = (head - previous).cwiseAbs().maxCoeff();
        previous = head;
        if (change < tolerance * scale) {
            Eigen::VectorXd values = head;
            return finish_mesh_spectrum(std::move(values), assembly, n, scale);
        }
    }
    throw NumericalError("subspace iteration did not converge");
}

// ---------------------------------------------------------------------------
// Analytic fixtures

Spectrum analytic_sphere_spectrum(int l_max, double radius) {
    if (l_max < 1) throw ValidationError("l_max must be at least 1");
    if (!(radius > 0.0)) throw ValidationError("radius must be positive");
    Spectrum s;
    s.source = SpectrumSource::analytic_sphere;
    s.area = 4.0 * std::numbers::pi * radius * radius;
    s.chi = 2;
    s.kernel_dim = 1;
    s.eigenvalues.resize((l_max + 1) * (l_max + 1));
    int idx = 0;
    for (int l = 0; l <= l_max; ++l)
        for (int mult = 0; mult < 2 * l + 1; ++mult) s.eigenvalues[idx++] = l * (l + 1.0) / (radius * radius);
    s.trusted = s.size();
    s.complete_below = (l_max + 1.0) * (l_max + 2.0) / (radius * radius);
    return s;
}

Spectrum analytic_torus_spectrum(int k_max, double area_scale) {
    if (k_max < 1) throw ValidationError("k_max must be at least 1");
    if (!(area_scale > 0.0)) throw ValidationError("area_scale must be positive");
    const double c = 4.0 * std::numbers::pi * std::numbers::pi / area_scale;
    std::vector<double> values;
    values.reserve((2 * k_max + 1) * (2 * k_max + 1));
    for (int p = -k_max; p <= k_max; ++p)
        for (int q = -k_max; q <= k_max; ++q) values.push_back(c * (p * p + q * q));
    std::sort(values.begin(), values.end());
    Spectrum s;
    s.source = SpectrumSource::analytic_torus;
    s.area = area_scale;
    s.chi = 0;
    s.kernel_dim = 1;
    s.eigenvalues = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    s.trusted = s.size();
    // The square of half-width k_max contains the full disc of radius k_max.
    s.complete_below = c * (k_max + 1.0) * (k_max + 1.0);
    return s;
}

double heat_trace(const Spectrum& spectrum, double t) {
    if (!(t > 0.0)) throw ValidationError("heat trace needs t > 0");
    double total = 0.0;
    for (int i = spectrum.kernel_dim; i < spectrum.size(); ++i) total += std::exp(-spectrum.eigenvalues[i] * t);
    return total;
}

double zeta0_extrapolated(const Spectrum& s, double t) {
    if (!(t > 0.0)) throw ValidationError("extrapolation time must be positive");
    const double four_pi = 4.0 * std::numbers::pi;
    const double ca = completed_heat_trace(s, t) - s.area / (four_pi * t);
    const double cb = completed_heat_trace(s, 2.0 * t) - s.area / (four_pi * 2.0 * t);
    return 2.0 * ca - cb;
}

// ---------------------------------------------------------------------------
// Zeta determinant

ZetaResult log_det_zeta(const Spectrum& s, const ZetaOptions& opt) {
    const double t0 = opt.t0;
    if (!(t0 > 0.0)) throw ValidationError("t0 must be positive");
    if (s.trusted <= s.kernel_dim) throw ValidationError("spectrum has no trusted nonzero eigenvalues");
    const double four_pi = 4.0 * std::numbers::pi;

    ZetaResult out;
    out.t0 = t0;
    out.zeta0 = s.chi / 6.0 - 1.0;
    out.tail_bound = std::isfinite(s.complete_below) ? std::exp(-s.complete_below * t0) : 0.0;

    if (s.source == SpectrumSource::mesh) {
        if (s.complete_below * t0 < 5.0)
            out.warnings.push_back("t0 below 5/lambda_trust: low modes do not dominate the large-t integral");
    } else if (out.tail_bound >= opt.tail_tolerance) {
        throw NumericalError("spectral tail bound e^{-Lambda t0} = " + std::to_string(out.tail_bound) +
                             " exceeds tolerance; increase t0 or the number of modes");
    }

    auto remainder = [&](double t) { return completed_heat_trace(s, t) - s.area / (four_pi * t) - out.zeta0; };
    auto remainder_log = [&](double x) { return remainder(std::exp(x)); };

    // int_t0^inf theta/t: exponential integrals for the discrete part and the
    // closed form of the Weyl completion.
    double large = sum_trusted(s, [t0](double lambda) { return e1(lambda * t0); });
    if (std::isfinite(s.complete_below)) {
        const double x = s.complete_below * t0;
        large += s.area / (four_pi * t0) * (std::exp(-x) - x * e1(x)) + count_mismatch(s) * e1(x);
    }

    // int_0^t0 r/t: quadrature where the heat trace is evaluable, a linear
    // remainder model below.
    const double t_lo = std::isfinite(s.complete_below) ? std::min(t0, opt.small_t_cutoff / s.complete_below) : 0.0;
    double small = 0.0;
    if (t_lo < t0) {
        double err = 0.0;
        // In s = ln t the integrand r(e^s) is smooth and of one scale.
        small = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
            remainder_log, std::log(t_lo), std::log(t0), 6, opt.quad_tolerance, &err);
        out.quad_error = err;
        if (!(err <= 10.0 * std::max(opt.quad_tolerance * std::abs(small), 1e-10)))
            throw NumericalError("small-t quadrature did not reach the requested tolerance");
    }
    if (t_lo > 0.0) {
        if (opt.remainder) {
            small += opt.remainder->a2 * t_lo + 0.5 * opt.remainder->a3 * t_lo * t_lo;
        } else if (2.0 * t_lo <= t0) {
            // r ~ a t + b t^2 through r(t_lo) and r(2 t_lo), integrated against dt/t.
            small += (6.0 * remainder(t_lo) - remainder(2.0 * t_lo)) / 4.0;
        } else if (t_lo < t0) {
            small += remainder(t_lo);
        } else {
            out.warnings.push_back("no evaluable small-t range and no heat invariants: remainder integral taken as 0");
        }
    }

    out.zeta0_empirical = zeta0_extrapolated(s, t_lo > 0.0 ? t_lo : 1e-4);

    out.zeta_prime0 = small - s.area / (four_pi * t0) + out.zeta0 * std::log(t0) + large +
                      std::numbers::egamma * out.zeta0;
    out.log_det = -out.zeta_prime0;
    return out;
}

// ---------------------------------------------------------------------------
// Polyakov

HeatRemainder heat_remainder(const ConformalMetric& metric) {
    const CurvatureField c = curvature(metric);
    const double pi = std::numbers::pi;
    const double r2 = (c.R.array().square() * c.vertex_areas.array()).sum();
    const double r3 = (c.R.array().cube() * c.vertex_areas.array()).sum();
    // |grad R|^2 dA is conformally invariant on a surface.
    const double grad_r2 = c.R.dot(metric.base().stiffness * c.R);
    return {r2 / (240.0 * pi), (8.0 * r3 - 18.0 * grad_r2) / (4.0 * pi * 5040.0)};
}

MeshLogDet log_det_laplacian(const ConformalMetric& metric, const MeshZetaOptions& options) {
    const OperatorAssembly a = assemble(metric, OperatorSpec::laplacian());
    const double t0 = options.relative_t0 * a.area / (4.0 * std::numbers::pi);
    const int n = a.size();

    // Weyl estimate of the count below cutoff/t0, padded; grown until the
    // completeness bound clears the cutoff.
    int count = std::min(n, static_cast<int>(std::ceil(1.5 * options.cutoff / options.relative_t0)) + 24);
    Spectrum spectrum;
    for (;;) {
        spectrum = lowest_spectrum(a, count);
        if (spectrum.complete_below * t0 >= options.cutoff || count == n) break;
        count = std::min(n, 2 * count);
    }

    ZetaOptions zo;
    zo.t0 = t0;
    zo.small_t_cutoff = std::numeric_limits<double>::infinity();
    zo.remainder = heat_remainder(metric);
    return {log_det_zeta(spectrum, zo), std::move(spectrum)};
}

double polyakov_rhs(const ConformalMetric& h, const Field& psi) {
    if (psi.size() != h.num_vertices()) throw ValidationError("psi size does not match vertex count");
    if (!psi.allFinite()) throw ValidationError("non-finite psi");
    const CurvatureField c = curvature(h);
    // |grad psi|^2 dA is conformally invariant in 2D: base stiffness form.
    const double gradient = psi.dot(h.base().stiffness * psi);
    const double curvature_term = 2.0 * (psi.array() * c.R.array() * c.vertex_areas.array()).sum();
    const double area_ratio = total_area(scale_conformal(h, 0.5 * psi)) / total_area(h);
    return -(gradient + curvature_term) / (48.0 * std::numbers::pi) + std::log(area_ratio);
}

double conformal_variation_logdet(const ConformalMetric& metric, const Field& psi) {
    if (psi.size() != metric.num_vertices()) throw ValidationError("psi size does not match vertex count");
    const CurvatureField c = curvature(metric);
    const double area = total_area(metric);
    const Eigen::ArrayXd integrand = psi.array() * (c.R.array() / (24.0 * std::numbers::pi) - 1.0 / area);
    return -(integrand * c.vertex_areas.array()).sum();
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
    const auto prec = out.precision(17);
    out << "index,eigenvalue\n";
    for (int i = 0; i < spectrum.size(); ++i) out << i << ',' << spectrum.eigenvalues[i] << '\n';
    out.precision(prec);
}

} // namespace specflow
