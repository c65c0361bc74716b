#include "specflow/oracle.hpp"
#include "specflow/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

namespace specflow {
namespace {

constexpr double kSymmetryTol = 1e-12;

bool symmetric(const Eigen::MatrixXd& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solve(const FiniteModel& m) {
    const Eigen::MatrixXd ga = m.G * m.A;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (ga + ga.transpose()), m.G);
    if (es.info() != Eigen::Success) throw NumericalError("finite model eigensolve failed");
    return es;
}

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be positive");
}

} // namespace

void FiniteModel::validate() const {
    const int n = dim();
    if (n < 1) throw ValidationError("model dimension must be at least 1");
    if (G.cols() != n || A.rows() != n || A.cols() != n) throw ValidationError("model matrices are not n x n");
    if (!G.allFinite() || !A.allFinite()) throw ValidationError("non-finite model entries");
    if (!symmetric(G)) throw ValidationError("G is not symmetric");
    if (!symmetric(G * A)) throw ValidationError("G A is not symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(G).info() != Eigen::Success) throw ValidationError("G is not positive definite");
    if (!(eigenvalues().array() > 0.0).all()) throw ValidationError("A is not positive definite");
}

Eigen::VectorXd FiniteModel::eigenvalues() const { return solve(*this).eigenvalues(); }

FiniteModel FiniteModel::diagonal(const Eigen::VectorXd& lambda) {
    const auto n = lambda.size();
    return {Eigen::MatrixXd::Identity(n, n), lambda.asDiagonal()};
}

FiniteModel FiniteModel::random(int dim, std::uint64_t seed) {
    if (dim < 1) throw ValidationError("model dimension must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0), lam(0.5, 4.0);
    Eigen::MatrixXd b(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) b(i, j) = u(rng);
    const Eigen::MatrixXd G = b * b.transpose() + dim * Eigen::MatrixXd::Identity(dim, dim);
    // A = P diag(lambda) P^{-1} with P G-orthonormal, so G A = G P D P^T G is symmetric.
    Eigen::MatrixXd q(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) q(i, j) = u(rng);
    const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(G).matrixL();
    const Eigen::MatrixXd orth = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ();
    const Eigen::MatrixXd p = l.transpose().triangularView<Eigen::Upper>().solve(orth);
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d[i] = lam(rng);
    const Eigen::MatrixXd A = p * d.asDiagonal() * p.transpose() * G;
    return {G, A};
}

MeasureFrame MeasureFrame::of(const FiniteModel& model) { return {solve(model).eigenvectors(), model.G}; }

MeasureFrame MeasureFrame::rescaled(double beta) const {
    check_beta(beta);
    return {std::sqrt(beta) * basis, G / beta};
}

double exact_partition(const FiniteModel& model, double beta) {
    check_beta(beta);
    return std::exp(log_partition(model, beta));
}

double log_partition(const FiniteModel& model, double beta) {
    check_beta(beta);
    return -0.5 * (beta * model.eigenvalues().array()).log().sum();
}

double entropy(const FiniteModel& model, double beta) { return log_partition(model, beta) + 0.5 * model.dim(); }

McEstimate mc_partition(const FiniteModel& model, double beta, long samples, std::uint64_t seed) {
    check_beta(beta);
    if (samples < kMinMcSamples) throw ValidationError("Monte Carlo needs at least 10^4 samples", samples);
    const int n = model.dim();
    if (n > kMaxMcDim) throw ValidationError("Monte Carlo limited to dimension 8", n);
    const Eigen::VectorXd lambda = model.eigenvalues();
    // c = z / sqrt(kappa) with z ~ N(0, I/2): the weight is
    // kappa^{-n/2} exp(-sum (beta lambda_i / kappa - 1) z_i^2), bounded by kappa^{-n/2}.
    const double kappa = beta * lambda.minCoeff();
    const Eigen::ArrayXd excess = beta * lambda.array() / kappa - 1.0;
    const double scale = std::pow(kappa, -0.5 * n);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    double mean = 0.0, m2 = 0.0;
    for (long k = 0; k < samples; ++k) {
        double q = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z = normal(rng);
            q += excess[i] * z * z;
        }
        const double w = std::exp(-q);
        const double delta = w - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (w - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    return {scale * mean, scale * std::sqrt(var / static_cast<double>(samples)), samples, seed};
}

ClassicCheck verify_classic(const FiniteModel& model, double beta) {
    check_beta(beta);
    model.validate();
    const int n = model.dim();
    const double pi = std::numbers::pi;

    // Left: eigen-coordinates of g, operator beta A; pi^{-n/2} prod sqrt(pi/(beta lambda)).
    FiniteModel scaled = model;
    scaled.A *= beta;
    const Eigen::VectorXd scaled_lambda = scaled.eigenvalues();
    double lhs = std::pow(pi, -0.5 * n);
    for (double l : scaled_lambda) lhs *= std::sqrt(pi / l);

    // Right: operator A, measure pi^{-n/2} dc~ with c~ the g/beta coordinates.
    const MeasureFrame f0 = MeasureFrame::of(model);
    const double j = jacobian(f0, f0.rescaled(beta));
    const Eigen::VectorXd lambda = model.eigenvalues();
    double rhs = std::pow(pi, -0.5 * n) * j;
    for (double l : lambda) rhs *= std::sqrt(pi / l);

    return {lhs, rhs, std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs)};
}

double jacobian(const MeasureFrame& frame0, const MeasureFrame& frame1) {
    if (frame0.basis.rows() != frame1.basis.rows() || frame0.basis.cols() != frame1.basis.cols())
        throw ValidationError("frames differ in dimension");
    const Eigen::MatrixXd a_inv = frame1.basis.partialPivLu().solve(frame0.basis);
    return std::abs(a_inv.determinant());
}

GibbsStats gibbs_stats(const FiniteModel& model, double beta) {
    check_beta(beta);
    model.validate();
    const double n = model.dim();
    return {n / (2.0 * beta), std::sqrt(n / 2.0) / beta};
}

McGibbsStats mc_gibbs_stats(const FiniteModel& model, double beta, long samples, std::uint64_t seed) {
    check_beta(beta);
    if (samples < kMinMcSamples) throw ValidationError("Monte Carlo needs at least 10^4 samples", samples);
    const Eigen::VectorXd lambda = model.eigenvalues();
    const int n = model.dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    // c_i ~ N(0, 1/(2 beta lambda_i)); E = sum lambda_i c_i^2.
    double mean = 0.0, m2 = 0.0;
    std::vector<double> energies(static_cast<std::size_t>(samples));
    for (long k = 0; k < samples; ++k) {
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            const double c = normal(rng) / std::sqrt(2.0 * beta * lambda[i]);
            e += lambda[i] * c * c;
        }
        energies[static_cast<std::size_t>(k)] = e;
        const double delta = e - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (e - mean);
    }
    const double ns = static_cast<double>(samples);
    const double var = m2 / (ns - 1.0);
    double m4 = 0.0;
    for (double e : energies) m4 += std::pow(e - mean, 4);
    m4 /= ns;
    McGibbsStats out;
    out.stats = {mean, std::sqrt(var)};
    out.mean_error = std::sqrt(var / ns);
    out.variance = var;
    out.variance_error = std::sqrt(std::max(0.0, m4 - var * var) / ns);
    return out;
}

NormalizedPartition normalized_partition(const ModelPath& path, const std::vector<double>& grid, double beta) {
    check_beta(beta);
    if (grid.size() < 3) throw ValidationError("model path needs at least three grid points");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ValidationError("model path grid is not increasing", static_cast<long>(k));

    std::vector<FiniteModel> models;
    for (double t : grid) {
        models.push_back(path(t));
        models.back().validate();
    }
    const MeasureFrame ref = MeasureFrame::of(models.front());
    std::vector<double> log_z1, log_j;
    for (const FiniteModel& m : models) {
        log_z1.push_back(log_partition(m, 1.0));
        log_j.push_back(std::log(jacobian(ref, MeasureFrame::of(m))));
    }

    NormalizedPartition out;
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        const double h = grid[k + 1] - grid[k - 1];
        out.t.push_back(grid[k]);
        out.ratio.push_back(std::exp(log_partition(models[k], beta) - log_z1[k]));
        out.phi.push_back((log_z1[k + 1] - log_z1[k - 1]) / h);
        out.measure_rate.push_back((log_j[k + 1] - log_j[k - 1]) / h);
        out.max_measure_residual = std::max(out.max_measure_residual, std::abs(out.phi.back() - out.measure_rate.back()));
    }
    return out;
}

} // namespace specflow
