#pragma once

#include "specflow/metric.hpp"

#include <iosfwd>
#include <optional>

namespace specflow {

enum class OperatorKind { laplacian, drifted, schrodinger };

/// -Delta, the drifted Laplacian -Delta_f, or the drifted Schrodinger
/// operator -Delta + <grad f, grad .> + V. Fields are per vertex; `f` is
/// ignored for the plain Laplacian and `V` is only used by schrodinger.
struct OperatorSpec {
    OperatorKind kind = OperatorKind::laplacian;
    Field f;
    Field V;

    static OperatorSpec laplacian() { return {}; }
    static OperatorSpec drifted(Field f) { return {OperatorKind::drifted, std::move(f), {}}; }
    static OperatorSpec schrodinger(Field f, Field V) { return {OperatorKind::schrodinger, std::move(f), std::move(V)}; }
};

/// Discrete quadratic form of an operator against the weighted measure
/// du = e^{-f} e^{2u} dA0.
///
/// stiffness: cotangent weights of the base metric, each face scaled by the
/// vertex mean of e^{-f}. mass: lumped areas times e^{2u - f}. potential: V
/// against the same lumped measure.
struct OperatorAssembly {
    SparseMatrix stiffness;
    Eigen::VectorXd mass;
    Eigen::VectorXd potential;
    OperatorKind kind = OperatorKind::laplacian;
    double area = 0.0;
    int chi = 0;

    int size() const { return static_cast<int>(mass.size()); }
    bool has_potential() const { return kind == OperatorKind::schrodinger; }

    /// stiffness + diag(potential).
    SparseMatrix energy_matrix() const;
};

OperatorAssembly assemble(const ConformalMetric& metric, const OperatorSpec& spec);

/// phi^T (S_w + P) phi.
double dirichlet_energy(const OperatorAssembly& assembly, const Field& phi);

/// Time derivatives driving a variation of the energy. The metric moves
/// conformally, dg/dt = psi g; a non-conformal metric rate is rejected.
struct EnergyRates {
    Field psi;
    Field f_dot;
    Field V_dot;
    /// Per-edge length rates for a general metric variation. Not supported.
    std::optional<Eigen::VectorXd> edge_length_rates;
};

/// dE/dt for a fixed microstate phi, assembled term by term from
///   int (-h(grad phi, grad phi) + V_dot phi^2) du
///     + int (|grad phi|^2 + V phi^2)(tr_g(h)/2 - f_dot) du
/// with h = psi g on a surface (tr_g h = 2 psi).
double energy_variation(const ConformalMetric& metric, const OperatorSpec& spec, const Field& phi,
                        const EnergyRates& rates);

/// Per-face integral of weight * |grad phi|^2 where the weight is sampled at
/// vertices and averaged over each face.
double weighted_gradient_integral(const ConformalMetric& metric, const Field& vertex_weight, const Field& phi);

/// "row col value" triplets, one per line, 0-based, upper and lower parts.
void write_triplets(std::ostream& out, const SparseMatrix& m);

} // namespace specflow
