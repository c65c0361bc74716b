#include "specflow/operators.hpp"
#include "specflow/error.hpp"

#include <ostream>
#include <vector>

namespace specflow {
namespace {

void check_field(const Field& x, int n, const char* name) {
    if (x.size() != n) throw ValidationError(std::string(name) + " size does not match vertex count");
    if (!x.allFinite()) throw ValidationError(std::string("non-finite ") + name);
}

Eigen::ArrayXd drift_weight(const ConformalMetric& metric, const OperatorSpec& spec) {
    const int n = metric.num_vertices();
    if (spec.kind == OperatorKind::laplacian) return Eigen::ArrayXd::Ones(n);
    check_field(spec.f, n, "f");
    return (-spec.f.array()).exp();
}

/// Per-face cotangent stiffness of phi: phi^T K_T phi = int_T |grad phi|^2 dA0.
double face_energy(const BaseGeometry& b, const Face& t, int f, const Field& phi) {
    double e = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double d = phi[t[(k + 1) % 3]] - phi[t[(k + 2) % 3]];
        e += 0.5 * b.corner_cot(f, k) * d * d;
    }
    return e;
}

} // namespace

SparseMatrix OperatorAssembly::energy_matrix() const {
    SparseMatrix m = stiffness;
    if (has_potential()) {
        for (int i = 0; i < size(); ++i) m.coeffRef(i, i) += potential[i];
    }
    return m;
}

OperatorAssembly assemble(const ConformalMetric& metric, const OperatorSpec& spec) {
    const int n = metric.num_vertices();
    const BaseGeometry& b = metric.base();
    const Eigen::ArrayXd w = drift_weight(metric, spec);

    OperatorAssembly a;
    a.kind = spec.kind;
    a.chi = b.chi;
    a.area = total_area(metric);

    if (spec.kind == OperatorKind::laplacian) {
        a.stiffness = b.stiffness;
    } else {
        const auto& faces = metric.mesh().faces();
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(faces.size() * 12);
        for (std::size_t fi = 0; fi < faces.size(); ++fi) {
            const Face& t = faces[fi];
            const int f = static_cast<int>(fi);
            const double wt = (w[t[0]] + w[t[1]] + w[t[2]]) / 3.0;
            for (int k = 0; k < 3; ++k) {
                const int i = t[(k + 1) % 3], j = t[(k + 2) % 3];
                const double c = 0.5 * wt * b.corner_cot(f, k);
                triplets.emplace_back(i, i, c);
                triplets.emplace_back(j, j, c);
                triplets.emplace_back(i, j, -c);
                triplets.emplace_back(j, i, -c);
            }
        }
        a.stiffness.resize(n, n);
        a.stiffness.setFromTriplets(triplets.begin(), triplets.end());
        a.stiffness.makeCompressed();
    }

    a.mass = (vertex_areas(metric).array() * w).matrix();
    if (!(a.mass.array() > 0.0).all()) throw NumericalError("mass matrix is not strictly positive");

    if (spec.kind == OperatorKind::schrodinger) {
        check_field(spec.V, n, "V");
        a.potential = (spec.V.array() * a.mass.array()).matrix();
    } else {
        a.potential = Eigen::VectorXd::Zero(n);
    }
    return a;
}

double dirichlet_energy(const OperatorAssembly& assembly, const Field& phi) {
    if (phi.size() != assembly.size()) throw ValidationError("phi size does not match operator size");
    double e = phi.dot(assembly.stiffness * phi);
    if (assembly.has_potential()) e += phi.dot((assembly.potential.array() * phi.array()).matrix());
    return e;
}

double weighted_gradient_integral(const ConformalMetric& metric, const Field& vertex_weight, const Field& phi) {
    const BaseGeometry& b = metric.base();
    const auto& faces = metric.mesh().faces();
    double total = 0.0;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const Face& t = faces[fi];
        const double wt = (vertex_weight[t[0]] + vertex_weight[t[1]] + vertex_weight[t[2]]) / 3.0;
        total += wt * face_energy(b, t, static_cast<int>(fi), phi);
    }
    return total;
}

double energy_variation(const ConformalMetric& metric, const OperatorSpec& spec, const Field& phi,
                        const EnergyRates& rates) {
    if (rates.edge_length_rates) throw ValidationError("non-conformal metric variation is not supported");
    const int n = metric.num_vertices();
    check_field(phi, n, "phi");
    check_field(rates.psi, n, "psi");

    const bool drifted = spec.kind != OperatorKind::laplacian;
    const bool schrodinger = spec.kind == OperatorKind::schrodinger;
    const Field zero = Field::Zero(n);
    const Field& f_dot = drifted ? rates.f_dot : zero;
    if (drifted) check_field(f_dot, n, "f_dot");
    if (schrodinger) check_field(rates.V_dot, n, "V_dot");

    const Eigen::ArrayXd w = drift_weight(metric, spec);
    // The du measure at vertices, used for the zeroth-order terms.
    const Eigen::ArrayXd du = vertex_areas(metric).array() * w;

    // tr_g(h)/2 - f_dot with h = psi g in two dimensions.
    const Eigen::ArrayXd measure_rate = rates.psi.array() - f_dot.array();

    // -int psi |grad phi|^2 du: the gradient norm shrinks as the metric grows.
    const double grad_metric_term = -weighted_gradient_integral(metric, (rates.psi.array() * w).matrix(), phi);
    // int |grad phi|^2 (psi - f_dot) du
    const double grad_measure_term = weighted_gradient_integral(metric, (measure_rate * w).matrix(), phi);

    double potential_terms = 0.0;
    if (schrodinger) {
        check_field(spec.V, n, "V");
        const Eigen::ArrayXd phi2 = phi.array().square();
        potential_terms = (rates.V_dot.array() * phi2 * du).sum() + (spec.V.array() * phi2 * measure_rate * du).sum();
    }
    return grad_metric_term + grad_measure_term + potential_terms;
}

void write_triplets(std::ostream& out, const SparseMatrix& m) {
    const auto prec = out.precision(17);
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    out.precision(prec);
}

} // namespace specflow
