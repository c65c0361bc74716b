#include "specflow/metric.hpp"
#include "specflow/error.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace specflow {
namespace {

std::shared_ptr<const BaseGeometry> make_base(const TriMesh& mesh, const Eigen::VectorXd& lengths) {
    auto g = std::make_shared<BaseGeometry>();
    const int nf = mesh.num_faces(), nv = mesh.num_vertices();
    g->edge_length = lengths;
    g->face_area.resize(nf);
    g->corner_angle.resize(nf, 3);
    g->corner_cot.resize(nf, 3);
    g->vertex_area = Eigen::VectorXd::Zero(nv);
    Eigen::VectorXd angle_sum = Eigen::VectorXd::Zero(nv);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(nf) * 12);

    for (int f = 0; f < nf; ++f) {
        const auto& fe = mesh.face_edges()[f];
        const double l[3] = {lengths[fe[0]], lengths[fe[1]], lengths[fe[2]]};
        for (int k = 0; k < 3; ++k) {
            if (!(l[k] > 0.0) || !std::isfinite(l[k])) throw ValidationError("non-positive edge length", fe[k]);
            if (!(l[k] < l[(k + 1) % 3] + l[(k + 2) % 3]))
                throw ValidationError("triangle inequality violated", f);
        }
        // Kahan's stable Heron formula on sorted lengths.
        double a = l[0], b = l[1], c = l[2];
        if (a < b) std::swap(a, b);
        if (b < c) std::swap(b, c);
        if (a < b) std::swap(a, b);
        const double area = 0.25 * std::sqrt((a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c)));
        if (!(area > 0.0)) throw ValidationError("zero-area face", f);
        g->face_area[f] = area;

        const Face& t = mesh.faces()[f];
        for (int k = 0; k < 3; ++k) {
            const double opp = l[k], s1 = l[(k + 1) % 3], s2 = l[(k + 2) % 3];
            const double adj = s1 * s1 + s2 * s2 - opp * opp;
            g->corner_angle(f, k) = std::atan2(4.0 * area, adj);
            g->corner_cot(f, k) = adj / (4.0 * area);
            angle_sum[t[k]] += g->corner_angle(f, k);
            g->vertex_area[t[k]] += area / 3.0;

            const int i = t[(k + 1) % 3], j = t[(k + 2) % 3];
            const double w = 0.5 * g->corner_cot(f, k);
            triplets.emplace_back(i, i, w);
            triplets.emplace_back(j, j, w);
            triplets.emplace_back(i, j, -w);
            triplets.emplace_back(j, i, -w);
        }
    }
    g->stiffness.resize(nv, nv);
    g->stiffness.setFromTriplets(triplets.begin(), triplets.end());
    g->stiffness.makeCompressed();
    g->gauss_curvature = (2.0 * std::numbers::pi - angle_sum.array()) / g->vertex_area.array();
    g->chi = topology(mesh).chi;
    return g;
}

Eigen::VectorXd lengths_from_mesh(const TriMesh& mesh) {
    const auto& edges = mesh.edges();
    Eigen::VectorXd lengths(static_cast<Eigen::Index>(edges.size()));
    if (const auto& stored = mesh.stored_edge_lengths()) {
        for (std::size_t e = 0; e < edges.size(); ++e) lengths[static_cast<Eigen::Index>(e)] = (*stored)[e];
    } else {
        for (std::size_t e = 0; e < edges.size(); ++e)
            lengths[static_cast<Eigen::Index>(e)] =
                (mesh.vertices().row(edges[e][0]) - mesh.vertices().row(edges[e][1])).norm();
    }
    return lengths;
}

} // namespace

ConformalMetric::ConformalMetric(std::shared_ptr<const TriMesh> mesh, std::shared_ptr<const BaseGeometry> base, Field u)
    : mesh_(std::move(mesh)), base_(std::move(base)), u_(std::move(u)) {
    if (u_.size() != mesh_->num_vertices()) throw ValidationError("conformal factor size does not match vertex count");
    if (!u_.allFinite()) throw ValidationError("non-finite conformal factor");
}

ConformalMetric base_metric(std::shared_ptr<const TriMesh> mesh, const Eigen::VectorXd& edge_lengths) {
    if (edge_lengths.size() != mesh->num_edges()) throw ValidationError("edge length count does not match mesh");
    auto base = make_base(*mesh, edge_lengths);
    const int nv = mesh->num_vertices();
    return ConformalMetric(std::move(mesh), std::move(base), Field::Zero(nv));
}

ConformalMetric base_metric(std::shared_ptr<const TriMesh> mesh) {
    const Eigen::VectorXd lengths = lengths_from_mesh(*mesh);
    return base_metric(std::move(mesh), lengths);
}

ConformalMetric base_metric(const TriMesh& mesh) { return base_metric(std::make_shared<const TriMesh>(mesh)); }

ConformalMetric scale_conformal(const ConformalMetric& metric, const Field& du) {
    if (du.size() != metric.num_vertices()) throw ValidationError("du size does not match vertex count");
    if (!du.allFinite()) throw ValidationError("non-finite du");
    return metric.with_u(metric.u() + du);
}

Eigen::VectorXd face_areas(const ConformalMetric& metric) {
    const auto& faces = metric.mesh().faces();
    const Eigen::ArrayXd e2u = (2.0 * metric.u().array()).exp();
    Eigen::VectorXd areas(static_cast<Eigen::Index>(faces.size()));
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& t = faces[f];
        areas[static_cast<Eigen::Index>(f)] =
            metric.base().face_area[static_cast<Eigen::Index>(f)] * (e2u[t[0]] + e2u[t[1]] + e2u[t[2]]) / 3.0;
    }
    return areas;
}

double total_area(const ConformalMetric& metric) { return face_areas(metric).sum(); }

Field vertex_areas(const ConformalMetric& metric) {
    return (metric.base().vertex_area.array() * (2.0 * metric.u().array()).exp()).matrix();
}

CurvatureField curvature(const ConformalMetric& metric) {
    const BaseGeometry& b = metric.base();
    CurvatureField c;
    c.vertex_areas = vertex_areas(metric);
    const Eigen::ArrayXd laplace_term = (b.stiffness * metric.u()).array() / b.vertex_area.array();
    c.K = ((-2.0 * metric.u().array()).exp() * (b.gauss_curvature.array() + laplace_term)).matrix();
    c.R = 2.0 * c.K;
    return c;
}

double gauss_bonnet_residual(const ConformalMetric& metric) {
    const CurvatureField c = curvature(metric);
    return c.K.dot(c.vertex_areas) - 2.0 * std::numbers::pi * metric.base().chi;
}

double integrate(const ConformalMetric& metric, const Field& density) {
    if (density.size() != metric.num_vertices()) throw ValidationError("field size does not match vertex count");
    return density.dot(vertex_areas(metric));
}

} // namespace specflow
