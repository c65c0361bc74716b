#pragma once

#include "specflow/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>

namespace specflow {

using Field = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Quantities of the base metric g0 that every conformal metric shares.
struct BaseGeometry {
    Eigen::VectorXd edge_length;   // per edge
    Eigen::VectorXd face_area;     // per face
    Eigen::MatrixX3d corner_angle; // [f][k]: interior angle at corner k
    Eigen::MatrixX3d corner_cot;   // [f][k]: cotangent of that angle
    Eigen::VectorXd vertex_area;   // barycentric lumping: a third of each incident face
    Eigen::VectorXd gauss_curvature; // angle defect / vertex_area
    SparseMatrix stiffness;        // cotangent stiffness, row sums zero
    int chi = 0;
};

/// g = e^{2u} g0 on a fixed base mesh. The base is shared and immutable, so
/// copies are cheap and moving within the conformal class never re-meshes.
class ConformalMetric {
public:
    ConformalMetric(std::shared_ptr<const TriMesh> mesh, std::shared_ptr<const BaseGeometry> base, Field u);

    const TriMesh& mesh() const { return *mesh_; }
    const BaseGeometry& base() const { return *base_; }
    const std::shared_ptr<const TriMesh>& mesh_ptr() const { return mesh_; }
    const std::shared_ptr<const BaseGeometry>& base_ptr() const { return base_; }
    const Field& u() const { return u_; }
    int num_vertices() const { return static_cast<int>(u_.size()); }

    /// Same base, log-conformal factor replaced.
    ConformalMetric with_u(Field u) const { return {mesh_, base_, std::move(u)}; }

private:
    std::shared_ptr<const TriMesh> mesh_;
    std::shared_ptr<const BaseGeometry> base_;
    Field u_;
};

struct CurvatureField {
    Field K;            // Gauss curvature per vertex
    Field R;            // scalar curvature, 2K
    Field vertex_areas; // lumped areas of the current metric
};

/// u = 0 metric from embedding positions, or from the mesh's stored
/// quotient lengths when present.
ConformalMetric base_metric(const TriMesh& mesh);
ConformalMetric base_metric(std::shared_ptr<const TriMesh> mesh);

/// Base metric with explicitly supplied per-edge lengths (indexed like
/// `mesh.edges()`). Throws ValidationError on a triangle-inequality failure.
ConformalMetric base_metric(std::shared_ptr<const TriMesh> mesh, const Eigen::VectorXd& edge_lengths);

/// u' = u + du.
ConformalMetric scale_conformal(const ConformalMetric& metric, const Field& du);

/// Per-face area: base area times the vertex mean of e^{2u}.
Eigen::VectorXd face_areas(const ConformalMetric& metric);
double total_area(const ConformalMetric& metric);

/// Lumped vertex areas A_i e^{2u_i}; they sum to total_area exactly.
Field vertex_areas(const ConformalMetric& metric);

/// R_u = e^{-2u}(R0 + 2 M0^{-1} S0 u), i.e. R0 - 2 Delta0 u rescaled.
CurvatureField curvature(const ConformalMetric& metric);

/// Sum_i K_i A_i - 2 pi chi.
double gauss_bonnet_residual(const ConformalMetric& metric);

/// Integral of a per-vertex density against the lumped current-metric measure.
double integrate(const ConformalMetric& metric, const Field& density);

} // namespace specflow
