#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace specflow {

using Face = std::array<int, 3>;
using Edge = std::array<int, 2>; // sorted: e[0] < e[1]

/// Closed, orientable, manifold triangle mesh.
///
/// Instances are only produced by `TriMesh::build` (directly or through the
/// loaders/generators), which validates the surface and derives the edge
/// table. After construction a mesh is immutable.
class TriMesh {
public:
    using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

    /// Validates and builds; throws ValidationError naming the offending
    /// face or edge.
    static TriMesh build(Positions vertices, std::vector<Face> faces);

    /// Like `build`, but the intrinsic geometry comes from `length_of(i, j)`
    /// rather than from the vertex positions.
    template <typename LengthFn>
    static TriMesh build_with_lengths(Positions vertices, std::vector<Face> faces, LengthFn&& length_of) {
        TriMesh m = build(std::move(vertices), std::move(faces));
        std::vector<double> lengths(m.edges_.size());
        for (std::size_t e = 0; e < m.edges_.size(); ++e)
            lengths[e] = length_of(m.edges_[e][0], m.edges_[e][1]);
        m.edge_lengths_ = std::move(lengths);
        return m;
    }

    int num_vertices() const { return static_cast<int>(vertices_.rows()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const Positions& vertices() const { return vertices_; }
    const std::vector<Face>& faces() const { return faces_; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// face_edges()[f][k] is the edge opposite corner k of face f.
    const std::vector<std::array<int, 3>>& face_edges() const { return face_edges_; }

    /// Intrinsic edge lengths stored with the mesh (flat torus); empty when
    /// geometry is taken from the embedding.
    const std::optional<std::vector<double>>& stored_edge_lengths() const { return edge_lengths_; }

private:
    TriMesh() = default;

    Positions vertices_;
    std::vector<Face> faces_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> face_edges_;
    std::optional<std::vector<double>> edge_lengths_;
};

struct Topology {
    int V = 0;
    int E = 0;
    int F = 0;
    int chi = 0;
    int genus = 0;
};

Topology topology(const TriMesh& mesh);

TriMesh load_off(const std::filesystem::path& path);
TriMesh read_off(std::istream& in);
void write_off(std::ostream& out, const TriMesh& mesh);

/// Icosahedron projected to the unit sphere and 1-to-4 subdivided
/// `subdivisions` times. Capped at 7.
TriMesh generate_icosphere(int subdivisions);

/// m x n periodic grid on a unit-area rectangle of width/height ratio
/// `aspect`. Edge lengths are stored from the quotient geometry; vertex
/// positions are a placeholder embedding on a ring torus.
TriMesh generate_flat_torus(int m, int n, double aspect = 1.0);

} // namespace specflow
