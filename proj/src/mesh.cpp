#include "specflow/mesh.hpp"
#include "specflow/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace specflow {
namespace {

std::int64_t edge_key(int a, int b, int nv) {
    if (a > b) std::swap(a, b);
    return static_cast<std::int64_t>(a) * nv + b;
}

std::int64_t directed_key(int a, int b, int nv) { return static_cast<std::int64_t>(a) * nv + b; }

int find_root(std::vector<int>& parent, int x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

} // namespace

TriMesh TriMesh::build(Positions vertices, std::vector<Face> faces) {
    const int nv = static_cast<int>(vertices.rows());
    if (nv == 0) throw ValidationError("mesh has no vertices");
    if (faces.empty()) throw ValidationError("mesh has no faces");
    if (!vertices.allFinite()) throw ValidationError("non-finite vertex coordinate");

    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& t = faces[f];
        for (int k = 0; k < 3; ++k)
            if (t[k] < 0 || t[k] >= nv)
                throw ValidationError("face references vertex out of range", static_cast<long>(f));
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw ValidationError("degenerate face (repeated vertex index)", static_cast<long>(f));
        const Eigen::Vector3d a = vertices.row(t[0]), b = vertices.row(t[1]), c = vertices.row(t[2]);
        if ((b - a).cross(c - a).norm() <= 0.0)
            throw ValidationError("zero-area face", static_cast<long>(f));
    }

    // Each directed half-edge must occur exactly once and be matched by its
    // twin: that gives closed, manifold and consistently oriented in one pass.
    std::unordered_map<std::int64_t, int> directed;
    directed.reserve(faces.size() * 3);
    std::unordered_map<std::int64_t, int> undirected_count;
    undirected_count.reserve(faces.size() * 2);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int k = 0; k < 3; ++k) {
            const int a = faces[f][(k + 1) % 3], b = faces[f][(k + 2) % 3];
            if (++undirected_count[edge_key(a, b, nv)] > 2)
                throw ValidationError("non-manifold edge (more than two incident faces)", static_cast<long>(f));
        }
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int k = 0; k < 3; ++k) {
            const int a = faces[f][(k + 1) % 3], b = faces[f][(k + 2) % 3];
            auto [it, inserted] = directed.emplace(directed_key(a, b, nv), static_cast<int>(f));
            if (!inserted)
                throw ValidationError("inconsistent face orientation", static_cast<long>(f));
        }
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int k = 0; k < 3; ++k) {
            const int a = faces[f][(k + 1) % 3], b = faces[f][(k + 2) % 3];
            if (!directed.count(directed_key(b, a, nv)))
                throw ValidationError("open boundary edge", static_cast<long>(f));
        }
    }

    std::vector<int> used(nv, 0);
    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    for (const Face& t : faces) {
        for (int k = 0; k < 3; ++k) {
            used[t[k]] = 1;
            const int ra = find_root(parent, t[k]), rb = find_root(parent, t[(k + 1) % 3]);
            if (ra != rb) parent[ra] = rb;
        }
    }
    for (int v = 0; v < nv; ++v)
        if (!used[v]) throw ValidationError("isolated vertex", v);
    const int root = find_root(parent, 0);
    for (int v = 1; v < nv; ++v)
        if (find_root(parent, v) != root) throw ValidationError("mesh is not connected", v);

    TriMesh m;
    m.vertices_ = std::move(vertices);
    m.faces_ = std::move(faces);

    std::vector<std::int64_t> keys;
    keys.reserve(undirected_count.size());
    for (const auto& [key, count] : undirected_count) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    std::unordered_map<std::int64_t, int> edge_index;
    edge_index.reserve(keys.size());
    m.edges_.reserve(keys.size());
    for (std::size_t e = 0; e < keys.size(); ++e) {
        edge_index[keys[e]] = static_cast<int>(e);
        m.edges_.push_back({static_cast<int>(keys[e] / nv), static_cast<int>(keys[e] % nv)});
    }
    m.face_edges_.resize(m.faces_.size());
    for (std::size_t f = 0; f < m.faces_.size(); ++f)
        for (int k = 0; k < 3; ++k)
            m.face_edges_[f][k] = edge_index.at(edge_key(m.faces_[f][(k + 1) % 3], m.faces_[f][(k + 2) % 3], nv));
    return m;
}

Topology topology(const TriMesh& mesh) {
    Topology t;
    t.V = mesh.num_vertices();
    t.E = mesh.num_edges();
    t.F = mesh.num_faces();
    t.chi = t.V - t.E + t.F;
    t.genus = (2 - t.chi) / 2;
    return t;
}

// ---------------------------------------------------------------------------
// OFF

namespace {

bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

} // namespace

TriMesh read_off(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!next_content_line(in, line, lineno)) throw ParseError("empty OFF input");

    std::istringstream header(line);
    std::string magic;
    header >> magic;
    if (magic != "OFF") throw ParseError("missing OFF header", lineno);

    // Counts may share the header line.
    long nv = -1, nf = -1, ne = 0;
    if (!(header >> nv)) {
        if (!next_content_line(in, line, lineno)) throw ParseError("missing counts line", lineno);
        std::istringstream counts(line);
        if (!(counts >> nv >> nf)) throw ParseError("malformed counts line", lineno);
        counts >> ne;
    } else if (!(header >> nf)) {
        throw ParseError("malformed counts line", lineno);
    }
    if (nv <= 0 || nf <= 0) throw ParseError("vertex and face counts must be positive", lineno);

    TriMesh::Positions vertices(nv, 3);
    for (long i = 0; i < nv; ++i) {
        if (!next_content_line(in, line, lineno)) throw ParseError("unexpected end of vertex block", lineno);
        std::istringstream row(line);
        double x, y, z;
        if (!(row >> x >> y >> z)) throw ParseError("malformed vertex line", lineno);
        vertices.row(i) << x, y, z;
    }
    std::vector<Face> faces(nf);
    for (long f = 0; f < nf; ++f) {
        if (!next_content_line(in, line, lineno)) throw ParseError("unexpected end of face block", lineno);
        std::istringstream row(line);
        int arity;
        if (!(row >> arity)) throw ParseError("malformed face line", lineno);
        if (arity != 3) throw ParseError("only triangular faces are supported", lineno);
        if (!(row >> faces[f][0] >> faces[f][1] >> faces[f][2])) throw ParseError("malformed face line", lineno);
    }
    return TriMesh::build(std::move(vertices), std::move(faces));
}

TriMesh load_off(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_off(in);
}

void write_off(std::ostream& out, const TriMesh& mesh) {
    const auto prec = out.precision(17);
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << ' ' << mesh.num_edges() << '\n';
    for (int i = 0; i < mesh.num_vertices(); ++i)
        out << mesh.vertices()(i, 0) << ' ' << mesh.vertices()(i, 1) << ' ' << mesh.vertices()(i, 2) << '\n';
    for (const Face& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    out.precision(prec);
}

// ---------------------------------------------------------------------------
// Generators

TriMesh generate_icosphere(int subdivisions) {
    if (subdivisions < 0) throw ValidationError("subdivisions must be non-negative");
    if (subdivisions > 7) throw ValidationError("subdivisions capped at 7");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> pts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& p : pts) p.normalize();
    std::vector<Face> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };

    for (int level = 0; level < subdivisions; ++level) {
        std::unordered_map<std::int64_t, int> midpoint;
        const int nv = static_cast<int>(pts.size());
        auto mid = [&](int a, int b) {
            const auto key = edge_key(a, b, nv);
            if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
            pts.push_back((pts[a] + pts[b]).normalized());
            const int idx = static_cast<int>(pts.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Face> next;
        next.reserve(faces.size() * 4);
        for (const Face& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    TriMesh::Positions v(static_cast<Eigen::Index>(pts.size()), 3);
    for (std::size_t i = 0; i < pts.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
    return TriMesh::build(std::move(v), std::move(faces));
}

TriMesh generate_flat_torus(int m, int n, double aspect) {
    if (m < 3 || n < 3) throw ValidationError("flat torus grid must be at least 3x3");
    if (!(aspect > 0.0) || !std::isfinite(aspect)) throw ValidationError("aspect must be positive");

    const double width = std::sqrt(aspect), height = 1.0 / std::sqrt(aspect);
    const double dx = width / m, dy = height / n;
    auto id = [m, n](int i, int j) { return ((i % m + m) % m) + m * ((j % n + n) % n); };

    TriMesh::Positions v(m * n, 3);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) {
            const double a = two_pi * i / m, b = two_pi * j / n;
            v.row(id(i, j)) << (2.0 + std::cos(b)) * std::cos(a), (2.0 + std::cos(b)) * std::sin(a), std::sin(b);
        }
    }
    std::vector<Face> faces;
    faces.reserve(2 * m * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }

    // Grid offsets are recovered from indices modulo the period; m, n >= 3
    // makes every neighbour offset unambiguous.
    auto wrap = [](int d, int period) {
        d = ((d % period) + period) % period;
        return d > period / 2 ? d - period : d;
    };
    return TriMesh::build_with_lengths(std::move(v), std::move(faces), [=](int a, int b) {
        const int di = wrap(b % m - a % m, m), dj = wrap(b / m - a / m, n);
        return std::hypot(di * dx, dj * dy);
    });
}

} // namespace specflow
