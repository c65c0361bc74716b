#include "specflow/error.hpp"
#include "specflow/mesh.hpp"
#include "specflow/metric.hpp"

#include <doctest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace specflow;

namespace {

const std::string data = SPECFLOW_TEST_DATA;

/// Independent count of V, E, F straight from an OFF file.
std::array<long, 3> count_off(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);)
        if (!l.empty() && l[0] != '#') lines.push_back(l);
    std::istringstream counts(lines[1]);
    long v = 0, f = 0;
    counts >> v >> f;
    std::set<std::pair<int, int>> edges;
    for (long k = 0; k < f; ++k) {
        std::istringstream fl(lines[static_cast<std::size_t>(2 + v + k)]);
        int n, a, b, c;
        fl >> n >> a >> b >> c;
        for (auto [i, j] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) edges.insert({std::min(i, j), std::max(i, j)});
    }
    return {v, static_cast<long>(edges.size()), f};
}

void check_closed(const TriMesh& m) {
    std::map<std::pair<int, int>, int> uses;
    for (const Face& f : m.faces())
        for (int k = 0; k < 3; ++k) {
            const int a = f[k], b = f[(k + 1) % 3];
            ++uses[{std::min(a, b), std::max(a, b)}];
        }
    CHECK(static_cast<int>(uses.size()) == m.num_edges());
    for (const auto& [e, n] : uses) CHECK(n == 2);
    const Topology t = topology(m);
    CHECK(t.chi == t.V - t.E + t.F);
    CHECK(t.chi % 2 == 0);
    CHECK(t.genus == (2 - t.chi) / 2);
}

} // namespace

TEST_SUITE("mesh") {

TEST_CASE("OFF fixtures load with the expected counts") {
    const TriMesh ico = load_off(data + "/icosahedron.off");
    CHECK(ico.num_vertices() == 12);
    CHECK(ico.num_faces() == 20);
    CHECK(ico.num_edges() == 30);

    const TriMesh oct = load_off(data + "/octahedron.off");
    CHECK(oct.num_edges() == 12);
    CHECK(topology(oct).chi == 2);
}

TEST_CASE("invalid OFF files are rejected with a location") {
    try {
        load_off(data + "/nonmanifold.off");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("non-manifold") != std::string::npos);
        CHECK(e.index() >= 0);
    }
    CHECK_THROWS_AS(load_off(data + "/open.off"), ValidationError);
    try {
        load_off(data + "/flipped.off");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("orientation") != std::string::npos);
    }
    try {
        load_off(data + "/malformed.off");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(load_off(data + "/missing.off"), ParseError);
}

TEST_CASE("degenerate and out-of-range faces") {
    TriMesh::Positions p(4, 3);
    p << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
    CHECK_THROWS_AS(TriMesh::build(p, {{0, 1, 1}, {0, 2, 3}, {1, 2, 3}, {0, 1, 3}}), ValidationError);
    CHECK_THROWS_AS(TriMesh::build(p, {{0, 2, 1}, {0, 3, 2}, {1, 2, 3}, {0, 1, 7}}), ValidationError);
    // Tetrahedron is fine.
    CHECK(topology(TriMesh::build(p, {{0, 2, 1}, {0, 3, 2}, {1, 2, 3}, {0, 1, 3}})).chi == 2);
}

TEST_CASE("OFF round trip") {
    const TriMesh a = generate_icosphere(1);
    std::stringstream ss;
    write_off(ss, a);
    const TriMesh b = read_off(ss);
    CHECK(b.num_vertices() == a.num_vertices());
    CHECK(b.faces() == a.faces());
    CHECK((b.vertices() - a.vertices()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("icosphere counts") {
    CHECK(generate_icosphere(0).num_vertices() == 12);
    CHECK(generate_icosphere(0).num_faces() == 20);
    CHECK(generate_icosphere(1).num_vertices() == 42);
    CHECK(generate_icosphere(1).num_faces() == 80);
    const TriMesh m4 = generate_icosphere(4);
    CHECK(m4.num_vertices() == 2562);
    CHECK(m4.num_faces() == 5120);
    CHECK_THROWS_AS(generate_icosphere(8), ValidationError);
    CHECK_THROWS_AS(generate_icosphere(-1), ValidationError);
    for (int i = 0; i < m4.num_vertices(); ++i) CHECK(m4.vertices().row(i).norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("icosphere subdivision law") {
    for (int k = 0; k < 4; ++k) {
        const TriMesh a = generate_icosphere(k), b = generate_icosphere(k + 1);
        CHECK(b.num_vertices() == a.num_vertices() + a.num_edges());
        CHECK(b.num_faces() == 4 * a.num_faces());
    }
}

TEST_CASE("flat torus counts and area") {
    const TriMesh t8 = generate_flat_torus(8, 8);
    CHECK(t8.num_vertices() == 64);
    CHECK(t8.num_faces() == 128);
    CHECK(topology(t8).chi == 0);
    const TriMesh t3 = generate_flat_torus(3, 3);
    CHECK(t3.num_vertices() == 9);
    CHECK(t3.num_faces() == 18);
    CHECK(t3.num_edges() == 27);
    CHECK(total_area(base_metric(generate_flat_torus(16, 16))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(total_area(base_metric(generate_flat_torus(6, 9, 2.5))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(generate_flat_torus(2, 8), ValidationError);
    CHECK_THROWS_AS(generate_flat_torus(8, 8, 0.0), ValidationError);
}

TEST_CASE("topology") {
    const Topology s = topology(generate_icosphere(2));
    CHECK(s.chi == 2);
    CHECK(s.genus == 0);
    const Topology t = topology(generate_flat_torus(8, 8));
    CHECK(t.chi == 0);
    CHECK(t.genus == 1);

    const TriMesh g2 = load_off(data + "/genus2.off");
    const auto [v, e, f] = count_off(data + "/genus2.off");
    const Topology tg = topology(g2);
    CHECK(tg.V == v);
    CHECK(tg.E == e);
    CHECK(tg.F == f);
    CHECK(v - e + f == -2);
    CHECK(tg.chi == -2);
    CHECK(tg.genus == 2);
}

TEST_CASE("closed-surface invariants hold for generated and loaded meshes") {
    for (int k = 0; k <= 3; ++k) check_closed(generate_icosphere(k));
    check_closed(generate_flat_torus(5, 7));
    check_closed(load_off(data + "/genus2.off"));
    check_closed(load_off(data + "/octahedron.off"));
}

}
