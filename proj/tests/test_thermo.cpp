#include "specflow/error.hpp"
#include "specflow/thermo.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace specflow;

namespace {

const double pi = std::numbers::pi;

Field height(const TriMesh& m, double amp) {
    Field psi(m.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i) psi[i] = amp * m.vertices()(i, 2) * (1.0 + m.vertices()(i, 0));
    return psi;
}

} // namespace

TEST_SUITE("thermo") {

TEST_CASE("numeric derivative") {
    CHECK(numeric_derivative([](double x) { return std::sin(x); }, 1.0) == doctest::Approx(std::cos(1.0)).epsilon(1e-11));
    CHECK(numeric_derivative([](double x) { return std::log(x); }, 1e-3) == doctest::Approx(1e3).epsilon(1e-10));
    CHECK(numeric_derivative([](double x) { return x * x * x; }, -2.0) == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("closed forms") {
    CHECK(log_partition_conformal(1.0, 2) == 0.0);
    CHECK(log_partition_conformal(std::exp(1.0), 0) == doctest::Approx(0.5));
    CHECK(entropy_conformal(std::exp(1.0), 2) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(entropy_conformal(1.0, 0) == doctest::Approx(-0.5));
    CHECK(entropy_conformal(1.0, 2) == doctest::Approx(-1.0 / 3.0));
    CHECK(entropy_conformal(2.0, 6) == 0.0);
    CHECK(entropy_rate_tau(2.0, 0) == doctest::Approx(-0.25));
    CHECK(entropy_rate_tau(1.0, -2) == doctest::Approx(-2.0 / 3.0));
    CHECK(entropy_fixed_class(3.0, 2, 1.2) == doctest::Approx(entropy_conformal(3.0, 2) - 0.6));
    CHECK_THROWS_AS(entropy_conformal(0.0, 2), ValidationError);
    CHECK_THROWS_AS(entropy_rate_tau(-1.0, 2), ValidationError);
}

TEST_CASE("thermodynamic identities") {
    for (int chi : {2, 0, -2, -4}) {
        const auto logZ = [chi](double b) { return log_partition_conformal(b, chi); };
        for (double beta : {0.1, 0.5, 1.0, 3.0, 20.0}) {
            CHECK(gibbs_entropy(logZ, beta) == doctest::Approx(entropy_conformal(beta, chi)).epsilon(1e-10));
            const ThermoState st = ThermoState::at(logZ, beta);
            CHECK(st.tau == doctest::Approx(1.0 / beta));
            CHECK(free_energy(st) == doctest::Approx(-st.tau * st.log_Z));
            const auto F = [&](double tau) { return -tau * logZ(1.0 / tau); };
            CHECK(entropy_from_free_energy(F, 1.0 / beta) == doctest::Approx(st.S).epsilon(1e-10));
            const double tau = 1.0 / beta;
            const double dS = numeric_derivative([chi](double t) { return entropy_conformal(1.0 / t, chi); }, tau);
            CHECK(entropy_rate_tau(tau, chi) == doctest::Approx(dS).epsilon(1e-9));
        }
    }
}

TEST_CASE("relative entropy") {
    const ConformalMetric g = base_metric(generate_icosphere(3));
    const int n = g.num_vertices();
    for (double c : {-0.4, 0.7})
        CHECK(relative_entropy(g, Field::Constant(n, c), 1.0) == doctest::Approx(-c / 3.0).epsilon(1e-10));
    const Field psi = height(g.mesh(), 0.5);
    const double s1 = relative_entropy(g, psi, 1.0);
    CHECK(relative_entropy(g, psi, 7.5) == s1);
    CHECK(s1 == doctest::Approx(-0.5 * polyakov_rhs(g, psi)).epsilon(1e-12));
    // Flat unit torus, psi = eps cos(2 pi y): pi eps^2 / 48 - eps^2 / 8 to second order.
    const int m = 24;
    const ConformalMetric t = base_metric(generate_flat_torus(m, m));
    const double eps = 0.01;
    Field z(t.num_vertices());
    for (int i = 0; i < z.size(); ++i) z[i] = eps * std::cos(2 * pi * (i / m) / m);
    CHECK(relative_entropy(t, z, 1.0) == doctest::Approx(pi * eps * eps / 48 - eps * eps / 8).epsilon(0.02));
}

TEST_CASE("drifted entropy reduces to the conformal entropy at f = 0") {
    const Spectrum s = analytic_sphere_spectrum(200);
    for (double beta : {0.5, 2.0}) {
        const DriftedEntropy d = entropy_drifted(beta, s);
        CHECK(d.zeta0 == doctest::Approx(-2.0 / 3.0).epsilon(1e-6));
        CHECK(d.S == doctest::Approx(entropy_conformal(beta, 2)).epsilon(1e-6));
        CHECK(d.S_min <= d.S);
        CHECK(d.S <= d.S_max);
        CHECK(!d.notes.empty());
    }
    const OperatorAssembly a = assemble(base_metric(generate_icosphere(3)), OperatorSpec::drifted(Field::Zero(642)));
    const DriftedEntropy mesh = entropy_drifted(2.0, eigen_spectrum(a));
    // Mesh spectra bias the small-t regime; the extracted value is only a diagnostic.
    CHECK(std::abs(mesh.zeta0 + 2.0 / 3.0) < 0.15);
    CHECK(mesh.zeta0_min <= mesh.zeta0);
    CHECK(mesh.zeta0 <= mesh.zeta0_max);
}

TEST_CASE("W functional") {
    const ConformalMetric s = base_metric(generate_icosphere(3));
    CHECK(evaluate_W(s, Field::Constant(s.num_vertices(), 2.0), 1.0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-10));
    const ConformalMetric t = base_metric(generate_flat_torus(8, 8));
    const double c = 0.5, tau = 0.3;
    CHECK(evaluate_W(t, Field::Constant(t.num_vertices(), c), tau) ==
          doctest::Approx((c - 2.0) * std::exp(-c) / (4 * pi * tau)).epsilon(1e-12));
    CHECK_THROWS_AS(evaluate_W(t, Field::Zero(3), 1.0), ValidationError);
}

}
