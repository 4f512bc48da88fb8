#include <cmath>

#include "approx.h"
#include "doctest.h"
#include "smib/params.h"

using namespace smib;

TEST_SUITE("params") {

TEST_CASE("stock machine table") {
    const MachineParams p = paper_machine();
    CHECK(p.L_d == doctest::Approx(1.70));
    CHECK(p.L_F == doctest::Approx(1.65));
    CHECK(p.L_D == doctest::Approx(1.605));
    CHECK(p.L_q == doctest::Approx(1.64));
    CHECK(p.L_Q == doctest::Approx(1.526));
    CHECK(p.kM_F == doctest::Approx(1.55));
    CHECK(p.kM_Q == doctest::Approx(1.49));
    CHECK(p.r == doctest::Approx(0.001096));
    CHECK(p.r_F == doctest::Approx(0.000742));
    CHECK(p.H == doctest::Approx(2.37));
    CHECK(p.omega_R == doctest::Approx(376.99));
    CHECK(p.R_e == doctest::Approx(0.02));
    CHECK(p.L_e == doctest::Approx(0.4));
    CHECK(p.k == testutil::near(std::sqrt(1.5), 1e-12));
    CHECK(p.alpha == testutil::near(3.5598 * M_PI / 180.0, 1e-12));
    CHECK_NOTHROW(validate(p));
}

TEST_CASE("validate reports bad entries") {
    MachineParams p = paper_machine();
    p.r_F = 0;
    CHECK_THROWS_AS(validate(p), invalid_parameter);
    p = paper_machine();
    p.H = -1;
    CHECK_THROWS_AS(validate(p), invalid_parameter);
}

TEST_CASE("transient constants: published rows, exact fallback") {
    const MachineParams p = paper_machine();
    const TransientConstants t = transient_constants(p);
    CHECK(t.L_d_prime == testutil::near(0.245, 1e-12));
    CHECK(t.tau_d0_prime == testutil::near(5.90, 1e-12));
    CHECK(t.tau_j == testutil::near(4.74, 1e-12));

    MachineParams q = p;  // drop the overrides -> formula values
    q.L_d_prime_pub.reset();
    q.tau_d0_prime_pub.reset();
    const TransientConstants u = transient_constants(q);
    CHECK(u.L_d_prime == testutil::near(1.70 - 1.55 * 1.55 / 1.65, 1e-12));
    CHECK(u.tau_d0_prime == testutil::near(1.65 / (376.99 * 0.000742), 1e-12));
    CHECK(u.tau_d0_prime == testutil::near(5.8986, 1e-3));
}

TEST_CASE("truth coefficients") {
    const TruthCoefficients c = derive_truth_coefficients(paper_machine());
    CHECK(c.mu == testutil::near(-0.1436875, 1e-6));
    CHECK(c.nu == testutil::near(0.8929400, 1e-6));
    CHECK(c.F11 == testutil::near(-0.036081, 1e-5));
    CHECK(c.F16 == testutil::near(1.710309, 1e-5));
    CHECK(c.F22 == testutil::near(-0.004999, 1e-5));
    CHECK(c.F41 == testutil::near(3.588819, 1e-5));
    CHECK(c.G11 == testutil::near(-0.593301, 1e-5));
    CHECK(c.G21 == testutil::near(6.736842, 1e-5));
    CHECK(c.G31 == testutil::near(-5.933014, 1e-5));
    CHECK(c.y11 == testutil::near(0.005568, 1e-5));
    CHECK(c.y16 == testutil::near(-0.315876, 1e-5));
    CHECK(c.y21 == testutil::near(1.035528, 1e-5));
    CHECK(c.y26 == testutil::near(0.316415, 1e-5));
    CHECK(c.i11 == testutil::near(-0.237321, 1e-5));
    CHECK(c.tau_j == testutil::near(2 * 2.37 * 376.99, 1e-6));
}

TEST_CASE("reduced coefficients, r = 0 convention") {
    const ReducedCoefficients c = derive_reduced_coefficients(paper_machine());
    // full-precision regression values
    CHECK(c.Vd1 == testutil::near(-0.024920, 1e-5));
    CHECK(c.Vd3 == testutil::near(-0.803677, 1e-5));
    CHECK(c.Vq1 == testutil::near(-0.379730, 1e-5));
    CHECK(c.Vq3 == testutil::near(0.003723, 1e-5));
    CHECK(c.f11 == testutil::near(-0.551717, 1e-5));
    CHECK(c.f12 == testutil::near(0.382225, 1e-5));
    CHECK(c.f13 == testutil::near(0.003747, 1e-5));
    CHECK(c.f21 == testutil::near(-0.010137, 1e-5));
    CHECK(c.f22 == testutil::near(0.017068, 1e-5));
    CHECK(c.f23 == testutil::near(-0.326851, 1e-5));
    CHECK(c.f24 == testutil::near(0.223465, 1e-5));
    CHECK(c.f25 == testutil::near(-0.006931, 1e-5));
    CHECK(c.f26 == testutil::near(0.002192, 1e-5));
    CHECK(c.f27 == 0.0);
    CHECK(c.f28 == testutil::near(0.210970, 1e-5));
    CHECK(c.f41 == testutil::near(-2.0, 1e-12));
    CHECK(c.f42 == testutil::near(2.0, 1e-12));
    CHECK(c.f51 == testutil::near(-0.25, 1e-12));
    CHECK(c.f52 == testutil::near(-5.0, 1e-12));
    CHECK(c.g11 == testutil::near(0.169492, 1e-5));
    CHECK(c.g55 == testutil::near(5.0, 1e-12));
    CHECK(c.tau_j == testutil::near(4.74, 1e-12));
    CHECK(c.tau_d0_prime == testutil::near(5.90, 1e-12));
}

TEST_CASE("keeping stator r shifts the torque row") {
    // the printed table only reproduces with r dropped; with r kept the
    // leading torque coefficient moves to about -0.0107
    const ReducedCoefficients c = derive_reduced_coefficients(paper_machine(), true);
    CHECK(c.f21 == testutil::near(-0.0107, 5e-4));
    CHECK(std::abs(c.f21 - (-0.0101)) > 1e-4);
}

TEST_CASE("operating point table") {
    const auto ops = paper_operating_points();
    REQUIRE(ops.size() == 3);
    CHECK(ops.at("op1").delta_0 == doctest::Approx(1.0));
    CHECK(ops.at("op1").T_m0 == doctest::Approx(1.0012));
    CHECK(ops.at("op2").delta_0 == doctest::Approx(1.0325));
    CHECK(ops.at("op2").T_m0 == doctest::Approx(0.6373));
    CHECK(ops.at("op3").delta_0 == doctest::Approx(0.88676));
    CHECK(ops.at("op3").T_m0 == doctest::Approx(1.34899));
    CHECK(ops.at("op1").has_table_values);
}

}  // TEST_SUITE
