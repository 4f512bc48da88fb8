#include <cmath>

#include "approx.h"
#include "doctest.h"
#include "smib/linearize.h"
#include "smib/reduced_model.h"
#include "smib/truth_model.h"

using namespace smib;
using doctest::Approx;

namespace {

TruthCoefficients truth_coeffs() {
    return derive_truth_coefficients(paper_machine());
}
ReducedCoefficients reduced_coeffs() {
    return derive_reduced_coefficients(paper_machine());
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("state/input vec round trips") {
    TruthState xt;
    xt.I_d = -0.9; xt.I_F = 1.6; xt.I_D = 1e-5; xt.I_q = 0.4; xt.I_Q = -2e-5;
    xt.omega = 1.001; xt.delta = 0.97; xt.T_m = 1.0; xt.G_V = 1.1;
    const Vec vt = xt.vec();
    REQUIRE(vt.size() == 9);
    CHECK(TruthState::from_vec(vt).vec() == vt);

    ReducedState xr;
    xr.E_q_prime = 1.19; xr.omega = 0.999; xr.delta = 1.0;
    xr.T_m = 1.0012; xr.G_V = 1.0012;
    const Vec vr = xr.vec();
    REQUIRE(vr.size() == 5);
    CHECK(ReducedState::from_vec(vr).vec() == vr);
}

TEST_CASE("9th-order rates nearly vanish at the tabulated operating state") {
    const TruthCoefficients tc = truth_coeffs();
    TruthState x;
    x.I_d = -0.9185; x.I_F = 1.6315; x.I_D = -4.6204e-6;
    x.I_q = 0.4047;  x.I_Q = 5.9539e-5;
    x.omega = 1.0; x.delta = 1.0; x.T_m = 1.0012; x.G_V = 1.0012;
    TruthInput u;
    u.V_F = 0.00121; u.u_T = 1.0512;

    CHECK(truth_rhs(x, u, tc).vec().cwiseAbs().maxCoeff() < 2e-4);

    const TruthOutput y = truth_output(x, u, tc);
    CHECK(y.V_t == testutil::near(1.172299, 2e-5));
    CHECK(y.V_d == testutil::near(-0.662790, 2e-5));
    CHECK(y.V_q == testutil::near(0.966951, 2e-5));
    CHECK(y.omega == testutil::near(1.0, 1e-15));
}

TEST_CASE("solved truth equilibrium is a true fixed point") {
    const TruthCoefficients tc = truth_coeffs();
    const Equilibrium eq = find_equilibrium_truth(1.0, 1.0012, tc);
    CHECK(eq.residual < 1e-9);

    const TruthState x0 = TruthState::from_vec(eq.x0);
    const TruthInput u0 = TruthInput::from_vec(eq.u0);
    CHECK(truth_rhs(x0, u0, tc).vec().cwiseAbs().maxCoeff() < 1e-9);
    CHECK(truth_output(x0, u0, tc).V_t == testutil::near(1.172312, 1e-5));
}

TEST_CASE("closed-form stator currents") {
    const ReducedCoefficients rc = reduced_coeffs();
    AlgebraicCurrents c1 = algebraic_currents(1.1925, 1.0, rc);
    CHECK(c1.I_d == testutil::near(-0.919237, 2e-5));
    CHECK(c1.I_q == testutil::near(0.404257, 2e-5));
    AlgebraicCurrents c3 = algebraic_currents(1.6078, 0.88676, rc);
    CHECK(c3.I_d == testutil::near(-1.42867, 5e-5));
    CHECK(c3.I_q == testutil::near(0.37396, 5e-5));
}

TEST_CASE("torque expansion in the swing row matches the unexpanded form") {
    const ReducedCoefficients rc = reduced_coeffs();
    // with D = 0 the swing row is (T_m - T_e)/tau_j, so the expansion can be
    // recovered exactly from the rhs
    const double pts[][2] = {{1.1925, 1.0}, {1.45, 0.7}, {0.9, 1.3}};
    for (const auto& pt : pts) {
        ReducedState x;
        x.E_q_prime = pt[0]; x.delta = pt[1];
        x.omega = 1.0; x.T_m = 1.0012; x.G_V = 1.0012;
        const ReducedState dx = reduced_rhs(x, ReducedInput{}, rc);
        const double Te = x.T_m - rc.tau_j * dx.omega;
        CHECK(Te == testutil::near(electrical_torque_unexpanded(pt[0], pt[1], rc), 1e-12));
    }
}

TEST_CASE("reduced output at the solved operating point") {
    const ReducedCoefficients rc = reduced_coeffs();
    const Equilibrium eq = find_equilibrium_reduced(1.0, 1.0012, rc);
    const ReducedOutput y = reduced_output(ReducedState::from_vec(eq.x0), rc);
    CHECK(y.V_t == testutil::near(1.172976, 1e-5));
    CHECK(y.V_d == testutil::near(-0.662996, 1e-5));
    CHECK(y.V_q == testutil::near(0.967631, 1e-5));
}

TEST_CASE("transfer-function algebra") {
    TransferFunction g{{2.0}, {2.0, 4.0}};
    g.normalize();
    CHECK(g.den[0] == Approx(1.0));
    CHECK(g.den[1] == Approx(2.0));
    CHECK(g.num[0] == Approx(1.0));

    const TransferFunction a{{1.0}, {1.0, 1.0}};  // 1/(s+1)
    const TransferFunction b{{2.0}, {1.0, 3.0}};  // 2/(s+3)
    const TransferFunction s = tf_series(a, b);
    REQUIRE(s.den.size() == 3);
    CHECK(s.num.back() == Approx(2.0));
    CHECK(s.den[1] == Approx(4.0));
    CHECK(s.den[2] == Approx(3.0));

    // unity feedback around 1/(s+1) closes to 1/(s+2)
    const TransferFunction cl = tf_feedback(a, TransferFunction{{1.0}, {1.0}});
    CHECK(cl.eval(0.0) == Approx(0.5));
    CHECK(cl.eval(1.0) == Approx(1.0 / 3.0));

    CHECK(poly_mul({1, 1}, {1, 2}) == std::vector<double>{1, 3, 2});
    CHECK(poly_add({1, 2, 3}, {5}) == std::vector<double>{1, 2, 8});
}

TEST_CASE("decoupled loop shapes around the base operating point") {
    const ReducedCoefficients rc = reduced_coeffs();
    const Equilibrium eq = find_equilibrium_reduced(1.0, 1.0012, rc);
    const StateSpaceModel lin = linearize_reduced(eq, rc);
    const DecoupledLoops loops = lfc_avr_transfer_functions(lin, rc);

    // speed loop: 2.1097 s over the quartic turbine/governor/swing product
    REQUIRE(loops.G_lfc.num.size() == 2);
    CHECK(loops.G_lfc.num[0] == testutil::near(2.1097, 2e-4));
    CHECK(loops.G_lfc.num[1] == testutil::near(0.0, 1e-12));
    REQUIRE(loops.G_lfc.den.size() == 5);
    CHECK(loops.G_lfc.den[0] == Approx(1.0));
    CHECK(loops.G_lfc.den[1] == testutil::near(7.0, 1e-9));
    CHECK(loops.G_lfc.den[2] == testutil::near(10.3055, 5e-4));
    CHECK(loops.G_lfc.den[3] == testutil::near(2.1383, 5e-4));
    CHECK(loops.G_lfc.den[4] == testutil::near(3.0547, 5e-4));

    // droop path is the constant 1/(R_T * K_G-scaled) gain
    REQUIRE(loops.H_lfc.num.size() == 1);
    REQUIRE(loops.H_lfc.den.size() == 1);
    CHECK(loops.H_lfc.num[0] == testutil::near(0.05, 1e-12));
    CHECK(loops.H_lfc.den[0] == Approx(1.0));

    // voltage loop: first-order lag T1*g11/(s - f11)
    REQUIRE(loops.G_avr.num.size() == 1);
    REQUIRE(loops.G_avr.den.size() == 2);
    CHECK(loops.G_avr.num[0] == testutil::near(0.089114, 1e-4));
    CHECK(loops.G_avr.den[1] == testutil::near(0.551717, 1e-5));
}

}  // TEST_SUITE
