#include <cmath>

#include "approx.h"
#include "doctest.h"
#include "smib/fbl.h"
#include "smib/linearize.h"

using namespace smib;
using doctest::Approx;

namespace {

struct Fixture {
    MachineParams p = paper_machine();
    ReducedCoefficients rc = derive_reduced_coefficients(p);
    FblCoefficients fc = derive_fbl_coefficients(rc, p);
    Equilibrium eq = find_equilibrium_reduced(1.0, 1.0012, rc);
    ReducedState x0 = ReducedState::from_vec(eq.x0);
};

}  // namespace

TEST_SUITE("fbl") {

TEST_CASE("bridging constants") {
    const Fixture f;
    CHECK(f.fc.e11 == testutil::near(3.255128, 1e-5));
    CHECK(f.fc.e12 == testutil::near(2.255128, 1e-5));
    CHECK(f.fc.e13 == testutil::near(0.022109, 1e-5));
    CHECK(f.fc.e14 == testutil::near(1.55, 1e-12));
    CHECK(f.fc.e15 == testutil::near(4.787097e-4, 1e-9));
    CHECK(efd_to_vf(2.529, f.p) == testutil::near(1.210657e-3, 1e-8));
}

TEST_CASE("transform places the equilibrium at the Brunovsky rest point") {
    const Fixture f;
    const Vec z = fbl_transform(f.x0, f.fc);
    REQUIRE(z.size() == 5);
    CHECK(z(0) == testutil::near(1.0, 1e-9));
    CHECK(z(1) == testutil::near(0.0, 1e-9));
    CHECK(z(2) == testutil::near(0.0, 1e-7));
    CHECK(z(3) == testutil::near(1.0012, 1e-9));
    CHECK(z(4) == testutil::near(0.0, 1e-7));
}

TEST_CASE("sigma/gamma split") {
    const Fixture f;
    const FblDecomposition d = fbl_decompose(f.x0, f.fc);
    CHECK(d.gamma1 == testutil::near(-0.047056, 1e-5));
    CHECK(d.gamma2 == testutil::near(10.0, 1e-12));
    // at rest z3_dot = 0, so the steady field command is -sigma1/gamma1
    CHECK(-d.sigma1 / d.gamma1 == testutil::near(2.5318, 1e-4));

    // same evaluation at the tabulated (not exactly solved) state
    ReducedState xt;
    xt.E_q_prime = 1.1925; xt.omega = 1.0; xt.delta = 1.0;
    xt.T_m = 1.0012; xt.G_V = 1.0012;
    const FblDecomposition dt = fbl_decompose(xt, f.fc);
    CHECK(-dt.sigma1 / dt.gamma1 == testutil::near(2.529990, 1e-5));
}

TEST_CASE("z3_dot = sigma1 + gamma1 E_FD holds against finite differences") {
    const Fixture f;
    // off-equilibrium state, limits irrelevant here
    ReducedState x;
    x.E_q_prime = 1.24; x.omega = 1.003; x.delta = 0.93;
    x.T_m = 0.98; x.G_V = 1.01;
    const FblDecomposition d = fbl_decompose(x, f.fc);
    for (double efd : {0.0, 2.5, -1.0}) {
        const ReducedInput u{efd, 1.0};
        // directional derivative of z3 along the flow
        const double h = 1e-6;
        const ReducedState dx = reduced_rhs(x, u, f.rc);
        ReducedState xp = ReducedState::from_vec(x.vec() + h * dx.vec());
        ReducedState xm = ReducedState::from_vec(x.vec() - h * dx.vec());
        const double z3dot =
            (fbl_transform(xp, f.fc)(2) - fbl_transform(xm, f.fc)(2)) / (2 * h);
        CHECK(z3dot == testutil::near(d.sigma1 + d.gamma1 * efd, 1e-6));
    }
}

TEST_CASE("control law is stationary at the setpoint") {
    const Fixture f;
    Mat A, B;
    brunovsky_pair(A, B);
    REQUIRE(A.rows() == 5);
    REQUIRE(B.cols() == 2);
    // chain structure: two integrator chains of length 3 and 2
    CHECK(A(0, 1) == 1.0);
    CHECK(A(1, 2) == 1.0);
    CHECK(A(3, 4) == 1.0);
    CHECK(A.cwiseAbs().sum() == Approx(3.0));
    CHECK(B(2, 0) == 1.0);
    CHECK(B(4, 1) == 1.0);
    CHECK(B.cwiseAbs().sum() == Approx(2.0));

    const Mat K = Mat::Ones(2, 5);  // any K: z - z_d vanishes at the setpoint
    const FblSetpoint sp{f.eq.delta_0, f.eq.T_m0};
    const FblCommand cmd = fbl_control(f.x0, sp, K, f.fc);
    CHECK(cmd.v(0) == testutil::near(0.0, 1e-7));
    CHECK(cmd.v(1) == testutil::near(0.0, 1e-7));
    CHECK(cmd.u.E_FD == testutil::near(2.5318, 1e-3));
    CHECK(cmd.u.u_T == testutil::near(1.0512, 1e-4));
}

TEST_CASE("loss of relative degree is reported") {
    const Fixture f;
    // gamma1 = r31 E'_q + r32 cos(delta-alpha) + r33 sin(delta-alpha) has an
    // exact zero crossing in E'_q; park the state there
    const double delta = 1.0;
    const double co = std::cos(delta - f.rc.alpha), si = std::sin(delta - f.rc.alpha);
    ReducedState x;
    x.E_q_prime = -(f.fc.r32 * co + f.fc.r33 * si) / f.fc.r31;
    x.delta = delta;
    x.omega = 1.0; x.T_m = 1.0; x.G_V = 1.0;
    CHECK(fbl_decompose(x, f.fc).gamma1 == testutil::near(0.0, 1e-12));
    CHECK_THROWS_AS(
        fbl_control(x, FblSetpoint{1.0, 1.0}, Mat::Zero(2, 5), f.fc),
        design_failure);
}

TEST_CASE("E'_q reconstruction from truth signals") {
    const Fixture f;
    const TruthCoefficients tc = derive_truth_coefficients(paper_machine());
    const Equilibrium te = find_equilibrium_truth(1.0, 1.0012, tc);
    const TruthState xt = TruthState::from_vec(te.x0);
    CHECK(reconstruct_eq_prime(xt, f.fc, EqReconstruction::Primary) ==
          testutil::near(1.192127, 1e-5));
    CHECK(reconstruct_eq_prime(xt, f.fc, EqReconstruction::Alternate) ==
          testutil::near(1.192441, 1e-5));

    const ReducedState folded = truth_reduced_state(xt, f.fc);
    CHECK(folded.E_q_prime == testutil::near(1.192127, 1e-5));
    CHECK(folded.omega == testutil::near(1.0, 1e-12));
    CHECK(folded.delta == testutil::near(1.0, 1e-12));
    CHECK(folded.T_m == testutil::near(1.0012, 1e-9));
    CHECK(folded.G_V == testutil::near(1.0012, 1e-9));
}

}  // TEST_SUITE
