#include <cstdio>
#include <filesystem>

#include "approx.h"
#include "doctest.h"
#include "smib/linearize.h"
#include "smib/statespace.h"

using namespace smib;
using doctest::Approx;

namespace {

const TruthCoefficients& tcoef() {
    static const TruthCoefficients tc = derive_truth_coefficients(paper_machine());
    return tc;
}
const ReducedCoefficients& rcoef() {
    static const ReducedCoefficients rc = derive_reduced_coefficients(paper_machine());
    return rc;
}

}  // namespace

TEST_SUITE("linearize") {

TEST_CASE("truth equilibria across the three operating points") {
    struct Row {
        double d0, tm0, x1, x2, x4, vf, ut, vt;
    };
    // currents, field voltage and terminal voltage from the anchored solves
    const Row rows[] = {
        {1.0,     1.0012,  -0.9184432, 1.631468, 0.4047428, 1.210550e-3, 1.0512, 1.172312},
        {1.0325,  0.6373,  -0.4818048, 1.022853, 0.4094406, 7.589569e-4, 0.6873, 1.018229},
        {0.88676, 1.34899, -1.428082,  2.377874, 0.3747173, 1.764383e-3, 1.39899, 1.398993},
    };
    for (const Row& r : rows) {
        const Equilibrium eq = find_equilibrium_truth(r.d0, r.tm0, tcoef());
        CHECK(eq.residual < 1e-9);
        CHECK(eq.x0(0) == testutil::near(r.x1, 1e-5));
        CHECK(eq.x0(1) == testutil::near(r.x2, 1e-5));
        CHECK(std::abs(eq.x0(2)) < 1e-4);   // damper currents idle at steady state
        CHECK(eq.x0(3) == testutil::near(r.x4, 1e-5));
        CHECK(std::abs(eq.x0(4)) < 1e-4);
        CHECK(eq.x0(5) == testutil::near(1.0, 1e-12));
        CHECK(eq.x0(6) == testutil::near(r.d0, 1e-12));
        CHECK(eq.x0(7) == testutil::near(r.tm0, 1e-9));
        CHECK(eq.x0(8) == testutil::near(r.tm0, 1e-9));
        CHECK(eq.u0(0) == testutil::near(r.vf, 1e-8));
        CHECK(eq.u0(1) == testutil::near(r.ut, 1e-6));
        const TruthOutput y = truth_output(TruthState::from_vec(eq.x0),
                                           TruthInput::from_vec(eq.u0), tcoef());
        CHECK(y.V_t == testutil::near(r.vt, 1e-5));
    }
}

TEST_CASE("reduced equilibria across the three operating points") {
    struct Row {
        double d0, tm0, eqp, efd, ut;
    };
    const Row rows[] = {
        {1.0,     1.0012,  1.193055, 2.531795, 1.0512},
        {1.0325,  0.6373,  0.884389, 1.586423, 0.6873},
        {0.88676, 1.34899, 1.609782, 3.692965, 1.39899},
    };
    for (const Row& r : rows) {
        const Equilibrium eq = find_equilibrium_reduced(r.d0, r.tm0, rcoef());
        CHECK(eq.residual < 1e-10);
        CHECK(eq.x0(0) == testutil::near(r.eqp, 1e-5));
        CHECK(eq.x0(1) == testutil::near(1.0, 1e-12));
        CHECK(eq.x0(2) == testutil::near(r.d0, 1e-12));
        CHECK(eq.x0(3) == testutil::near(r.tm0, 1e-9));
        CHECK(eq.x0(4) == testutil::near(r.tm0, 1e-9));
        CHECK(eq.u0(0) == testutil::near(r.efd, 1e-5));
        CHECK(eq.u0(1) == testutil::near(r.ut, 1e-6));
    }
}

TEST_CASE("anchors with no equilibrium are rejected") {
    // torque demand outside the reachable set: the E'_q quadratic goes
    // complex and the solve must say so instead of returning junk
    CHECK_THROWS_AS(find_equilibrium_reduced(1.0, -40.0, rcoef()), invalid_parameter);
}

TEST_CASE("reduced-model Jacobian about the base point") {
    const Equilibrium eq = find_equilibrium_reduced(1.0, 1.0012, rcoef());
    const StateSpaceModel m = linearize_reduced(eq, rcoef());
    REQUIRE(m.A.rows() == 5);
    REQUIRE(m.B.cols() == 2);
    REQUIRE(m.C.rows() == 2);

    Mat A_want(5, 5);
    A_want << -0.551717, 0,     -0.305972, 0,       0,
              -0.277632, 0,     -0.305469, 0.21097, 0,
               0,        1,      0,        0,       0,
               0,        0,      0,       -2,       2,
               0,       -0.25,   0,        0,      -5;
    CHECK(max_abs(m.A - A_want) < 1e-5);
    CHECK(m.B(0, 0) == testutil::near(0.169492, 1e-5));
    CHECK(m.B(4, 1) == testutil::near(5.0, 1e-12));
    CHECK(m.C(0, 0) == testutil::near(0.525769, 1e-5));
    CHECK(m.C(0, 2) == testutil::near(0.029295, 1e-5));
    CHECK(m.C(1, 1) == testutil::near(1.0, 1e-12));
    CHECK(max_abs(m.D) < 1e-12);

    const Spectrum want = {{-5.006917, 0}, {-1.983866, 0}, {-0.351434, 0},
                           {-0.10475, 0.477985}, {-0.10475, -0.477985}};
    CHECK(spectrum_match_error(eigenvalues(m.A), want) < 1e-5);
}

TEST_CASE("9th-order Jacobian about the base point") {
    const Equilibrium eq = find_equilibrium_truth(1.0, 1.0012, tcoef());
    const StateSpaceModel m = linearize_truth(eq, tcoef());
    REQUIRE(m.A.rows() == 9);
    REQUIRE(m.B.cols() == 2);

    // V_F feedthrough into V_t survives in the full model
    CHECK(m.D(0, 0) == testutil::near(0.134170, 1e-5));
    CHECK(m.D(0, 1) == testutil::near(0.0, 1e-12));
    CHECK(m.D(1, 0) == testutil::near(0.0, 1e-12));

    const double c_row[] = {0.851005, 0.873873, 0.870777, 0.567476,
                            0.60602,  0.869187, -0.104807, 0.0, 0.0};
    for (int j = 0; j < 9; ++j)
        CHECK(m.C(0, j) == testutil::near(c_row[j], 2e-5));

    CHECK(m.B(0, 0) == testutil::near(-0.593301, 1e-5));
    CHECK(m.B(1, 0) == testutil::near(6.736842, 1e-5));
    CHECK(m.B(2, 0) == testutil::near(-5.933014, 1e-5));
    CHECK(max_abs(m.B.block(3, 0, 6, 1)) < 1e-9);

    const Spectrum want = {
        {-5.000019, 0}, {-1.999953, 0}, {-0.1217091, 0}, {-0.09996445, 0},
        {-0.03594789, 0.998261}, {-0.03594789, -0.998261},
        {-0.001566986, 0.028901}, {-0.001566986, -0.028901},
        {-0.0006922890, 0}};
    CHECK(spectrum_match_error(eigenvalues(m.A), want) < 1e-5);
}

TEST_CASE("final value theorem with and without an s cancellation") {
    const Equilibrium eq = find_equilibrium_reduced(1.0, 1.0012, rcoef());
    const StateSpaceModel lin = linearize_reduced(eq, rcoef());
    const DecoupledLoops loops = lfc_avr_transfer_functions(lin, rcoef());

    CHECK(final_value(loops.G_avr) == testutil::near(0.161520, 1e-4));
    // with D = 0 the decoupled speed loop keeps its undamped swing pair on
    // the imaginary axis, so its step response never settles
    CHECK_THROWS_AS(final_value(loops.G_lfc), numerical_failure);

    // a pole in the right half plane has no steady value
    CHECK_THROWS_AS(final_value(TransferFunction{{1.0}, {1.0, -1.0}}),
                    numerical_failure);
    // an undamped oscillator does not settle either
    CHECK_THROWS_AS(final_value(TransferFunction{{1.0}, {1.0, 0.0, 4.0}}),
                    numerical_failure);
}

TEST_CASE("statespace CSV round trip") {
    const Equilibrium eq = find_equilibrium_reduced(1.0, 1.0012, rcoef());
    const StateSpaceModel m = linearize_reduced(eq, rcoef());
    const std::string path =
        (std::filesystem::temp_directory_path() / "smib_test_ss.csv").string();
    write_statespace_csv(path, m);
    const StateSpaceModel back = read_statespace_csv(path);
    CHECK(max_abs(back.A - m.A) < 1e-9);
    CHECK(max_abs(back.B - m.B) < 1e-9);
    CHECK(max_abs(back.C - m.C) < 1e-9);
    CHECK(max_abs(back.D - m.D) < 1e-9);
    std::remove(path.c_str());
}

}  // TEST_SUITE
