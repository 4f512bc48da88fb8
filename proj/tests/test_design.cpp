#include <cmath>

#include "approx.h"
#include "doctest.h"
#include "smib/design.h"
#include "smib/linearize.h"

using namespace smib;
using doctest::Approx;

namespace {

const StateSpaceModel& base_lin() {
    static const StateSpaceModel lin = [] {
        const ReducedCoefficients rc = derive_reduced_coefficients(paper_machine());
        return linearize_reduced(find_equilibrium_reduced(1.0, 1.0012, rc), rc);
    }();
    return lin;
}

Mat diagm(std::initializer_list<double> d) {
    Vec v(static_cast<int>(d.size()));
    int i = 0;
    for (double x : d) v(i++) = x;
    return v.asDiagonal();
}

// regression margin: pins recorded to ~7 significant digits
void check_gain(const Mat& K, const Mat& want) {
    REQUIRE(K.rows() == want.rows());
    REQUIRE(K.cols() == want.cols());
    for (int i = 0; i < K.rows(); ++i)
        for (int j = 0; j < K.cols(); ++j)
            CHECK(K(i, j) ==
                  testutil::near(want(i, j), 1e-4 * std::max(1.0, std::abs(want(i, j)))));
}

}  // namespace

TEST_SUITE("design") {

TEST_CASE("pid realization matches its transfer function") {
    const PidController pid = pid_controller({10.0, 10.0, 4.0, PidLoop::AVR});
    // ideal: (Kd s^2 + Kp s + Ki)/s
    REQUIRE(pid.ideal.num.size() == 3);
    CHECK(pid.ideal.num[0] == Approx(4.0));
    CHECK(pid.ideal.num[2] == Approx(10.0));

    // realized with N = 100: (410 s^2 + 1010 s + 1000)/(s^2 + 100 s)
    for (double s : {0.5, 2.0, 10.0}) {
        const double want =
            (410 * s * s + 1010 * s + 1000) / (s * s + 100 * s);
        CHECK(pid.realized.eval(s) == Approx(want).epsilon(1e-10));
        // and the 2-state realization evaluates to the same thing
        const Mat resolvent =
            (s * Mat::Identity(2, 2) - pid.A).fullPivLu().solve(pid.B);
        const double from_ss = (pid.C * resolvent + pid.D)(0, 0);
        CHECK(from_ss == Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("AVR loop shape under the ideal PID") {
    const ReducedCoefficients rc = derive_reduced_coefficients(paper_machine());
    const Equilibrium eq = find_equilibrium_reduced(1.0, 1.0012, rc);
    const DecoupledLoops loops =
        lfc_avr_transfer_functions(linearize_reduced(eq, rc), rc);
    const PidController pid = pid_controller({10.0, 10.0, 4.0, PidLoop::AVR});
    const TransferFunction gh = tf_series(pid.ideal, loops.G_avr);
    REQUIRE(gh.num.size() == 3);
    CHECK(gh.num[0] == testutil::near(0.3565, 2e-3));
    CHECK(gh.num[1] == testutil::near(0.8913, 2e-3));
    CHECK(gh.num[2] == testutil::near(0.8913, 2e-3));
    REQUIRE(gh.den.size() == 3);
    CHECK(gh.den[1] == testutil::near(0.5517, 2e-3));
    CHECK(gh.den[2] == testutil::near(0.0, 1e-12));
}

TEST_CASE("LQR gains across the tuning sets") {
    const StateSpaceModel& lin = base_lin();
    const Mat R05 = 0.5 * Mat::Identity(2, 2);

    GainMatrix lc6 = lqr_gain(lin, diagm({300, 250, 200, 200, 250}), R05);
    Mat want(2, 5);
    want << 23.723829, -36.34205, -5.591484, -2.560953, -0.045356,
            -1.337997, 21.030885, 1.568679, 9.023949, 21.543671;
    check_gain(lc6.K, want);
    CHECK(lc6.method == "lqr");
    CHECK(is_hurwitz(lin.A - lin.B * lc6.K));

    GainMatrix hot = lqr_gain(lin, diagm({40000, 10000, 250000, 500, 500}),
                              0.07 * Mat::Identity(2, 2));
    want << 753.9173, -575.5891, -610.0572, -27.6439, -0.1300855,
            -3.837522, 1782.516, 1474.197, 128.4916, 84.12716;
    check_gain(hot.K, want);

    GainMatrix ltr4 = lqr_gain(lin, diagm({1254.75, 1500, 544.5, 142.5, 1500}),
                               Mat::Identity(2, 2));
    want << 34.50647, -49.51589, -5.697001, -4.195166, -0.04320061,
            -1.274418, 28.08839, -0.0302479, 4.324199, 37.78734;
    check_gain(ltr4.K, want);

    GainMatrix ltr6 = lqr_gain(lin, diagm({7500, 15000, 16500, 7500, 7500}),
                               Mat::Identity(2, 2));
    want << 87.39475, -216.7644, -60.79021, -13.43314, -0.0618387,
            -1.824242, 98.03784, 17.72237, 42.13719, 85.80268;
    check_gain(ltr6.K, want);
}

TEST_CASE("lqr refuses an unstabilizable pair") {
    StateSpaceModel ss;
    ss.A = Mat::Zero(2, 2);
    ss.A(0, 0) = 1.0;   // unstable and untouched by the input
    ss.A(1, 1) = -1.0;
    ss.B = Mat::Zero(2, 1);
    ss.B(1, 0) = 1.0;
    CHECK_THROWS_AS(lqr_gain(ss, Mat::Identity(2, 2), Mat::Identity(1, 1)),
                    design_failure);
}

TEST_CASE("pole placement hits the requested spectrum for different seeds") {
    const StateSpaceModel& lin = base_lin();
    const Spectrum want = {{-0.8, 0}, {-0.9, 0}, {-0.7, 0}, {-1.1, 0}, {-1.0, 0}};
    for (std::uint64_t seed : {0ull, 1ull}) {
        const GainMatrix g = place_poles(lin.A, lin.B, want, seed);
        CHECK(g.method == "place");
        CHECK(spectrum_match_error(eigenvalues(lin.A - lin.B * g.K), want) < 1e-8);
    }
    // a stiff, widely spread request
    const Spectrum stiff = {{-300, 0}, {-0.9, 0}, {-280, 0}, {-5, 0}, {-70, 0}};
    const GainMatrix g = place_poles(lin.A, lin.B, stiff);
    CHECK(spectrum_match_error(eigenvalues(lin.A - lin.B * g.K), stiff) < 1e-6);
}

TEST_CASE("observer gain places the dual spectrum") {
    const StateSpaceModel& lin = base_lin();
    const Spectrum want = {{-2, 0}, {-3, 0}, {-4, 0}, {-5, 0}, {-6, 0}};
    const ObserverGain og =
        observer_gain(lin.A, lin.C, want, MeasuredOutputs::VtAndOmega);
    REQUIRE(og.L.rows() == 5);
    REQUIRE(og.L.cols() == 2);
    CHECK(spectrum_match_error(eigenvalues(lin.A - og.L * lin.C), want) < 1e-6);
}

TEST_CASE("scale_spectrum scales both parts") {
    const Spectrum s = {{-1, 2}, {-1, -2}, {-3, 0}};
    const Spectrum r = scale_spectrum(s, 2.0);
    CHECK(r[0] == Cplx(-2, 4));
    CHECK(r[2] == Cplx(-6, 0));
}

TEST_CASE("terminal voltage alone observes the whole reduced state") {
    const StateSpaceModel& lin = base_lin();
    Mat obsv(5, 5);
    Mat row = lin.C.row(0);
    for (int i = 0; i < 5; ++i) {
        obsv.row(i) = row;
        row = row * lin.A;
    }
    CHECK(obsv.fullPivLu().rank() == 5);
}

TEST_CASE("Kalman gains at q = 0") {
    const StateSpaceModel& lin = base_lin();

    // V_t-only filter, measurement intensity 20
    StateSpaceModel vt_only = lin;
    vt_only.C = lin.C.row(0);
    vt_only.D = Mat::Zero(1, 2);
    LtrSchedule s1;
    s1.V10 = Mat::Identity(5, 5);
    s1.V20 = 20.0 * Mat::Identity(1, 1);
    s1.V = Mat::Identity(2, 2);
    s1.q = 0.0;
    const ObserverGain g1 = kalman_ltr_gain(vt_only, s1);
    const double want1[] = {0.12359, 0.046818, -0.182289, -0.001376, -0.002095};
    REQUIRE(g1.L.cols() == 1);
    for (int i = 0; i < 5; ++i)
        CHECK(g1.L(i, 0) == testutil::near(want1[i], 1e-4));
    CHECK(is_hurwitz(vt_only.A - g1.L * vt_only.C));

    // both outputs, unit intensities
    LtrSchedule s2;
    s2.V10 = Mat::Identity(5, 5);
    s2.V20 = Mat::Identity(2, 2);
    s2.V = Mat::Identity(2, 2);
    s2.q = 0.0;
    const ObserverGain g2 = kalman_ltr_gain(lin, s2);
    Mat want2(5, 2);
    want2 << 0.715324, 0.109841,
             0.053143, 1.014607,
            -0.812825, -0.157288,
            -0.001037, -0.006757,
            -0.002038, -0.040855;
    CHECK(max_abs(g2.L - want2) < 1e-4);
}

TEST_CASE("loop-transfer recovery schedule") {
    const StateSpaceModel& lin = base_lin();

    LtrSchedule mid;
    mid.V10 = Mat::Identity(5, 5);
    mid.V20 = Mat::Identity(2, 2);
    mid.V = Mat::Identity(2, 2);
    mid.q = 9.0005;
    const ObserverGain gm = kalman_ltr_gain(lin, mid);
    Mat want(5, 2);
    want << 1.353584, -0.02083382,
           -0.01018228, 1.622729,
           -1.025660, 0.02633573,
           -0.04890582, 3.881764,
            0.003556684, 1.729453;
    CHECK(max_abs(gm.L - want) < 1e-4);
    CHECK(max_abs(mid.H - gm.L) < 1e-12);

    // truth-loop tuning: lighter measurement weight, q = 5.25
    LtrSchedule tc;
    tc.V10 = Mat::Identity(5, 5);
    tc.V20 = 0.65 * Mat::Identity(2, 2);
    tc.V = Mat::Identity(2, 2);
    tc.q = 5.25;
    const ObserverGain gt = kalman_ltr_gain(lin, tc);
    Mat want_tc(5, 2);
    want_tc << 1.251873, 0.03939,
               0.016254, 1.581555,
              -1.100485, -0.152126,
              -0.057363, 2.114161,
              -0.003745, 0.891006;
    CHECK(max_abs(gt.L - want_tc) < 1e-4);

    // recovery: H(q)/q closes on B as q grows
    const double want_norm[] = {4.815453, 4.574497, 4.122233, 3.546637};
    const double qs[] = {10, 30, 100, 300};
    double prev = 1e30;
    for (int i = 0; i < 4; ++i) {
        LtrSchedule s;
        s.V10 = Mat::Identity(5, 5);
        s.V20 = Mat::Identity(2, 2);
        s.V = Mat::Identity(2, 2);
        s.q = qs[i];
        const ObserverGain g = kalman_ltr_gain(lin, s);
        const double m = (g.L / qs[i] - lin.B).norm();
        CHECK(m == testutil::near(want_norm[i], 1e-3));
        CHECK(m < prev);
        CHECK(is_hurwitz(lin.A - g.L * lin.C));
        prev = m;
    }

    // intensities must be SPD
    LtrSchedule bad = mid;
    bad.V20 = Mat::Zero(2, 2);
    CHECK_THROWS_AS(kalman_ltr_gain(lin, bad), invalid_parameter);
}

TEST_CASE("root locus of 1/(s(s+2)) pinches at -1") {
    const TransferFunction g{{1.0}, {1.0, 2.0, 0.0}};
    const auto branches = root_locus(g, {0.5, 1.0});
    REQUIRE(branches.size() == 2);
    REQUIRE(branches[0].size() == 2);
    // k = 0.5: roots of s^2 + 2s + 0.5
    const Spectrum half = {{-1.0 + std::sqrt(0.5), 0}, {-1.0 - std::sqrt(0.5), 0}};
    CHECK(spectrum_match_error(branches[0], half) < 1e-9);
    // k = 1: the critically damped double pole
    const Spectrum crit = {{-1.0, 0}, {-1.0, 0}};
    CHECK(spectrum_match_error(branches[1], crit) < 1e-6);
}

TEST_CASE("gain serialization") {
    const StateSpaceModel& lin = base_lin();
    const GainMatrix g =
        lqr_gain(lin, diagm({300, 250, 200, 200, 250}), 0.5 * Mat::Identity(2, 2));
    const std::string text = gain_to_text(g);
    CHECK(text.find("[gain.K]") != std::string::npos);
    CHECK(text.find("lqr") != std::string::npos);
}

}  // TEST_SUITE
