#include <cmath>
#include <cstdio>
#include <filesystem>

#include "approx.h"
#include "doctest.h"
#include "smib/linearize.h"
#include "smib/sim.h"

using namespace smib;
using doctest::Approx;

namespace {

struct Fixture {
    MachineParams p = paper_machine();
    TruthCoefficients tc = derive_truth_coefficients(p);
    ReducedCoefficients rc = derive_reduced_coefficients(p);
    FblCoefficients fc = derive_fbl_coefficients(rc, p);
    Equilibrium te = find_equilibrium_truth(1.0, 1.0012, tc);
    Equilibrium re = find_equilibrium_reduced(1.0, 1.0012, rc);
    StateSpaceModel lin = linearize_reduced(re, rc);
};

// scalar decay plant, x(t) = exp(-t)
ClosedLoopSystem decay_system() {
    Mat A(1, 1), B(1, 1), C(1, 1), D(1, 1);
    A << -1; B << 0; C << 1; D << 0;
    Vec x0(1);
    x0 << 1.0;
    return linear_system(A, B, C, D, x0, [](double) { return Vec::Zero(1); },
                         {"x"}, {"u"}, {"y"});
}

double at_time(const Trajectory& tr, const std::string& channel, double when) {
    const std::vector<double> v = tr.channel(channel);
    for (size_t k = 0; k < tr.t.size(); ++k)
        if (std::abs(tr.t[k] - when) < 1e-9) return v[k];
    REQUIRE(false);
    return 0;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("integrators reproduce scalar exponential decay") {
    SimOptions opt;
    opt.t_end = 5.0;
    const double want = std::exp(-5.0);

    opt.method = SimOptions::Method::rk4;
    opt.dt = 1e-3;
    Trajectory t4 = simulate(decay_system(), opt);
    CHECK(t4.t.back() == testutil::near(5.0, 1e-12));  // lands exactly
    CHECK(t4.x.back()(0) == testutil::near(want, 1e-9));
    CHECK_FALSE(t4.diverged);

    opt.method = SimOptions::Method::rk45;
    Trajectory t45 = simulate(decay_system(), opt);
    CHECK(t45.t.back() == testutil::near(5.0, 1e-12));
    CHECK(t45.x.back()(0) == testutil::near(want, 1e-6));
}

TEST_CASE("sampling grid") {
    SimOptions opt;
    opt.t_end = 10.0;
    opt.sample_dt = 1.0;
    const Trajectory tr = simulate(decay_system(), opt);
    REQUIRE(tr.t.size() == 11);
    for (size_t k = 0; k < tr.t.size(); ++k)
        CHECK(tr.t[k] == testutil::near(static_cast<double>(k), 1e-9));
}

TEST_CASE("test signals") {
    const TestSignal g1 = staircase_gamma1(0.05);
    CHECK(g1.value(0.0) == Approx(0.05));
    CHECK(g1.value(150.0) == Approx(0.05));
    CHECK(g1.value(250.0) == Approx(0.10));
    CHECK(g1.value(450.0) == Approx(0.15));
    CHECK(g1.value(700.0) == Approx(0.20));
    const TestSignal g2 = staircase_gamma2(0.05);
    CHECK(g2.value(250.0) == Approx(0.05));   // half the height, same times

    const TestSignal c = custom_staircase({0.0, 10.0}, {1.0, 3.0});
    CHECK(c.value(5.0) == Approx(1.0));
    CHECK(c.value(10.0) == Approx(3.0));
    CHECK(c.value(50.0) == Approx(3.0));
    CHECK_THROWS_AS(custom_staircase({1.0, 2.0}, {0.1, 0.2}), invalid_parameter);
    CHECK_THROWS_AS(custom_staircase({0.0, 2.0}, {0.1}), invalid_parameter);
}

TEST_CASE("trajectory CSV round trip and channel lookup") {
    SimOptions opt;
    opt.t_end = 2.0;
    opt.sample_dt = 0.5;
    Trajectory tr = simulate(decay_system(), opt);
    tr.metadata.emplace_back("scenario", "unit-test");

    const std::string path =
        (std::filesystem::temp_directory_path() / "smib_test_traj.csv").string();
    write_trajectory_csv(path, tr);
    const Trajectory back = read_trajectory_csv(path);
    REQUIRE(back.t.size() == tr.t.size());
    CHECK(back.state_names == tr.state_names);
    CHECK(back.x.back()(0) == testutil::near(tr.x.back()(0), 1e-12));
    CHECK(back.y.front()(0) == testutil::near(1.0, 1e-12));
    std::remove(path.c_str());

    CHECK(tr.channel("x").front() == Approx(1.0));
    CHECK(tr.channel("y").size() == tr.t.size());
    CHECK_THROWS_AS(tr.channel("nope"), invalid_parameter);
}

TEST_CASE("metrics on the scalar lag") {
    SimOptions opt;
    opt.t_end = 10.0;
    opt.sample_dt = 0.01;
    const Trajectory tr = simulate(decay_system(), opt);
    const Metrics m = compute_metrics(tr, {{"x", 0.0}});
    const ChannelMetrics* cm = m.find("x");
    REQUIRE(cm != nullptr);
    CHECK(cm->has_reference);
    CHECK(cm->ss_error < 1e-3);
    CHECK(cm->settled);
    // 2% band entry for exp(-t): ln 50 = 3.912
    CHECK(cm->settling_time == testutil::near(3.912, 0.1));
    CHECK(cm->peak_deviation == testutil::near(1.0, 0.01));
    CHECK(cm->decaying);
    CHECK(metrics_to_text(m).find("x") != std::string::npos);
}

TEST_CASE("envelope classifier") {
    std::vector<double> t, damped, growing;
    for (int k = 0; k <= 1000; ++k) {
        const double tk = 0.01 * k;
        t.push_back(tk);
        damped.push_back(std::exp(-tk) * std::cos(5 * tk));
        growing.push_back(0.01 * std::exp(0.4 * tk) * std::sin(5 * tk));
    }
    CHECK(decreasing_envelope(t, damped));
    CHECK_FALSE(decreasing_envelope(t, growing));
}

TEST_CASE("finite-escape blowup is reported, not thrown") {
    ClosedLoopSystem sys;
    sys.nz = 1;
    sys.z0 = Vec::Ones(1);
    sys.rhs = [](double, const Vec& z) {
        Vec d(1);
        d(0) = z(0) * z(0);   // escapes at t = 1
        return d;
    };
    sys.inputs = [](double, const Vec&) { return Vec(0); };
    sys.outputs = [](double, const Vec&) { return Vec(0); };
    sys.state_names = {"x"};

    SimOptions opt;
    opt.t_end = 2.0;
    const Trajectory tr = simulate(sys, opt);
    CHECK(tr.diverged);
    CHECK_FALSE(tr.diagnostic.empty());
    CHECK(tr.horizon() < 1.6);
    // too little of the horizon survived for summary statistics
    CHECK_THROWS_AS(compute_metrics(tr), invalid_parameter);
}

TEST_CASE("SISO PID tracks a unit step") {
    const TransferFunction plant{{1.0}, {1.0, 1.0}};
    const ClosedLoopSystem sys =
        pid_siso_loop(plant, TransferFunction{{1.0}, {1.0}}, {2.0, 4.0, 0.1});
    SimOptions opt;
    opt.t_end = 15.0;
    opt.sample_dt = 0.05;
    const Trajectory tr = simulate(sys, opt);
    CHECK(tr.y.back()(0) == testutil::near(1.0, 1e-3));
}

TEST_CASE("coupled PID regulates the deviation model") {
    const Fixture f;
    Vec dx0 = Vec::Zero(5);
    dx0(2) = -0.1;
    const ClosedLoopSystem sys = pid_linear_loop(
        f.lin, {200.0, 150.0, 100.0, PidLoop::LFC}, {10.0, 10.0, 4.0, PidLoop::AVR}, dx0);
    SimOptions opt;
    opt.t_end = 40.0;
    opt.sample_dt = 0.05;
    const Trajectory tr = simulate(sys, opt);
    CHECK_FALSE(tr.diverged);
    // both regulated outputs die out; delta itself parks wherever the two
    // integrators leave it, so it is deliberately unpinned
    CHECK(std::abs(tr.y.back()(0)) < 1e-4);
    CHECK(std::abs(tr.y.back()(1)) < 1e-6);
}

TEST_CASE("linear state feedback drives the kick to zero") {
    const Fixture f;
    const GainMatrix g = lqr_gain(
        f.lin, Vec((Vec(5) << 300, 250, 200, 200, 250).finished()).asDiagonal(),
        0.5 * Mat::Identity(2, 2));
    Vec dx0 = Vec::Zero(5);
    dx0(0) = 0.05;
    dx0(2) = -0.1;
    SimOptions opt;
    opt.t_end = 60.0;
    opt.sample_dt = 0.1;
    const Trajectory tr = simulate(state_feedback_linear(f.lin, g.K, dx0), opt);
    CHECK_FALSE(tr.diverged);
    CHECK(tr.x.back().cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("observer loop: estimation error collapses ahead of the state") {
    const Fixture f;
    const GainMatrix g = lqr_gain(
        f.lin, Vec((Vec(5) << 300, 250, 200, 200, 250).finished()).asDiagonal(),
        0.5 * Mat::Identity(2, 2));
    const Spectrum opoles = {{-2, 0}, {-3, 0}, {-4, 0}, {-5, 0}, {-6, 0}};
    const ObserverGain og =
        observer_gain(f.lin.A, f.lin.C, opoles, MeasuredOutputs::VtAndOmega);
    Vec dx0 = Vec::Zero(5);
    dx0(2) = -0.1;
    SimOptions opt;
    opt.t_end = 40.0;
    opt.sample_dt = 0.05;
    const Trajectory tr =
        simulate(observer_linear_loop(f.lin, g.K, og.L, dx0, Vec::Zero(5)), opt);
    CHECK_FALSE(tr.diverged);
    REQUIRE(tr.x.back().size() == 10);

    std::vector<double> err;
    err.reserve(tr.t.size());
    for (const Vec& z : tr.x)
        err.push_back((z.head(5) - z.tail(5)).cwiseAbs().maxCoeff());
    CHECK(decreasing_envelope(tr.t, err));
    CHECK(err.back() < 1e-6);
}

TEST_CASE("feedback linearization converges with the actuator limits on") {
    const Fixture f;
    Mat Ab, Bb;
    brunovsky_pair(Ab, Bb);
    StateSpaceModel bss;
    bss.A = Ab;
    bss.B = Bb;
    const GainMatrix g = lqr_gain(
        bss, Vec((Vec(5) << 300, 250, 200, 200, 250).finished()).asDiagonal(),
        0.07 * Mat::Identity(2, 2));
    Vec x0 = f.re.x0;
    x0(0) += 0.05; x0(1) += 0.002; x0(2) -= 0.1; x0(3) += 0.02;
    const ClosedLoopSystem sys = fbl_reduced_loop(
        f.fc, g.K, FblSetpoint{f.re.delta_0, f.re.T_m0}, x0, true, 1.2);
    SimOptions opt;
    opt.t_end = 20.0;
    opt.sample_dt = 0.05;
    const Trajectory tr = simulate(sys, opt);
    CHECK_FALSE(tr.diverged);
    CHECK(tr.channel("V_t").back() == testutil::near(1.172976, 5e-3));
    CHECK(tr.channel("delta").back() == testutil::near(1.0, 2e-3));
    CHECK(tr.channel("omega").back() == testutil::near(1.0, 1e-4));
}

TEST_CASE("open-loop staircase landmarks at t = 190") {
    const Fixture f;
    SimOptions opt;
    opt.t_end = 192.0;
    opt.sample_dt = 1.0;
    opt.max_step = 1.0;

    const Trajectory tt = simulate(
        truth_open_loop(f.tc, f.fc, f.te.x0, staircase_gamma1(0.05), true, 1.2), opt);
    CHECK_FALSE(tt.diverged);
    CHECK(at_time(tt, "V_t", 190.0) == testutil::near(1.0591, 5e-3));
    CHECK(at_time(tt, "delta", 190.0) == testutil::near(-0.3128, 1e-2));
    CHECK(at_time(tt, "omega", 190.0) == testutil::near(1.011524, 1e-3));

    const Trajectory rt = simulate(
        reduced_open_loop(f.rc, f.re.x0, staircase_gamma1(0.05), true, 1.2), opt);
    CHECK_FALSE(rt.diverged);
    CHECK(at_time(rt, "V_t", 190.0) == testutil::near(0.8183, 5e-3));
    CHECK(at_time(rt, "delta", 190.0) == testutil::near(0.0612, 1e-2));
    CHECK(at_time(rt, "omega", 190.0) == testutil::near(1.020788, 1e-3));
}

}  // TEST_SUITE
