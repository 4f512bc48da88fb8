#include "smib/acceptance.h"

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "smib/csvplot.h"
#include "smib/design.h"
#include "smib/fbl.h"
#include "smib/frames.h"
#include "smib/linearize.h"
#include "smib/sim.h"

namespace smib {

namespace {

struct Gate {
    std::ostream& os;
    int passed = 0, failed = 0;

    void line(bool ok, const std::string& label, const std::string& detail) {
        std::string padded = label;
        if (padded.size() < 46) padded.resize(46, ' ');
        os << (ok ? "PASS  " : "FAIL  ") << padded << detail << "\n";
        (ok ? passed : failed) += 1;
    }
    // |measured - expected| <= tol
    void close(const std::string& label, double measured, double expected, double tol) {
        line(std::abs(measured - expected) <= tol, label,
             "measured " + format_g12(measured) + "  expected " + format_g12(expected) +
                 "  tol " + format_g12(tol));
    }
    // measured <= bound
    void below(const std::string& label, double measured, double bound) {
        line(measured <= bound, label,
             "measured " + format_g12(measured) + "  bound " + format_g12(bound));
    }
    void flag(const std::string& label, bool ok, const std::string& detail) {
        line(ok, label, detail);
    }
    void section(const std::string& title) { os << "\n-- " << title << " --\n"; }
    void note(const std::string& text) { os << "      note: " << text << "\n"; }
};

struct WorstEntry {
    double err = 0;
    int r = 0, c = 0;
};

WorstEntry worst_abs(const Mat& measured, const Mat& expected) {
    WorstEntry w;
    for (int i = 0; i < measured.rows(); ++i)
        for (int j = 0; j < measured.cols(); ++j) {
            const double e = std::abs(measured(i, j) - expected(i, j));
            if (e > w.err) w = {e, i, j};
        }
    return w;
}

WorstEntry worst_rel(const Mat& measured, const Mat& expected) {
    WorstEntry w;
    for (int i = 0; i < measured.rows(); ++i)
        for (int j = 0; j < measured.cols(); ++j) {
            const double e =
                std::abs(measured(i, j) - expected(i, j)) / std::abs(expected(i, j));
            if (e > w.err) w = {e, i, j};
        }
    return w;
}

void matrix_close(Gate& g, const std::string& label, const Mat& measured,
                  const Mat& expected, double tol) {
    const WorstEntry w = worst_abs(measured, expected);
    g.line(w.err <= tol, label,
           "max |err| " + format_g12(w.err) + " at (" + std::to_string(w.r) + "," +
               std::to_string(w.c) + ")  tol " + format_g12(tol));
}

Cplx polyval(const std::vector<double>& c, Cplx s) {
    Cplx acc = 0;
    for (double ci : c) acc = acc * s + ci;
    return acc;
}

double final_of(const Trajectory& tr, const std::string& name) {
    const auto col = tr.channel(name);
    if (col.empty()) throw numerical_failure("empty channel " + name);
    return col.back();
}

// truth-anchored references in reduced coordinates (matches the scenario
// wiring: reconstructed state, field command rescaled through e15)
struct TruthRefs {
    Vec x_ref, u_ref;
    double vt_ref = 0;
    Equilibrium eq;
};

TruthRefs truth_refs_at(const OperatingPoint& op, const TruthCoefficients& tc,
                        const FblCoefficients& fc) {
    TruthRefs r;
    r.eq = find_equilibrium_truth(op.delta_0, op.T_m0, tc);
    const TruthState xs = TruthState::from_vec(r.eq.x0);
    r.x_ref = truth_reduced_state(xs, fc).vec();
    r.u_ref = (Vec(2) << r.eq.u0(0) / fc.e15, r.eq.u0(1)).finished();
    r.vt_ref = truth_output(xs, TruthInput::from_vec(r.eq.u0), tc).V_t;
    return r;
}

}  // namespace

bool run_acceptance(const Config& cfg, std::ostream& os) {
    Gate g{os};
    const MachineParams& p = cfg.machine;
    const TruthCoefficients tc = derive_truth_coefficients(p);
    const ReducedCoefficients rc = derive_reduced_coefficients(p);
    const FblCoefficients fc = derive_fbl_coefficients(rc, p);

    auto op_at = [&](const char* name) -> const OperatingPoint& {
        auto it = cfg.operating_points.find(name);
        if (it == cfg.operating_points.end())
            throw invalid_parameter(std::string("acceptance needs operating point ") + name);
        return it->second;
    };
    const OperatingPoint &op1 = op_at("op1"), &op2 = op_at("op2"), &op3 = op_at("op3");

    const Equilibrium re1 = find_equilibrium_reduced(op1.delta_0, op1.T_m0, rc);
    const Equilibrium te1 = find_equilibrium_truth(op1.delta_0, op1.T_m0, tc);
    const StateSpaceModel lin1 = linearize_reduced(re1, rc);
    const StateSpaceModel linT = linearize_truth(te1, tc);

    // ---------------------------------------------------------- criterion 1
    g.section("criterion 1: transient constants");
    const TransientConstants tcon = transient_constants(p);
    g.close("1.1 L_d_prime", tcon.L_d_prime, 0.245, 1e-3);
    g.close("1.2 tau_d0_prime [s]", tcon.tau_d0_prime, 5.90, 0.01);
    g.close("1.3 tau_j = 2H", tcon.tau_j, 4.74, 1e-3);

    // ---------------------------------------------------------- criterion 2
    g.section("criterion 2: reduced coefficient table, r = 0 convention");
    {
        struct Pin {
            const char* name;
            double measured, printed;
        };
        const Pin pins[] = {
            {"Vd1", rc.Vd1, -0.0249},   {"Vd2", rc.Vd2, 0.0249},
            {"Vd3", rc.Vd3, -0.8037},   {"Vq1", rc.Vq1, -0.3797},
            {"Vq2", rc.Vq2, 0.3797},    {"Vq3", rc.Vq3, 0.0037},
            {"f11", rc.f11, -0.5517},   {"f12", rc.f12, 0.3822},
            {"f13", rc.f13, 0.0037},    {"f21", rc.f21, -0.0101},
            {"f22", rc.f22, 0.0171},    {"f23", rc.f23, -0.3269},
            {"f24", rc.f24, 0.2235},    {"f25", rc.f25, -0.0069},
            {"f26", rc.f26, 0.0022},    {"f27", rc.f27, 0.0},
            {"f28", rc.f28, 0.2110},    {"f41", rc.f41, -2.0},
            {"f42", rc.f42, 2.0},       {"f51", rc.f51, -0.25},
            {"f52", rc.f52, -5.0},      {"g11", rc.g11, 0.1695},
            {"g55", rc.g55, 5.0},       {"E_FD_max", p.E_FD_max, 5.0},
            {"E_FD_min", p.E_FD_min, -5.0}, {"G_V_max", p.G_V_max, 1.2},
            {"G_V_min", p.G_V_min, 0.0},
        };
        double worst = -1;
        const char* worst_name = "";
        for (const Pin& pin : pins) {
            const double e = std::abs(pin.measured - pin.printed);
            if (e > worst) worst = e, worst_name = pin.name;
        }
        g.line(worst <= 1e-3, "2.1 table entries (27)",
               std::string("max |err| ") + format_g12(worst) + " at " + worst_name +
                   "  tol 0.001");
    }

    // ---------------------------------------------------------- criterion 3
    g.section("criterion 3: reduced linearization at op1");
    {
        Mat Ap(5, 5), Bp(5, 2), Cp(2, 5);
        Ap << -0.5517, 0, -0.3060, 0, 0,
              -0.2776, 0, -0.3054, 0.2110, 0,
               0, 1, 0, 0, 0,
               0, 0, 0, -2, 2,
               0, -0.25, 0, 0, -5;
        Bp << 0.1695, 0, 0, 0, 0, 0, 0, 0, 0, 5;
        Cp << 0.5258, 0, 0.0294, 0, 0,
              0, 1, 0, 0, 0;
        matrix_close(g, "3.1 A vs printed", lin1.A, Ap, 1e-3);
        matrix_close(g, "3.2 B vs printed", lin1.B, Bp, 1e-3);
        matrix_close(g, "3.3 C vs printed", lin1.C, Cp, 1e-3);
        const Spectrum printed = {{-5.0069, 0},
                                  {-0.1048, 0.4778},
                                  {-0.1048, -0.4778},
                                  {-0.3514, 0},
                                  {-1.9839, 0}};
        g.below("3.4 eigenvalues vs printed (multiset)",
                spectrum_match_error(eigenvalues(lin1.A), printed), 1e-3);
    }

    // ---------------------------------------------------------- criterion 4
    g.section("criterion 4: 9th-order linearization at op1");
    {
        const Spectrum printed = {{-5.0, 0},
                                  {-0.0359, 0.9983},
                                  {-0.0359, -0.9983},
                                  {-2.0, 0},
                                  {-0.0016, 0.0289},
                                  {-0.0016, -0.0289},
                                  {-0.0007, 0},
                                  {-0.0995, 0},
                                  {-0.1217, 0}};
        g.below("4.1 eigenvalues vs printed (multiset)",
                spectrum_match_error(eigenvalues(linT.A), printed), 2e-3);
        g.close("4.2 D feedthrough V_t<-V_F", linT.D(0, 0), 0.1333, 2e-3);
    }

    // ---------------------------------------------------------- criterion 5
    g.section("criterion 5: equilibria");
    {
        Vec xp(5);
        xp << 1.1925, 1, 1, 1.0012, 1.0012;
        matrix_close(g, "5.1 reduced equilibrium state", re1.x0, xp, 2e-3);
        g.close("5.2 u_T0", re1.u0(1), 1.0512, 1e-3);
        g.close("5.3 V_F0 (truth field input)", te1.u0(0), 0.00121, 2e-5);
        // the field command expressed on the E_FD scale; the truth solve is
        // the authority, matching how the source quotes its own simulation
        g.close("5.4 E_FD0 = V_F0/e15", te1.u0(0) / fc.e15, 2.529, 2e-3);

        TruthState xs;  // the tabulated truth operating point, as printed
        xs.I_d = -0.9185;
        xs.I_F = 1.6315;
        xs.I_D = -4.6204e-6;
        xs.I_q = 0.4047;
        xs.I_Q = 5.9539e-5;
        xs.omega = 1;
        xs.delta = 1;
        xs.T_m = 1.0012;
        xs.G_V = 1.0012;
        TruthInput us;
        us.V_F = 0.00121;
        us.u_T = 1.0512;
        const double resid = truth_rhs(xs, us, tc).vec().cwiseAbs().maxCoeff();
        g.below("5.5 truth rhs residual at printed point", resid, 1e-3);
    }

    // ---------------------------------------------------------- criterion 6
    g.section("criterion 6: final-value confirmations");
    {
        // governor/turbine/swing block with E'_q frozen (the decoupled LFC
        // view): states [omega, delta, T_m, G_V], input u_T
        const double A23 = lin1.A(1, 2);
        Mat Al(4, 4);
        Al << rc.f27, A23, rc.f28, 0,
              1, 0, 0, 0,
              0, 0, rc.f41, rc.f42,
              rc.f51, 0, 0, rc.f52;
        Vec Bl(4);
        Bl << 0, 0, 0, rc.g55;
        const Vec xss = -Al.fullPivLu().solve(Bl);
        g.close("6.1 ddelta_ss (analytic)", xss(1), 0.6909, 1e-3);
        g.below("6.2 |domega_ss| (analytic)", std::abs(xss(0)), 1e-9);

        Mat Bm = Bl, Cm = Mat::Identity(4, 4), Dm = Mat::Zero(4, 1);
        auto sys = linear_system(Al, Bm, Cm, Dm, Vec::Zero(4),
                                 [](double) { return (Vec(1) << 1.0).finished(); },
                                 {"omega", "delta", "T_m", "G_V"}, {"u_T"},
                                 {"omega_y", "delta_y", "T_m_y", "G_V_y"});
        SimOptions so;
        so.t_end = 2500;
        so.sample_dt = 5.0;
        const Trajectory tr = simulate(sys, so);
        g.close("6.3 ddelta_ss (simulated)", final_of(tr, "delta"), xss(1), 2e-3);
        g.close("6.4 |domega_ss| (simulated)", final_of(tr, "omega"), 0.0, 2e-3);

        // AVR loop: scalar E'_q plant under unity voltage feedback
        const double T1 = lin1.C(0, 0);
        const double avr_ss = T1 * rc.g11 / (rc.g11 * T1 - rc.f11);
        g.close("6.5 dV_t_ss AVR step (analytic)", avr_ss, 0.1391, 1e-3);
        Mat Aa(1, 1), Ba(1, 1), Ca(1, 1), Da(1, 1);
        Aa << rc.f11 - rc.g11 * T1;
        Ba << rc.g11;
        Ca << T1;
        Da << 0;
        auto sysa = linear_system(Aa, Ba, Ca, Da, Vec::Zero(1),
                                  [](double) { return (Vec(1) << 1.0).finished(); },
                                  {"dEq_p"}, {"V_ref"}, {"dV_t"});
        SimOptions soa;
        soa.t_end = 30;
        soa.sample_dt = 0.01;
        const Trajectory tra = simulate(sysa, soa);
        g.close("6.6 dV_t_ss AVR step (simulated)", final_of(tra, "dV_t"), avr_ss, 2e-3);
    }

    // ---------------------------------------------------------- criterion 7
    g.section("criterion 7: LQR regression");
    {
        Mat Q = Mat::Zero(5, 5);
        Q.diagonal() << 300, 250, 200, 200, 250;
        const Mat R = 0.5 * Mat::Identity(2, 2);
        const Mat P = solve_care(lin1.A, lin1.B, Q, R);
        const Mat resid = lin1.A.transpose() * P + P * lin1.A -
                          P * lin1.B * R.inverse() * lin1.B.transpose() * P + Q;
        g.below("7.1 CARE residual", max_abs(resid), 1e-7);

        const GainMatrix k = lqr_gain(lin1, Q, R);
        Mat Kp(2, 5);
        Kp << 23.7240, -36.3457, -5.5938, -2.5612, -0.0454,
              -1.3381, 21.0340, 1.5703, 9.0242, 21.5437;
        const WorstEntry w = worst_rel(k.K, Kp);
        g.line(w.err <= 0.02, "7.2 K vs printed (relative)",
               "max rel err " + format_g12(w.err) + " at (" + std::to_string(w.r) + "," +
                   std::to_string(w.c) + ")  tol 0.02");
        g.flag("7.3 closed loop Hurwitz", is_hurwitz(lin1.A - lin1.B * k.K),
               "max Re(eig) sign check");
    }

    // ---------------------------------------------------------- criterion 8
    g.section("criterion 8: pole placement spectra");
    {
        auto check_place = [&](const std::string& label, const Spectrum& want) {
            const GainMatrix gm = place_poles(lin1.A, lin1.B, want, 0);
            g.below(label, spectrum_match_error(eigenvalues(lin1.A - lin1.B * gm.K), want),
                    1e-6);
        };
        check_place("8.1 set {-0.8,-0.9,-0.7,-1.1,-1}",
                    {{-0.8, 0}, {-0.9, 0}, {-0.7, 0}, {-1.1, 0}, {-1.0, 0}});
        check_place("8.2 set {-300,-0.9,-280,-5,-70}",
                    {{-300, 0}, {-0.9, 0}, {-280, 0}, {-5, 0}, {-70, 0}});
        check_place("8.3 set {-8+-0.05i,-200,-250,-0.1}",
                    {{-8, 0.05}, {-8, -0.05}, {-200, 0}, {-250, 0}, {-0.1, 0}});

        // separation: plant poles from the LQR gain, observer poles pushed
        // out by rho = 12, the coupled 10x10 must carry exactly the union
        Mat Q = Mat::Zero(5, 5);
        Q.diagonal() << 300, 250, 200, 200, 250;
        const GainMatrix k = lqr_gain(lin1, Q, 0.5 * Mat::Identity(2, 2));
        const Spectrum sf = eigenvalues(lin1.A - lin1.B * k.K);
        const Spectrum obs = scale_spectrum(sf, 12.0);
        const ObserverGain L =
            observer_gain(lin1.A, lin1.C, obs, MeasuredOutputs::VtAndOmega, 0);
        Mat Acl = Mat::Zero(10, 10);
        Acl.topLeftCorner(5, 5) = lin1.A - lin1.B * k.K;
        Acl.topRightCorner(5, 5) = lin1.B * k.K;
        Acl.bottomRightCorner(5, 5) = lin1.A - L.L * lin1.C;
        Spectrum want = sf;
        want.insert(want.end(), obs.begin(), obs.end());
        g.below("8.4 separation spectrum (10x10 union)",
                spectrum_match_error(eigenvalues(Acl), want), 1e-6);
    }

    // ---------------------------------------------------------- criterion 9
    g.section("criterion 9: loop-transfer recovery trend");
    {
        const double qs[] = {10, 30, 100, 300};
        double m[4];
        bool hurwitz_all = true;
        for (int i = 0; i < 4; ++i) {
            LtrSchedule sched;
            sched.V10 = Mat::Identity(5, 5);
            sched.V20 = Mat::Identity(2, 2);
            sched.V = Mat::Identity(2, 2);
            sched.q = qs[i];
            const ObserverGain H = kalman_ltr_gain(lin1, sched);
            m[i] = (H.L / qs[i] - lin1.B).norm();  // V20 = I, so V20^{-1/2} = I
            hurwitz_all = hurwitz_all && is_hurwitz(lin1.A - H.L * lin1.C);
        }
        const bool decreasing = m[0] > m[1] && m[1] > m[2] && m[2] > m[3];
        g.flag("9.1 ||H(q)/q - B|| strictly decreasing", decreasing,
               "q=10: " + format_g12(m[0]) + "  q=30: " + format_g12(m[1]) +
                   "  q=100: " + format_g12(m[2]) + "  q=300: " + format_g12(m[3]));
        g.flag("9.2 every H(q) estimator Hurwitz", hurwitz_all, "A - H C stable for all q");
    }

    // --------------------------------------------------------- criterion 10
    g.section("criterion 10: feedback-linearization exactness");
    {
        StateSpaceModel bss;
        brunovsky_pair(bss.A, bss.B);
        bss.C = Mat::Identity(5, 5);
        bss.D = Mat::Zero(5, 2);
        Mat Q = Mat::Zero(5, 5);
        Q.diagonal() << 300, 250, 200, 200, 250;
        const GainMatrix k = lqr_gain(bss, Q, 0.07 * Mat::Identity(2, 2));
        const FblSetpoint sp{op1.delta_0, op1.T_m0};
        Vec x0 = re1.x0;
        x0 += (Vec(5) << 0.05, 0.002, -0.1, 0.02, 0).finished();

        SimOptions so;
        so.t_end = 20;
        so.sample_dt = 1e-3;  // the stored grid drives the finite differences
        Trajectory off = simulate(fbl_reduced_loop(fc, k.K, sp, x0, false, p.G_V_max), so);

        const size_t n = off.t.size();
        double s3 = 0, s5 = 0;
        size_t cnt = 0;
        for (size_t i = 1; i + 1 < n; ++i) {
            const double span = off.t[i + 1] - off.t[i - 1];
            if (span <= 0) continue;
            const ReducedState xm = ReducedState::from_vec(off.x[i - 1]);
            const ReducedState xc = ReducedState::from_vec(off.x[i]);
            const ReducedState xp = ReducedState::from_vec(off.x[i + 1]);
            const Vec zm = fbl_transform(xm, fc);
            const Vec zp = fbl_transform(xp, fc);
            const Vec v = fbl_control(xc, sp, k.K, fc).v;
            const double d3 = (zp(2) - zm(2)) / span - v(0);
            const double d5 = (zp(4) - zm(4)) / span - v(1);
            s3 += d3 * d3;
            s5 += d5 * d5;
            ++cnt;
        }
        g.below("10.1 RMS(zdot3 - v1)", std::sqrt(s3 / cnt), 1e-4);
        g.below("10.2 RMS(zdot5 - v2)", std::sqrt(s5 / cnt), 1e-4);
        g.close("10.3 V_t(20) limits off", final_of(off, "V_t"), 1.172, 5e-3);
        g.close("10.4 delta(20) limits off", final_of(off, "delta"), 1.0, 5e-3);
        g.close("10.5 omega(20) limits off", final_of(off, "omega"), 1.0, 5e-3);

        Trajectory on = simulate(fbl_reduced_loop(fc, k.K, sp, x0, true, p.G_V_max), so);
        g.close("10.6 V_t(20) limits on", final_of(on, "V_t"), 1.172, 5e-3);
        g.close("10.7 delta(20) limits on", final_of(on, "delta"), 1.0, 5e-3);
        g.close("10.8 omega(20) limits on", final_of(on, "omega"), 1.0, 5e-3);
    }

    // --------------------------------------------------------- criterion 11
    g.section("criterion 11: operating-point sweep on the 9th-order plant");
    {
        const TruthRefs r2 = truth_refs_at(op2, tc, fc);
        const TruthRefs r3 = truth_refs_at(op3, tc, fc);

        Mat Q = Mat::Zero(5, 5);
        Q.diagonal() << 40000, 10000, 250000, 500, 500;
        const GainMatrix kq = lqr_gain(lin1, Q, 0.07 * Mat::Identity(2, 2));
        SimOptions so;
        so.t_end = 600;
        so.sample_dt = 0.25;

        Trajectory t2 = simulate(state_feedback_truth(tc, fc, kq.K, r2.x_ref, r2.u_ref,
                                                      te1.x0, EqReconstruction::Primary,
                                                      false, p.G_V_max),
                                 so);
        g.close("11.1 LQR op2 V_t final", final_of(t2, "V_t"), 1.0182, 5e-3);
        g.below("11.2 LQR op2 |delta err|",
                std::abs(final_of(t2, "delta") - op2.delta_0), 3e-3);

        Trajectory t3 = simulate(state_feedback_truth(tc, fc, kq.K, r3.x_ref, r3.u_ref,
                                                      te1.x0, EqReconstruction::Primary,
                                                      false, p.G_V_max),
                                 so);
        g.close("11.3 LQR op3 V_t final", final_of(t3, "V_t"), 1.3964, 5e-3);
        g.below("11.4 LQR op3 |delta err|",
                std::abs(final_of(t3, "delta") - op3.delta_0), 3e-3);

        Mat Ql = Mat::Zero(5, 5);
        Ql.diagonal() << 7500, 15000, 16500, 7500, 7500;
        const GainMatrix kl = lqr_gain(lin1, Ql, Mat::Identity(2, 2));
        LtrSchedule sched;
        sched.V10 = Mat::Identity(5, 5);
        sched.V20 = 0.65 * Mat::Identity(2, 2);
        sched.V = Mat::Identity(2, 2);
        sched.q = 5.25;
        const ObserverGain H = kalman_ltr_gain(lin1, sched);
        SimOptions sol;
        sol.t_end = 3000;
        sol.sample_dt = 1.0;

        Trajectory l2 = simulate(ltr_truth_loop(tc, fc, lin1, kl.K, H.L, r2.u_ref,
                                                r2.vt_ref, te1.x0, false, p.G_V_max),
                                 sol);
        const double vt_err2 = std::abs(final_of(l2, "V_t") - r2.vt_ref);
        const double d_err2 = std::abs(final_of(l2, "delta") - op2.delta_0);
        g.close("11.5 LTR op2 V_t ss error", vt_err2, 0.0259, 0.01);
        g.close("11.6 LTR op2 |delta err|", d_err2, 0.0575, 0.015);
        if (vt_err2 < 0.0159 && d_err2 < 0.0425) {
            g.note("the compensated loop converges onto the commanded operating point");
            g.note("(errors ~" + format_g12(vt_err2) +
                   "); the quoted nonzero offsets are not reproducible from the");
            g.note("published design data -- see README, acceptance status");
        }

        Trajectory l3 = simulate(ltr_truth_loop(tc, fc, lin1, kl.K, H.L, r3.u_ref,
                                                r3.vt_ref, te1.x0, false, p.G_V_max),
                                 sol);
        g.close("11.7 LTR op3 V_t final", final_of(l3, "V_t"), 1.403, 5e-3);
    }

    // --------------------------------------------------------- criterion 12
    g.section("criterion 12: numerics hygiene");
    {
        // rk4 order via Richardson on a kicked reduced run
        Vec x0 = re1.x0;
        x0(2) -= 0.1;
        auto sys = reduced_constant_input(rc, x0, re1.u0);
        auto run_rk4 = [&](double dt) {
            SimOptions s;
            s.method = SimOptions::Method::rk4;
            s.dt = dt;
            s.t_end = 10;
            s.sample_dt = 10;
            return simulate(sys, s).x.back();
        };
        const Vec xref = run_rk4(1e-4);
        const double e1 = (run_rk4(0.2) - xref).cwiseAbs().maxCoeff();
        const double e2 = (run_rk4(0.1) - xref).cwiseAbs().maxCoeff();
        g.close("12.1 rk4 Richardson ratio", e1 / e2, 16.0, 3.2);

        // equilibrium hold drift
        SimOptions sh;
        sh.t_end = 100;
        sh.rtol = 1e-9;
        sh.atol = 1e-11;
        sh.sample_dt = 1.0;
        const Trajectory hold = simulate(truth_constant_input(tc, te1.x0, te1.u0), sh);
        double drift = 0;
        for (const Vec& xk : hold.x)
            drift = std::max(drift, (xk - te1.x0).cwiseAbs().maxCoeff());
        g.below("12.2 equilibrium hold drift (100 s)", drift, 1e-6);

        // Park orthogonality + power invariance
        double orth = 0, pw = 0;
        const Eigen::Vector3d vabc(0.9, -1.4, 0.3);
        for (double th : {0.0, 0.7, 2.4}) {
            const ParkMatrix P = park_matrix(th);
            orth = std::max(orth,
                            (P * P.transpose() - Eigen::Matrix3d::Identity())
                                .cwiseAbs()
                                .maxCoeff());
            pw = std::max(pw, std::abs((P * vabc).squaredNorm() - vabc.squaredNorm()));
        }
        g.below("12.3 Park orthogonality", orth, 1e-12);
        g.below("12.4 Park power invariance", pw, 1e-12);

        // companion-matrix root residuals
        const std::vector<std::vector<double>> polys = {
            {1, 15, 85, 225, 274, 120},       // (s+1)...(s+5)
            {3.0, -2.0, 7.5, 0.25, -1.0},     // generic mixed-sign quartic
        };
        double worst = 0;
        for (const auto& c : polys) {
            double cmax = 0;
            for (double ci : c) cmax = std::max(cmax, std::abs(ci));
            for (const Cplx& r : polynomial_roots(c))
                worst = std::max(worst, std::abs(polyval(c, r)) / cmax);
        }
        g.below("12.5 polynomial root residuals", worst, 1e-7);
    }

    os << "\nacceptance: " << g.passed << " passed, " << g.failed << " failed\n";
    return g.failed == 0;
}

}  // namespace smib
