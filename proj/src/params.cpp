#include "smib/params.h"

#include <cmath>
#include <sstream>

namespace smib {

void validate(const MachineParams& p) {
    std::ostringstream bad;
    auto need = [&](bool ok, const char* what) {
        if (!ok) bad << (bad.tellp() > 0 ? "; " : "") << what;
    };
    need(p.L_d > 0, "L_d must be > 0");
    need(p.L_F > 0, "L_F must be > 0");
    need(p.L_D > 0, "L_D must be > 0");
    need(p.L_q > 0, "L_q must be > 0");
    need(p.L_Q > 0, "L_Q must be > 0");
    need(p.r >= 0 && p.r_F > 0 && p.r_D > 0 && p.r_Q > 0,
         "resistances must be positive (r may be 0)");
    need(p.H > 0, "H must be > 0");
    need(p.D >= 0, "D must be >= 0");
    need(p.omega_R > 0, "omega_R must be > 0");
    need(p.L_e >= 0 && p.R_e >= 0, "line R_e/L_e must be >= 0");
    need(p.V_inf > 0, "V_inf must be > 0");
    need(p.tau_T > 0 && p.tau_G > 0, "tau_T/tau_G must be > 0");
    need(p.R_T > 0, "R_T must be > 0");
    need(p.K_T > 0 && p.K_G > 0, "K_T/K_G must be > 0");
    need(p.k > 0, "park constant k must be > 0");
    need(p.E_FD_max > p.E_FD_min, "E_FD limits must satisfy max > min");
    need(p.G_V_max > p.G_V_min, "G_V limits must satisfy max > min");
    // the field winding must be magnetically consistent: the d-axis
    // leakage-coupled determinant L_d*L_F - (kM_F)^2 > 0, else L'_d <= 0
    need(p.L_d * p.L_F - p.kM_F * p.kM_F > 0,
         "L_d*L_F - kM_F^2 must be > 0 (field coupling too strong)");
    if (p.L_d_prime_pub)
        need(*p.L_d_prime_pub > 0 && *p.L_d_prime_pub < p.L_d,
             "published L'_d must lie in (0, L_d)");
    if (p.tau_d0_prime_pub)
        need(*p.tau_d0_prime_pub > 0, "published tau'_d0 must be > 0");
    if (bad.tellp() > 0)
        throw invalid_parameter("machine parameters invalid: " + bad.str());
}

MachineParams paper_machine() {
    MachineParams p;
    p.L_d = 1.70;  p.L_F = 1.65;  p.L_D = 1.605;
    p.L_q = 1.64;  p.L_Q = 1.526;
    p.kM_F = 1.55; p.kM_D = 1.55; p.M_R = 1.55; p.kM_Q = 1.49;
    p.r = 0.001096; p.r_F = 0.000742; p.r_D = 0.0131; p.r_Q = 0.0540;
    p.H = 2.37; p.D = 0.0; p.omega_R = 376.99;
    p.R_e = 0.02; p.L_e = 0.4;
    p.V_inf = 1.00;
    p.alpha = 3.5598 * M_PI / 180.0;
    p.K_T = 1.0; p.K_G = 1.0;
    p.tau_T = 0.5; p.tau_G = 0.2; p.R_T = 20.0;
    p.E_FD_min = -5.0; p.E_FD_max = 5.0;
    p.G_V_min = 0.0;   p.G_V_max = 1.2;
    p.k = std::sqrt(1.5);
    // the rounded transient rows the one-axis coefficient table was built from
    p.L_d_prime_pub = 0.245;
    p.tau_d0_prime_pub = 5.90;
    return p;
}

TransientConstants transient_constants(const MachineParams& p) {
    if (p.L_F <= 0 || p.r_F <= 0)
        throw invalid_parameter("transient constants need L_F > 0 and r_F > 0");
    TransientConstants tc;
    tc.L_d_prime = p.L_d_prime_pub ? *p.L_d_prime_pub
                                   : p.L_d - p.kM_F * p.kM_F / p.L_F;
    // tau'_d0 = L_F/r_F is in per-unit time (radians); seconds need /omega_R
    tc.tau_d0_prime = p.tau_d0_prime_pub ? *p.tau_d0_prime_pub
                                         : p.L_F / (p.omega_R * p.r_F);
    tc.tau_j = 2.0 * p.H;
    if (tc.L_d_prime <= 0)
        throw invalid_parameter("derived L'_d is non-positive");
    return tc;
}

TruthCoefficients derive_truth_coefficients(const MachineParams& p) {
    validate(p);
    TruthCoefficients c;
    const double k = p.k;
    // bare mutuals (the k-scaled table values divided back out)
    const double MF = p.kM_F / k, MD = p.kM_D / k, MQ = p.kM_Q / k;
    const double Lde = p.L_d + p.L_e, Lqe = p.L_q + p.L_e;

    // mu/nu are the determinant factors of the d- and q-axis inductance
    // blocks; a zero means the flux equations cannot be inverted
    c.mu = Lde * p.M_R * p.M_R - p.L_D * p.L_F * Lde
         + k * k * (p.L_D * MF * MF + p.L_F * MD * MD - 2.0 * MD * MF * p.M_R);
    c.nu = -k * k * MQ * MQ + p.L_Q * Lqe;
    if (std::abs(c.mu) < 1e-12 || std::abs(c.nu) < 1e-12) {
        std::ostringstream os;
        os << "singular inductance block: mu=" << c.mu << " nu=" << c.nu;
        throw invalid_parameter(os.str());
    }

    // entries of the (signed) inverse inductance blocks
    const double Ld1 = (p.M_R * p.M_R - p.L_D * p.L_F) / c.mu;
    const double LF1 = (MD * MD * k * k - p.L_D * Lde) / c.mu;
    const double LD1 = (MF * MF * k * k - p.L_F * Lde) / c.mu;
    const double MF1 = (MD * p.M_R - p.L_D * MF) / c.mu;
    const double MD1 = (MF * p.M_R - p.L_F * MD) / c.mu;
    const double MR1 = (Lde * p.M_R - MD * MF * k * k) / c.mu;
    const double Lq1 = p.L_Q / c.nu;
    const double LQ1 = Lqe / c.nu;
    const double MQ1 = MQ / c.nu;

    const double rRe = p.r + p.R_e;
    c.F11 = -Ld1 * rRe;      c.F12 = k * MF1 * p.r_F;  c.F13 = k * MD1 * p.r_D;
    c.F14 = -Lqe * Ld1;      c.F15 = -p.kM_Q * Ld1;    c.F16 = p.V_inf * Ld1;
    c.G11 = -k * MF1;
    c.F21 = k * MF1 * rRe;   c.F22 = -LF1 * p.r_F;     c.F23 = -MR1 * p.r_D;
    c.F24 = k * MF1 * Lqe;   c.F25 = k * k * MF1 * MQ; c.F26 = -p.V_inf * k * MF1;
    c.G21 = LF1;
    c.F31 = k * MD1 * rRe;   c.F32 = -MR1 * p.r_F;     c.F33 = -LD1 * p.r_D;
    c.F34 = k * MD1 * Lqe;   c.F35 = k * k * MD1 * MQ; c.F36 = -p.V_inf * k * MD1;
    c.G31 = MR1;
    c.F41 = Lq1 * Lde;       c.F42 = p.kM_F * Lq1;     c.F43 = p.kM_D * Lq1;
    c.F44 = -Lq1 * rRe;      c.F45 = k * MQ1 * p.r_Q;  c.F46 = -p.V_inf * Lq1;
    c.F51 = -k * MQ1 * Lde;  c.F52 = -k * k * MQ1 * MF; c.F53 = -k * k * MQ1 * MD;
    c.F54 = k * MQ1 * rRe;   c.F55 = -LQ1 * p.r_Q;     c.F56 = p.V_inf * k * MQ1;

    // swing row: torque products over tau_j = 2*H*omega_R (per-unit time base)
    c.tau_j = 2.0 * p.H * p.omega_R;
    c.F61 = -(p.L_d - p.L_q) / c.tau_j;
    c.F62 = -p.kM_F / c.tau_j;
    c.F63 = -p.kM_D / c.tau_j;
    c.F64 = p.kM_Q / c.tau_j;
    c.F65 = -p.D / c.tau_j;
    c.F66 = 1.0 / c.tau_j;

    // turbine and governor rows
    c.F81 = -1.0 / p.tau_T;           c.F82 = p.K_T / p.tau_T;
    c.F91 = -p.K_G / (p.tau_G * p.R_T); c.F92 = -1.0 / p.tau_G;
    c.G92 = p.K_G / p.tau_G;

    // terminal voltage: V = bus + line drop, folded onto the state vector
    c.y11 = p.R_e + p.L_e * c.F11;  c.y12 = p.L_e * c.F12;  c.y13 = p.L_e * c.F13;
    c.y14 = p.L_e * c.F14 + p.L_e;  c.y15 = p.L_e * c.F15;
    c.y16 = p.L_e * c.F16 - p.V_inf;
    c.i11 = p.L_e * c.G11;
    c.y21 = p.L_e * c.F41 - p.L_e;  c.y22 = p.L_e * c.F42;  c.y23 = p.L_e * c.F43;
    c.y24 = p.R_e + p.L_e * c.F44;  c.y25 = p.L_e * c.F45;
    c.y26 = p.L_e * c.F46 + p.V_inf;

    c.alpha = p.alpha;
    return c;
}

ReducedCoefficients derive_reduced_coefficients(const MachineParams& p,
                                                bool use_stator_r) {
    validate(p);
    const TransientConstants tc = transient_constants(p);
    ReducedCoefficients c;
    c.tau_d0_prime = tc.tau_d0_prime;
    c.tau_j = tc.tau_j;
    c.V_inf = p.V_inf;
    c.alpha = p.alpha;

    // network-reduction intermediates.  R1 drops the stator resistance by
    // default: the published coefficient table was computed that way, and
    // r = 0.0011 moves nothing at the 1e-3 level except f13/Vq3 rounding.
    c.L1 = p.L_q + p.L_e;
    c.R1 = (use_stator_r ? p.r : 0.0) + p.R_e;
    c.L2 = p.L_d - tc.L_d_prime;
    c.L3 = tc.L_d_prime + p.L_e;
    c.L4 = p.L_q - tc.L_d_prime;
    c.M1 = c.R1 * c.R1 + c.L3 * c.L1;
    if (c.M1 <= 0)
        throw invalid_parameter("reduced network determinant M1 is non-positive");

    const double V = p.V_inf;
    const double td0 = tc.tau_d0_prime, tj = tc.tau_j;
    c.f11 = -(1.0 + c.L2 * c.L1 / c.M1) / td0;
    c.f12 = (c.L2 * c.L1 * V / c.M1) / td0;
    c.f13 = (c.L2 * c.R1 * V / c.M1) / td0;
    c.g11 = 1.0 / td0;

    const double M1sq = c.M1 * c.M1;
    c.f21 = -(c.R1 / (c.M1 * tj) + c.L4 * c.L1 * c.R1 / (M1sq * tj));
    c.f22 = (c.R1 / (c.M1 * tj) + 2.0 * c.L4 * c.L1 * c.R1 / (M1sq * tj)) * V;
    c.f23 = -(c.L3 / (c.M1 * tj) + c.L4 * c.L1 * c.L3 / (M1sq * tj)
              - c.L4 * c.R1 * c.R1 / (M1sq * tj)) * V;
    c.f24 = -(c.L4 * c.R1 * c.R1 / (M1sq * tj)
              - c.L4 * c.L1 * c.L3 / (M1sq * tj)) * V * V;
    c.f25 = -c.L4 * c.L1 * c.R1 * V * V / (M1sq * tj);
    c.f26 = c.L4 * c.L3 * c.R1 * V * V / (M1sq * tj);
    c.f27 = -p.D / tj;
    c.f28 = 1.0 / tj;

    c.f41 = -1.0 / p.tau_T;
    c.f42 = p.K_T / p.tau_T;
    c.f51 = -p.K_G / (p.tau_G * p.R_T);
    c.f52 = -1.0 / p.tau_G;
    c.g55 = p.K_G / p.tau_G;

    c.Vd1 = -p.L_q * c.R1 / c.M1;
    c.Vd2 = V * p.L_q * c.R1 / c.M1;
    c.Vd3 = -V * p.L_q * c.L3 / c.M1;
    c.Vq1 = -tc.L_d_prime * c.L1 / c.M1;
    c.Vq2 = V * tc.L_d_prime * c.L1 / c.M1;
    c.Vq3 = V * tc.L_d_prime * c.R1 / c.M1;
    return c;
}

std::map<std::string, OperatingPoint> paper_operating_points() {
    std::map<std::string, OperatingPoint> m;
    OperatingPoint a;
    a.name = "op1";
    a.delta_0 = 1.0;  a.T_m0 = 1.0012;  a.G_V0 = 1.0012;
    a.I_d0 = -0.9185; a.I_F0 = 1.6315;  a.I_D0 = 0.0;
    a.I_q0 = 0.4047;  a.I_Q0 = 0.0;
    a.V_d0 = -0.6628; a.V_q0 = 0.9670;  a.V_t0 = 1.172;
    a.E_q0_prime = 1.1925;
    a.P = 1.0; a.PF = 0.85; a.I_a0 = 1.0;
    a.has_table_values = true;
    m["op1"] = a;

    OperatingPoint b;
    b.name = "op2";
    b.delta_0 = 1.0325; b.T_m0 = 0.6373; b.G_V0 = 0.6373;
    b.I_d0 = -0.4818;   b.I_F0 = 1.0228; b.I_q0 = 0.4094;
    b.V_t0 = 1.0182;    b.E_q0_prime = 0.8844;
    b.has_table_values = true;
    m["op2"] = b;

    OperatingPoint cpt;
    cpt.name = "op3";
    cpt.delta_0 = 0.88676; cpt.T_m0 = 1.34899; cpt.G_V0 = 1.34899;
    cpt.I_d0 = -1.4281;    cpt.I_F0 = 2.37786; cpt.I_q0 = 0.37472;
    cpt.V_t0 = 1.3990;     cpt.E_q0_prime = 1.6098;
    cpt.has_table_values = true;
    m["op3"] = cpt;
    return m;
}

} // namespace smib
