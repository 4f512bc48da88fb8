#pragma once
#include <map>
#include <optional>
#include <string>

#include "smib/errors.h"

namespace smib {

// Machine + network + turbine-governor parameter block, per-unit throughout,
// angles in radians.  The published transient rows (L'_d, tau'_d0) can be
// carried alongside the base constants: the source machine table lists both,
// and the reduced-model chain reproduces its printed coefficient tables only
// with the published rounded values (0.245 / 5.90), not with the exact
// L_d - (kM_F)^2/L_F arithmetic (0.243939 / 5.8986).  When the overrides are
// absent, transient_constants() falls back to the formulas.
struct MachineParams {
    // d/q-axis inductances and mutuals
    double L_d = 0, L_F = 0, L_D = 0, L_q = 0, L_Q = 0;
    double kM_F = 0, kM_D = 0, M_R = 0, kM_Q = 0;
    // resistances
    double r = 0, r_F = 0, r_D = 0, r_Q = 0;
    // mechanical
    double H = 0;          // inertia constant, seconds
    double D = 0;          // damping
    double omega_R = 0;    // base electrical speed, rad/s
    // line + infinite bus
    double R_e = 0, L_e = 0;
    double V_inf = 0;
    double alpha = 0;      // bus angle, rad
    // turbine-governor
    double K_T = 0, K_G = 0, tau_T = 0, tau_G = 0, R_T = 0;
    // actuator limits (enforced by the simulation harness only)
    double E_FD_min = -5.0, E_FD_max = 5.0;
    double G_V_min = 0.0, G_V_max = 1.2;
    // Park constant sqrt(3/2)
    double k = 0;

    // published transient-constant rows (see header comment)
    std::optional<double> L_d_prime_pub;
    std::optional<double> tau_d0_prime_pub;
};

// throws invalid_parameter listing every violated constraint
void validate(const MachineParams& p);

// the workbench's default machine (Table-2 values)
MachineParams paper_machine();

struct TransientConstants {
    double L_d_prime = 0;      // d-axis transient inductance
    double tau_d0_prime = 0;   // d-axis open-circuit transient time constant, s
    double tau_j = 0;          // swing constant 2H (reduced-model normalization)
};

TransientConstants transient_constants(const MachineParams& p);

// Coefficients of the 9th-order plant.  Index pairs follow the model's own
// naming: F[row][col] multiplies the matching state/product term, G* the
// inputs, y*/i11 the output map.
struct TruthCoefficients {
    double mu = 0, nu = 0;     // inductance-block determinant factors
    double F11 = 0, F12 = 0, F13 = 0, F14 = 0, F15 = 0, F16 = 0;
    double F21 = 0, F22 = 0, F23 = 0, F24 = 0, F25 = 0, F26 = 0;
    double F31 = 0, F32 = 0, F33 = 0, F34 = 0, F35 = 0, F36 = 0;
    double F41 = 0, F42 = 0, F43 = 0, F44 = 0, F45 = 0, F46 = 0;
    double F51 = 0, F52 = 0, F53 = 0, F54 = 0, F55 = 0, F56 = 0;
    double F61 = 0, F62 = 0, F63 = 0, F64 = 0, F65 = 0, F66 = 0;
    double F81 = 0, F82 = 0, F91 = 0, F92 = 0;
    double G11 = 0, G21 = 0, G31 = 0, G92 = 0;
    // terminal-voltage map V_d/V_q coefficients
    double y11 = 0, y12 = 0, y13 = 0, y14 = 0, y15 = 0, y16 = 0;
    double y21 = 0, y22 = 0, y23 = 0, y24 = 0, y25 = 0, y26 = 0;
    double i11 = 0;            // V_F feedthrough into V_d
    double alpha = 0;          // bus angle, carried for the trig terms
    double tau_j = 0;          // 2*H*omega_R, the truth swing normalization
};

TruthCoefficients derive_truth_coefficients(const MachineParams& p);

// Coefficients of the 5th-order one-axis plant and its output map.
struct ReducedCoefficients {
    double f11 = 0, f12 = 0, f13 = 0, g11 = 0;              // E'_q row
    double f21 = 0, f22 = 0, f23 = 0, f24 = 0, f25 = 0,
           f26 = 0, f27 = 0, f28 = 0;                       // swing row
    double f41 = 0, f42 = 0, f51 = 0, f52 = 0, g55 = 0;     // turbine/governor
    double Vd1 = 0, Vd2 = 0, Vd3 = 0;                       // stator V_d terms
    double Vq1 = 0, Vq2 = 0, Vq3 = 0;                       // stator V_q terms
    // intermediates, kept because the algebraic current map and the E'_q
    // reconstruction reuse them
    double L1 = 0, L2 = 0, L3 = 0, L4 = 0, R1 = 0, M1 = 0;
    double tau_d0_prime = 0, tau_j = 0;
    double V_inf = 0, alpha = 0;
};

// r = 0 (stator resistance dropped from R1) is the default convention: the
// printed coefficient table only reproduces under it.  use_stator_r keeps r
// for sensitivity studies.
ReducedCoefficients derive_reduced_coefficients(const MachineParams& p,
                                                bool use_stator_r = false);

// A named operating point: the (delta_0, T_m0) anchors drive equilibrium
// solving; the remaining fields are tabulated reference values (NaN when not
// supplied) used by tests and reports.
struct OperatingPoint {
    std::string name;
    double delta_0 = 0;    // rad
    double T_m0 = 0;
    double I_d0 = 0, I_F0 = 0, I_D0 = 0, I_q0 = 0, I_Q0 = 0;
    double V_d0 = 0, V_q0 = 0, V_t0 = 0, E_q0_prime = 0;
    double P = 0, PF = 0, I_a0 = 0;
    double omega_0 = 1.0;
    double G_V0 = 0;
    bool has_table_values = false;
};

// the three tabulated operating points, keyed "op1"/"op2"/"op3"
std::map<std::string, OperatingPoint> paper_operating_points();

} // namespace smib
