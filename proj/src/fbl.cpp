#include "smib/fbl.h"

#include <cmath>
#include <sstream>

#include "smib/errors.h"

namespace smib {

FblCoefficients derive_fbl_coefficients(const ReducedCoefficients& c,
                                        const MachineParams& p) {
    FblCoefficients fc;
    fc.rc = c;
    // delta chain: z3 = omega_dot, so z3_dot collects every partial of the
    // swing row times the matching state rate
    fc.p31 = 2.0 * c.f11 * c.f21 + c.f27 * c.f21;
    fc.p32 = 2.0 * c.f21 * c.f12 + c.f22 * c.f11 - c.f23 + c.f27 * c.f22;
    fc.p33 = 2.0 * c.f21 * c.f13 + c.f22 + c.f23 * c.f11 + c.f27 * c.f23;
    fc.p34 = c.f22 * c.f12 - c.f24 + c.f27 * c.f25;
    fc.p35 = c.f23 * c.f13 + c.f24 + c.f27 * c.f26;
    fc.p36 = c.f22 * c.f13 + c.f23 * c.f12 + 2.0 * c.f25 - 2.0 * c.f26
           + c.f27 * c.f24;
    fc.p37 = c.f27 * c.f27;
    fc.p38 = c.f27 * c.f28 + c.f28 * c.f41;
    fc.p39 = c.f28 * c.f42;
    // omega-weighted trig terms (delta_dot = omega - 1 brings these in)
    fc.q31 = c.f23;
    fc.q32 = -c.f22;
    fc.q33 = c.f24;
    fc.q34 = -c.f24;
    fc.q35 = -2.0 * c.f25 + 2.0 * c.f26;
    fc.r31 = 2.0 * c.f21 * c.g11;
    fc.r32 = c.f22 * c.g11;
    fc.r33 = c.f23 * c.g11;
    // torque chain: z5 = T_m_dot
    fc.p51 = c.f42 * c.f51;
    fc.p52 = c.f41 * c.f41;
    fc.p53 = c.f41 * c.f42 + c.f42 * c.f52;
    fc.r51 = c.f42 * c.g55;
    if (fc.r51 == 0.0)
        throw invalid_parameter("FBL torque chain degenerate: f42*g55 = 0");
    // truth-plant bridges
    fc.e11 = 1.0 + c.L1 * c.L2 / c.M1;
    fc.e12 = c.L1 * c.L2 * c.V_inf / c.M1;
    fc.e13 = c.R1 * c.L2 * c.V_inf / c.M1;
    fc.e14 = p.kM_F;                 // omega_R = 1 p.u. in this relation
    if (p.kM_F == 0.0)
        throw invalid_parameter("E'_q reconstruction needs kM_F != 0");
    fc.e15 = p.r_F / p.kM_F;
    if (fc.e11 == 0.0)
        throw invalid_parameter("E'_q reconstruction degenerate: e11 = 0");
    return fc;
}

Vec fbl_transform(const ReducedState& x, const FblCoefficients& fc) {
    const ReducedCoefficients& c = fc.rc;
    const double s = std::sin(x.delta - c.alpha);
    const double co = std::cos(x.delta - c.alpha);
    const double Eq = x.E_q_prime;
    const double z3 = c.f21 * Eq * Eq + c.f22 * Eq * co + c.f23 * Eq * s
                    + c.f24 * s * co + c.f25 * co * co + c.f26 * s * s
                    + c.f27 * x.omega + c.f28 * x.T_m;
    Vec z(5);
    z << x.delta, x.omega - 1.0, z3, x.T_m, c.f41 * x.T_m + c.f42 * x.G_V;
    return z;
}

FblDecomposition fbl_decompose(const ReducedState& x,
                               const FblCoefficients& fc) {
    const double s = std::sin(x.delta - fc.rc.alpha);
    const double co = std::cos(x.delta - fc.rc.alpha);
    const double Eq = x.E_q_prime;
    const double w = x.omega;
    FblDecomposition d;
    d.sigma1 = fc.p31 * Eq * Eq + fc.p32 * Eq * co + fc.p33 * Eq * s
             + fc.p34 * co * co + fc.p35 * s * s + fc.p36 * s * co
             + fc.p37 * w + fc.p38 * x.T_m + fc.p39 * x.G_V
             + fc.q31 * Eq * w * co + fc.q32 * Eq * w * s
             + fc.q33 * w * co * co + fc.q34 * w * s * s
             + fc.q35 * w * s * co;
    d.gamma1 = fc.r31 * Eq + fc.r32 * co + fc.r33 * s;
    d.sigma2 = fc.p51 * w + fc.p52 * x.T_m + fc.p53 * x.G_V;
    d.gamma2 = fc.r51;
    return d;
}

FblCommand fbl_control(const ReducedState& x, const FblSetpoint& sp,
                       const Mat& K, const FblCoefficients& fc) {
    if (K.rows() != 2 || K.cols() != 5)
        throw invalid_parameter("FBL state-feedback K must be 2x5");
    const Vec z = fbl_transform(x, fc);
    Vec zd(5);
    zd << sp.z1d, 0.0, 0.0, sp.z4d, 0.0;
    const Vec v = -K * (z - zd);
    const FblDecomposition d = fbl_decompose(x, fc);
    if (std::abs(d.gamma1) <= 1e-6) {
        std::ostringstream os;
        os << "FBL decoupling singular: gamma1=" << d.gamma1
           << " at E'_q=" << x.E_q_prime << " delta=" << x.delta;
        throw design_failure(os.str());
    }
    FblCommand cmd;
    cmd.v = v;
    cmd.u.E_FD = (v(0) - d.sigma1) / d.gamma1;
    cmd.u.u_T = (v(1) - d.sigma2) / d.gamma2;
    return cmd;
}

void brunovsky_pair(Mat& A, Mat& B) {
    A = Mat::Zero(5, 5);
    A(0, 1) = 1.0;
    A(1, 2) = 1.0;
    A(3, 4) = 1.0;
    B = Mat::Zero(5, 2);
    B(2, 0) = 1.0;
    B(4, 1) = 1.0;
}

double reconstruct_eq_prime(const TruthState& xt, const FblCoefficients& fc,
                            EqReconstruction form) {
    if (form == EqReconstruction::Alternate)
        return fc.e14 * xt.I_F + fc.rc.L2 * xt.I_d;
    const double s = std::sin(xt.delta - fc.rc.alpha);
    const double co = std::cos(xt.delta - fc.rc.alpha);
    return (fc.e14 / fc.e11) * xt.I_F + (fc.e12 / fc.e11) * co
         + (fc.e13 / fc.e11) * s;
}

double efd_to_vf(double E_FD, const MachineParams& p) {
    if (p.kM_F == 0.0)
        throw invalid_parameter("efd_to_vf needs kM_F != 0");
    return (p.r_F / p.kM_F) * E_FD;
}

ReducedState truth_reduced_state(const TruthState& xt,
                                 const FblCoefficients& fc,
                                 EqReconstruction form) {
    ReducedState r;
    r.E_q_prime = reconstruct_eq_prime(xt, fc, form);
    r.omega = xt.omega;
    r.delta = xt.delta;
    r.T_m = xt.T_m;
    r.G_V = xt.G_V;
    return r;
}

} // namespace smib
