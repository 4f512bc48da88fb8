#pragma once
#include "smib/design.h"
#include "smib/numlin.h"
#include "smib/params.h"
#include "smib/reduced_model.h"
#include "smib/truth_model.h"

namespace smib {

// Expansion constants of the exact-linearization law.  sigma1/gamma1 belong
// to the delta-chain (relative degree 3), sigma2/gamma2 to the torque chain
// (relative degree 2); e11..e15 bridge the truth plant (E'_q reconstruction
// and the E_FD <-> V_F unit change).
struct FblCoefficients {
    double p31 = 0, p32 = 0, p33 = 0, p34 = 0, p35 = 0,
           p36 = 0, p37 = 0, p38 = 0, p39 = 0;
    double q31 = 0, q32 = 0, q33 = 0, q34 = 0, q35 = 0;
    double r31 = 0, r32 = 0, r33 = 0;
    double p51 = 0, p52 = 0, p53 = 0;
    double r51 = 0;
    double e11 = 0, e12 = 0, e13 = 0, e14 = 0, e15 = 0;
    // carried for the transform/sigma evaluations
    ReducedCoefficients rc;
};

FblCoefficients derive_fbl_coefficients(const ReducedCoefficients& c,
                                        const MachineParams& p);

struct FblSetpoint {
    double z1d = 0;            // delta_d, rad
    double z4d = 0;            // T_md
};

// transformed coordinates z = [delta, omega-1, omega_dot, T_m, T_m_dot]
Vec fbl_transform(const ReducedState& x, const FblCoefficients& fc);

// sigma/gamma evaluations at a state (exposed for the exactness tests)
struct FblDecomposition {
    double sigma1 = 0, gamma1 = 0, sigma2 = 0, gamma2 = 0;
};
FblDecomposition fbl_decompose(const ReducedState& x, const FblCoefficients& fc);

// the linearizing law: v = -K (z - z_d), E_FD = (v1-sigma1)/gamma1,
// u_T = (v2-sigma2)/gamma2.  Throws design_failure when gamma1 collapses
// (loss of relative degree).
struct FblCommand {
    ReducedInput u;
    Vec v;                     // the Brunovsky-space input, logged by tests
};
FblCommand fbl_control(const ReducedState& x, const FblSetpoint& sp,
                       const Mat& K, const FblCoefficients& fc);

// Brunovsky pair for the two chains (3+2), for designing K
void brunovsky_pair(Mat& A, Mat& B);

// E'_q recovered from truth-plant signals
enum class EqReconstruction { Primary, Alternate };
double reconstruct_eq_prime(const TruthState& xt, const FblCoefficients& fc,
                            EqReconstruction form = EqReconstruction::Primary);

// V_F = (r_F/(omega_R kM_F)) E_FD with omega_R = 1 p.u.
double efd_to_vf(double E_FD, const MachineParams& p);

// the truth state folded down to the 5 reduced coordinates
ReducedState truth_reduced_state(const TruthState& xt, const FblCoefficients& fc,
                                 EqReconstruction form = EqReconstruction::Primary);

} // namespace smib
