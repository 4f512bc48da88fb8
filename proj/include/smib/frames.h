#pragma once
#include <Eigen/Dense>

#include "smib/params.h"

namespace smib {

// rows are the 0/d/q projections; orthogonal, so inverse == transpose
using ParkMatrix = Eigen::Matrix3d;

ParkMatrix park_matrix(double theta);

// Static-frame (abc+rotor) and rotating-frame (0dq+rotor) inductance
// matrices.  The static one is theta-dependent; the blocked rotating one is
// sparse and constant -- that is the whole point of the transformation.
struct InductanceMatrices {
    double L_s = 0, M_s = 0, L_m = 0;     // stator self/mutual/position terms
    double M_F = 0, M_D = 0, M_Q = 0;     // bare stator-rotor mutuals
    double L_F = 0, L_D = 0, L_Q = 0, M_R = 0;
    double L0 = 0, Ld = 0, Lq = 0;        // diagonalized stator inductances
    Eigen::Matrix<double, 6, 6> L_B;      // rotating-frame blocked matrix

    // 6x6 static-frame inductance at rotor angle theta
    Eigen::Matrix<double, 6, 6> L_static(double theta) const;
};

// transform B = blkdiag(P(theta), I3)
Eigen::Matrix<double, 6, 6> blocking_transform(double theta);

InductanceMatrices blocked_inductance(const MachineParams& p,
                                      double L_s, double M_s, double L_m);

// defaults that land on the machine's L_d/L_q: L_m = (L_d - L_q)/3,
// L_s + M_s = L_d - 1.5*L_m, with M_s picked so L0 stays positive
InductanceMatrices blocked_inductance_default(const MachineParams& p);

} // namespace smib
