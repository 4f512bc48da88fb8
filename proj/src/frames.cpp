#include "smib/frames.h"

#include <cmath>

namespace smib {

namespace {
constexpr double two_pi_3 = 2.0 * M_PI / 3.0;
}

ParkMatrix park_matrix(double theta) {
    const double c = std::sqrt(2.0 / 3.0);
    ParkMatrix P;
    P << c / std::sqrt(2.0), c / std::sqrt(2.0), c / std::sqrt(2.0),
         c * std::cos(theta), c * std::cos(theta - two_pi_3), c * std::cos(theta + two_pi_3),
         c * std::sin(theta), c * std::sin(theta - two_pi_3), c * std::sin(theta + two_pi_3);
    return P;
}

Eigen::Matrix<double, 6, 6> blocking_transform(double theta) {
    Eigen::Matrix<double, 6, 6> B = Eigen::Matrix<double, 6, 6>::Zero();
    B.topLeftCorner<3, 3>() = park_matrix(theta);
    B.bottomRightCorner<3, 3>() = Eigen::Matrix3d::Identity();
    return B;
}

Eigen::Matrix<double, 6, 6> InductanceMatrices::L_static(double theta) const {
    // stator block: self terms L_s + L_m*cos 2(.), mutuals -M_s - L_m*cos 2(.)
    Eigen::Matrix3d L11;
    L11(0, 0) = L_s + L_m * std::cos(2.0 * theta);
    L11(1, 1) = L_s + L_m * std::cos(2.0 * (theta - two_pi_3));
    L11(2, 2) = L_s + L_m * std::cos(2.0 * (theta + two_pi_3));
    L11(0, 1) = L11(1, 0) = -M_s - L_m * std::cos(2.0 * (theta + M_PI / 6.0));
    L11(0, 2) = L11(2, 0) = -M_s - L_m * std::cos(2.0 * (theta + 5.0 * M_PI / 6.0));
    L11(1, 2) = L11(2, 1) = -M_s - L_m * std::cos(2.0 * (theta - M_PI / 2.0));

    // stator-rotor mutuals rotate with the rotor
    Eigen::Matrix3d L12;
    const double th[3] = {theta, theta - two_pi_3, theta + two_pi_3};
    for (int i = 0; i < 3; ++i) {
        L12(i, 0) = M_F * std::cos(th[i]);
        L12(i, 1) = M_D * std::cos(th[i]);
        L12(i, 2) = M_Q * std::sin(th[i]);
    }

    Eigen::Matrix3d L22;
    L22 << L_F, M_R, 0.0,
           M_R, L_D, 0.0,
           0.0, 0.0, L_Q;

    Eigen::Matrix<double, 6, 6> L;
    L.topLeftCorner<3, 3>() = L11;
    L.topRightCorner<3, 3>() = L12;
    L.bottomLeftCorner<3, 3>() = L12.transpose();
    L.bottomRightCorner<3, 3>() = L22;
    return L;
}

InductanceMatrices blocked_inductance(const MachineParams& p,
                                      double L_s, double M_s, double L_m) {
    InductanceMatrices im;
    im.L_s = L_s; im.M_s = M_s; im.L_m = L_m;
    im.M_F = p.kM_F / p.k;
    im.M_D = p.kM_D / p.k;
    im.M_Q = p.kM_Q / p.k;
    im.L_F = p.L_F; im.L_D = p.L_D; im.L_Q = p.L_Q; im.M_R = p.M_R;

    im.L0 = L_s - 2.0 * M_s;
    im.Ld = L_s + M_s + 1.5 * L_m;
    im.Lq = L_s + M_s - 1.5 * L_m;

    // the blocked matrix: diag stator inductances plus k-scaled mutuals
    const double k = p.k;
    Eigen::Matrix<double, 6, 6>& LB = im.L_B;
    LB.setZero();
    LB(0, 0) = im.L0;
    LB(1, 1) = im.Ld;  LB(2, 2) = im.Lq;
    LB(1, 3) = LB(3, 1) = k * im.M_F;
    LB(1, 4) = LB(4, 1) = k * im.M_D;
    LB(2, 5) = LB(5, 2) = k * im.M_Q;
    LB(3, 3) = p.L_F;  LB(4, 4) = p.L_D;  LB(5, 5) = p.L_Q;
    LB(3, 4) = LB(4, 3) = p.M_R;
    return im;
}

InductanceMatrices blocked_inductance_default(const MachineParams& p) {
    const double L_m = (p.L_d - p.L_q) / 3.0;
    const double M_s = 0.335;                       // any value with L0 > 0 works
    const double L_s = p.L_d - 1.5 * L_m - M_s;
    return blocked_inductance(p, L_s, M_s, L_m);
}

} // namespace smib
