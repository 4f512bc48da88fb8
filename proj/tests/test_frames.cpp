#include <cmath>

#include "approx.h"
#include "doctest.h"
#include "smib/frames.h"

using namespace smib;

TEST_SUITE("frames") {

TEST_CASE("park matrix is orthogonal and power invariant") {
    const Eigen::Vector3d v(0.9, -1.4, 0.3);
    for (double th : {0.0, 0.37, 1.1, 2.9, 5.6}) {
        const ParkMatrix P = park_matrix(th);
        CHECK((P * P.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <
              1e-14);
        CHECK(std::abs((P * v).squaredNorm() - v.squaredNorm()) < 1e-13);
    }
}

TEST_CASE("speed-voltage generator P * d(P^-1)/dtheta") {
    const double th = 0.83, h = 1e-6;
    const ParkMatrix P = park_matrix(th);
    const Eigen::Matrix3d dPinv =
        (park_matrix(th + h).transpose() - park_matrix(th - h).transpose()) / (2 * h);
    const Eigen::Matrix3d G = P * dPinv;
    Eigen::Matrix3d want;
    want << 0, 0, 0,
            0, 0, 1,
            0, -1, 0;
    CHECK((G - want).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("blocking the static inductance gives the sparse constant matrix") {
    const MachineParams p = paper_machine();
    const InductanceMatrices im = blocked_inductance_default(p);
    for (double th : {0.0, 0.3, 1.2, 4.0}) {
        const auto B = blocking_transform(th);
        const Eigen::Matrix<double, 6, 6> rotated = B * im.L_static(th) * B.transpose();
        CHECK((rotated - im.L_B).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("defaults land on the machine d/q inductances") {
    const MachineParams p = paper_machine();
    const InductanceMatrices im = blocked_inductance_default(p);
    CHECK(im.Ld == testutil::near(p.L_d, 1e-12));
    CHECK(im.Lq == testutil::near(p.L_q, 1e-12));
    CHECK(im.L_m == testutil::near((p.L_d - p.L_q) / 3.0, 1e-12));
    CHECK(im.L0 > 0);
    // blocked mutual terms carry the sqrt(3/2) factor back to the table values
    CHECK(im.L_B(1, 3) == testutil::near(p.kM_F, 1e-12));
    CHECK(im.L_B(2, 5) == testutil::near(p.kM_Q, 1e-12));
    CHECK(im.L_B(3, 4) == testutil::near(p.M_R, 1e-12));
}

}  // TEST_SUITE
