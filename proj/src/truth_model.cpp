#include "smib/truth_model.h"

#include <cmath>
#include <sstream>

#include "smib/errors.h"

namespace smib {

Vec TruthState::vec() const {
    Vec v(9);
    v << I_d, I_F, I_D, I_q, I_Q, omega, delta, T_m, G_V;
    return v;
}

TruthState TruthState::from_vec(const Vec& v) {
    if (v.size() != 9)
        throw invalid_parameter("TruthState expects 9 components");
    TruthState x;
    x.I_d = v(0); x.I_F = v(1); x.I_D = v(2); x.I_q = v(3); x.I_Q = v(4);
    x.omega = v(5); x.delta = v(6); x.T_m = v(7); x.G_V = v(8);
    return x;
}

Vec TruthInput::vec() const {
    Vec v(2);
    v << V_F, u_T;
    return v;
}

TruthInput TruthInput::from_vec(const Vec& v) {
    if (v.size() != 2)
        throw invalid_parameter("TruthInput expects 2 components");
    return TruthInput{v(0), v(1)};
}

TruthState truth_rhs(const TruthState& x, const TruthInput& u,
                     const TruthCoefficients& c) {
    if (!x.vec().allFinite() || !std::isfinite(u.V_F) || !std::isfinite(u.u_T)) {
        std::ostringstream os;
        os << "truth_rhs got non-finite state/input at delta=" << x.delta;
        throw sim_divergence(os.str());
    }
    const double s = std::sin(x.delta - c.alpha);
    const double co = std::cos(x.delta - c.alpha);
    const double w = x.omega;

    TruthState d;
    // stator/rotor flux rows; speed voltages enter as I*omega products
    d.I_d = c.F11 * x.I_d + c.F12 * x.I_F + c.F13 * x.I_D
          + c.F14 * x.I_q * w + c.F15 * x.I_Q * w + c.F16 * s + c.G11 * u.V_F;
    d.I_F = c.F21 * x.I_d + c.F22 * x.I_F + c.F23 * x.I_D
          + c.F24 * x.I_q * w + c.F25 * x.I_Q * w + c.F26 * s + c.G21 * u.V_F;
    d.I_D = c.F31 * x.I_d + c.F32 * x.I_F + c.F33 * x.I_D
          + c.F34 * x.I_q * w + c.F35 * x.I_Q * w + c.F36 * s + c.G31 * u.V_F;
    d.I_q = c.F41 * x.I_d * w + c.F42 * x.I_F * w + c.F43 * x.I_D * w
          + c.F44 * x.I_q + c.F45 * x.I_Q + c.F46 * co;
    d.I_Q = c.F51 * x.I_d * w + c.F52 * x.I_F * w + c.F53 * x.I_D * w
          + c.F54 * x.I_q + c.F55 * x.I_Q + c.F56 * co;
    // swing: electrical torque is a current quadratic
    d.omega = c.F61 * x.I_d * x.I_q + c.F62 * x.I_F * x.I_q
            + c.F63 * x.I_D * x.I_q + c.F64 * x.I_d * x.I_Q
            + c.F65 * w + c.F66 * x.T_m;
    d.delta = w - 1.0;
    d.T_m = c.F81 * x.T_m + c.F82 * x.G_V;
    d.G_V = c.F91 * w + c.F92 * x.G_V + c.G92 * u.u_T;
    return d;
}

TruthOutput truth_output(const TruthState& x, const TruthInput& u,
                         const TruthCoefficients& c) {
    const double s = std::sin(x.delta - c.alpha);
    const double co = std::cos(x.delta - c.alpha);
    const double w = x.omega;
    TruthOutput y;
    // terminal voltage = bus voltage + line drop, with the V_F feedthrough
    y.V_d = c.y11 * x.I_d + c.y12 * x.I_F + c.y13 * x.I_D
          + c.y14 * x.I_q * w + c.y15 * x.I_Q * w + c.y16 * s + c.i11 * u.V_F;
    y.V_q = c.y21 * x.I_d * w + c.y22 * x.I_F * w + c.y23 * x.I_D * w
          + c.y24 * x.I_q + c.y25 * x.I_Q + c.y26 * co;
    y.V_t = std::hypot(y.V_d, y.V_q);
    y.omega = w;
    return y;
}

} // namespace smib
