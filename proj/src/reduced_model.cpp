#include "smib/reduced_model.h"

#include <cmath>
#include <sstream>

#include "smib/errors.h"

namespace smib {

Vec ReducedState::vec() const {
    Vec v(5);
    v << E_q_prime, omega, delta, T_m, G_V;
    return v;
}

ReducedState ReducedState::from_vec(const Vec& v) {
    if (v.size() != 5)
        throw invalid_parameter("ReducedState expects 5 components");
    ReducedState x;
    x.E_q_prime = v(0); x.omega = v(1); x.delta = v(2);
    x.T_m = v(3); x.G_V = v(4);
    return x;
}

Vec ReducedInput::vec() const {
    Vec v(2);
    v << E_FD, u_T;
    return v;
}

ReducedInput ReducedInput::from_vec(const Vec& v) {
    if (v.size() != 2)
        throw invalid_parameter("ReducedInput expects 2 components");
    return ReducedInput{v(0), v(1)};
}

AlgebraicCurrents algebraic_currents(double E_q_prime, double delta,
                                     const ReducedCoefficients& c) {
    // infinite-bus voltage seen in the machine frame
    const double vD = -c.V_inf * std::sin(delta - c.alpha);
    const double vQ = c.V_inf * std::cos(delta - c.alpha);
    AlgebraicCurrents ic;
    ic.I_d = (-(E_q_prime - vQ) * c.L1 - vD * c.R1) / c.M1;
    ic.I_q = ((E_q_prime - vQ) * c.R1 - vD * c.L3) / c.M1;
    return ic;
}

ReducedState reduced_rhs(const ReducedState& x, const ReducedInput& u,
                         const ReducedCoefficients& c) {
    if (!x.vec().allFinite() || !std::isfinite(u.E_FD) || !std::isfinite(u.u_T)) {
        std::ostringstream os;
        os << "reduced_rhs got non-finite state/input at delta=" << x.delta;
        throw sim_divergence(os.str());
    }
    const double s = std::sin(x.delta - c.alpha);
    const double co = std::cos(x.delta - c.alpha);
    const double Eq = x.E_q_prime;

    ReducedState d;
    d.E_q_prime = c.f11 * Eq + c.f12 * co + c.f13 * s + c.g11 * u.E_FD;
    // swing row in the expanded quadratic form
    d.omega = c.f21 * Eq * Eq + c.f22 * Eq * co + c.f23 * Eq * s
            + c.f24 * s * co + c.f25 * co * co + c.f26 * s * s
            + c.f27 * x.omega + c.f28 * x.T_m;
    d.delta = x.omega - 1.0;
    d.T_m = c.f41 * x.T_m + c.f42 * x.G_V;
    d.G_V = c.f51 * x.omega + c.f52 * x.G_V + c.g55 * u.u_T;
    return d;
}

ReducedOutput reduced_output(const ReducedState& x,
                             const ReducedCoefficients& c) {
    const double s = std::sin(x.delta - c.alpha);
    const double co = std::cos(x.delta - c.alpha);
    ReducedOutput y;
    y.V_d = c.Vd1 * x.E_q_prime + c.Vd2 * co + c.Vd3 * s;
    // V_q carries the direct E'_q term on top of its coefficient row
    y.V_q = c.Vq1 * x.E_q_prime + c.Vq2 * co + c.Vq3 * s + x.E_q_prime;
    y.V_t = std::hypot(y.V_d, y.V_q);
    y.omega = x.omega;
    return y;
}

double electrical_torque_unexpanded(double E_q_prime, double delta,
                                    const ReducedCoefficients& c) {
    const AlgebraicCurrents ic = algebraic_currents(E_q_prime, delta, c);
    return E_q_prime * ic.I_q - c.L4 * ic.I_d * ic.I_q;
}

// ------------------------------------------------------ transfer functions

std::vector<double> poly_mul(const std::vector<double>& a,
                             const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

std::vector<double> poly_add(const std::vector<double>& a,
                             const std::vector<double>& b) {
    // right-align (coefficients are descending powers)
    std::vector<double> out(std::max(a.size(), b.size()), 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        out[out.size() - a.size() + i] += a[i];
    for (size_t i = 0; i < b.size(); ++i)
        out[out.size() - b.size() + i] += b[i];
    return out;
}

void TransferFunction::normalize() {
    size_t lead = 0;
    while (lead < den.size() && den[lead] == 0.0) ++lead;
    if (lead == den.size())
        throw invalid_parameter("transfer function denominator is zero");
    den.erase(den.begin(), den.begin() + static_cast<long>(lead));
    const double d0 = den[0];
    for (double& v : den) v /= d0;
    for (double& v : num) v /= d0;
    // strip numerator leading zeros too, keeping at least one coefficient
    size_t nlead = 0;
    while (nlead + 1 < num.size() && num[nlead] == 0.0) ++nlead;
    num.erase(num.begin(), num.begin() + static_cast<long>(nlead));
    if (num.empty()) num = {0.0};
}

double TransferFunction::eval(double s_real) const {
    auto horner = [&](const std::vector<double>& p) {
        double acc = 0.0;
        for (double cf : p) acc = acc * s_real + cf;
        return acc;
    };
    const double d = horner(den);
    if (d == 0.0)
        throw numerical_failure("transfer function evaluated at a pole");
    return horner(num) / d;
}

TransferFunction tf_series(const TransferFunction& a, const TransferFunction& b) {
    TransferFunction g;
    g.num = poly_mul(a.num, b.num);
    g.den = poly_mul(a.den, b.den);
    g.normalize();
    return g;
}

TransferFunction tf_feedback(const TransferFunction& g, const TransferFunction& h) {
    // G/(1+GH) = num_g*den_h / (den_g*den_h + num_g*num_h)
    TransferFunction cl;
    cl.num = poly_mul(g.num, h.den);
    cl.den = poly_add(poly_mul(g.den, h.den), poly_mul(g.num, h.num));
    cl.normalize();
    return cl;
}

DecoupledLoops lfc_avr_transfer_functions(const StateSpaceModel& lin,
                                          const ReducedCoefficients& c) {
    if (lin.A.rows() != 5 || lin.C.rows() < 1)
        throw invalid_parameter("lfc_avr_transfer_functions needs the 5-state model");
    // coupling constants read off the linearization: A23 is the delta
    // stiffness in the swing row, T1 the E'_q weight in the V_t output
    const double A23 = lin.A(1, 2);
    const double T1 = lin.C(0, 0);

    DecoupledLoops out;
    // speed loop: governor * turbine * swing-with-integrator, forced by u_T
    out.G_lfc.num = {c.g55 * c.f42 * c.f28, 0.0};
    out.G_lfc.den = poly_mul(poly_mul({1.0, -c.f52}, {1.0, -c.f41}),
                             {1.0, -c.f27, -A23});
    out.G_lfc.normalize();
    out.H_lfc.num = {-c.f51 / c.g55};
    out.H_lfc.den = {1.0};
    // voltage loop: first-order field response, E'_q seen through T1
    out.G_avr.num = {T1 * c.g11};
    out.G_avr.den = {1.0, -c.f11};
    out.G_avr.normalize();
    return out;
}

} // namespace smib
