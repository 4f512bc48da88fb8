#pragma once
#include <vector>

#include "smib/numlin.h"
#include "smib/params.h"
#include "smib/statespace.h"

namespace smib {

// 5th-order one-axis plant state
struct ReducedState {
    double E_q_prime = 0;
    double omega = 1.0;
    double delta = 0;
    double T_m = 0, G_V = 0;

    Vec vec() const;
    static ReducedState from_vec(const Vec& v);
};

struct ReducedInput {
    double E_FD = 0, u_T = 0;

    Vec vec() const;
    static ReducedInput from_vec(const Vec& v);
};

struct ReducedOutput {
    double V_t = 0, omega = 0;
    double V_d = 0, V_q = 0;
};

struct AlgebraicCurrents {
    double I_d = 0, I_q = 0;
};

// closed-form stator currents behind the line, given E'_q and delta
AlgebraicCurrents algebraic_currents(double E_q_prime, double delta,
                                     const ReducedCoefficients& c);

ReducedState reduced_rhs(const ReducedState& x, const ReducedInput& u,
                         const ReducedCoefficients& c);

ReducedOutput reduced_output(const ReducedState& x,
                             const ReducedCoefficients& c);

// electrical torque in the unexpanded form E'_q*I_q - (L_q - L'_d)*I_d*I_q;
// must agree with the f21..f26 expansion used by reduced_rhs
double electrical_torque_unexpanded(double E_q_prime, double delta,
                                    const ReducedCoefficients& c);

// rational transfer function, coefficients in descending powers of s,
// stored with monic denominator
struct TransferFunction {
    std::vector<double> num;
    std::vector<double> den;

    void normalize();                  // make den monic, strip leading zeros
    double eval(double s_real) const;  // value at s = s_real (real axis)
};

TransferFunction tf_series(const TransferFunction& a, const TransferFunction& b);
// unity-sign negative feedback: G/(1 + G*H)
TransferFunction tf_feedback(const TransferFunction& g, const TransferFunction& h);
std::vector<double> poly_mul(const std::vector<double>& a,
                             const std::vector<double>& b);
std::vector<double> poly_add(const std::vector<double>& a,
                             const std::vector<double>& b);

// the decoupled loop shapes around an operating point: speed loop
// G_lfc/H_lfc and voltage loop G_avr (delta-coupling dropped)
struct DecoupledLoops {
    TransferFunction G_lfc;
    TransferFunction H_lfc;
    TransferFunction G_avr;
};

DecoupledLoops lfc_avr_transfer_functions(const StateSpaceModel& lin,
                                          const ReducedCoefficients& c);

} // namespace smib
