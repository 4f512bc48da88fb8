#pragma once
#include "smib/numlin.h"
#include "smib/params.h"

namespace smib {

// 9th-order plant state.  Currents are RMS-equivalent per-unit; delta in rad.
struct TruthState {
    double I_d = 0, I_F = 0, I_D = 0, I_q = 0, I_Q = 0;
    double omega = 1.0;
    double delta = 0;
    double T_m = 0, G_V = 0;

    Vec vec() const;
    static TruthState from_vec(const Vec& v);
};

struct TruthInput {
    double V_F = 0, u_T = 0;

    Vec vec() const;
    static TruthInput from_vec(const Vec& v);
};

struct TruthOutput {
    double V_t = 0, omega = 0;
    double V_d = 0, V_q = 0;   // components, kept for diagnostics
};

// the nine rates, bilinear I*omega products and trig terms included
TruthState truth_rhs(const TruthState& x, const TruthInput& u,
                     const TruthCoefficients& c);

TruthOutput truth_output(const TruthState& x, const TruthInput& u,
                         const TruthCoefficients& c);

} // namespace smib
