#pragma once
#include "smib/numlin.h"
#include "smib/params.h"
#include "smib/reduced_model.h"
#include "smib/statespace.h"
#include "smib/truth_model.h"

namespace smib {

// a solved operating point: state, input, and how good the solve was
struct Equilibrium {
    Vec x0, u0;
    double residual = 0;       // ||rhs||_inf at (x0, u0)
    double delta_0 = 0;        // the anchors that produced it
    double T_m0 = 0;
};

// Anchored equilibrium solves: omega = 1, delta and T_m pinned, the rest by
// damped Newton.  The reduced solve seeds E'_q from its closed-form
// quadratic (complex roots mean the anchors carry no equilibrium).
Equilibrium find_equilibrium_truth(double delta0, double Tm0,
                                   const TruthCoefficients& c);
Equilibrium find_equilibrium_reduced(double delta0, double Tm0,
                                     const ReducedCoefficients& c);

// analytic Jacobians for the one-axis model
StateSpaceModel linearize_reduced(const Equilibrium& eq,
                                  const ReducedCoefficients& c);

// central finite differences for the 9th-order model (step 1e-6 scaled)
StateSpaceModel linearize_truth(const Equilibrium& eq,
                                const TruthCoefficients& c);

// steady value of the unit-step response, lim s->0 of TF(s); validity
// (no RHP/imaginary-axis poles after s-factor cancellation) is checked
double final_value(const TransferFunction& tf);

} // namespace smib
