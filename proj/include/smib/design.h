#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "smib/numlin.h"
#include "smib/reduced_model.h"
#include "smib/statespace.h"

namespace smib {

// ------------------------------------------------------------------ PID

enum class PidLoop { LFC, AVR };

struct PidGains {
    double Kp = 0, Ki = 0, Kd = 0;
    PidLoop loop = PidLoop::LFC;
};

// Ideal PID transfer function plus a proper 2-state realization with a
// filtered derivative (states: integrator, derivative filter).
struct PidController {
    PidGains gains;
    double N = 100.0;          // derivative filter corner, rad/s
    TransferFunction ideal;    // (Kd s^2 + Kp s + Ki)/s -- for algebra only
    TransferFunction realized; // Kp + Ki/s + Kd N s/(s+N)
    Mat A, B, C, D;            // realization, u = C x + D e
};

PidController pid_controller(const PidGains& g, double N = 100.0);

// --------------------------------------------------------- state feedback

struct GainMatrix {
    Mat K;
    std::string method;        // "lqr" | "place" | "fbl" | "manual"
    Mat Q, R;                  // design inputs when method == "lqr"
    Spectrum poles;            // requested poles when method == "place"
};

// K = R^{-1} B' P via the algebraic Riccati equation; A - BK checked
// Hurwitz before returning
GainMatrix lqr_gain(const StateSpaceModel& ss, const Mat& Q, const Mat& R);

// MIMO placement by eigenvector assignment: one eigenvector per pole is
// picked from the kernel of [A - pI | B] (seeded random start, then a few
// passes steering each away from the others' span), and K solves the
// resulting interpolation exactly.  The contract is the closed-loop
// spectrum (1e-6); K itself is non-unique.
GainMatrix place_poles(const Mat& A, const Mat& B, const Spectrum& poles,
                       std::uint64_t seed = 0);

// ---------------------------------------------------------------- observers

enum class MeasuredOutputs { VtOnly, VtAndOmega };

struct ObserverGain {
    Mat L;                     // n x p
    MeasuredOutputs measured = MeasuredOutputs::VtAndOmega;
};

// dual placement: L = place(A', C', poles)'; A - LC validated against the
// requested spectrum
ObserverGain observer_gain(const Mat& A, const Mat& C, const Spectrum& poles,
                           MeasuredOutputs measured, std::uint64_t seed = 0);

// rho-mode helper: the observer spectrum is the state-feedback spectrum
// scaled by rho (both real and imaginary parts)
Spectrum scale_spectrum(const Spectrum& s, double rho);

// ------------------------------------------------------------------- LTR

struct LtrSchedule {
    Mat V10, V20, V;           // nominal noise intensities (SPD)
    double q = 0;              // recovery knob
    Mat H;                     // resulting filter gain, filled by the solve
};

// H(q) = Sigma C' V2^{-1}, Sigma from the filter Riccati equation with
// V1(q) = V10 + q^2 B V B'
ObserverGain kalman_ltr_gain(const StateSpaceModel& ss, LtrSchedule& sched);

// ------------------------------------------------------------- root locus

// closed-loop root trajectories of 1 + k*G(s) for each gain in the list,
// branch-ordered by nearest-neighbor continuity
std::vector<Spectrum> root_locus(const TransferFunction& open_loop,
                                 const std::vector<double>& gains);

// gains serialize in the sectioned key=value format ([gain.K], comma rows)
std::string gain_to_text(const GainMatrix& g);

} // namespace smib
