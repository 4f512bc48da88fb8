#pragma once
// ODE integration and closed-loop orchestration.  A ClosedLoopSystem bundles
// the augmented rhs (plant + controller states) with extractors that log the
// applied inputs and measured outputs; simulate() runs it under rk45
// (Dormand-Prince) or fixed-step rk4 and returns a sampled Trajectory.
//
// Actuator limits are baked into each loop at build time (the clamp happens
// inside the rhs, mirroring how the plant actually saturates); the optional
// post-step projection additionally keeps stored G_V inside its bounds.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "smib/design.h"
#include "smib/fbl.h"
#include "smib/numlin.h"
#include "smib/params.h"
#include "smib/reduced_model.h"
#include "smib/statespace.h"
#include "smib/truth_model.h"

namespace smib {

struct SimOptions {
    enum class Method { rk45, rk4 };
    Method method = Method::rk45;
    double t_end = 10.0;
    double dt = 1e-3;        // rk4 step
    double rtol = 1e-8;      // rk45 tolerances
    double atol = 1e-10;
    double max_step = 0.0;   // rk45 step cap; 0 means t_end/10
    double sample_dt = 0.0;  // record every accepted step when 0
    bool limits = true;      // recorded in metadata; loops bake it in
};

// Everything simulate() needs: z is the augmented state (plant first,
// controller/estimator states appended).
struct ClosedLoopSystem {
    int nz = 0;
    Vec z0;
    std::function<Vec(double, const Vec&)> rhs;
    std::function<void(Vec&)> clamp;  // optional post-step projection
    std::function<Vec(double, const Vec&)> inputs;   // applied plant inputs
    std::function<Vec(double, const Vec&)> outputs;  // measured outputs
    std::vector<std::string> state_names, input_names, output_names;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Vec> x, u, y;
    std::vector<std::string> state_names, input_names, output_names;
    std::vector<std::pair<std::string, std::string>> metadata;
    double requested_horizon = 0;
    bool diverged = false;
    std::string diagnostic;

    double horizon() const { return t.empty() ? 0.0 : t.back(); }
    // column lookup across states, then inputs, then outputs; throws
    // invalid_parameter on unknown names
    std::vector<double> channel(const std::string& name) const;
    std::vector<std::string> channel_names() const;
};

Trajectory simulate(const ClosedLoopSystem& sys, const SimOptions& opt);

// trajectory.csv round trip: header t,<states>,<inputs>,<outputs>, leading
// '#' metadata lines, %.12g
void write_trajectory_csv(const std::string& path, const Trajectory& tr);
Trajectory read_trajectory_csv(const std::string& path);

// ------------------------------------------------------------ test signals

struct TestSignal {
    std::vector<double> step_times;  // strictly increasing, starting at 0
    std::vector<double> amplitudes;  // cumulative value after each step
    std::string tag = "custom";

    double value(double t) const;
};

TestSignal custom_staircase(std::vector<double> times, std::vector<double> cumulative,
                            std::string tag = "custom");
// four steps of height h at t = 0, 200, 400, 600 s
TestSignal staircase_gamma1(double h);
// same times, half the height
TestSignal staircase_gamma2(double h);

// --------------------------------------------------------------- metrics

struct ChannelMetrics {
    std::string name;
    double final_value = 0;    // mean of the last 5% of samples
    double reference = 0;
    bool has_reference = false;
    double ss_error = 0;       // |final - reference| when a reference is set
    double settling_time = -1; // first entry into the 2% band, -1 if never
    bool settled = false;
    double peak_deviation = 0; // max |v - final| over the run
    bool decaying = false;     // peak-per-window envelope is non-increasing
};

struct Metrics {
    std::vector<ChannelMetrics> channels;

    const ChannelMetrics* find(const std::string& name) const;
};

// refs maps channel name -> reference value; requires the trajectory to have
// completed at least 80% of its requested horizon
Metrics compute_metrics(const Trajectory& tr,
                        const std::map<std::string, double>& refs = {});
std::string metrics_to_text(const Metrics& m);

// peak |v - v_final| per window, over `windows` equal time slices; used for
// the estimator-error envelope property
bool decreasing_envelope(const std::vector<double>& t, const std::vector<double>& v,
                         int windows = 5);

// ----------------------------------------------------- closed-loop builders
//
// Each builder returns a self-contained system; coefficients are captured by
// value.  `limits` enables the actuator clamps (E_FD into [-5,5] where a
// field command exists, G_V into [0, gv_max]).

// open loop, both channels driven by the same staircase (the truth field
// channel converts the E_FD-scale signal to V_F via e15 = r_F/kM_F)
ClosedLoopSystem truth_open_loop(const TruthCoefficients& c, const FblCoefficients& fc,
                                 const Vec& x0, const TestSignal& sig, bool limits,
                                 double gv_max);
ClosedLoopSystem reduced_open_loop(const ReducedCoefficients& rc, const Vec& x0,
                                   const TestSignal& sig, bool limits, double gv_max);

// constant-input open loop (equilibrium hold, step-halving checks)
ClosedLoopSystem truth_constant_input(const TruthCoefficients& c, const Vec& x0,
                                      const Vec& u0);
ClosedLoopSystem reduced_constant_input(const ReducedCoefficients& rc, const Vec& x0,
                                        const Vec& u0);

// two-loop PID around an operating point: LFC drives u_T from the speed
// error, AVR drives the field from the V_t error.  Appended controller
// states: [I_lfc, D_lfc, I_avr, D_avr] (integrator + derivative filter per
// loop, filter corner N = 100).  u0_cmd = [E_FD0, u_T0].
ClosedLoopSystem pid_truth_loop(const TruthCoefficients& c, const FblCoefficients& fc,
                                const PidGains& lfc, const PidGains& avr, const Vec& x0,
                                const Vec& u0_cmd, double vt_ref, bool limits,
                                double gv_max);
ClosedLoopSystem pid_reduced_loop(const ReducedCoefficients& rc, const PidGains& lfc,
                                  const PidGains& avr, const Vec& x0, const Vec& u0,
                                  double vt_ref, bool limits, double gv_max);
// both PID loops closed on the deviation model dx = A dx + B du; regulates
// the deviations to zero from the initial kick dx0
ClosedLoopSystem pid_linear_loop(const StateSpaceModel& lin, const PidGains& lfc,
                                 const PidGains& avr, const Vec& dx0);
// single-loop SISO: unit-step reference tracking of plant G under PID, with
// feedback path H (pass H = {1} for unity feedback)
ClosedLoopSystem pid_siso_loop(const TransferFunction& plant, const TransferFunction& fb,
                               const PidGains& g);

// full-state feedback du = -K (x - x_ref), u = u_ref + du.  On the truth
// plant the reduced coordinates are reconstructed from the physical state
// and the field command is converted via e15.
ClosedLoopSystem state_feedback_truth(const TruthCoefficients& c,
                                      const FblCoefficients& fc, const Mat& K,
                                      const Vec& x_ref, const Vec& u_ref, const Vec& x0,
                                      EqReconstruction rec, bool limits, double gv_max);
ClosedLoopSystem state_feedback_reduced(const ReducedCoefficients& rc, const Mat& K,
                                        const Vec& x_ref, const Vec& u_ref,
                                        const Vec& x0, bool limits, double gv_max);
ClosedLoopSystem state_feedback_linear(const StateSpaceModel& lin, const Mat& K,
                                       const Vec& dx0);

// observer-based state feedback on the deviation model; the estimate is
// co-integrated (states [dx; dx_hat]) and both are logged
ClosedLoopSystem observer_linear_loop(const StateSpaceModel& lin, const Mat& K,
                                      const Mat& L, const Vec& dx0, const Vec& dxhat0);

// LQG/LTR on the truth plant: measured deviations [V_t - vt_ref, omega - 1]
// drive the reduced-model estimator, feedback acts on the estimate.
// States [x_truth(9); x_hat(5)], estimator starts at zero deviation.
ClosedLoopSystem ltr_truth_loop(const TruthCoefficients& c, const FblCoefficients& fc,
                                const StateSpaceModel& lin, const Mat& K, const Mat& H,
                                const Vec& u_ref, double vt_ref, const Vec& x0,
                                bool limits, double gv_max);

// feedback linearization; K acts on z - z_d in Brunovsky coordinates
ClosedLoopSystem fbl_reduced_loop(const FblCoefficients& fc, const Mat& K,
                                  const FblSetpoint& sp, const Vec& x0, bool limits,
                                  double gv_max);
ClosedLoopSystem fbl_truth_loop(const TruthCoefficients& c, const FblCoefficients& fc,
                                const Mat& K, const FblSetpoint& sp, const Vec& x0,
                                EqReconstruction rec, bool limits, double gv_max);

// bespoke linear system dx = A x + B u(t), y = C x + D u, for the
// final-value confirmations and other small checks
ClosedLoopSystem linear_system(const Mat& A, const Mat& B, const Mat& C, const Mat& D,
                               const Vec& x0, std::function<Vec(double)> u_of_t,
                               std::vector<std::string> state_names = {},
                               std::vector<std::string> input_names = {},
                               std::vector<std::string> output_names = {});

} // namespace smib
