#include "smib/sim.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "smib/csvplot.h"
#include "smib/errors.h"

namespace smib {

namespace {

const std::vector<std::string> kTruthStateNames = {"I_d", "I_F", "I_D", "I_q", "I_Q",
                                                   "omega", "delta", "T_m", "G_V"};
const std::vector<std::string> kTruthInputNames = {"V_F", "u_T"};
const std::vector<std::string> kReducedStateNames = {"Eq_p", "omega", "delta", "T_m",
                                                     "G_V"};
const std::vector<std::string> kReducedInputNames = {"E_FD", "u_T"};
const std::vector<std::string> kOutputNames = {"V_t", "omega_y"};
const std::vector<std::string> kPidStateNames = {"I_lfc", "D_lfc", "I_avr", "D_avr"};

constexpr double kPidN = 100.0;  // derivative filter corner used by every loop

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

std::vector<std::string> cat_names(std::vector<std::string> a,
                                   const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<std::string> hat_names(const std::vector<std::string>& base) {
    std::vector<std::string> out;
    out.reserve(base.size());
    for (const auto& n : base) out.push_back(n + "_hat");
    return out;
}

std::vector<std::string> default_names(const std::string& prefix, int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
    return out;
}

}  // namespace

// ------------------------------------------------------------- integration

Trajectory simulate(const ClosedLoopSystem& sys, const SimOptions& opt) {
    if (sys.nz <= 0 || !sys.rhs)
        throw invalid_parameter("simulate: closed-loop system has no dynamics");
    if (sys.z0.size() != sys.nz)
        throw invalid_parameter("simulate: z0 size " + std::to_string(sys.z0.size()) +
                                " != nz " + std::to_string(sys.nz));
    if (!(opt.t_end > 0)) throw invalid_parameter("simulate: t_end must be positive");
    if (opt.method == SimOptions::Method::rk4 && !(opt.dt > 0))
        throw invalid_parameter("simulate: rk4 needs dt > 0");

    Trajectory tr;
    tr.state_names = sys.state_names;
    tr.input_names = sys.input_names;
    tr.output_names = sys.output_names;
    tr.requested_horizon = opt.t_end;
    tr.metadata.emplace_back("integrator",
                             opt.method == SimOptions::Method::rk4 ? "rk4" : "rk45");
    if (opt.method == SimOptions::Method::rk4) {
        tr.metadata.emplace_back("dt", format_g12(opt.dt));
    } else {
        tr.metadata.emplace_back("rtol", format_g12(opt.rtol));
        tr.metadata.emplace_back("atol", format_g12(opt.atol));
    }
    tr.metadata.emplace_back("limits", opt.limits ? "1" : "0");

    Vec z = sys.z0;
    double t = 0.0;

    auto record = [&](double tt, const Vec& zz) {
        tr.t.push_back(tt);
        tr.x.push_back(zz);
        if (sys.inputs) tr.u.push_back(sys.inputs(tt, zz));
        if (sys.outputs) tr.y.push_back(sys.outputs(tt, zz));
    };
    double next_sample = opt.sample_dt;
    auto maybe_record = [&](double tt, const Vec& zz, bool force) {
        if (opt.sample_dt <= 0 || force || tt + 1e-9 * opt.sample_dt >= next_sample) {
            record(tt, zz);
            if (opt.sample_dt > 0)
                next_sample = opt.sample_dt * (std::floor(tt / opt.sample_dt) + 1.0);
        }
    };

    auto fail = [&](double tt, const std::string& why) {
        tr.diverged = true;
        tr.diagnostic = why + " at t = " + format_g12(tt);
        tr.metadata.emplace_back("diverged", "1");
        tr.metadata.emplace_back("diagnostic", tr.diagnostic);
    };

    try {
        record(0.0, z);

        if (opt.method == SimOptions::Method::rk4) {
            const long nsteps =
                static_cast<long>(std::ceil(opt.t_end / opt.dt - 1e-12));
            for (long i = 0; i < nsteps; ++i) {
                const double h = std::min(opt.dt, opt.t_end - t);
                const Vec k1 = sys.rhs(t, z);
                const Vec k2 = sys.rhs(t + 0.5 * h, z + 0.5 * h * k1);
                const Vec k3 = sys.rhs(t + 0.5 * h, z + 0.5 * h * k2);
                const Vec k4 = sys.rhs(t + h, z + h * k3);
                z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t = (i + 1 == nsteps) ? opt.t_end : t + h;
                if (sys.clamp) sys.clamp(z);
                if (!z.allFinite()) {
                    fail(t, "non-finite state");
                    break;
                }
                maybe_record(t, z, i + 1 == nsteps);
            }
        } else {
            // Dormand-Prince 5(4)
            static const double a21 = 1.0 / 5;
            static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
            static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
            static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
            static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
            static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
            static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

            const double hmax = opt.max_step > 0 ? opt.max_step : opt.t_end / 10.0;
            double h = std::min(hmax, std::min(1e-2, opt.t_end));
            while (t < opt.t_end - 1e-12 * std::max(1.0, opt.t_end)) {
                h = std::min(h, opt.t_end - t);
                const Vec k1 = sys.rhs(t, z);
                const Vec k2 = sys.rhs(t + 0.2 * h, z + h * (a21 * k1));
                const Vec k3 = sys.rhs(t + 0.3 * h, z + h * (a31 * k1 + a32 * k2));
                const Vec k4 =
                    sys.rhs(t + 0.8 * h, z + h * (a41 * k1 + a42 * k2 + a43 * k3));
                const Vec k5 = sys.rhs(t + (8.0 / 9.0) * h,
                                       z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
                const Vec k6 = sys.rhs(
                    t + h, z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
                const Vec z5 =
                    z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
                const Vec k7 = sys.rhs(t + h, z5);
                const Vec err =
                    h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

                double sum = 0.0;
                for (int i = 0; i < sys.nz; ++i) {
                    const double sc =
                        opt.atol + opt.rtol * std::max(std::abs(z(i)), std::abs(z5(i)));
                    const double r = err(i) / sc;
                    sum += r * r;
                }
                const double errnorm = std::sqrt(sum / sys.nz);

                if (errnorm <= 1.0 || !std::isfinite(errnorm)) {
                    if (!std::isfinite(errnorm) || !z5.allFinite()) {
                        fail(t, "non-finite state");
                        break;
                    }
                    t += h;
                    z = z5;
                    if (sys.clamp) sys.clamp(z);
                    maybe_record(t, z, t >= opt.t_end - 1e-12 * std::max(1.0, opt.t_end));
                }
                double factor = (errnorm < 1e-10)
                                    ? 5.0
                                    : clampd(0.9 * std::pow(errnorm, -0.2), 0.2, 5.0);
                h = std::min(h * factor, hmax);
                if (h < 1e-14 * std::max(1.0, t)) {
                    fail(t, "step size underflow");
                    break;
                }
            }
        }
    } catch (const sim_divergence& e) {
        fail(t, std::string("rhs reported divergence: ") + e.what());
    }
    return tr;
}

// -------------------------------------------------------------- trajectory

std::vector<std::string> Trajectory::channel_names() const {
    auto all = state_names;
    all.insert(all.end(), input_names.begin(), input_names.end());
    all.insert(all.end(), output_names.begin(), output_names.end());
    return all;
}

std::vector<double> Trajectory::channel(const std::string& name) const {
    auto pick = [&](const std::vector<std::string>& names,
                    const std::vector<Vec>& data) -> std::vector<double> {
        for (size_t j = 0; j < names.size(); ++j) {
            if (names[j] != name) continue;
            std::vector<double> col(data.size());
            for (size_t i = 0; i < data.size(); ++i) col[i] = data[i](static_cast<int>(j));
            return col;
        }
        return {};
    };
    if (auto col = pick(state_names, x); !col.empty()) return col;
    if (auto col = pick(input_names, u); !col.empty()) return col;
    if (auto col = pick(output_names, y); !col.empty()) return col;
    std::string known;
    for (const auto& n : channel_names()) known += (known.empty() ? "" : ", ") + n;
    throw invalid_parameter("unknown channel '" + name + "' (have: " + known + ")");
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
    CsvTable table;
    for (const auto& [k, v] : tr.metadata) table.comments.push_back(k + " = " + v);
    table.comments.push_back("t_end = " + format_g12(tr.requested_horizon));
    table.comments.push_back("states = " + std::to_string(tr.state_names.size()));
    table.comments.push_back("inputs = " + std::to_string(tr.input_names.size()));
    table.comments.push_back("outputs = " + std::to_string(tr.output_names.size()));

    table.header.push_back("t");
    for (const auto& n : tr.state_names) table.header.push_back(n);
    for (const auto& n : tr.input_names) table.header.push_back(n);
    for (const auto& n : tr.output_names) table.header.push_back(n);

    table.rows.reserve(tr.t.size());
    for (size_t i = 0; i < tr.t.size(); ++i) {
        std::vector<double> row;
        row.reserve(table.header.size());
        row.push_back(tr.t[i]);
        for (int j = 0; j < tr.x[i].size(); ++j) row.push_back(tr.x[i](j));
        if (i < tr.u.size())
            for (int j = 0; j < tr.u[i].size(); ++j) row.push_back(tr.u[i](j));
        if (i < tr.y.size())
            for (int j = 0; j < tr.y[i].size(); ++j) row.push_back(tr.y[i](j));
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

Trajectory read_trajectory_csv(const std::string& path) {
    CsvTable table = read_csv(path);
    Trajectory tr;
    size_t ns = 0, ni = 0, no = 0;
    bool have_counts = false;
    for (const auto& c : table.comments) {
        size_t eq = c.find('=');
        if (eq == std::string::npos) {
            tr.metadata.emplace_back(trim(c), "");
            continue;
        }
        std::string k = trim(c.substr(0, eq)), v = trim(c.substr(eq + 1));
        if (k == "states") {
            ns = std::stoul(v);
            have_counts = true;
        } else if (k == "inputs") {
            ni = std::stoul(v);
        } else if (k == "outputs") {
            no = std::stoul(v);
        } else if (k == "t_end") {
            tr.requested_horizon = std::stod(v);
        } else if (k == "diverged") {
            tr.diverged = v == "1";
        } else if (k == "diagnostic") {
            tr.diagnostic = v;
        } else {
            tr.metadata.emplace_back(k, v);
        }
    }
    if (table.header.empty() || table.header[0] != "t")
        throw invalid_parameter(path + ": trajectory CSV must start with a 't' column");
    const size_t ncol = table.header.size() - 1;
    if (!have_counts) {
        ns = ncol;
        ni = no = 0;
    }
    if (ns + ni + no != ncol)
        throw invalid_parameter(path + ": column counts in metadata do not match header");
    tr.state_names.assign(table.header.begin() + 1, table.header.begin() + 1 + ns);
    tr.input_names.assign(table.header.begin() + 1 + ns,
                          table.header.begin() + 1 + ns + ni);
    tr.output_names.assign(table.header.begin() + 1 + ns + ni, table.header.end());
    for (const auto& row : table.rows) {
        tr.t.push_back(row[0]);
        Vec xs(ns), us(ni), ys(no);
        for (size_t j = 0; j < ns; ++j) xs(static_cast<int>(j)) = row[1 + j];
        for (size_t j = 0; j < ni; ++j) us(static_cast<int>(j)) = row[1 + ns + j];
        for (size_t j = 0; j < no; ++j) ys(static_cast<int>(j)) = row[1 + ns + ni + j];
        tr.x.push_back(std::move(xs));
        if (ni) tr.u.push_back(std::move(us));
        if (no) tr.y.push_back(std::move(ys));
    }
    if (tr.requested_horizon == 0 && !tr.t.empty()) tr.requested_horizon = tr.t.back();
    return tr;
}

// ------------------------------------------------------------ test signals

double TestSignal::value(double t) const {
    double v = 0.0;
    for (size_t i = 0; i < step_times.size(); ++i)
        if (t >= step_times[i]) v = amplitudes[i];
    return v;
}

TestSignal custom_staircase(std::vector<double> times, std::vector<double> cumulative,
                            std::string tag) {
    if (times.empty() || times.size() != cumulative.size())
        throw invalid_parameter("staircase: need matching, non-empty times/amplitudes");
    if (times[0] != 0.0)
        throw invalid_parameter("staircase: step times must start at 0");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw invalid_parameter("staircase: step times must be strictly increasing");
    TestSignal s;
    s.step_times = std::move(times);
    s.amplitudes = std::move(cumulative);
    s.tag = std::move(tag);
    return s;
}

TestSignal staircase_gamma1(double h) {
    return custom_staircase({0, 200, 400, 600}, {h, 2 * h, 3 * h, 4 * h}, "Gamma1");
}

TestSignal staircase_gamma2(double h) {
    TestSignal s = staircase_gamma1(h / 2);
    s.tag = "Gamma2";
    return s;
}

// ----------------------------------------------------------------- metrics

const ChannelMetrics* Metrics::find(const std::string& name) const {
    for (const auto& c : channels)
        if (c.name == name) return &c;
    return nullptr;
}

bool decreasing_envelope(const std::vector<double>& t, const std::vector<double>& v,
                         int windows) {
    if (t.size() != v.size() || t.size() < 2 || windows < 2) return false;
    // deviations about the trailing mean
    const double t0 = t.front(), t1 = t.back();
    double ref = 0.0;
    int nref = 0;
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t1 - 0.05 * (t1 - t0)) {
            ref += v[i];
            ++nref;
        }
    ref /= std::max(nref, 1);
    std::vector<double> peak(windows, -1.0);
    for (size_t i = 0; i < t.size(); ++i) {
        int w = std::min(windows - 1,
                         static_cast<int>(std::floor((t[i] - t0) / (t1 - t0) * windows)));
        peak[w] = std::max(peak[w], std::abs(v[i] - ref));
    }
    double prev = -1.0;
    for (int w = 0; w < windows; ++w) {
        if (peak[w] < 0) continue;  // empty window
        if (prev >= 0 && peak[w] > prev * (1.0 + 1e-9) + 1e-15) return false;
        prev = peak[w];
    }
    return true;
}

Metrics compute_metrics(const Trajectory& tr, const std::map<std::string, double>& refs) {
    if (tr.t.size() < 2) throw invalid_parameter("metrics: trajectory too short");
    if (tr.requested_horizon > 0 &&
        tr.horizon() < 0.8 * tr.requested_horizon - 1e-12)
        throw invalid_parameter("metrics: trajectory covered " + format_g12(tr.horizon()) +
                                " s of a " + format_g12(tr.requested_horizon) +
                                " s horizon (< 80%)");
    Metrics m;
    auto add_group = [&](const std::vector<std::string>& names,
                         const std::vector<Vec>& data) {
        if (data.size() != tr.t.size()) return;
        for (size_t j = 0; j < names.size(); ++j) {
            std::vector<double> v(tr.t.size());
            for (size_t i = 0; i < tr.t.size(); ++i) v[i] = data[i](static_cast<int>(j));

            ChannelMetrics cm;
            cm.name = names[j];
            const double t0 = tr.t.front(), t1 = tr.t.back();
            double acc = 0.0;
            int n = 0;
            for (size_t i = 0; i < v.size(); ++i)
                if (tr.t[i] >= t1 - 0.05 * (t1 - t0)) {
                    acc += v[i];
                    ++n;
                }
            cm.final_value = acc / std::max(n, 1);

            const double band = 0.02 * std::max(std::abs(cm.final_value), 1e-9);
            ptrdiff_t last_out = -1;
            for (size_t i = 0; i < v.size(); ++i) {
                cm.peak_deviation =
                    std::max(cm.peak_deviation, std::abs(v[i] - cm.final_value));
                if (std::abs(v[i] - cm.final_value) > band)
                    last_out = static_cast<ptrdiff_t>(i);
            }
            if (last_out < 0) {
                cm.settled = true;
                cm.settling_time = tr.t.front();
            } else if (last_out + 1 < static_cast<ptrdiff_t>(v.size())) {
                cm.settled = true;
                cm.settling_time = tr.t[last_out + 1];
            }
            cm.decaying = decreasing_envelope(tr.t, v);
            if (auto it = refs.find(cm.name); it != refs.end()) {
                cm.has_reference = true;
                cm.reference = it->second;
                cm.ss_error = std::abs(cm.final_value - it->second);
            }
            m.channels.push_back(std::move(cm));
        }
    };
    add_group(tr.state_names, tr.x);
    add_group(tr.input_names, tr.u);
    add_group(tr.output_names, tr.y);
    return m;
}

std::string metrics_to_text(const Metrics& m) {
    std::ostringstream os;
    for (const auto& c : m.channels) {
        os << c.name << ".final = " << format_g12(c.final_value) << "\n";
        if (c.has_reference) {
            os << c.name << ".reference = " << format_g12(c.reference) << "\n";
            os << c.name << ".ss_error = " << format_g12(c.ss_error) << "\n";
        }
        os << c.name << ".settled = " << (c.settled ? 1 : 0) << "\n";
        if (c.settled)
            os << c.name << ".settling_time = " << format_g12(c.settling_time) << "\n";
        os << c.name << ".peak_dev = " << format_g12(c.peak_deviation) << "\n";
        os << c.name << ".decaying = " << (c.decaying ? 1 : 0) << "\n";
    }
    return os.str();
}

// ----------------------------------------------------- closed-loop builders

ClosedLoopSystem truth_open_loop(const TruthCoefficients& c, const FblCoefficients& fc,
                                 const Vec& x0, const TestSignal& sig, bool limits,
                                 double gv_max) {
    if (x0.size() != 9) throw invalid_parameter("truth_open_loop: x0 must have 9 states");
    const double e15 = fc.e15;
    ClosedLoopSystem sys;
    sys.nz = 9;
    sys.z0 = x0;
    sys.state_names = kTruthStateNames;
    sys.input_names = kTruthInputNames;
    sys.output_names = kOutputNames;
    auto input_at = [e15, sig](double t) {
        const double g = sig.value(t);
        return TruthInput{e15 * g, g};
    };
    sys.rhs = [c, limits, gv_max, input_at](double t, const Vec& z) {
        TruthState xs = TruthState::from_vec(z);
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        return truth_rhs(xs, input_at(t), c).vec();
    };
    if (limits)
        sys.clamp = [gv_max](Vec& z) { z(8) = clampd(z(8), 0.0, gv_max); };
    sys.inputs = [input_at](double t, const Vec&) { return input_at(t).vec(); };
    sys.outputs = [c, limits, gv_max, input_at](double t, const Vec& z) {
        TruthState xs = TruthState::from_vec(z);
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        TruthOutput y = truth_output(xs, input_at(t), c);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

ClosedLoopSystem reduced_open_loop(const ReducedCoefficients& rc, const Vec& x0,
                                   const TestSignal& sig, bool limits, double gv_max) {
    if (x0.size() != 5)
        throw invalid_parameter("reduced_open_loop: x0 must have 5 states");
    ClosedLoopSystem sys;
    sys.nz = 5;
    sys.z0 = x0;
    sys.state_names = kReducedStateNames;
    sys.input_names = kReducedInputNames;
    sys.output_names = kOutputNames;
    sys.rhs = [rc, limits, gv_max, sig](double t, const Vec& z) {
        ReducedState xs = ReducedState::from_vec(z);
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        const double g = sig.value(t);
        return reduced_rhs(xs, ReducedInput{g, g}, rc).vec();
    };
    if (limits)
        sys.clamp = [gv_max](Vec& z) { z(4) = clampd(z(4), 0.0, gv_max); };
    sys.inputs = [sig](double t, const Vec&) {
        const double g = sig.value(t);
        return (Vec(2) << g, g).finished();
    };
    sys.outputs = [rc](double, const Vec& z) {
        ReducedOutput y = reduced_output(ReducedState::from_vec(z), rc);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

ClosedLoopSystem truth_constant_input(const TruthCoefficients& c, const Vec& x0,
                                      const Vec& u0) {
    if (x0.size() != 9 || u0.size() != 2)
        throw invalid_parameter("truth_constant_input: expect 9 states, 2 inputs");
    ClosedLoopSystem sys;
    sys.nz = 9;
    sys.z0 = x0;
    sys.state_names = kTruthStateNames;
    sys.input_names = kTruthInputNames;
    sys.output_names = kOutputNames;
    const TruthInput u = TruthInput::from_vec(u0);
    sys.rhs = [c, u](double, const Vec& z) {
        return truth_rhs(TruthState::from_vec(z), u, c).vec();
    };
    sys.inputs = [u](double, const Vec&) { return u.vec(); };
    sys.outputs = [c, u](double, const Vec& z) {
        TruthOutput y = truth_output(TruthState::from_vec(z), u, c);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

ClosedLoopSystem reduced_constant_input(const ReducedCoefficients& rc, const Vec& x0,
                                        const Vec& u0) {
    if (x0.size() != 5 || u0.size() != 2)
        throw invalid_parameter("reduced_constant_input: expect 5 states, 2 inputs");
    ClosedLoopSystem sys;
    sys.nz = 5;
    sys.z0 = x0;
    sys.state_names = kReducedStateNames;
    sys.input_names = kReducedInputNames;
    sys.output_names = kOutputNames;
    const ReducedInput u = ReducedInput::from_vec(u0);
    sys.rhs = [rc, u](double, const Vec& z) {
        return reduced_rhs(ReducedState::from_vec(z), u, rc).vec();
    };
    sys.inputs = [u](double, const Vec&) { return u.vec(); };
    sys.outputs = [rc](double, const Vec& z) {
        ReducedOutput y = reduced_output(ReducedState::from_vec(z), rc);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

// shared two-loop PID command computation; the V_t error on the truth plant
// deliberately drops the V_F feedthrough term (evaluated at u = 0) so the
// command law stays explicit
namespace {

struct PidCommands {
    double EFD = 0, uT = 0;       // absolute actuator commands
    double e_l = 0, e_a = 0;      // loop errors, for the controller rates
    double Df_l = 0, Df_a = 0;    // filter states, for the controller rates
};

PidCommands pid_commands(const PidGains& lfc, const PidGains& avr, const Vec& z,
                         int nplant, double omega, double vt, const Vec& u0_cmd,
                         double vt_ref, bool limits) {
    PidCommands pc;
    const double Ii_l = z(nplant), Df_l = z(nplant + 1);
    const double Ii_a = z(nplant + 2), Df_a = z(nplant + 3);
    pc.e_l = 1.0 - omega;
    pc.e_a = vt_ref - vt;
    pc.Df_l = Df_l;
    pc.Df_a = Df_a;
    pc.uT = u0_cmd(1) + lfc.Kp * pc.e_l + Ii_l + lfc.Kd * kPidN * (pc.e_l - Df_l);
    pc.EFD = u0_cmd(0) + avr.Kp * pc.e_a + Ii_a + avr.Kd * kPidN * (pc.e_a - Df_a);
    if (limits) pc.EFD = clampd(pc.EFD, -5.0, 5.0);
    return pc;
}

Vec pid_rates(const PidGains& lfc, const PidGains& avr, const PidCommands& pc) {
    return (Vec(4) << lfc.Ki * pc.e_l, kPidN * (pc.e_l - pc.Df_l), avr.Ki * pc.e_a,
            kPidN * (pc.e_a - pc.Df_a))
        .finished();
}

}  // namespace

ClosedLoopSystem pid_truth_loop(const TruthCoefficients& c, const FblCoefficients& fc,
                                const PidGains& lfc, const PidGains& avr, const Vec& x0,
                                const Vec& u0_cmd, double vt_ref, bool limits,
                                double gv_max) {
    if (x0.size() != 9 || u0_cmd.size() != 2)
        throw invalid_parameter("pid_truth_loop: expect 9 states, u0_cmd = [E_FD0, u_T0]");
    const double e15 = fc.e15;
    ClosedLoopSystem sys;
    sys.nz = 13;
    sys.z0 = Vec::Zero(13);
    sys.z0.head(9) = x0;
    sys.state_names = cat_names(kTruthStateNames, kPidStateNames);
    sys.input_names = kTruthInputNames;
    sys.output_names = kOutputNames;

    auto commands = [c, lfc, avr, u0_cmd, vt_ref, limits](const Vec& z) {
        const TruthState xs = TruthState::from_vec(Vec(z.head(9)));
        // feedthrough-free V_t for the error path
        const TruthOutput y0 = truth_output(xs, TruthInput{0.0, 0.0}, c);
        return pid_commands(lfc, avr, z, 9, xs.omega, y0.V_t, u0_cmd, vt_ref, limits);
    };
    sys.rhs = [c, e15, lfc, avr, limits, gv_max, commands](double, const Vec& z) {
        const PidCommands pc = commands(z);
        TruthState xs = TruthState::from_vec(Vec(z.head(9)));
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        Vec dz(13);
        dz.head(9) = truth_rhs(xs, TruthInput{e15 * pc.EFD, pc.uT}, c).vec();
        dz.tail(4) = pid_rates(lfc, avr, pc);
        return dz;
    };
    sys.inputs = [e15, commands](double, const Vec& z) {
        const PidCommands pc = commands(z);
        return (Vec(2) << e15 * pc.EFD, pc.uT).finished();
    };
    sys.outputs = [c, e15, limits, gv_max, commands](double, const Vec& z) {
        const PidCommands pc = commands(z);
        TruthState xs = TruthState::from_vec(Vec(z.head(9)));
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        const TruthOutput y = truth_output(xs, TruthInput{e15 * pc.EFD, pc.uT}, c);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

ClosedLoopSystem pid_reduced_loop(const ReducedCoefficients& rc, const PidGains& lfc,
                                  const PidGains& avr, const Vec& x0, const Vec& u0,
                                  double vt_ref, bool limits, double gv_max) {
    if (x0.size() != 5 || u0.size() != 2)
        throw invalid_parameter("pid_reduced_loop: expect 5 states, u0 = [E_FD0, u_T0]");
    ClosedLoopSystem sys;
    sys.nz = 9;
    sys.z0 = Vec::Zero(9);
    sys.z0.head(5) = x0;
    sys.state_names = cat_names(kReducedStateNames, kPidStateNames);
    sys.input_names = kReducedInputNames;
    sys.output_names = kOutputNames;

    auto commands = [rc, lfc, avr, u0, vt_ref, limits](const Vec& z) {
        const ReducedState xs = ReducedState::from_vec(Vec(z.head(5)));
        const ReducedOutput y = reduced_output(xs, rc);
        return pid_commands(lfc, avr, z, 5, xs.omega, y.V_t, u0, vt_ref, limits);
    };
    sys.rhs = [rc, lfc, avr, limits, gv_max, commands](double, const Vec& z) {
        const PidCommands pc = commands(z);
        ReducedState xs = ReducedState::from_vec(Vec(z.head(5)));
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        Vec dz(9);
        dz.head(5) = reduced_rhs(xs, ReducedInput{pc.EFD, pc.uT}, rc).vec();
        dz.tail(4) = pid_rates(lfc, avr, pc);
        return dz;
    };
    sys.inputs = [commands](double, const Vec& z) {
        const PidCommands pc = commands(z);
        return (Vec(2) << pc.EFD, pc.uT).finished();
    };
    sys.outputs = [rc](double, const Vec& z) {
        const ReducedOutput y = reduced_output(ReducedState::from_vec(Vec(z.head(5))), rc);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

ClosedLoopSystem pid_linear_loop(const StateSpaceModel& lin, const PidGains& lfc,
                                 const PidGains& avr, const Vec& dx0) {
    const int n = static_cast<int>(lin.A.rows());
    if (lin.D.size() && lin.D.cwiseAbs().maxCoeff() > 0)
        throw invalid_parameter("pid_linear_loop: needs a feedthrough-free model");
    if (dx0.size() != n) throw invalid_parameter("pid_linear_loop: dx0 size mismatch");
    ClosedLoopSystem sys;
    sys.nz = n + 4;
    sys.z0 = Vec::Zero(n + 4);
    sys.z0.head(n) = dx0;
    sys.state_names = cat_names(
        lin.state_names.empty() ? default_names("x", n) : lin.state_names, kPidStateNames);
    sys.input_names = {"dE_FD", "du_T"};
    sys.output_names = {"dV_t", "domega"};

    const Mat A = lin.A, B = lin.B, C = lin.C;
    const Vec u0_cmd = Vec::Zero(2);  // deviations regulate to zero
    auto commands = [A, C, lfc, avr, n, u0_cmd](const Vec& z) {
        const Vec y = C * z.head(z.size() - 4);
        // channel order [dV_t, domega]; both references are zero
        return pid_commands(lfc, avr, z, n, 1.0 + y(1), y(0), u0_cmd, 0.0, false);
    };
    sys.rhs = [A, B, lfc, avr, n, commands](double, const Vec& z) {
        const PidCommands pc = commands(z);
        Vec dz(n + 4);
        dz.head(n) = A * z.head(n) + B * (Vec(2) << pc.EFD, pc.uT).finished();
        dz.tail(4) = pid_rates(lfc, avr, pc);
        return dz;
    };
    sys.inputs = [commands](double, const Vec& z) {
        const PidCommands pc = commands(z);
        return (Vec(2) << pc.EFD, pc.uT).finished();
    };
    sys.outputs = [C, n](double, const Vec& z) { return Vec(C * z.head(n)); };
    return sys;
}

// controllable-canonical realization; splits off the feedthrough when the
// transfer function is proper-but-not-strict
namespace {

void tf_to_ss(const TransferFunction& g, Mat& A, Mat& B, Mat& C, double& D) {
    TransferFunction f = g;
    f.normalize();
    const int n = static_cast<int>(f.den.size()) - 1;
    if (static_cast<int>(f.num.size()) > n + 1)
        throw invalid_parameter("tf_to_ss: transfer function is improper");
    std::vector<double> num = f.num;
    D = 0.0;
    if (static_cast<int>(num.size()) == n + 1) {
        D = num[0];
        for (int i = 0; i <= n; ++i) num[i] -= D * f.den[i];  // long-division remainder
        num.erase(num.begin());
    }
    while (static_cast<int>(num.size()) < n) num.insert(num.begin(), 0.0);
    A = Mat::Zero(n, n);
    B = Mat::Zero(n, 1);
    C = Mat::Zero(1, n);
    if (n == 0) return;
    for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
    for (int j = 0; j < n; ++j) A(n - 1, j) = -f.den[n - j];
    B(n - 1, 0) = 1.0;
    for (int j = 0; j < n; ++j) C(0, j) = num[n - 1 - j];
}

}  // namespace

ClosedLoopSystem pid_siso_loop(const TransferFunction& plant, const TransferFunction& fb,
                               const PidGains& g) {
    Mat Ag, Bg, Cg, Ah, Bh, Ch;
    double Dg = 0, Dh = 0;
    tf_to_ss(plant, Ag, Bg, Cg, Dg);
    tf_to_ss(fb, Ah, Bh, Ch, Dh);
    if (Dg != 0.0)
        throw invalid_parameter("pid_siso_loop: plant must be strictly proper");
    const PidController pc = pid_controller(g, kPidN);
    const int ng = static_cast<int>(Ag.rows());
    const int nh = static_cast<int>(Ah.rows());
    const int nz = ng + 2 + nh;

    ClosedLoopSystem sys;
    sys.nz = nz;
    sys.z0 = Vec::Zero(sys.nz);
    sys.state_names = default_names("xg", ng);
    sys.state_names.push_back("I_pid");
    sys.state_names.push_back("D_pid");
    for (const auto& n : default_names("xh", nh)) sys.state_names.push_back(n);
    sys.input_names = {"u"};
    sys.output_names = {"y", "e"};

    // unit step reference at t = 0; e = r - (Ch xh + Dh y)
    auto signals = [=](const Vec& z) {
        const double y = (Cg * z.head(ng))(0);
        double w = Dh * y;
        if (nh) w += (Ch * z.tail(nh))(0);
        const double e = 1.0 - w;
        const double u = (pc.C * z.segment(ng, 2))(0) + pc.D(0, 0) * e;
        return std::array<double, 3>{y, e, u};
    };
    sys.rhs = [=](double, const Vec& z) {
        const auto [y, e, u] = signals(z);
        Vec dz(nz);
        dz.head(ng) = Ag * z.head(ng) + Bg * u;
        dz.segment(ng, 2) = pc.A * z.segment(ng, 2) + pc.B * e;
        if (nh) dz.tail(nh) = Ah * z.tail(nh) + Bh * y;
        return dz;
    };
    sys.inputs = [=](double, const Vec& z) {
        return (Vec(1) << signals(z)[2]).finished();
    };
    sys.outputs = [=](double, const Vec& z) {
        const auto [y, e, u] = signals(z);
        (void)u;
        return (Vec(2) << y, e).finished();
    };
    return sys;
}

ClosedLoopSystem state_feedback_truth(const TruthCoefficients& c,
                                      const FblCoefficients& fc, const Mat& K,
                                      const Vec& x_ref, const Vec& u_ref, const Vec& x0,
                                      EqReconstruction rec, bool limits, double gv_max) {
    if (K.rows() != 2 || K.cols() != 5)
        throw invalid_parameter("state_feedback_truth: K must be 2x5");
    if (x_ref.size() != 5 || u_ref.size() != 2 || x0.size() != 9)
        throw invalid_parameter("state_feedback_truth: bad reference/state sizes");
    const double e15 = fc.e15;
    ClosedLoopSystem sys;
    sys.nz = 9;
    sys.z0 = x0;
    sys.state_names = kTruthStateNames;
    sys.input_names = kTruthInputNames;
    sys.output_names = kOutputNames;

    auto command = [c, fc, K, x_ref, u_ref, rec, limits](const Vec& z) {
        const TruthState xs = TruthState::from_vec(z);
        const Vec xr = truth_reduced_state(xs, fc, rec).vec();
        const Vec du = -K * (xr - x_ref);
        double EFD = u_ref(0) + du(0);
        if (limits) EFD = clampd(EFD, -5.0, 5.0);
        return std::pair<double, double>{EFD, u_ref(1) + du(1)};
    };
    sys.rhs = [c, e15, limits, gv_max, command](double, const Vec& z) {
        const auto [EFD, uT] = command(z);
        TruthState xs = TruthState::from_vec(z);
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        return truth_rhs(xs, TruthInput{e15 * EFD, uT}, c).vec();
    };
    if (limits)
        sys.clamp = [gv_max](Vec& z) { z(8) = clampd(z(8), 0.0, gv_max); };
    sys.inputs = [e15, command](double, const Vec& z) {
        const auto [EFD, uT] = command(z);
        return (Vec(2) << e15 * EFD, uT).finished();
    };
    sys.outputs = [c, e15, command](double, const Vec& z) {
        const auto [EFD, uT] = command(z);
        const TruthOutput y =
            truth_output(TruthState::from_vec(z), TruthInput{e15 * EFD, uT}, c);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

ClosedLoopSystem state_feedback_reduced(const ReducedCoefficients& rc, const Mat& K,
                                        const Vec& x_ref, const Vec& u_ref, const Vec& x0,
                                        bool limits, double gv_max) {
    if (K.rows() != 2 || K.cols() != 5)
        throw invalid_parameter("state_feedback_reduced: K must be 2x5");
    if (x_ref.size() != 5 || u_ref.size() != 2 || x0.size() != 5)
        throw invalid_parameter("state_feedback_reduced: bad reference/state sizes");
    ClosedLoopSystem sys;
    sys.nz = 5;
    sys.z0 = x0;
    sys.state_names = kReducedStateNames;
    sys.input_names = kReducedInputNames;
    sys.output_names = kOutputNames;

    auto command = [K, x_ref, u_ref, limits](const Vec& z) {
        const Vec du = -K * (z - x_ref);
        double EFD = u_ref(0) + du(0);
        if (limits) EFD = clampd(EFD, -5.0, 5.0);
        return std::pair<double, double>{EFD, u_ref(1) + du(1)};
    };
    sys.rhs = [rc, limits, gv_max, command](double, const Vec& z) {
        const auto [EFD, uT] = command(z);
        ReducedState xs = ReducedState::from_vec(z);
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        return reduced_rhs(xs, ReducedInput{EFD, uT}, rc).vec();
    };
    if (limits)
        sys.clamp = [gv_max](Vec& z) { z(4) = clampd(z(4), 0.0, gv_max); };
    sys.inputs = [command](double, const Vec& z) {
        const auto [EFD, uT] = command(z);
        return (Vec(2) << EFD, uT).finished();
    };
    sys.outputs = [rc](double, const Vec& z) {
        const ReducedOutput y = reduced_output(ReducedState::from_vec(z), rc);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

ClosedLoopSystem state_feedback_linear(const StateSpaceModel& lin, const Mat& K,
                                       const Vec& dx0) {
    const int n = static_cast<int>(lin.A.rows());
    if (K.cols() != n || dx0.size() != n)
        throw invalid_parameter("state_feedback_linear: size mismatch");
    ClosedLoopSystem sys;
    sys.nz = n;
    sys.z0 = dx0;
    sys.state_names = lin.state_names.empty() ? default_names("x", n) : lin.state_names;
    sys.input_names = {"dE_FD", "du_T"};
    sys.output_names = {"dV_t", "domega"};
    const Mat Acl = lin.A - lin.B * K;
    const Mat C = lin.C, D = lin.D, Kc = K;
    sys.rhs = [Acl](double, const Vec& z) { return Vec(Acl * z); };
    sys.inputs = [Kc](double, const Vec& z) { return Vec(-Kc * z); };
    sys.outputs = [C, D, Kc](double, const Vec& z) {
        Vec y = C * z;
        if (D.size()) y += D * (-Kc * z);
        return y;
    };
    return sys;
}

ClosedLoopSystem observer_linear_loop(const StateSpaceModel& lin, const Mat& K,
                                      const Mat& L, const Vec& dx0, const Vec& dxhat0) {
    const int n = static_cast<int>(lin.A.rows());
    const int p = static_cast<int>(lin.C.rows());
    if (K.cols() != n || L.rows() != n || L.cols() != p)
        throw invalid_parameter("observer_linear_loop: gain sizes mismatch");
    if (dx0.size() != n || dxhat0.size() != n)
        throw invalid_parameter("observer_linear_loop: state sizes mismatch");
    ClosedLoopSystem sys;
    sys.nz = 2 * n;
    sys.z0 = Vec::Zero(2 * n);
    sys.z0.head(n) = dx0;
    sys.z0.tail(n) = dxhat0;
    const auto base = lin.state_names.empty() ? default_names("x", n) : lin.state_names;
    sys.state_names = cat_names(base, hat_names(base));
    sys.input_names = {"dE_FD", "du_T"};
    sys.output_names = {"dV_t", "domega", "est_err"};
    const Mat A = lin.A, B = lin.B, C = lin.C, Kc = K, Lc = L;
    sys.rhs = [A, B, C, Kc, Lc, n](double, const Vec& z) {
        const Vec x = z.head(n), xh = z.tail(n);
        const Vec du = -Kc * xh;
        Vec dz(2 * n);
        dz.head(n) = A * x + B * du;
        // feedthrough cancels in the innovation: y - yhat = C (x - xhat)
        dz.tail(n) = A * xh + B * du + Lc * (C * (x - xh));
        return dz;
    };
    sys.inputs = [Kc, n](double, const Vec& z) { return Vec(-Kc * z.tail(n)); };
    sys.outputs = [C, n](double, const Vec& z) {
        const Vec y = C * z.head(n);
        Vec out(y.size() + 1);
        out.head(y.size()) = y;
        out(y.size()) = (z.head(n) - z.tail(n)).norm();
        return out;
    };
    return sys;
}

ClosedLoopSystem ltr_truth_loop(const TruthCoefficients& c, const FblCoefficients& fc,
                                const StateSpaceModel& lin, const Mat& K, const Mat& H,
                                const Vec& u_ref, double vt_ref, const Vec& x0,
                                bool limits, double gv_max) {
    if (K.rows() != 2 || K.cols() != 5 || H.rows() != 5 || H.cols() != 2)
        throw invalid_parameter("ltr_truth_loop: K must be 2x5 and H 5x2");
    if (u_ref.size() != 2 || x0.size() != 9)
        throw invalid_parameter("ltr_truth_loop: bad reference/state sizes");
    const double e15 = fc.e15;
    ClosedLoopSystem sys;
    sys.nz = 14;
    sys.z0 = Vec::Zero(14);
    sys.z0.head(9) = x0;  // estimator starts at zero deviation
    sys.state_names = cat_names(kTruthStateNames, hat_names(kReducedStateNames));
    sys.input_names = kTruthInputNames;
    sys.output_names = kOutputNames;

    const Mat Ar = lin.A, Br = lin.B, Cr = lin.C, Kc = K, Hc = H;
    sys.rhs = [c, e15, Ar, Br, Cr, Hc, Kc, u_ref, vt_ref, limits, gv_max](double,
                                                                          const Vec& z) {
        const Vec xh = z.tail(5);
        const Vec du = -Kc * xh;
        double EFD = u_ref(0) + du(0);
        if (limits) EFD = clampd(EFD, -5.0, 5.0);
        const double uT = u_ref(1) + du(1);
        TruthState xs = TruthState::from_vec(Vec(z.head(9)));
        const TruthInput u{e15 * EFD, uT};
        const TruthOutput y = truth_output(xs, u, c);
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        Vec dy(2);
        dy << y.V_t - vt_ref, y.omega - 1.0;
        Vec dz(14);
        dz.head(9) = truth_rhs(xs, u, c).vec();
        dz.tail(5) = Ar * xh + Br * du + Hc * (dy - Cr * xh);
        return dz;
    };
    if (limits)
        sys.clamp = [gv_max](Vec& z) { z(8) = clampd(z(8), 0.0, gv_max); };
    sys.inputs = [e15, Kc, u_ref, limits](double, const Vec& z) {
        const Vec du = -Kc * z.tail(5);
        double EFD = u_ref(0) + du(0);
        if (limits) EFD = clampd(EFD, -5.0, 5.0);
        return (Vec(2) << e15 * EFD, u_ref(1) + du(1)).finished();
    };
    sys.outputs = [c, e15, Kc, u_ref, limits](double, const Vec& z) {
        const Vec du = -Kc * z.tail(5);
        double EFD = u_ref(0) + du(0);
        if (limits) EFD = clampd(EFD, -5.0, 5.0);
        const TruthOutput y = truth_output(TruthState::from_vec(Vec(z.head(9))),
                                           TruthInput{e15 * EFD, u_ref(1) + du(1)}, c);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

ClosedLoopSystem fbl_reduced_loop(const FblCoefficients& fc, const Mat& K,
                                  const FblSetpoint& sp, const Vec& x0, bool limits,
                                  double gv_max) {
    if (x0.size() != 5) throw invalid_parameter("fbl_reduced_loop: x0 must have 5 states");
    ClosedLoopSystem sys;
    sys.nz = 5;
    sys.z0 = x0;
    sys.state_names = kReducedStateNames;
    sys.input_names = kReducedInputNames;
    sys.output_names = kOutputNames;

    auto command = [fc, K, sp, limits](const Vec& z) {
        const ReducedState xs = ReducedState::from_vec(z);
        FblCommand cmd = fbl_control(xs, sp, K, fc);
        if (limits) cmd.u.E_FD = clampd(cmd.u.E_FD, -5.0, 5.0);
        return cmd;
    };
    sys.rhs = [fc, limits, gv_max, command](double, const Vec& z) {
        const FblCommand cmd = command(z);
        ReducedState xs = ReducedState::from_vec(z);
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        return reduced_rhs(xs, cmd.u, fc.rc).vec();
    };
    if (limits)
        sys.clamp = [gv_max](Vec& z) { z(4) = clampd(z(4), 0.0, gv_max); };
    sys.inputs = [command](double, const Vec& z) { return command(z).u.vec(); };
    sys.outputs = [fc](double, const Vec& z) {
        const ReducedOutput y = reduced_output(ReducedState::from_vec(z), fc.rc);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

ClosedLoopSystem fbl_truth_loop(const TruthCoefficients& c, const FblCoefficients& fc,
                                const Mat& K, const FblSetpoint& sp, const Vec& x0,
                                EqReconstruction rec, bool limits, double gv_max) {
    if (x0.size() != 9) throw invalid_parameter("fbl_truth_loop: x0 must have 9 states");
    const double e15 = fc.e15;
    ClosedLoopSystem sys;
    sys.nz = 9;
    sys.z0 = x0;
    sys.state_names = kTruthStateNames;
    sys.input_names = kTruthInputNames;
    sys.output_names = kOutputNames;

    auto command = [c, fc, K, sp, rec, limits](const Vec& z) {
        const TruthState xt = TruthState::from_vec(z);
        const ReducedState xr = truth_reduced_state(xt, fc, rec);
        FblCommand cmd = fbl_control(xr, sp, K, fc);
        if (limits) cmd.u.E_FD = clampd(cmd.u.E_FD, -5.0, 5.0);
        return cmd;
    };
    sys.rhs = [c, e15, limits, gv_max, command](double, const Vec& z) {
        const FblCommand cmd = command(z);
        TruthState xs = TruthState::from_vec(z);
        if (limits) xs.G_V = clampd(xs.G_V, 0.0, gv_max);
        return truth_rhs(xs, TruthInput{e15 * cmd.u.E_FD, cmd.u.u_T}, c).vec();
    };
    if (limits)
        sys.clamp = [gv_max](Vec& z) { z(8) = clampd(z(8), 0.0, gv_max); };
    sys.inputs = [e15, command](double, const Vec& z) {
        const FblCommand cmd = command(z);
        return (Vec(2) << e15 * cmd.u.E_FD, cmd.u.u_T).finished();
    };
    sys.outputs = [c, e15, command](double, const Vec& z) {
        const FblCommand cmd = command(z);
        const TruthOutput y = truth_output(TruthState::from_vec(z),
                                           TruthInput{e15 * cmd.u.E_FD, cmd.u.u_T}, c);
        return (Vec(2) << y.V_t, y.omega).finished();
    };
    return sys;
}

ClosedLoopSystem linear_system(const Mat& A, const Mat& B, const Mat& C, const Mat& D,
                               const Vec& x0, std::function<Vec(double)> u_of_t,
                               std::vector<std::string> state_names,
                               std::vector<std::string> input_names,
                               std::vector<std::string> output_names) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || B.rows() != n || C.cols() != n || x0.size() != n)
        throw invalid_parameter("linear_system: dimension mismatch");
    Mat Dm = D;
    if (Dm.size() == 0) Dm = Mat::Zero(C.rows(), B.cols());
    ClosedLoopSystem sys;
    sys.nz = n;
    sys.z0 = x0;
    sys.state_names = state_names.empty() ? default_names("x", n) : std::move(state_names);
    sys.input_names = input_names.empty() ? default_names("u", static_cast<int>(B.cols()))
                                          : std::move(input_names);
    sys.output_names = output_names.empty()
                           ? default_names("y", static_cast<int>(C.rows()))
                           : std::move(output_names);
    sys.rhs = [A, B, u_of_t](double t, const Vec& z) { return Vec(A * z + B * u_of_t(t)); };
    sys.inputs = [u_of_t](double t, const Vec&) { return u_of_t(t); };
    sys.outputs = [C, Dm, u_of_t](double t, const Vec& z) {
        return Vec(C * z + Dm * u_of_t(t));
    };
    return sys;
}

}  // namespace smib
