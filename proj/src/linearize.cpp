#include "smib/linearize.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "smib/csvplot.h"
#include "smib/errors.h"

namespace smib {

namespace {

// damped Newton on f(z) = 0 with a central-difference Jacobian.
// Backtracks by halving when the step does not reduce the residual norm.
Vec damped_newton(const std::function<Vec(const Vec&)>& f, Vec z,
                  const char* what) {
    for (int it = 0; it < 200; ++it) {
        const Vec f0 = f(z);
        if (f0.lpNorm<Eigen::Infinity>() < 1e-13) return z;
        const int n = static_cast<int>(z.size());
        Mat J(f0.size(), n);
        for (int j = 0; j < n; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(z(j)));
            Vec zp = z, zm = z;
            zp(j) += h; zm(j) -= h;
            J.col(j) = (f(zp) - f(zm)) / (2.0 * h);
        }
        const Vec step = J.fullPivLu().solve(-f0);
        const double base = f0.norm();
        double lam = 1.0;
        for (int bt = 0; bt < 30; ++bt) {
            if (f(z + lam * step).norm() < base) break;
            lam *= 0.5;
        }
        z += lam * step;
    }
    const double res = f(z).lpNorm<Eigen::Infinity>();
    if (res > 1e-9) {
        std::ostringstream os;
        os << what << ": Newton did not converge, residual " << res;
        throw numerical_failure(os.str());
    }
    return z;
}

} // namespace

Equilibrium find_equilibrium_truth(double delta0, double Tm0,
                                   const TruthCoefficients& c) {
    if (!(delta0 > 0 && delta0 < M_PI) || !std::isfinite(Tm0))
        throw invalid_parameter("equilibrium anchors need delta0 in (0,pi)");
    // unknowns: the five currents, G_V, and both inputs; omega=1, delta,
    // T_m are pinned, so rows 1-6, 8, 9 of the rhs must vanish (row 7 is
    // delta_dot = omega-1 = 0 by construction)
    auto residual = [&](const Vec& z) {
        TruthState x;
        x.I_d = z(0); x.I_F = z(1); x.I_D = z(2); x.I_q = z(3); x.I_Q = z(4);
        x.omega = 1.0; x.delta = delta0; x.T_m = Tm0; x.G_V = z(5);
        const TruthInput u{z(6), z(7)};
        const Vec f = truth_rhs(x, u, c).vec();
        Vec r(8);
        r << f(0), f(1), f(2), f(3), f(4), f(5), f(7), f(8);
        return r;
    };
    Vec z(8);
    z << -0.9, 1.6, 0.0, 0.4, 0.0, Tm0, 0.001, 1.0;
    z = damped_newton(residual, z, "truth equilibrium");

    Equilibrium eq;
    TruthState x;
    x.I_d = z(0); x.I_F = z(1); x.I_D = z(2); x.I_q = z(3); x.I_Q = z(4);
    x.omega = 1.0; x.delta = delta0; x.T_m = Tm0; x.G_V = z(5);
    eq.x0 = x.vec();
    eq.u0 = Vec(2);
    eq.u0 << z(6), z(7);
    eq.residual = residual(z).lpNorm<Eigen::Infinity>();
    eq.delta_0 = delta0;
    eq.T_m0 = Tm0;
    return eq;
}

Equilibrium find_equilibrium_reduced(double delta0, double Tm0,
                                     const ReducedCoefficients& c) {
    if (!(delta0 > 0 && delta0 < M_PI) || !std::isfinite(Tm0))
        throw invalid_parameter("equilibrium anchors need delta0 in (0,pi)");
    const double s = std::sin(delta0 - c.alpha);
    const double co = std::cos(delta0 - c.alpha);

    // the swing row at omega=1 is a quadratic in E'_q:
    //   f21 Eq^2 + (f22 c + f23 s) Eq + (f24 s c + f25 c^2 + f26 s^2 + f27 + f28 Tm) = 0
    const double a = c.f21;
    const double b = c.f22 * co + c.f23 * s;
    const double g = c.f24 * s * co + c.f25 * co * co + c.f26 * s * s
                   + c.f27 + c.f28 * Tm0;
    const double disc = b * b - 4.0 * a * g;
    if (disc < 0)
        throw invalid_parameter("anchors admit no reduced equilibrium "
                                "(complex E'_q roots)");
    double Eq0;
    if (std::abs(a) < 1e-14) {
        Eq0 = -g / b;
    } else {
        const double r1 = (-b + std::sqrt(disc)) / (2.0 * a);
        const double r2 = (-b - std::sqrt(disc)) / (2.0 * a);
        // physical branch: the root continuing -g/b as the tiny quadratic
        // term vanishes (the other root is an order-30 artifact)
        const double lin = -g / b;
        Eq0 = (std::abs(r1 - lin) < std::abs(r2 - lin)) ? r1 : r2;
    }
    const double GV0 = Tm0 * (-c.f41 / c.f42);            // turbine row
    const double EFD0 = -(c.f11 * Eq0 + c.f12 * co + c.f13 * s) / c.g11;
    const double uT0 = -(c.f51 + c.f52 * GV0) / c.g55;    // governor row

    // Newton polish over [E'_q, G_V, E_FD, u_T]
    auto residual = [&](const Vec& z) {
        ReducedState x;
        x.E_q_prime = z(0); x.omega = 1.0; x.delta = delta0;
        x.T_m = Tm0; x.G_V = z(1);
        const ReducedInput u{z(2), z(3)};
        const Vec f = reduced_rhs(x, u, c).vec();
        Vec r(4);
        r << f(0), f(1), f(3), f(4);
        return r;
    };
    Vec z(4);
    z << Eq0, GV0, EFD0, uT0;
    z = damped_newton(residual, z, "reduced equilibrium");

    Equilibrium eq;
    ReducedState x;
    x.E_q_prime = z(0); x.omega = 1.0; x.delta = delta0;
    x.T_m = Tm0; x.G_V = z(1);
    eq.x0 = x.vec();
    eq.u0 = Vec(2);
    eq.u0 << z(2), z(3);
    eq.residual = residual(z).lpNorm<Eigen::Infinity>();
    eq.delta_0 = delta0;
    eq.T_m0 = Tm0;
    return eq;
}

StateSpaceModel linearize_reduced(const Equilibrium& eq,
                                  const ReducedCoefficients& c) {
    if (eq.residual > 1e-6)
        throw invalid_parameter("linearize_reduced wants a solved equilibrium");
    const ReducedState x0 = ReducedState::from_vec(eq.x0);
    const double s = std::sin(x0.delta - c.alpha);
    const double co = std::cos(x0.delta - c.alpha);
    const double Eq0 = x0.E_q_prime;

    StateSpaceModel m;
    m.A = Mat::Zero(5, 5);
    m.A(0, 0) = c.f11;
    m.A(0, 2) = -c.f12 * s + c.f13 * co;
    m.A(1, 0) = 2.0 * c.f21 * Eq0 + c.f22 * co + c.f23 * s;
    m.A(1, 1) = c.f27;
    m.A(1, 2) = -c.f22 * Eq0 * s + c.f23 * Eq0 * co
              + c.f24 * (co * co - s * s) - 2.0 * c.f25 * co * s
              + 2.0 * c.f26 * s * co;
    m.A(1, 3) = c.f28;
    m.A(2, 1) = 1.0;
    m.A(3, 3) = c.f41;
    m.A(3, 4) = c.f42;
    m.A(4, 1) = c.f51;
    m.A(4, 4) = c.f52;

    m.B = Mat::Zero(5, 2);
    m.B(0, 0) = c.g11;
    m.B(4, 1) = c.g55;

    const ReducedOutput y0 = reduced_output(x0, c);
    if (y0.V_t <= 0)
        throw invalid_parameter("V_t0 = 0: terminal-voltage sensitivities undefined");
    // chain rule through V_t = sqrt(V_d^2 + V_q^2)
    const double T1 = (y0.V_d / y0.V_t) * c.Vd1
                    + (y0.V_q / y0.V_t) * (c.Vq1 + 1.0);
    const double T2 = (y0.V_d / y0.V_t) * (-c.Vd2 * s + c.Vd3 * co)
                    + (y0.V_q / y0.V_t) * (-c.Vq2 * s + c.Vq3 * co);
    m.C = Mat::Zero(2, 5);
    m.C(0, 0) = T1;
    m.C(0, 2) = T2;
    m.C(1, 1) = 1.0;
    m.D = Mat::Zero(2, 2);

    m.x0 = eq.x0;
    m.u0 = eq.u0;
    m.state_names = {"E_q_prime", "omega", "delta", "T_m", "G_V"};
    m.input_names = {"E_FD", "u_T"};
    m.output_names = {"V_t", "omega"};
    return m;
}

StateSpaceModel linearize_truth(const Equilibrium& eq,
                                const TruthCoefficients& c) {
    if (eq.residual > 1e-6)
        throw invalid_parameter("linearize_truth wants a solved equilibrium");
    const Vec& x0 = eq.x0;
    const Vec& u0 = eq.u0;

    auto fx = [&](const Vec& x) {
        return truth_rhs(TruthState::from_vec(x), TruthInput::from_vec(u0), c).vec();
    };
    auto fu = [&](const Vec& u) {
        return truth_rhs(TruthState::from_vec(x0), TruthInput::from_vec(u), c).vec();
    };
    auto hx = [&](const Vec& x) {
        const TruthOutput y = truth_output(TruthState::from_vec(x),
                                           TruthInput::from_vec(u0), c);
        Vec v(2);
        v << y.V_t, y.omega;
        return v;
    };
    auto hu = [&](const Vec& u) {
        const TruthOutput y = truth_output(TruthState::from_vec(x0),
                                           TruthInput::from_vec(u), c);
        Vec v(2);
        v << y.V_t, y.omega;
        return v;
    };
    auto jac = [](const std::function<Vec(const Vec&)>& f, const Vec& at) {
        const Vec f0 = f(at);
        Mat J(f0.size(), at.size());
        for (int j = 0; j < at.size(); ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(at(j)));
            Vec p = at, mv = at;
            p(j) += h; mv(j) -= h;
            J.col(j) = (f(p) - f(mv)) / (2.0 * h);
        }
        return J;
    };

    StateSpaceModel m;
    m.A = jac(fx, x0);
    m.B = jac(fu, u0);
    m.C = jac(hx, x0);
    m.D = jac(hu, u0);
    m.x0 = x0;
    m.u0 = u0;
    m.state_names = {"I_d", "I_F", "I_D", "I_q", "I_Q",
                     "omega", "delta", "T_m", "G_V"};
    m.input_names = {"V_F", "u_T"};
    m.output_names = {"V_t", "omega"};
    return m;
}

double final_value(const TransferFunction& tf) {
    TransferFunction g = tf;
    g.normalize();
    // cancel common s^k factors (trailing zero coefficients)
    while (g.num.size() > 1 && g.den.size() > 1
           && g.num.back() == 0.0 && g.den.back() == 0.0) {
        g.num.pop_back();
        g.den.pop_back();
    }
    if (std::abs(g.den.back()) < 1e-14)
        throw numerical_failure("final value undefined: pole at the origin "
                                "survives the step cancellation");
    for (const Cplx& p : polynomial_roots(g.den)) {
        if (p.real() >= -1e-9) {
            std::ostringstream os;
            os << "final value undefined: pole at " << p.real()
               << (p.imag() >= 0 ? "+" : "") << p.imag() << "j";
            throw numerical_failure(os.str());
        }
    }
    return g.num.back() / g.den.back();
}

// ----------------------------------------------------- CSV serialization

void write_statespace_csv(const std::string& path, const StateSpaceModel& m) {
    std::ostringstream os;
    auto block = [&](const char* name, const Mat& M) {
        os << "# " << name << "\n";
        for (int i = 0; i < M.rows(); ++i) {
            for (int j = 0; j < M.cols(); ++j) {
                if (j) os << ",";
                os << format_g12(M(i, j));
            }
            os << "\n";
        }
    };
    block("A", m.A);
    block("B", m.B);
    block("C", m.C);
    block("D", m.D);
    if (m.x0.size() > 0) block("x0", m.x0.transpose());
    if (m.u0.size() > 0) block("u0", m.u0.transpose());
    atomic_write_text(path, os.str());
}

StateSpaceModel read_statespace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw invalid_parameter("cannot open state-space file: " + path);
    std::map<std::string, std::vector<std::vector<double>>> blocks;
    std::string line, current;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            current = line.substr(1);
            // trim surrounding spaces
            const auto b = current.find_first_not_of(" \t");
            const auto e = current.find_last_not_of(" \t\r");
            current = (b == std::string::npos) ? "" : current.substr(b, e - b + 1);
            continue;
        }
        if (current.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        blocks[current].push_back(row);
    }
    auto to_mat = [&](const std::string& name) {
        const auto it = blocks.find(name);
        if (it == blocks.end() || it->second.empty())
            throw invalid_parameter("state-space file missing block: " + name);
        const auto& rows = it->second;
        Mat M(rows.size(), rows[0].size());
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows[0].size())
                throw invalid_parameter("ragged block in state-space file: " + name);
            for (size_t j = 0; j < rows[i].size(); ++j)
                M(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
        }
        return M;
    };
    StateSpaceModel m;
    m.A = to_mat("A");
    m.B = to_mat("B");
    m.C = to_mat("C");
    m.D = to_mat("D");
    if (blocks.count("x0")) m.x0 = to_mat("x0").transpose();
    if (blocks.count("u0")) m.u0 = to_mat("u0").transpose();
    return m;
}

} // namespace smib
