// Developer aid: print every derived table (coefficients, equilibria,
// linearizations, the stock gains) for eyeballing against the references.

#include <cstdio>
#include <iostream>

#include "smib/config.h"
#include "smib/design.h"
#include "smib/fbl.h"
#include "smib/linearize.h"

using namespace smib;

namespace {

void row(const char* name, double v) { std::printf("  %-14s % .7g\n", name, v); }

void matrix(const char* name, const Mat& m) {
    std::printf("%s =\n", name);
    for (int i = 0; i < m.rows(); ++i) {
        std::printf("  ");
        for (int j = 0; j < m.cols(); ++j) std::printf("% 13.6g", m(i, j));
        std::printf("\n");
    }
}

void spectrum(const char* name, const Spectrum& ev) {
    std::printf("%s:\n", name);
    for (const auto& e : ev) std::printf("  % .7g %+.7gi\n", e.real(), e.imag());
}

}  // namespace

int main() {
    const Config cfg = default_config();
    const MachineParams& p = cfg.machine;
    const TruthCoefficients tc = derive_truth_coefficients(p);
    const ReducedCoefficients rc = derive_reduced_coefficients(p);
    const FblCoefficients fc = derive_fbl_coefficients(rc, p);

    std::printf("== transient constants ==\n");
    const TransientConstants tcon = transient_constants(p);
    row("L_d_prime", tcon.L_d_prime);
    row("tau_d0_prime", tcon.tau_d0_prime);
    row("tau_j", tcon.tau_j);

    std::printf("== truth coefficients ==\n");
    row("mu", tc.mu);
    row("nu", tc.nu);
    row("F11", tc.F11);
    row("F16", tc.F16);
    row("F22", tc.F22);
    row("F41", tc.F41);
    row("G11", tc.G11);
    row("G21", tc.G21);
    row("G31", tc.G31);
    row("y11", tc.y11);
    row("y16", tc.y16);
    row("y21", tc.y21);
    row("y26", tc.y26);
    row("i11", tc.i11);
    row("tau_j", tc.tau_j);

    std::printf("== reduced coefficients ==\n");
    row("Vd1", rc.Vd1);
    row("Vd2", rc.Vd2);
    row("Vd3", rc.Vd3);
    row("Vq1", rc.Vq1);
    row("Vq2", rc.Vq2);
    row("Vq3", rc.Vq3);
    row("f11", rc.f11);
    row("f12", rc.f12);
    row("f13", rc.f13);
    row("f21", rc.f21);
    row("f22", rc.f22);
    row("f23", rc.f23);
    row("f24", rc.f24);
    row("f25", rc.f25);
    row("f26", rc.f26);
    row("f27", rc.f27);
    row("f28", rc.f28);
    row("f41", rc.f41);
    row("f42", rc.f42);
    row("f51", rc.f51);
    row("f52", rc.f52);
    row("g11", rc.g11);
    row("g55", rc.g55);

    std::printf("== fbl constants ==\n");
    row("e11", fc.e11);
    row("e12", fc.e12);
    row("e13", fc.e13);
    row("e14", fc.e14);
    row("e15", fc.e15);

    for (const char* name : {"op1", "op2", "op3"}) {
        const OperatingPoint& op = cfg.operating_points.at(name);
        const Equilibrium te = find_equilibrium_truth(op.delta_0, op.T_m0, tc);
        const Equilibrium re = find_equilibrium_reduced(op.delta_0, op.T_m0, rc);
        std::printf("== %s (delta0 = %g, Tm0 = %g) ==\n", name, op.delta_0, op.T_m0);
        std::cout << "  truth x0:   " << te.x0.transpose() << "\n";
        std::cout << "  truth u0:   " << te.u0.transpose() << "\n";
        std::cout << "  reduced x0: " << re.x0.transpose() << "\n";
        std::cout << "  reduced u0: " << re.u0.transpose() << "\n";
        std::printf("  residuals:  truth %.3g, reduced %.3g\n", te.residual, re.residual);
    }

    const Equilibrium re1 = find_equilibrium_reduced(
        cfg.operating_points.at("op1").delta_0, cfg.operating_points.at("op1").T_m0, rc);
    const Equilibrium te1 = find_equilibrium_truth(
        cfg.operating_points.at("op1").delta_0, cfg.operating_points.at("op1").T_m0, tc);
    const StateSpaceModel lin1 = linearize_reduced(re1, rc);
    const StateSpaceModel linT = linearize_truth(te1, tc);
    matrix("reduced A", lin1.A);
    matrix("reduced B", lin1.B);
    matrix("reduced C", lin1.C);
    spectrum("reduced eigenvalues", eigenvalues(lin1.A));
    matrix("truth D", linT.D);
    spectrum("truth eigenvalues", eigenvalues(linT.A));

    Mat Q = Mat::Zero(5, 5);
    Q.diagonal() << 300, 250, 200, 200, 250;
    const GainMatrix k = lqr_gain(lin1, Q, 0.5 * Mat::Identity(2, 2));
    matrix("lqr K (Q = diag(300,250,200,200,250), R = 0.5 I)", k.K);
    return 0;
}
