#include "smib/numlin.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace smib {

static bool spectrum_less(const Cplx& a, const Cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

Spectrum eigenvalues(const Mat& A)
{
    if (A.rows() != A.cols())
        throw invalid_parameter("eigenvalues: matrix is not square");
    if (!A.allFinite())
        throw invalid_parameter("eigenvalues: non-finite entries");
    if (A.rows() == 0) return {};

    Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw numerical_failure("eigenvalues: QR iteration did not converge");

    Spectrum out(A.rows());
    for (int i = 0; i < A.rows(); ++i) out[i] = es.eigenvalues()[i];
    std::sort(out.begin(), out.end(), spectrum_less);
    return out;
}

Spectrum polynomial_roots(const std::vector<double>& coeffs)
{
    // strip leading zeros
    size_t lead = 0;
    while (lead < coeffs.size() && coeffs[lead] == 0.0) ++lead;
    if (lead == coeffs.size())
        throw invalid_parameter("polynomial_roots: zero polynomial");
    const size_t n = coeffs.size() - lead - 1;   // degree
    if (n == 0) return {};                       // nonzero constant: no roots

    // monic companion matrix, top-row convention
    Mat C = Mat::Zero(n, n);
    for (size_t j = 0; j < n; ++j)
        C(0, j) = -coeffs[lead + 1 + j] / coeffs[lead];
    for (size_t i = 1; i < n; ++i)
        C(i, i - 1) = 1.0;
    return eigenvalues(C);
}

Mat solve_lyapunov(const Mat& A, const Mat& Q)
{
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || Q.rows() != n || Q.cols() != n)
        throw invalid_parameter("solve_lyapunov: dimension mismatch");

    // column-major vec identity: vec(M X N) = (N^T (x) M) vec(X), so
    // vec(A^T P) = (I (x) A^T) vec(P) and vec(P A) = (A^T (x) I) vec(P);
    // block (i,j) of (M (x) N) is M(i,j)*N.
    Mat K = Mat::Zero(n * n, n * n);
    const Mat At = A.transpose();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) K.block(i * n, j * n, n, n) += At;
            K.block(i * n, j * n, n, n) += At(i, j) * Mat::Identity(n, n);
        }
    Eigen::Map<const Vec> qvec(Q.data(), n * n);
    Eigen::FullPivLU<Mat> lu(K);
    if (!lu.isInvertible())
        throw numerical_failure("solve_lyapunov: singular Sylvester operator "
                                "(A has mirrored eigenvalues)");
    Vec pvec = lu.solve(-qvec);
    Mat P = Eigen::Map<Mat>(pvec.data(), n, n);
    return 0.5 * (P + P.transpose());
}

static Mat care_residual(const Mat& A, const Mat& S, const Mat& Q, const Mat& P)
{
    return A.transpose() * P + P * A - P * S * P + Q;
}

Mat solve_care(const Mat& A, const Mat& B, const Mat& Q, const Mat& R)
{
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
        R.rows() != B.cols() || R.cols() != B.cols())
        throw invalid_parameter("solve_care: dimension mismatch");
    if (max_abs(Q - Q.transpose()) > 1e-9 * (1.0 + max_abs(Q)))
        throw invalid_parameter("solve_care: Q not symmetric");
    Eigen::LDLT<Mat> rldlt(R);
    // isPositive() admits semidefinite R; we invert it, so demand a margin
    if (rldlt.info() != Eigen::Success || !rldlt.isPositive() ||
        rldlt.vectorD().minCoeff() <=
            1e-12 * std::max(1.0, rldlt.vectorD().maxCoeff()))
        throw invalid_parameter("solve_care: R not positive definite");

    const Mat S = B * rldlt.solve(B.transpose());   // B R^-1 B^T
    const double scale = 1.0 + max_abs(Q) + max_abs(A);

    // Phase 1: flow dP/dt = A^T P + P A - P S P + Q from P = Q.  Explicit
    // RK4 with step-doubling control; we only need to get close enough that
    // the closed loop A - S P is stable, Newton does the rest.
    Mat P = Q;
    double h = 1e-4;
    double t = 0.0;
    const double t_cap = 1e6;
    int evals = 0;
    auto rk4_step = [&](const Mat& P0, double dt) {
        Mat k1 = care_residual(A, S, Q, P0);
        Mat k2 = care_residual(A, S, Q, P0 + 0.5 * dt * k1);
        Mat k3 = care_residual(A, S, Q, P0 + 0.5 * dt * k2);
        Mat k4 = care_residual(A, S, Q, P0 + dt * k3);
        evals += 4;
        return (P0 + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)).eval();
    };
    while (t < t_cap && evals < 2'000'000) {
        Mat dP = care_residual(A, S, Q, P);
        if (max_abs(dP) < 1e-6 * scale) break;
        // step doubling: one full step vs two halves
        Mat full = rk4_step(P, h);
        Mat half = rk4_step(rk4_step(P, 0.5 * h), 0.5 * h);
        double err = max_abs(full - half);
        double tol = 1e-6 * (1.0 + max_abs(half));
        if (err <= tol || h < 1e-12) {
            P = 0.5 * (half + half.transpose());
            t += h;
            if (err < 0.1 * tol) h = std::min(h * 2.0, 10.0);
        } else {
            h *= 0.5;
        }
    }

    // Phase 2: Kleinman/Newton polish.  Requires A - S P stabilizing, which
    // the RDE flow delivers; guard anyway.
    if (!is_hurwitz(A - S * P))
        throw numerical_failure("solve_care: RDE phase did not reach a "
                                "stabilizing iterate (pair may not be stabilizable)");
    const Mat Rinv_Bt = rldlt.solve(B.transpose());
    for (int it = 0; it < 50; ++it) {
        Mat K = Rinv_Bt * P;                        // R^-1 B^T P
        Mat Acl = A - B * K;
        Mat rhs = Q + K.transpose() * R * K;        // Acl^T P + P Acl = -rhs
        Mat Pn = solve_lyapunov(Acl, rhs);
        double delta = max_abs(Pn - P);
        P = Pn;
        if (delta < 1e-12 * (1.0 + max_abs(P))) break;
    }

    double resid = max_abs(care_residual(A, S, Q, P));
    double bound = 1e-7 * (max_abs(Q) + max_abs(P) * max_abs(P) * max_abs(S) + 1.0);
    if (resid > bound)
        throw numerical_failure("solve_care: residual " + std::to_string(resid) +
                                " above tolerance " + std::to_string(bound));
    if (!is_hurwitz(A - S * P))
        throw numerical_failure("solve_care: converged P is not stabilizing");
    return P;
}

double spectrum_match_error(const Spectrum& a, const Spectrum& b)
{
    if (a.size() != b.size())
        throw invalid_parameter("spectrum_match_error: size mismatch");
    std::vector<Cplx> pool(a.begin(), a.end());
    double worst = 0.0;
    for (const Cplx& want : b) {
        size_t best = 0;
        double bd = std::abs(pool[0] - want);
        for (size_t i = 1; i < pool.size(); ++i) {
            double d = std::abs(pool[i] - want);
            if (d < bd) { bd = d; best = i; }
        }
        worst = std::max(worst, bd);
        pool.erase(pool.begin() + static_cast<long>(best));
    }
    return worst;
}

bool is_hurwitz(const Mat& A)
{
    for (const Cplx& ev : eigenvalues(A))
        if (ev.real() >= 0.0) return false;
    return true;
}

} // namespace smib
