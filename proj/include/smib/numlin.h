#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "smib/errors.h"

namespace smib {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Cplx = std::complex<double>;

// Eigenvalue list sorted ascending by (real, imag) so regression tables are
// deterministic.  Conjugate pairs of real matrices come out adjacent.
using Spectrum = std::vector<Cplx>;

Spectrum eigenvalues(const Mat& A);

// Roots of c[0]*s^n + c[1]*s^(n-1) + ... + c[n] via the companion matrix.
// Leading zeros are stripped; an all-zero polynomial is invalid.
Spectrum polynomial_roots(const std::vector<double>& coeffs);

// Solve A^T*P + P*A + Q = 0 for P (Q need not be symmetric; the result is
// symmetrized).  Dense Kronecker solve — matrices here are <= 10x10.
Mat solve_lyapunov(const Mat& A, const Mat& Q);

// Stabilizing solution of A^T*P + P*A - P*B*R^-1*B^T*P + Q = 0.
// Phase 1 integrates the Riccati differential equation dP/dt = rhs(P) from
// P = Q until the flow has nearly stalled (this lands on the stabilizing
// branch for stabilizable/detectable data); phase 2 polishes with Newton
// (Kleinman) iterations, each a Lyapunov solve against the current
// closed-loop matrix.
Mat solve_care(const Mat& A, const Mat& B, const Mat& Q, const Mat& R);

// ---- small helpers shared by tests, design validation and acceptance ----

// max over the greedy min-distance pairing of two equal-size spectra;
// the usual way to compare eigenvalue multisets printed in different orders.
double spectrum_match_error(const Spectrum& a, const Spectrum& b);

bool is_hurwitz(const Mat& A);

inline double max_abs(const Mat& M) { return M.cwiseAbs().maxCoeff(); }

} // namespace smib
