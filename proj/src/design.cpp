#include "smib/design.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "smib/errors.h"

namespace smib {

namespace {

void check_conjugate_closed(const Spectrum& poles) {
    std::vector<Cplx> pending;
    for (const Cplx& p : poles) {
        if (std::abs(p.imag()) < 1e-12) continue;
        auto it = std::find_if(pending.begin(), pending.end(), [&](const Cplx& q) {
            return std::abs(q - std::conj(p)) < 1e-9 * (1.0 + std::abs(p));
        });
        if (it != pending.end())
            pending.erase(it);
        else
            pending.push_back(p);
    }
    if (!pending.empty())
        throw invalid_parameter("pole list is not closed under conjugation");
}

Mat ctrb(const Mat& A, const Mat& B) {
    const int n = static_cast<int>(A.rows());
    Mat C(n, n * B.cols());
    Mat blk = B;
    for (int i = 0; i < n; ++i) {
        C.middleCols(i * B.cols(), B.cols()) = blk;
        blk = A * blk;
    }
    return C;
}

int rank_of(const Mat& M) {
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double tol = 1e-9 * sv(0) * std::max(M.rows(), M.cols());
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++r;
    return r;
}

// orthonormal basis for the column span of M (column-pivoted QR, rank cut)
Mat range_basis(const Mat& M) {
    if (M.cols() == 0) return Mat(M.rows(), 0);
    Eigen::ColPivHouseholderQR<Mat> qr(M);
    const int r = static_cast<int>(qr.rank());
    Mat Q = qr.householderQ() * Mat::Identity(M.rows(), r);
    return Q;
}

} // namespace

// ------------------------------------------------------------------- LQR

GainMatrix lqr_gain(const StateSpaceModel& ss, const Mat& Q, const Mat& R) {
    Mat P;
    try {
        P = solve_care(ss.A, ss.B, Q, R);
    } catch (const std::exception& e) {
        throw design_failure(std::string("LQR Riccati solve failed: ") + e.what());
    }
    GainMatrix g;
    g.K = R.ldlt().solve(ss.B.transpose() * P);
    g.method = "lqr";
    g.Q = Q;
    g.R = R;
    if (!is_hurwitz(ss.A - ss.B * g.K))
        throw design_failure("LQR closed loop is not Hurwitz");
    return g;
}

// ------------------------------------------------------------- placement

GainMatrix place_poles(const Mat& A, const Mat& B, const Spectrum& poles,
                       std::uint64_t seed) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    if (static_cast<int>(poles.size()) != n)
        throw invalid_parameter("pole list length must equal the state dimension");
    check_conjugate_closed(poles);
    // multiplicity beyond the input count is not supported by this scheme
    for (const Cplx& p : poles) {
        int mult = 0;
        for (const Cplx& q : poles)
            if (std::abs(p - q) < 1e-9 * (1.0 + std::abs(p))) ++mult;
        if (mult > m) {
            std::ostringstream os;
            os << "unsupported configuration: pole " << p.real()
               << (p.imag() >= 0 ? "+" : "") << p.imag() << "j repeated "
               << mult << "x exceeds input multiplicity " << m;
            throw design_failure(os.str());
        }
    }
    {
        const int r = rank_of(ctrb(A, B));
        if (r < n) {
            std::ostringstream os;
            os << "uncontrollable pair: controllability rank " << r << " < " << n;
            throw design_failure(os.str());
        }
    }
    // Eigenvector assignment: every achievable closed-loop eigenvector for a
    // pole p lives in the state part of ker [A - pI | B], and once one
    // eigenvector per pole is fixed the gain follows exactly from K V = -U
    // (the matching input parts).  The free kernel coordinates y_i are aimed,
    // over a few alternating passes, away from the span of the other
    // eigenvectors so V stays well conditioned.  A single-input reduction
    // (preliminary feedback + Ackermann) is avoided deliberately: on spectra
    // spanning decades it drives |K| ~ 1e7 through the companion
    // coefficients, and the closed-loop eigensolve then cannot even measure
    // the spectrum to the 1e-6 contract, let alone meet it.
    struct Slot {
        int partner = -1;     // conjugate twin's index, -1 for a real pole
        bool primary = true;  // a twin mirrors its primary, no freedom of its own
        Eigen::MatrixXcd Qv;  // n x m orthonormal basis of the state part
        Eigen::MatrixXcd Uy;  // m x m input part in the same coordinates
        Eigen::VectorXcd y;   // current unit coordinate vector
    };
    std::vector<Slot> slots(n);
    for (int i = 0; i < n; ++i) {
        if (std::abs(poles[i].imag()) < 1e-12 || slots[i].partner >= 0)
            continue;
        for (int j = i + 1; j < n; ++j) {
            if (slots[j].partner < 0 &&
                std::abs(poles[j] - std::conj(poles[i])) <
                    1e-9 * (1.0 + std::abs(poles[i]))) {
                slots[i].partner = j;
                slots[j].partner = i;
                slots[j].primary = false;
                break;
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        Slot& s = slots[i];
        if (!s.primary) continue;
        if (s.partner < 0) {
            Mat W(n, n + m);
            W.leftCols(n) = A - poles[i].real() * Mat::Identity(n, n);
            W.rightCols(m) = B;
            Eigen::JacobiSVD<Mat> svd(W, Eigen::ComputeFullV);
            const Mat ker = svd.matrixV().rightCols(m);
            Eigen::HouseholderQR<Mat> qr(ker.topRows(n));
            const Mat R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
            for (int d = 0; d < m; ++d)
                if (std::abs(R(d, d)) < 1e-12)
                    throw design_failure(
                        "pole placement needs a full-column-rank input matrix");
            s.Qv = (qr.householderQ() * Mat::Identity(n, m)).cast<Cplx>();
            s.Uy = (ker.bottomRows(m) * R.inverse()).cast<Cplx>();
        } else {
            Eigen::MatrixXcd W(n, n + m);
            W.leftCols(n) =
                A.cast<Cplx>() - poles[i] * Eigen::MatrixXcd::Identity(n, n);
            W.rightCols(m) = B.cast<Cplx>();
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(W, Eigen::ComputeFullV);
            const Eigen::MatrixXcd ker = svd.matrixV().rightCols(m);
            Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ker.topRows(n));
            const Eigen::MatrixXcd R =
                qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
            for (int d = 0; d < m; ++d)
                if (std::abs(R(d, d)) < 1e-12)
                    throw design_failure(
                        "pole placement needs a full-column-rank input matrix");
            s.Qv = qr.householderQ() * Eigen::MatrixXcd::Identity(n, m);
            s.Uy = ker.bottomRows(m) * R.inverse();
        }
    }

    std::mt19937_64 rng(seed ? seed : 0x5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double best_err = std::numeric_limits<double>::infinity();
    Mat best_K;

    for (int attempt = 0; attempt < 3 && best_err > 1e-8; ++attempt) {
        for (Slot& s : slots) {
            if (!s.primary) continue;
            Eigen::VectorXcd y(m);
            for (int d = 0; d < m; ++d)
                y(d) = s.partner < 0 ? Cplx(gauss(rng), 0.0)
                                     : Cplx(gauss(rng), gauss(rng));
            s.y = y.normalized();
        }
        // with one input the kernels are lines and there is nothing to aim
        for (int pass = 0; pass < 4 && m > 1; ++pass) {
            for (int i = 0; i < n; ++i) {
                Slot& s = slots[i];
                if (!s.primary) continue;
                // real span of every other eigenvector; a conjugate pair
                // contributes its real and imaginary parts
                Mat O(n, 2 * n);
                int k = 0;
                for (int j = 0; j < n; ++j) {
                    const Slot& o = slots[j];
                    if (j == i || j == s.partner || !o.primary) continue;
                    const Eigen::VectorXcd vj = o.Qv * o.y;
                    O.col(k++) = vj.real();
                    if (o.partner >= 0) O.col(k++) = vj.imag();
                }
                const Mat Qo = range_basis(O.leftCols(k));
                const Mat P = Mat::Identity(n, n) - Qo * Qo.transpose();
                if (s.partner < 0) {
                    Eigen::JacobiSVD<Mat> svd(P * s.Qv.real(),
                                              Eigen::ComputeFullV);
                    s.y = svd.matrixV().col(0).cast<Cplx>();
                } else {
                    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
                        P.cast<Cplx>() * s.Qv, Eigen::ComputeFullV);
                    s.y = svd.matrixV().col(0);
                }
            }
        }

        Eigen::MatrixXcd V(n, n), U(m, n);
        for (int i = 0; i < n; ++i) {
            const Slot& s = slots[i];
            const Slot& src = s.primary ? s : slots[s.partner];
            const Eigen::VectorXcd vi = src.Qv * src.y;
            const Eigen::VectorXcd ui = src.Uy * src.y;
            V.col(i) = s.primary ? vi : vi.conjugate();
            U.col(i) = s.primary ? ui : ui.conjugate();
        }
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(V);
        if (!lu.isInvertible()) continue;  // degenerate draw, try again
        // (A - pI) v = -B u on each kernel, so K v_i = -u_i closes pole i
        const Mat K = (-(U * lu.inverse())).real();
        const double err = spectrum_match_error(eigenvalues(A - B * K), poles);
        if (err < best_err) {
            best_err = err;
            best_K = K;
        }
    }
    if (!(best_err <= 1e-6)) {
        std::ostringstream os;
        os << "pole placement missed the requested spectrum (error "
           << best_err << ")";
        throw design_failure(os.str());
    }
    GainMatrix g;
    g.K = best_K;
    g.method = "place";
    g.poles = poles;
    return g;
}

// ------------------------------------------------------------- observers

Spectrum scale_spectrum(const Spectrum& s, double rho) {
    Spectrum out = s;
    for (Cplx& p : out) p *= rho;
    return out;
}

ObserverGain observer_gain(const Mat& A, const Mat& C, const Spectrum& poles,
                           MeasuredOutputs measured, std::uint64_t seed) {
    const int n = static_cast<int>(A.rows());
    {
        // observability = controllability of the dual pair
        const int r = rank_of(ctrb(A.transpose(), C.transpose()));
        if (r < n) {
            std::ostringstream os;
            os << "unobservable pair: observability rank " << r << " < " << n;
            throw design_failure(os.str());
        }
    }
    const GainMatrix dual = place_poles(A.transpose(), C.transpose(), poles, seed);
    ObserverGain og;
    og.L = dual.K.transpose();
    og.measured = measured;
    if (spectrum_match_error(eigenvalues(A - og.L * C), poles) > 1e-6)
        throw design_failure("observer placement missed the requested spectrum");
    return og;
}

ObserverGain kalman_ltr_gain(const StateSpaceModel& ss, LtrSchedule& sched) {
    auto require_spd = [](const Mat& M, const char* name) {
        if (M.rows() != M.cols() || (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9)
            throw invalid_parameter(std::string(name) + " must be symmetric");
        Eigen::LDLT<Mat> f(M);
        // isPositive() admits semidefinite matrices; these get inverted
        if (f.info() != Eigen::Success || !f.isPositive() ||
            f.vectorD().minCoeff() <=
                1e-12 * std::max(1.0, f.vectorD().maxCoeff()))
            throw invalid_parameter(std::string(name) + " must be positive definite");
    };
    require_spd(sched.V10, "V10");
    require_spd(sched.V20, "V20");
    require_spd(sched.V, "V");
    if (sched.q < 0)
        throw invalid_parameter("LTR q must be >= 0");

    const Mat V1 = sched.V10
                 + sched.q * sched.q * ss.B * sched.V * ss.B.transpose();
    Mat Sigma;
    try {
        // filter Riccati: dual of the control one
        Sigma = solve_care(ss.A.transpose(), ss.C.transpose(), V1, sched.V20);
    } catch (const std::exception& e) {
        std::ostringstream os;
        os << "Kalman/LTR Riccati solve failed at q=" << sched.q << ": " << e.what();
        throw design_failure(os.str());
    }
    ObserverGain og;
    og.L = Sigma * ss.C.transpose() * sched.V20.inverse();
    og.measured = MeasuredOutputs::VtAndOmega;
    sched.H = og.L;
    if (!is_hurwitz(ss.A - og.L * ss.C)) {
        std::ostringstream os;
        os << "LTR estimator not Hurwitz at q=" << sched.q;
        throw design_failure(os.str());
    }
    return og;
}

// ------------------------------------------------------------------- PID

PidController pid_controller(const PidGains& g, double N) {
    PidController c;
    c.gains = g;
    c.N = N;
    c.ideal.num = {g.Kd, g.Kp, g.Ki};
    c.ideal.den = {1.0, 0.0};
    // proper form: Kp + Ki/s + Kd N s/(s+N)
    //            = ((Kp+Kd N) s^2 + (Kp N + Ki) s + Ki N) / (s^2 + N s)
    c.realized.num = {g.Kp + g.Kd * N, g.Kp * N + g.Ki, g.Ki * N};
    c.realized.den = {1.0, N, 0.0};
    // states: x1 = integrator, x2 = derivative filter
    c.A = Mat::Zero(2, 2);
    c.A(1, 1) = -N;
    c.B = Mat(2, 1);
    c.B << g.Ki, N;
    c.C = Mat(1, 2);
    c.C << 1.0, -g.Kd * N;
    c.D = Mat(1, 1);
    c.D << g.Kp + g.Kd * N;
    return c;
}

// ------------------------------------------------------------- root locus

std::vector<Spectrum> root_locus(const TransferFunction& open_loop,
                                 const std::vector<double>& gains) {
    TransferFunction g = open_loop;
    g.normalize();
    if (g.num.size() > g.den.size())
        throw invalid_parameter("root locus needs a proper open loop "
                                "(deg num <= deg den)");
    std::vector<Spectrum> loci;
    Spectrum prev;
    for (double k : gains) {
        std::vector<double> knum = g.num;
        for (double& v : knum) v *= k;
        const std::vector<double> cl = poly_add(g.den, knum);
        Spectrum roots = polynomial_roots(cl);
        if (!prev.empty() && roots.size() == prev.size()) {
            // reorder to follow the previous point's branches
            Spectrum ordered;
            std::vector<bool> used(roots.size(), false);
            for (const Cplx& p : prev) {
                int best = -1;
                double bd = std::numeric_limits<double>::infinity();
                for (size_t i = 0; i < roots.size(); ++i) {
                    if (used[i]) continue;
                    const double d = std::abs(roots[i] - p);
                    if (d < bd) { bd = d; best = static_cast<int>(i); }
                }
                used[static_cast<size_t>(best)] = true;
                ordered.push_back(roots[static_cast<size_t>(best)]);
            }
            roots = ordered;
        }
        prev = roots;
        loci.push_back(std::move(roots));
    }
    return loci;
}

std::string gain_to_text(const GainMatrix& g) {
    std::ostringstream os;
    os << "[gain.K]\n";
    os << "method = " << g.method << "\n";
    for (int i = 0; i < g.K.rows(); ++i) {
        os << "row" << i << " = ";
        for (int j = 0; j < g.K.cols(); ++j) {
            if (j) os << ", ";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", g.K(i, j));
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

} // namespace smib
