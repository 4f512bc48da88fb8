#include <cmath>

#include "approx.h"
#include "doctest.h"
#include "smib/numlin.h"

using namespace smib;

TEST_SUITE("numlin") {

TEST_CASE("eigenvalues are sorted and correct") {
    Mat A(2, 2);
    A << 0, 1, -2, -3;  // charpoly s^2 + 3s + 2, roots -1, -2
    const Spectrum ev = eigenvalues(A);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].real() == testutil::near(-2.0, 1e-12));
    CHECK(ev[1].real() == testutil::near(-1.0, 1e-12));
    CHECK(std::abs(ev[0].imag()) < 1e-12);

    CHECK_THROWS_AS(eigenvalues(Mat::Zero(2, 3)), invalid_parameter);
}

TEST_CASE("conjugate pairs come out adjacent") {
    Mat A(2, 2);
    A << 0, 1, -4, -2;  // -1 +- sqrt(3) i
    const Spectrum ev = eigenvalues(A);
    CHECK(ev[0].real() == testutil::near(-1.0, 1e-12));
    CHECK(ev[0].imag() == testutil::near(-std::sqrt(3.0), 1e-12));
    CHECK(ev[1].imag() == testutil::near(std::sqrt(3.0), 1e-12));
}

TEST_CASE("polynomial roots via companion matrix") {
    // (s+1)(s+2)(s+3)(s+4)(s+5)
    const std::vector<double> c = {1, 15, 85, 225, 274, 120};
    const Spectrum r = polynomial_roots(c);
    REQUIRE(r.size() == 5);
    for (int i = 0; i < 5; ++i)
        CHECK(r[i].real() == testutil::near(-(5 - i), 1e-8));

    // leading zeros are stripped
    const Spectrum r2 = polynomial_roots({0, 0, 1, 3, 2});
    REQUIRE(r2.size() == 2);
    CHECK(r2[0].real() == testutil::near(-2.0, 1e-10));

    CHECK_THROWS_AS(polynomial_roots({0, 0, 0}), invalid_parameter);
}

TEST_CASE("lyapunov solve") {
    Mat A(2, 2);
    A << -1, 0.3, 0, -2;
    const Mat Q = Mat::Identity(2, 2);
    const Mat P = solve_lyapunov(A, Q);
    CHECK(max_abs(A.transpose() * P + P * A + Q) < 1e-12);
    CHECK(max_abs(P - P.transpose()) < 1e-12);
}

TEST_CASE("care on the double integrator") {
    Mat A(2, 2), B(2, 1);
    A << 0, 1, 0, 0;
    B << 0, 1;
    const Mat Q = Mat::Identity(2, 2);
    const Mat R = Mat::Identity(1, 1);
    const Mat P = solve_care(A, B, Q, R);
    // known closed form: P = [[sqrt(3), 1], [1, sqrt(3)]]
    CHECK(P(0, 0) == testutil::near(std::sqrt(3.0), 1e-8));
    CHECK(P(0, 1) == testutil::near(1.0, 1e-8));
    CHECK(P(1, 1) == testutil::near(std::sqrt(3.0), 1e-8));
    const Mat resid =
        A.transpose() * P + P * A - P * B * R.inverse() * B.transpose() * P + Q;
    CHECK(max_abs(resid) < 1e-9);

    CHECK_THROWS_AS(solve_care(A, B, Q, Mat::Zero(1, 1)), invalid_parameter);
}

TEST_CASE("spectrum match error pairs greedily") {
    const Spectrum a = {{-1, 0}, {-2, 1}, {-2, -1}};
    Spectrum b = {{-2, -1}, {-1, 0}, {-2, 1}};  // permuted
    CHECK(spectrum_match_error(a, b) < 1e-15);
    b[0] = {-2.001, -1};
    CHECK(spectrum_match_error(a, b) == testutil::near(1e-3, 1e-9));
    CHECK_THROWS_AS(spectrum_match_error(a, Spectrum{{-1, 0}}), invalid_parameter);
}

TEST_CASE("hurwitz predicate") {
    Mat S(2, 2);
    S << -1, 0, 0, -2;
    CHECK(is_hurwitz(S));
    Mat M(2, 2);
    M << 0, 1, -1, 0;  // purely imaginary pair
    CHECK_FALSE(is_hurwitz(M));
}

}  // TEST_SUITE
