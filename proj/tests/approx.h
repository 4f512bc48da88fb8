#pragma once
#include <cmath>
#include <ostream>

// doctest's Approx only does relative comparisons; the pins in this suite are
// absolute tolerances, so use a tiny comparator of our own
namespace testutil {

struct Near {
    double want = 0, tol = 0;
};

inline Near near(double want, double tol) { return {want, tol}; }

inline bool operator==(double got, const Near& n) {
    return std::fabs(got - n.want) <= n.tol;
}
inline bool operator==(const Near& n, double got) { return got == n; }
inline bool operator!=(double got, const Near& n) { return !(got == n); }

inline std::ostream& operator<<(std::ostream& os, const Near& n) {
    return os << n.want << " +/- " << n.tol;
}

}  // namespace testutil
