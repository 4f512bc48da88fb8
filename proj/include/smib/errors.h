#pragma once
#include <stdexcept>
#include <string>

namespace smib {

// Error taxonomy mapped to CLI exit codes in main():
//   invalid_parameter / unknown args -> 1, design_failure -> 2,
//   sim_divergence -> 3.  numerical_failure covers solver non-convergence
// in plumbing (eigen iteration caps, CARE) and maps to 2 when it bubbles
// out of a synthesis call.
struct invalid_parameter : std::runtime_error {
    explicit invalid_parameter(const std::string& what) : std::runtime_error(what) {}
};

struct numerical_failure : std::runtime_error {
    explicit numerical_failure(const std::string& what) : std::runtime_error(what) {}
};

struct design_failure : std::runtime_error {
    explicit design_failure(const std::string& what) : std::runtime_error(what) {}
};

struct sim_divergence : std::runtime_error {
    explicit sim_divergence(const std::string& what) : std::runtime_error(what) {}
};

} // namespace smib
