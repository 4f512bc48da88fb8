#pragma once
#include <string>
#include <vector>

#include "smib/numlin.h"

namespace smib {

// linear model dx = A x + B u, y = C x + D u about a named equilibrium
struct StateSpaceModel {
    Mat A, B, C, D;
    Vec x0, u0;                // the point the model was taken about
    std::vector<std::string> state_names;
    std::vector<std::string> input_names;
    std::vector<std::string> output_names;
};

// CSV round-trip: blocks labeled "# A", "# B", "# C", "# D", one matrix row
// per line, %.12g.  Writes are atomic (temp + rename).
void write_statespace_csv(const std::string& path, const StateSpaceModel& m);
StateSpaceModel read_statespace_csv(const std::string& path);

} // namespace smib
