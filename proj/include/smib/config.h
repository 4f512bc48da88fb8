#pragma once
// Sectioned key=value configuration: [machine], [line], [turbine], [limits]
// and one [operating_point.<name>] block per named equilibrium anchor.
// Parsing starts from the built-in defaults, so a config file only needs the
// keys it wants to override.

#include <map>
#include <string>

#include "smib/params.h"

namespace smib {

struct Config {
    MachineParams machine;
    std::map<std::string, OperatingPoint> operating_points;
};

// built-in defaults: the Table-2 machine and the three tabulated operating
// points (op1/op2/op3)
Config default_config();

// parse `text` on top of the defaults; `origin` labels error messages.
// Angles may be given in degrees via an `_deg` key suffix, radians otherwise.
Config parse_config_text(const std::string& text,
                         const std::string& origin = "<config>");

// read + parse + validate a file
Config load_config(const std::string& path);

// serialize (round-trips through parse_config_text)
std::string config_to_text(const Config& cfg);

}  // namespace smib
