#include "smib/config.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "smib/csvplot.h"
#include "smib/errors.h"

namespace smib {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& v, const std::string& where) {
    const char* s = v.c_str();
    char* end = nullptr;
    const double x = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw invalid_parameter(where + ": not a number: '" + v + "'");
    return x;
}

// every scalar key of the machine block, valid in any of the four
// machine-level sections (the split is organizational)
std::map<std::string, double MachineParams::*> machine_fields() {
    return {
        {"L_d", &MachineParams::L_d},       {"L_F", &MachineParams::L_F},
        {"L_D", &MachineParams::L_D},       {"L_q", &MachineParams::L_q},
        {"L_Q", &MachineParams::L_Q},       {"kM_F", &MachineParams::kM_F},
        {"kM_D", &MachineParams::kM_D},     {"M_R", &MachineParams::M_R},
        {"kM_Q", &MachineParams::kM_Q},     {"r", &MachineParams::r},
        {"r_F", &MachineParams::r_F},       {"r_D", &MachineParams::r_D},
        {"r_Q", &MachineParams::r_Q},       {"H", &MachineParams::H},
        {"D", &MachineParams::D},           {"omega_R", &MachineParams::omega_R},
        {"R_e", &MachineParams::R_e},       {"L_e", &MachineParams::L_e},
        {"V_inf", &MachineParams::V_inf},   {"alpha", &MachineParams::alpha},
        {"K_T", &MachineParams::K_T},       {"K_G", &MachineParams::K_G},
        {"tau_T", &MachineParams::tau_T},   {"tau_G", &MachineParams::tau_G},
        {"R_T", &MachineParams::R_T},       {"E_FD_min", &MachineParams::E_FD_min},
        {"E_FD_max", &MachineParams::E_FD_max}, {"G_V_min", &MachineParams::G_V_min},
        {"G_V_max", &MachineParams::G_V_max},   {"k", &MachineParams::k},
    };
}

std::map<std::string, double OperatingPoint::*> op_table_fields() {
    return {
        {"I_d0", &OperatingPoint::I_d0},   {"I_F0", &OperatingPoint::I_F0},
        {"I_D0", &OperatingPoint::I_D0},   {"I_q0", &OperatingPoint::I_q0},
        {"I_Q0", &OperatingPoint::I_Q0},   {"V_d0", &OperatingPoint::V_d0},
        {"V_q0", &OperatingPoint::V_q0},   {"V_t0", &OperatingPoint::V_t0},
        {"E_q0_prime", &OperatingPoint::E_q0_prime},
        {"P", &OperatingPoint::P},         {"PF", &OperatingPoint::PF},
        {"I_a0", &OperatingPoint::I_a0},
    };
}

}  // namespace

Config default_config() {
    Config cfg;
    cfg.machine = paper_machine();
    cfg.operating_points = paper_operating_points();
    return cfg;
}

Config parse_config_text(const std::string& text, const std::string& origin) {
    Config cfg = default_config();
    const auto mf = machine_fields();
    const auto of = op_table_fields();

    std::istringstream is(text);
    std::string line, section;
    std::string op_name;  // set while inside [operating_point.<name>]
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw invalid_parameter(where + ": unterminated section");
            section = trim(t.substr(1, t.size() - 2));
            op_name.clear();
            if (section.rfind("operating_point.", 0) == 0) {
                op_name = section.substr(std::string("operating_point.").size());
                if (op_name.empty())
                    throw invalid_parameter(where + ": operating point needs a name");
                // start from the existing entry so files can override defaults
                cfg.operating_points.try_emplace(op_name).first->second.name = op_name;
            } else if (section != "machine" && section != "line" &&
                       section != "turbine" && section != "limits") {
                throw invalid_parameter(where + ": unknown section [" + section + "]");
            }
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw invalid_parameter(where + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section.empty())
            throw invalid_parameter(where + ": key '" + key + "' outside any section");

        // the `_deg` suffix converts angle keys to radians
        bool degrees = false;
        if (key.size() > 4 && key.compare(key.size() - 4, 4, "_deg") == 0) {
            degrees = true;
            key = key.substr(0, key.size() - 4);
        }
        auto angle_scaled = [&](double v) { return degrees ? v * kDegToRad : v; };

        if (!op_name.empty()) {
            OperatingPoint& op = cfg.operating_points[op_name];
            if (key == "delta_0") {
                op.delta_0 = angle_scaled(parse_number(value, where));
            } else if (key == "T_m0") {
                op.T_m0 = parse_number(value, where);
            } else if (key == "omega_0") {
                op.omega_0 = parse_number(value, where);
            } else if (key == "G_V0") {
                op.G_V0 = parse_number(value, where);
            } else if (auto it = of.find(key); it != of.end()) {
                op.*(it->second) = parse_number(value, where);
                op.has_table_values = true;
            } else {
                throw invalid_parameter(where + ": unknown operating-point key '" + key +
                                        "'");
            }
            continue;
        }

        if (degrees && key != "alpha")
            throw invalid_parameter(where + ": '_deg' only applies to angle keys");
        if (key == "L_d_prime") {
            cfg.machine.L_d_prime_pub = parse_number(value, where);
        } else if (key == "tau_d0_prime") {
            cfg.machine.tau_d0_prime_pub = parse_number(value, where);
        } else if (auto it = mf.find(key); it != mf.end()) {
            cfg.machine.*(it->second) = angle_scaled(parse_number(value, where));
        } else {
            throw invalid_parameter(where + ": unknown key '" + key + "' in [" + section +
                                    "]");
        }
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw invalid_parameter("cannot open config: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    Config cfg = parse_config_text(buf.str(), path);
    validate(cfg.machine);
    if (cfg.operating_points.empty())
        throw invalid_parameter(path + ": no operating points defined");
    for (const auto& [name, op] : cfg.operating_points) {
        if (!std::isfinite(op.delta_0) || !std::isfinite(op.T_m0) || op.T_m0 <= 0)
            throw invalid_parameter(path + ": operating point '" + name +
                                    "' needs finite delta_0 and T_m0 > 0");
    }
    return cfg;
}

std::string config_to_text(const Config& cfg) {
    const MachineParams& p = cfg.machine;
    std::ostringstream os;
    auto kv = [&](const std::string& k, double v) { os << k << " = " << format_g12(v) << "\n"; };

    const auto mf = machine_fields();
    os << "[machine]\n";
    for (const char* k : {"L_d", "L_F", "L_D", "L_q", "L_Q", "kM_F", "kM_D", "M_R",
                          "kM_Q", "r", "r_F", "r_D", "r_Q", "H", "D", "omega_R", "k"})
        kv(k, p.*(mf.at(k)));
    if (p.L_d_prime_pub) kv("L_d_prime", *p.L_d_prime_pub);
    if (p.tau_d0_prime_pub) kv("tau_d0_prime", *p.tau_d0_prime_pub);

    os << "\n[line]\n";
    kv("R_e", p.R_e);
    kv("L_e", p.L_e);
    kv("V_inf", p.V_inf);
    kv("alpha", p.alpha);

    os << "\n[turbine]\n";
    kv("K_T", p.K_T);
    kv("K_G", p.K_G);
    kv("tau_T", p.tau_T);
    kv("tau_G", p.tau_G);
    kv("R_T", p.R_T);

    os << "\n[limits]\n";
    kv("E_FD_min", p.E_FD_min);
    kv("E_FD_max", p.E_FD_max);
    kv("G_V_min", p.G_V_min);
    kv("G_V_max", p.G_V_max);

    for (const auto& [name, op] : cfg.operating_points) {
        os << "\n[operating_point." << name << "]\n";
        kv("delta_0", op.delta_0);
        kv("T_m0", op.T_m0);
        kv("omega_0", op.omega_0);
        kv("G_V0", op.G_V0);
        if (op.has_table_values) {
            const auto of = op_table_fields();
            for (const char* k : {"I_d0", "I_F0", "I_D0", "I_q0", "I_Q0", "V_d0", "V_q0",
                                  "V_t0", "E_q0_prime", "P", "PF", "I_a0"})
                kv(k, op.*(of.at(k)));
        }
    }
    return os.str();
}

}  // namespace smib
