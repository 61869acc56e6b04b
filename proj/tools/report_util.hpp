#pragma once

#include <cmath>
#include <cstdio>
#include <string>

// Formatting and order arithmetic shared by the CLI commands. Header-only so
// the unit tests can exercise it without linking the executable.
namespace pnpcli {

// paper-style scientific notation, 3 significant digits
inline std::string sci3(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2E", v);
    return buf;
}

// machine output, 7 significant digits
inline std::string sci6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

inline std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// mesh size of a dyadic level as the fraction "1/2^level"
inline std::string h_string(int level) {
    return "1/" + std::to_string(1 << level);
}

// observed convergence order between two resolutions:
// log(e_coarse / e_fine) / log(h_coarse / h_fine)
inline double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine) {
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

inline constexpr const char* kCsvHeader = "alg,H,h,field,norm,error,order";

inline std::string csv_row(const std::string& alg, const std::string& H, const std::string& h,
                           const std::string& field, const std::string& norm, double error,
                           const std::string& order) {
    return alg + "," + H + "," + h + "," + field + "," + norm + "," + sci6(error) + "," + order;
}

} // namespace pnpcli
