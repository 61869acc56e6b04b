#pragma once

#include <stdexcept>
#include <string>

namespace pnp {

// Resource limit exceeded (e.g. mesh refinement level above the memory guard).
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// A linear solver failed hard (breakdown after restart, dimension mismatch caught late).
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace pnp
