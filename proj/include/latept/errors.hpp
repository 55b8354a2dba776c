#pragma once

#include <stdexcept>
#include <string>

namespace latept {

// Error taxonomy used across modules. Every category maps onto the closest
// std exception base so callers can catch coarsely (std::invalid_argument for
// bad inputs, std::runtime_error for environmental/numerical failures).

// Non-square or mismatched shapes.
struct dimension_error : std::invalid_argument {
    explicit dimension_error(const std::string& m) : std::invalid_argument(m) {}
};

// Parameter outside its mathematical domain (r out of range, bad alpha, ...).
struct domain_error : std::invalid_argument {
    explicit domain_error(const std::string& m) : std::invalid_argument(m) {}
};

// Matrix fails the ultrametric class conditions.
struct class_error : std::invalid_argument {
    explicit class_error(const std::string& m) : std::invalid_argument(m) {}
};

// Block placements overlap or fail to cover all indices.
struct placement_error : std::invalid_argument {
    explicit placement_error(const std::string& m) : std::invalid_argument(m) {}
};

// Numerically singular solve where theory guarantees regularity; signals a
// tolerance breach rather than a legitimate input.
struct conditioning_error : std::runtime_error {
    explicit conditioning_error(const std::string& m) : std::runtime_error(m) {}
};

// Invalid point configuration (duplicate points, witness inside X, ...).
struct config_error : std::invalid_argument {
    explicit config_error(const std::string& m) : std::invalid_argument(m) {}
};

// Enumeration or simulation exceeded its operation budget.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& m) : std::runtime_error(m) {}
};

// Scale n below the threshold required by a constructive bound.
struct scale_error : std::invalid_argument {
    explicit scale_error(const std::string& m) : std::invalid_argument(m) {}
};

} // namespace latept
