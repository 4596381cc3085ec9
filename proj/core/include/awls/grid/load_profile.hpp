#pragma once

#include <vector>

#include "awls/grid/network_case.hpp"

namespace awls {

/// Per-bus demand in bus order (pu).
struct LoadProfile {
    std::vector<double> pd;
    std::vector<double> qd;

    static LoadProfile nominal(const NetworkCase& c);
    /// Sum of pd + qd; the shed upper bound.
    double total() const noexcept;
    /// Throws ContractError on size mismatch or negative entries.
    void validate(const NetworkCase& c) const;

    bool operator==(const LoadProfile&) const = default;
};

}  // namespace awls
