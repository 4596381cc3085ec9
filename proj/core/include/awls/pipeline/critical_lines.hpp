#pragma once

#include <vector>

#include "awls/grid/load_profile.hpp"
#include "awls/grid/network_case.hpp"
#include "awls/solver/lp.hpp"

namespace awls {

struct CriticalLineOptions {
    std::size_t count = 8;
    // a line is accepted only if switching it off together with any set of
    // up to `depth` already chosen lines keeps every bus connected
    std::size_t depth = 2;
    int jobs = 1;
    SolverConfig solver{};
};

struct CriticalLines {
    std::vector<BranchId> lines;        // in acceptance order
    std::vector<double> single_shed;    // relaxed shed with only that line off
};

/// Greedy pick of high-impact lines: rank single outages by relaxed shed at
/// `load` (islanding singles dropped) and walk the ranking under the
/// connectivity rule above. May return fewer than `count` lines.
CriticalLines select_critical_lines(const NetworkCase& c, const LoadProfile& load, const CriticalLineOptions& opt = {});

}  // namespace awls
