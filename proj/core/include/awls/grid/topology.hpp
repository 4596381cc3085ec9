#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "awls/grid/network_case.hpp"

namespace awls {

/// Line-status vector in branch order (1 = in service).
struct Topology {
    std::vector<std::uint8_t> status;

    static Topology all_on(std::size_t num_branches) { return {std::vector<std::uint8_t>(num_branches, 1)}; }

    std::size_t size() const noexcept { return status.size(); }
    std::size_t num_off() const noexcept;
    /// Membership in the budget set: at most k lines switched off.
    bool within_budget(std::size_t k) const noexcept { return num_off() <= k; }

    bool operator==(const Topology&) const = default;
    auto operator<=>(const Topology&) const = default;
};

/// JSON array of 0/1 integers in branch order.
std::string topology_to_json(const Topology& t);
Topology topology_from_json(const std::string& text);

/// True iff the in-service branches connect every bus.
bool is_connected(const NetworkCase& c, const Topology& topo);

struct BudgetSet {
    std::vector<Topology> topologies;
    std::vector<std::string> warnings;
};

/// Every topology that switches off between 0 and k of the candidate lines.
/// Order: by outage count, then lexicographic in candidate position. k above
/// the candidate count is clamped (recorded in warnings).
BudgetSet enumerate_budget_set(const NetworkCase& c, const std::vector<BranchId>& candidate_lines, std::size_t k,
                               bool exclude_islanding);

/// Reads a JSON array of branch ids (a critical-line list).
std::vector<BranchId> load_line_list(const std::string& path);

}  // namespace awls
