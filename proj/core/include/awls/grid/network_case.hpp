#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace awls {

using BusId = int;
using BranchId = int;

struct Bus {
    BusId id = 0;
    int type = 1;  // 3 marks the slack bus, 1/2 are informational (PQ/PV)
    double v_min = 0.0;
    double v_max = 0.0;
    double pd = 0.0;
    double qd = 0.0;
    // Aggregate generator bounds; all zero when the bus has no generator.
    double pg_min = 0.0;
    double pg_max = 0.0;
    double qg_min = 0.0;
    double qg_max = 0.0;
    bool has_generator = false;

    bool operator==(const Bus&) const = default;
};

struct Branch {
    BranchId id = 0;
    BusId from = 0;
    BusId to = 0;
    double g = 0.0;
    double b = 0.0;
    double g_sh = 0.0;
    double b_sh = 0.0;
    double tap = 1.0;
    double theta_min = 0.0;
    double theta_max = 0.0;
    double s_max = 0.0;

    bool operator==(const Branch&) const = default;
};

/// Static grid description. Buses and branches keep file order; internal
/// algorithms address them by position (bus index / branch index).
class NetworkCase {
public:
    NetworkCase() = default;
    NetworkCase(double base_mva, std::vector<Bus> buses, std::vector<Branch> branches);

    double base_mva() const noexcept { return base_mva_; }
    const std::vector<Bus>& buses() const noexcept { return buses_; }
    const std::vector<Branch>& branches() const noexcept { return branches_; }
    std::size_t num_buses() const noexcept { return buses_.size(); }
    std::size_t num_branches() const noexcept { return branches_.size(); }
    BusId slack_bus() const noexcept { return buses_[slack_index_].id; }

    std::size_t bus_index(BusId id) const;
    std::size_t branch_index(BranchId id) const;
    std::size_t from_index(std::size_t branch) const noexcept { return from_idx_[branch]; }
    std::size_t to_index(std::size_t branch) const noexcept { return to_idx_[branch]; }

    double total_demand() const noexcept;  // sum of pd + qd

    /// Non-fatal notes collected while parsing (ignored fields, unknown sections).
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

    bool operator==(const NetworkCase& other) const {
        return base_mva_ == other.base_mva_ && buses_ == other.buses_ && branches_ == other.branches_;
    }

private:
    double base_mva_ = 100.0;
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::vector<std::size_t> from_idx_;
    std::vector<std::size_t> to_idx_;
    std::size_t slack_index_ = 0;
    std::vector<std::string> warnings_;
};

/// Parses the sectioned case text (see docs/case_format.md). Throws ParseError
/// for malformed lines and ValidationError when an invariant is violated.
NetworkCase parse_case(std::string_view text);
NetworkCase load_case(const std::string& path);

/// Writes the case back in the same format; parse_case(serialize_case(c)) == c.
std::string serialize_case(const NetworkCase& c);

}  // namespace awls
