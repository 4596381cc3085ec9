#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "awls/grid/topology.hpp"
#include "awls/solver/lp.hpp"

namespace awls {

struct ProfileRow {
    std::size_t profile = 0;
    SolveStatus status = SolveStatus::Optimal;
    Topology chosen;               // after pool refinement
    Topology top_incumbent;        // solver's best before refinement
    double predicted = 0.0;        // surrogate value at the top incumbent
    double realized = 0.0;         // lower-level shed of `chosen`
    double top_realized = 0.0;     // lower-level shed of `top_incumbent`
    double benchmark = 0.0;        // enumerated maximum
    std::optional<double> gap;     // percent
    double slack = 0.0;
    std::size_t pool_size = 0;
    long nodes = 0;
    double seconds = 0.0;          // written to the timing file only
};

struct ExperimentReport {
    std::string method;            // "nn" or "pcnn"
    std::string case_id;
    double lambda = 0.0;
    std::vector<ProfileRow> rows;

    /// gap/realized/benchmark summaries and refinement counts.
    nlohmann::json aggregate() const;
    void write_csv(std::ostream& out) const;
    void write_timing_csv(std::ostream& out) const;
};

/// Shortest round-trip decimal form.
std::string format_double(double v);
std::string topology_bits(const Topology& t);

}  // namespace awls
