#pragma once

#include <vector>

#include "awls/grid/load_profile.hpp"
#include "awls/grid/topology.hpp"
#include "awls/solver/lp.hpp"

namespace awls {

/// Lower-level value of every topology in X(k) over the candidate lines.
struct BenchmarkTable {
    std::vector<Topology> topologies;  // enumeration order
    std::vector<double> values;
    std::size_t best = 0;              // first argmax

    const Topology& best_topology() const { return topologies.at(best); }
    double best_value() const { return values.at(best); }
    /// Value of a topology from the table; throws ContractError if absent.
    double value_of(const Topology& t) const;
};

BenchmarkTable enumerate_benchmark(const NetworkCase& c, const LoadProfile& load,
                                   const std::vector<BranchId>& candidate_lines, std::size_t k,
                                   const SolverConfig& config = {});

/// One table per profile. Work is split by topology, each worker walking all
/// profiles of its topologies, so results do not depend on `jobs`.
std::vector<BenchmarkTable> enumerate_benchmarks(const NetworkCase& c, const std::vector<LoadProfile>& loads,
                                                 const std::vector<BranchId>& candidate_lines, std::size_t k,
                                                 int jobs = 1, const SolverConfig& config = {});

}  // namespace awls
