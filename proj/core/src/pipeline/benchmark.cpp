#include "awls/pipeline/benchmark.hpp"

#include "awls/errors.hpp"
#include "awls/pipeline/evaluator.hpp"
#include "parallel.hpp"

namespace awls {

double BenchmarkTable::value_of(const Topology& t) const {
    for (std::size_t i = 0; i < topologies.size(); ++i)
        if (topologies[i] == t) return values[i];
    throw ContractError("topology " + topology_to_json(t) + " is not in the benchmark table");
}

BenchmarkTable enumerate_benchmark(const NetworkCase& c, const LoadProfile& load,
                                   const std::vector<BranchId>& candidate_lines, std::size_t k,
                                   const SolverConfig& config) {
    return enumerate_benchmarks(c, {load}, candidate_lines, k, 1, config).front();
}

std::vector<BenchmarkTable> enumerate_benchmarks(const NetworkCase& c, const std::vector<LoadProfile>& loads,
                                                 const std::vector<BranchId>& candidate_lines, std::size_t k,
                                                 int jobs, const SolverConfig& config) {
    const std::vector<Topology> topos = enumerate_budget_set(c, candidate_lines, k, false).topologies;
    std::vector<BenchmarkTable> out(loads.size());
    for (auto& t : out) {
        t.topologies = topos;
        t.values.assign(topos.size(), 0.0);
    }
    detail::parallel_for(topos.size(), jobs, [&](std::size_t t) {
        ShedEvaluator ev(c, config);
        for (std::size_t p = 0; p < loads.size(); ++p) out[p].values[t] = ev.shed(topos[t], loads[p]);
    });
    for (auto& t : out) {
        t.best = 0;
        for (std::size_t i = 1; i < t.values.size(); ++i)
            if (t.values[i] > t.values[t.best]) t.best = i;
    }
    return out;
}

}  // namespace awls
