#include "awls/pipeline/critical_lines.hpp"

#include <algorithm>
#include <numeric>

#include "awls/errors.hpp"
#include "awls/grid/topology.hpp"
#include "awls/pipeline/benchmark.hpp"

namespace awls {

namespace {

Topology switched_off(std::size_t nb, const std::vector<std::size_t>& off) {
    Topology t = Topology::all_on(nb);
    for (std::size_t i : off) t.status[i] = 0;
    return t;
}

// every subset of `chosen` with at most `depth` members, plus `line`, keeps the grid whole
bool survives(const NetworkCase& c, const std::vector<std::size_t>& chosen, std::size_t line, std::size_t depth) {
    std::vector<std::size_t> off{line};
    auto rec = [&](auto&& self, std::size_t start) -> bool {
        if (!is_connected(c, switched_off(c.num_branches(), off))) return false;
        if (off.size() > depth) return true;
        for (std::size_t i = start; i < chosen.size(); ++i) {
            off.push_back(chosen[i]);
            const bool ok = self(self, i + 1);
            off.pop_back();
            if (!ok) return false;
        }
        return true;
    };
    return rec(rec, 0);
}

}  // namespace

CriticalLines select_critical_lines(const NetworkCase& c, const LoadProfile& load, const CriticalLineOptions& opt) {
    if (opt.count == 0) throw ContractError("critical line count must be positive");
    const std::size_t nb = c.num_branches();
    std::vector<BranchId> all;
    for (const Branch& b : c.branches()) all.push_back(b.id);
    const BenchmarkTable table = enumerate_benchmarks(c, {load}, all, 1, opt.jobs, opt.solver).front();

    std::vector<std::size_t> candidates;
    std::vector<double> shed(nb, 0.0);
    for (std::size_t i = 0; i < nb; ++i) {
        const Topology t = switched_off(nb, {i});
        if (!is_connected(c, t)) continue;
        shed[i] = table.value_of(t);
        candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return shed[a] > shed[b]; });

    std::vector<std::size_t> chosen;
    for (std::size_t i : candidates) {
        if (chosen.size() == opt.count) break;
        if (survives(c, chosen, i, opt.depth)) chosen.push_back(i);
    }
    CriticalLines out;
    for (std::size_t i : chosen) {
        out.lines.push_back(c.branches()[i].id);
        out.single_shed.push_back(shed[i]);
    }
    return out;
}

}  // namespace awls
