#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "awls/grid/load_profile.hpp"
#include "awls/grid/network_case.hpp"
#include "awls/grid/topology.hpp"
#include "awls/solver/lp.hpp"

namespace awls {

struct ShedResult {
    SolveStatus status = SolveStatus::Infeasible;
    double shed = 0.0;
    std::vector<double> bus_shed;  // dp + dq per bus
    long iterations = 0;
};

/// A lower-level solve that should be impossible (infeasible or unbounded)
/// failed; the message names the dump written to the temp directory.
class LowerLevelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Relaxed lower-level solves with the LP kept warm across load profiles of
/// the same topology; switching topology rebuilds the model.
class ShedEvaluator {
public:
    explicit ShedEvaluator(const NetworkCase& c, SolverConfig config = {});
    ~ShedEvaluator();
    ShedEvaluator(ShedEvaluator&&) noexcept;
    ShedEvaluator& operator=(ShedEvaluator&&) noexcept;

    ShedResult evaluate(const Topology& topo, const LoadProfile& load);
    /// Like evaluate, but returns only the total shed and throws
    /// LowerLevelError unless the solve is optimal.
    double shed(const Topology& topo, const LoadProfile& load);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace awls
