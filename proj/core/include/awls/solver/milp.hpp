#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "awls/solver/lp.hpp"

namespace awls {

/// Best-first branch-and-bound over the binaries of `system`. Branches on the
/// most fractional binary among those with the highest priority, ties by
/// lowest index. Integer leaves are re-solved with every binary fixed so the
/// reported assignments are exact vertices.
SolveResult solve_milp(const ConstraintSystem& system, const SolverConfig& config = {});

/// Boundary for swapping in an external MILP engine. The embedded
/// branch-and-bound is the reference implementation.
class MilpBackend {
public:
    virtual ~MilpBackend() = default;
    virtual std::string name() const = 0;
    virtual void load(const ConstraintSystem& system) = 0;
    virtual SolveResult solve(const SolverConfig& config) = 0;
    /// Pool of the last solve, best first.
    virtual const std::vector<PoolEntry>& pool() const = 0;
};

class EmbeddedMilpBackend final : public MilpBackend {
public:
    std::string name() const override { return "embedded"; }
    void load(const ConstraintSystem& system) override;
    SolveResult solve(const SolverConfig& config) override;
    const std::vector<PoolEntry>& pool() const override { return last_.pool; }

private:
    std::unique_ptr<ConstraintSystem> system_;
    SolveResult last_;
};

/// Returns the backend registered under `name`; only "embedded" ships.
std::unique_ptr<MilpBackend> make_milp_backend(std::string_view name);

}  // namespace awls
