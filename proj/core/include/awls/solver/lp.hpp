#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "awls/model/constraint_system.hpp"

namespace awls {

enum class SolveStatus : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit };

const char* status_name(SolveStatus s);

struct SolverConfig {
    double feasibility_tol = 1e-6;  // convex-row cut tolerance and reported feasibility
    double gap_tol = 1e-4;          // relative optimality gap for branch-and-bound
    double abs_gap_tol = 1e-9;
    std::size_t pool_size = 10;
    long node_limit = 1'000'000;
    double time_limit = 0.0;  // seconds, 0 = none
    std::uint64_t seed = 0;   // seeds the cost perturbation
    long iteration_limit = 5'000'000;
    int max_cut_rounds = 2000;
    int degenerate_pivot_limit = 1000;  // consecutive degenerate pivots before Bland's rule; 0 = always Bland
    double perturbation = 1e-6;         // relative cost perturbation against dual degeneracy; 0 disables
    /// Branch-and-bound nodes run activity-based bound propagation over the
    /// linear rows and fix the binaries it decides.
    bool propagate = true;
    /// Keep exploring until the pool holds the K best distinct assignments,
    /// instead of only recording leaves met on the way to the optimum.
    bool pool_top_k = false;
    /// Variables whose rounded values identify a pool entry; empty = all binaries.
    std::vector<VarId> pool_key;

    void validate() const;
};

struct PoolEntry {
    double objective = 0.0;
    std::vector<double> assignment;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> assignment;
    double best_bound = 0.0;
    std::vector<PoolEntry> pool;  // best first
    long iterations = 0;
    long nodes = 0;
    int cuts = 0;
    std::vector<double> bound_trace;  // global bound before each node (branch-and-bound only)

    bool optimal() const noexcept { return status == SolveStatus::Optimal; }
};

/// Active-set description of a vertex: one constraint id per position
/// (ids below the variable count are variable bounds, the rest rows) and
/// the side it is held at (+1 lower, -1 upper).
struct Basis {
    std::vector<int> ids;
    std::vector<std::int8_t> sides;
};

/// Reusable LP engine over a fixed variable set. Binaries are relaxed to
/// [0, 1]. Bounds may be changed between solves; the previous basis stays
/// dual feasible, so re-solves are short.
class LpSolver {
public:
    explicit LpSolver(const ConstraintSystem& system, SolverConfig config = {});
    ~LpSolver();
    LpSolver(LpSolver&&) noexcept;
    LpSolver& operator=(LpSolver&&) noexcept;

    SolveResult solve();

    void set_var_bounds(VarId v, double lower, double upper);
    void set_row_bounds(RowId r, double lower, double upper);
    double var_lower(VarId v) const;
    double var_upper(VarId v) const;
    /// Appends a row (cuts live here too); returns its id.
    RowId add_row(const Row& row);
    std::size_t num_rows() const;

    Basis basis() const;
    void set_basis(const Basis& basis);
    /// Drops the current basis and restarts from the bound vertex.
    void reset();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot LP solve including the tangent-cut loop for convex rows.
SolveResult solve_lp(const ConstraintSystem& system, const SolverConfig& config = {});

}  // namespace awls
