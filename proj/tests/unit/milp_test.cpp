#include <gtest/gtest.h>

#include <random>

#include "awls/errors.hpp"
#include "awls/solver/milp.hpp"
#include "milp_oracle.hpp"

namespace awls {
namespace {

SolverConfig exact() {
    SolverConfig cfg;
    cfg.gap_tol = 0.0;
    return cfg;
}

TEST(Milp, KnapsackMatchesExhaustiveEnumeration) {
    const double value[5] = {10, 13, 7, 8, 4};
    const double weight[5] = {5, 7, 4, 5, 2};
    ConstraintSystem s;
    LinExpr obj, cap;
    for (int i = 0; i < 5; ++i) {
        const VarId v = s.add_binary("item" + std::to_string(i));
        obj.add(v, value[i]);
        cap.add(v, weight[i]);
    }
    s.add_le(cap, 13.0, RowFamily::General);
    s.set_objective(Sense::Maximize, obj);

    double best = 0.0;
    for (int mask = 0; mask < 32; ++mask) {
        double w = 0, val = 0;
        for (int i = 0; i < 5; ++i)
            if (mask >> i & 1) {
                w += weight[i];
                val += value[i];
            }
        if (w <= 13.0) best = std::max(best, val);
    }
    const SolveResult r = solve_milp(s, exact());
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_DOUBLE_EQ(r.objective, best);
    EXPECT_NEAR(r.best_bound, best, 1e-9);
}

TEST(Milp, SingleFeasiblePointGivesPoolOfOne) {
    ConstraintSystem s;
    LinExpr sum, obj;
    for (int i = 0; i < 4; ++i) {
        const VarId v = s.add_binary("b" + std::to_string(i));
        sum.add(v, 1.0);
        obj.add(v, i + 1.0);
    }
    s.add_ge(sum, 4.0, RowFamily::General);
    s.set_objective(Sense::Minimize, obj);
    SolverConfig cfg = exact();
    cfg.pool_top_k = true;
    const SolveResult r = solve_milp(s, cfg);
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_EQ(r.pool.size(), 1u);
    EXPECT_DOUBLE_EQ(r.objective, 10.0);
}

TEST(Milp, InfeasibleReported) {
    ConstraintSystem s;
    const VarId a = s.add_binary("a");
    const VarId b = s.add_binary("b");
    s.add_eq(LinExpr::var(a) + LinExpr::var(b), 1.5, RowFamily::General);
    s.set_objective(Sense::Maximize, LinExpr::var(a));
    EXPECT_EQ(solve_milp(s).status, SolveStatus::Infeasible);
}

TEST(Milp, RandomSystemsMatchEnumeration) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const int nb = 4 + trial % 9;
        const int nc = trial % 2 == 0 ? 0 : 3;
        const testing::RandomMilp m = testing::random_milp(rng, nb, nc, 3);
        const auto ref = testing::enumerate_milp(m);
        const ConstraintSystem s = m.system();
        const SolveResult r = solve_milp(s, exact());
        if (!ref) {
            EXPECT_EQ(r.status, SolveStatus::Infeasible) << trial;
            continue;
        }
        ASSERT_EQ(r.status, SolveStatus::Optimal) << trial;
        EXPECT_NEAR(r.objective, *ref, 1e-6) << trial;
        EXPECT_LE(s.max_violation(r.assignment), 1e-6);
    }
}

TEST(Milp, BestBoundIsMonotoneAndPoolFeasible) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const testing::RandomMilp m = testing::random_milp(rng, 14, 2, 4);
        const ConstraintSystem s = m.system();
        SolverConfig cfg = exact();
        cfg.pool_top_k = true;
        const SolveResult r = solve_milp(s, cfg);
        ASSERT_EQ(r.status, SolveStatus::Optimal);
        for (std::size_t i = 1; i < r.bound_trace.size(); ++i)
            EXPECT_LE(r.bound_trace[i], r.bound_trace[i - 1] + 1e-12);
        ASSERT_FALSE(r.pool.empty());
        EXPECT_NEAR(r.pool.front().objective, r.objective, 1e-9);
        for (std::size_t i = 0; i < r.pool.size(); ++i) {
            EXPECT_LE(s.max_violation(r.pool[i].assignment), 1e-6);
            if (i > 0) EXPECT_LE(r.pool[i].objective, r.pool[i - 1].objective + 1e-12);
        }
    }
}

TEST(Milp, TopKPoolHoldsTheKBestAssignments) {
    // pure binary: objective values of all feasible points are enumerable
    std::mt19937_64 rng(5);
    const testing::RandomMilp m = testing::random_milp(rng, 8, 0, 2);
    std::vector<double> values;
    for (unsigned mask = 0; mask < 256; ++mask) {
        bool ok = true;
        double v = 0.0;
        for (std::size_t i = 0; i < m.a.size(); ++i) {
            double act = 0.0;
            for (int j = 0; j < 8; ++j) act += m.a[i][j] * ((mask >> j) & 1U);
            ok = ok && act <= m.rhs[i] + 1e-9;
        }
        for (int j = 0; j < 8; ++j) v += m.c[j] * ((mask >> j) & 1U);
        if (ok) values.push_back(v);
    }
    std::sort(values.rbegin(), values.rend());
    SolverConfig cfg = exact();
    cfg.pool_top_k = true;
    cfg.pool_size = 5;
    const SolveResult r = solve_milp(m.system(), cfg);
    ASSERT_EQ(r.pool.size(), std::min<std::size_t>(5, values.size()));
    for (std::size_t i = 0; i < r.pool.size(); ++i) EXPECT_NEAR(r.pool[i].objective, values[i], 1e-9);
}

TEST(Milp, NodeLimitReportsIterationLimit) {
    std::mt19937_64 rng(3);
    const testing::RandomMilp m = testing::random_milp(rng, 16, 0, 3);
    SolverConfig cfg = exact();
    cfg.node_limit = 2;
    const SolveResult r = solve_milp(m.system(), cfg);
    EXPECT_EQ(r.status, SolveStatus::IterationLimit);
}

TEST(Milp, BackendBoundary) {
    auto backend = make_milp_backend("embedded");
    EXPECT_EQ(backend->name(), "embedded");
    ConstraintSystem s;
    const VarId a = s.add_binary("a");
    s.set_objective(Sense::Maximize, LinExpr::var(a));
    backend->load(s);
    const SolveResult r = backend->solve({});
    EXPECT_DOUBLE_EQ(r.objective, 1.0);
    EXPECT_EQ(backend->pool().size(), 1u);
    EXPECT_THROW(make_milp_backend("gurobi"), ContractError);
}

}  // namespace
}  // namespace awls
