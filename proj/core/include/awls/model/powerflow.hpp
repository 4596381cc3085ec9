#pragma once

#include <functional>
#include <numbers>
#include <vector>

#include "awls/grid/load_profile.hpp"
#include "awls/grid/network_case.hpp"
#include "awls/grid/topology.hpp"
#include "awls/model/constraint_system.hpp"

namespace awls {

/// Per-branch constants of the on/off cosine and sine relaxations.
struct QcConstants {
    double theta_bar = 0.0;  // max(|theta_min|, |theta_max|)
    double kappa = 0.5;      // (1 - cos theta_bar) / theta_bar^2, limit 1/2 at 0
    double c = 1.0;          // cos(theta_bar / 2)
    double s = 0.0;          // sin(theta_bar / 2)
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double m_theta = std::numbers::pi;
    double m_c = std::numbers::pi;

    static QcConstants for_branch(const Branch& br, double m_theta = std::numbers::pi);
};

struct BusVars {
    VarId v, w, pg, qg, dp, dq;
};

struct BranchVars {
    VarId theta, wx, wij, cx, sx, wc, ws, p, q;
};

struct LiftedVars {
    std::vector<BusVars> bus;
    std::vector<BranchVars> branch;
};

/// Declares bus and branch variables with bounds implied by the case and the
/// load (shed bounds 0..demand). Throws ContractError when a generator cannot
/// produce zero active power.
LiftedVars add_lifted_vars(ConstraintSystem& s, const NetworkCase& c, const LoadProfile& load);

/// Emits the envelope rows for every bus and branch: voltage-square
/// envelope, on/off links for w^x, cosine and sine relaxations, angle on/off
/// limits, McCormick products, switched bounds and the linear flow
/// definitions. `x` holds one operand per branch (variable or fixed 0/1).
void build_qc_envelopes(ConstraintSystem& s, const NetworkCase& c, const LiftedVars& vars,
                        const std::vector<QcConstants>& consts, const std::vector<Operand>& x);

/// Nodal balances and thermal disks. Returns the balance row ids (P then Q per bus).
struct BalanceRows {
    std::vector<RowId> p;
    std::vector<RowId> q;
};
BalanceRows add_balances_and_limits(ConstraintSystem& s, const NetworkCase& c, const LoadProfile& load,
                                    const LiftedVars& vars);

/// Builds every QC row family with the given line-status operands.
BalanceRows build_physics(ConstraintSystem& s, const NetworkCase& c, const LoadProfile& load, const LiftedVars& vars,
                          const std::vector<Operand>& x);

struct LowerLevelModel {
    ConstraintSystem system;
    LiftedVars vars;
    BalanceRows balance;
};

/// Minimum total shed for a fixed topology over the relaxed physics. Only the
/// relaxed model is available; relaxation=false throws ContractError.
LowerLevelModel build_lower_level(const NetworkCase& c, const LoadProfile& load, const Topology& topo,
                                  bool relaxation = true);

/// Points the shed bounds and balance right-hand sides of a lower-level
/// model (or of an LP engine built from it) at a new load profile.
struct LoadUpdate {
    std::vector<std::pair<VarId, double>> var_upper;  // shed variable, new upper bound
    std::vector<std::pair<RowId, double>> row_rhs;    // balance row, new rhs
};
LoadUpdate load_update(const LowerLevelModel& m, const LoadProfile& load);

/// Adds surrogate rows over the line-status operands; returns the variable
/// holding the predicted value function.
using SurrogateEmitter = std::function<VarId(ConstraintSystem&, const std::vector<Operand>& x)>;

struct OvfModel {
    ConstraintSystem system;
    LiftedVars vars;
    std::vector<VarId> x;  // per branch; -1 when the branch is not a candidate
    VarId eta_hat = -1;
    VarId slack = -1;
    RowId coupling = -1;
};

/// Single-level attacker model: maximize realized shed minus lambda * slack
/// under the budget row, the relaxed physics with binary line statuses and the
/// coupling row sum(shed) <= eta_hat + slack, 0 <= slack <= s_bar.
OvfModel build_ovf_model(const NetworkCase& c, const LoadProfile& load, const std::vector<BranchId>& candidate_lines,
                         std::size_t k, const SurrogateEmitter& surrogate, double lambda, double s_bar);

}  // namespace awls
