#include "awls/model/powerflow.hpp"

#include <algorithm>
#include <cmath>

#include "awls/errors.hpp"

namespace awls {

QcConstants QcConstants::for_branch(const Branch& br, double m_theta) {
    QcConstants k;
    k.theta_bar = std::max(std::abs(br.theta_min), std::abs(br.theta_max));
    k.m_theta = m_theta;
    const double tb = k.theta_bar;
    k.kappa = tb > 0.0 ? (1.0 - std::cos(tb)) / (tb * tb) : 0.5;
    k.c = std::cos(tb / 2.0);
    k.s = std::sin(tb / 2.0);
    k.alpha = k.s - k.c * tb / 2.0;
    k.beta = k.s + k.c * tb / 2.0;
    k.gamma = k.alpha + std::sin(tb);
    k.m_c = k.c * m_theta;
    return k;
}

namespace {

std::string tag(const char* what, int id) { return std::string(what) + std::to_string(id); }

// [lo, hi] of the product of two intervals
std::pair<double, double> product_range(double al, double au, double bl, double bu) {
    const double c[4] = {al * bl, al * bu, au * bl, au * bu};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

struct Box {
    double lo, hi;
};

// 4-inequality McCormick for z = u * v
void mccormick(ConstraintSystem& s, VarId z, VarId u, Box ub, VarId v, Box vb, const std::string& name) {
    const LinExpr Z = LinExpr::var(z), U = LinExpr::var(u), V = LinExpr::var(v);
    s.add_ge(Z - ub.lo * V - vb.lo * U, -ub.lo * vb.lo, RowFamily::Product, name + "_m1");
    s.add_ge(Z - ub.hi * V - vb.hi * U, -ub.hi * vb.hi, RowFamily::Product, name + "_m2");
    s.add_le(Z - ub.lo * V - vb.hi * U, -ub.lo * vb.hi, RowFamily::Product, name + "_m3");
    s.add_le(Z - ub.hi * V - vb.lo * U, -ub.hi * vb.lo, RowFamily::Product, name + "_m4");
}

Box bounds_of(const ConstraintSystem& s, VarId v) { return {s.variable(v).lower, s.variable(v).upper}; }

}  // namespace

LiftedVars add_lifted_vars(ConstraintSystem& s, const NetworkCase& c, const LoadProfile& load) {
    load.validate(c);
    LiftedVars lv;
    for (std::size_t i = 0; i < c.num_buses(); ++i) {
        const Bus& b = c.buses()[i];
        if (b.pg_min > 0.0 || b.pg_max < 0.0)
            throw ContractError("bus " + std::to_string(b.id) + ": generator bounds must admit zero active output");
        BusVars bv{};
        bv.v = s.add_variable(tag("V_", b.id), b.v_min, b.v_max);
        bv.w = s.add_variable(tag("w_", b.id), b.v_min * b.v_min, b.v_max * b.v_max);
        bv.pg = s.add_variable(tag("PG_", b.id), b.pg_min, b.pg_max);
        bv.qg = s.add_variable(tag("QG_", b.id), b.qg_min, b.qg_max);
        bv.dp = s.add_variable(tag("dP_", b.id), 0.0, load.pd[i]);
        bv.dq = s.add_variable(tag("dQ_", b.id), 0.0, load.qd[i]);
        lv.bus.push_back(bv);
    }
    for (std::size_t l = 0; l < c.num_branches(); ++l) {
        const Branch& br = c.branches()[l];
        const Bus& bi = c.buses()[c.from_index(l)];
        const Bus& bj = c.buses()[c.to_index(l)];
        const QcConstants k = QcConstants::for_branch(br);
        BranchVars v{};
        const double wl = bi.v_min * bj.v_min, wu = bi.v_max * bj.v_max;
        const double sl = std::min(0.0, std::sin(br.theta_min)), su = std::max(0.0, std::sin(br.theta_max));
        const auto [wsl, wsu] = product_range(wl, wu, sl, su);
        v.theta = s.add_variable(tag("theta_", br.id), -k.m_theta, k.m_theta);
        v.wx = s.add_variable(tag("wx_", br.id), 0.0, bi.v_max * bi.v_max);
        v.wij = s.add_variable(tag("wij_", br.id), wl, wu);
        v.cx = s.add_variable(tag("cx_", br.id), 0.0, 1.0);
        v.sx = s.add_variable(tag("sx_", br.id), sl, su);
        v.wc = s.add_variable(tag("wc_", br.id), 0.0, wu);
        v.ws = s.add_variable(tag("ws_", br.id), wsl, wsu);
        v.p = s.add_variable(tag("P_", br.id), -br.s_max, br.s_max);
        v.q = s.add_variable(tag("Q_", br.id), -br.s_max, br.s_max);
        lv.branch.push_back(v);
    }
    return lv;
}

void build_qc_envelopes(ConstraintSystem& s, const NetworkCase& c, const LiftedVars& vars,
                        const std::vector<QcConstants>& consts, const std::vector<Operand>& x) {
    if (x.size() != c.num_branches() || consts.size() != c.num_branches())
        throw ContractError("one line-status operand and one constant set per branch required");

    for (std::size_t i = 0; i < c.num_buses(); ++i) {
        const Bus& b = c.buses()[i];
        const BusVars& bv = vars.bus[i];
        s.add_convex(ConvexRow{SquareRow{bv.v, 1.0, -1.0 * LinExpr::var(bv.w)}, RowFamily::VoltageEnvelope,
                               tag("wsq_", b.id)},
                     8);
        s.add_le(LinExpr::var(bv.w) - (b.v_min + b.v_max) * LinExpr::var(bv.v), -b.v_min * b.v_max,
                 RowFamily::VoltageEnvelope, tag("wsec_", b.id));
    }

    for (std::size_t l = 0; l < c.num_branches(); ++l) {
        const Branch& br = c.branches()[l];
        const Bus& bi = c.buses()[c.from_index(l)];
        const Bus& bj = c.buses()[c.to_index(l)];
        const BusVars& vi = vars.bus[c.from_index(l)];
        const BusVars& vj = vars.bus[c.to_index(l)];
        const BranchVars& v = vars.branch[l];
        const QcConstants& k = consts[l];
        const LinExpr X = x[l].expr();
        const LinExpr one_minus_x = LinExpr(1.0) - X;
        const std::string id = std::to_string(br.id);
        auto V = [](VarId a) { return LinExpr::var(a); };

        // w^x = x * w_i
        const double vl2 = bi.v_min * bi.v_min, vu2 = bi.v_max * bi.v_max;
        s.add_ge(V(v.wx) - V(vi.w) + vu2 * one_minus_x, 0.0, RowFamily::SwitchLink, "wx_lo_" + id);
        s.add_le(V(v.wx) - V(vi.w) + vl2 * one_minus_x, 0.0, RowFamily::SwitchLink, "wx_hi_" + id);
        s.add_ge(V(v.wx) - vl2 * X, 0.0, RowFamily::SwitchLink, "wx_on_lo_" + id);
        s.add_le(V(v.wx) - vu2 * X, 0.0, RowFamily::SwitchLink, "wx_on_hi_" + id);

        // angle on/off limits
        s.add_le(V(v.theta) - br.theta_max * X - k.m_theta * one_minus_x, 0.0, RowFamily::AngleLimit,
                 "th_hi_" + id);
        s.add_ge(V(v.theta) - br.theta_min * X + k.m_theta * one_minus_x, 0.0, RowFamily::AngleLimit,
                 "th_lo_" + id);

        // on/off cosine
        s.add_ge(V(v.cx) - std::cos(k.theta_bar) * X, 0.0, RowFamily::Cosine, "cos_lo_" + id);
        s.add_le(V(v.cx) - X, 0.0, RowFamily::Cosine, "cos_hi_" + id);
        {
            const double km2 = k.kappa * k.m_theta * k.m_theta;
            LinExpr lin = V(v.cx) - X - km2 * one_minus_x;
            std::vector<double> pts;
            const double lo = std::min(br.theta_min, 0.0), hi = std::max(br.theta_max, 0.0);
            for (int t = 0; t < 8; ++t) pts.push_back(hi > lo ? lo + (hi - lo) * t / 7.0 : 0.0);
            s.add_convex(ConvexRow{SquareRow{v.theta, k.kappa, lin}, RowFamily::Cosine, "cos_cap_" + id}, pts);
        }

        // on/off sine
        s.add_ge(V(v.sx) - std::sin(br.theta_min) * X, 0.0, RowFamily::Sine, "sin_lo_" + id);
        s.add_le(V(v.sx) - std::sin(br.theta_max) * X, 0.0, RowFamily::Sine, "sin_hi_" + id);
        if (k.theta_bar > 0.0) {
            for (double sg : {-1.0, 1.0}) {
                const std::string sfx = (sg > 0 ? "p_" : "n_") + id;
                s.add_le(sg * V(v.sx) - sg * k.c * V(v.theta) - k.alpha * X - k.m_c * one_minus_x, 0.0,
                         RowFamily::Sine, "sin_a" + sfx);
                s.add_le(sg * V(v.sx) - k.beta * X, 0.0, RowFamily::Sine, "sin_b" + sfx);
                s.add_le(sg * k.c * V(v.theta) - k.gamma * X - k.m_c * one_minus_x, 0.0, RowFamily::Sine,
                         "sin_g" + sfx);
            }
        }

        // products
        mccormick(s, v.wij, vi.v, {bi.v_min, bi.v_max}, vj.v, {bj.v_min, bj.v_max}, "wij_" + id);
        const Box wb = bounds_of(s, v.wij);
        mccormick(s, v.wc, v.wij, wb, v.cx, bounds_of(s, v.cx), "wc_" + id);
        mccormick(s, v.ws, v.wij, wb, v.sx, bounds_of(s, v.sx), "ws_" + id);

        // switched bounds: with x = 0 the product envelopes alone leave w^s free
        const auto [wsl, wsu] = product_range(wb.lo, wb.hi, std::sin(br.theta_min), std::sin(br.theta_max));
        s.add_ge(V(v.wc) - wb.lo * std::cos(k.theta_bar) * X, 0.0, RowFamily::FlowSwitch, "wc_on_lo_" + id);
        s.add_le(V(v.wc) - wb.hi * X, 0.0, RowFamily::FlowSwitch, "wc_on_hi_" + id);
        s.add_ge(V(v.ws) - wsl * X, 0.0, RowFamily::FlowSwitch, "ws_on_lo_" + id);
        s.add_le(V(v.ws) - wsu * X, 0.0, RowFamily::FlowSwitch, "ws_on_hi_" + id);
        s.add_ge(V(v.p) + br.s_max * X, 0.0, RowFamily::FlowSwitch, "p_on_lo_" + id);
        s.add_le(V(v.p) - br.s_max * X, 0.0, RowFamily::FlowSwitch, "p_on_hi_" + id);
        s.add_ge(V(v.q) + br.s_max * X, 0.0, RowFamily::FlowSwitch, "q_on_lo_" + id);
        s.add_le(V(v.q) - br.s_max * X, 0.0, RowFamily::FlowSwitch, "q_on_hi_" + id);

        // linear flow definitions
        const double a = br.tap;
        s.add_eq(V(v.p) - (br.g / (a * a) + br.g_sh) * V(v.wx) + (br.g / a) * V(v.wc) + (br.b / a) * V(v.ws), 0.0,
                 RowFamily::FlowDefinition, "pdef_" + id);
        s.add_eq(V(v.q) + (br.b / (a * a) + br.b_sh) * V(v.wx) + (br.g / a) * V(v.ws) - (br.b / a) * V(v.wc), 0.0,
                 RowFamily::FlowDefinition, "qdef_" + id);
    }
}

BalanceRows add_balances_and_limits(ConstraintSystem& s, const NetworkCase& c, const LoadProfile& load,
                                    const LiftedVars& vars) {
    std::vector<LinExpr> pe(c.num_buses()), qe(c.num_buses());
    for (std::size_t i = 0; i < c.num_buses(); ++i) {
        pe[i].add(vars.bus[i].pg, 1.0).add(vars.bus[i].dp, 1.0);
        qe[i].add(vars.bus[i].qg, 1.0).add(vars.bus[i].dq, 1.0);
    }
    for (std::size_t l = 0; l < c.num_branches(); ++l) {
        const BranchVars& v = vars.branch[l];
        // single arc: the from-bus sends P_ij, the to-bus receives it
        pe[c.from_index(l)].add(v.p, -1.0);
        pe[c.to_index(l)].add(v.p, 1.0);
        qe[c.from_index(l)].add(v.q, -1.0);
        qe[c.to_index(l)].add(v.q, 1.0);
        const Branch& br = c.branches()[l];
        s.add_convex(ConvexRow{DiskRow{LinExpr::var(v.p), LinExpr::var(v.q), br.s_max}, RowFamily::Thermal,
                               tag("smax_", br.id)},
                     16);
    }
    BalanceRows rows;
    for (std::size_t i = 0; i < c.num_buses(); ++i) {
        const int id = c.buses()[i].id;
        rows.p.push_back(s.add_eq(pe[i], load.pd[i], RowFamily::Balance, tag("pbal_", id)));
        rows.q.push_back(s.add_eq(qe[i], load.qd[i], RowFamily::Balance, tag("qbal_", id)));
    }
    return rows;
}

BalanceRows build_physics(ConstraintSystem& s, const NetworkCase& c, const LoadProfile& load, const LiftedVars& vars,
                          const std::vector<Operand>& x) {
    std::vector<QcConstants> consts;
    for (const Branch& br : c.branches()) consts.push_back(QcConstants::for_branch(br));
    build_qc_envelopes(s, c, vars, consts, x);
    return add_balances_and_limits(s, c, load, vars);
}

LowerLevelModel build_lower_level(const NetworkCase& c, const LoadProfile& load, const Topology& topo,
                                  bool relaxation) {
    if (!relaxation) throw ContractError("only the relaxed lower-level model is implemented");
    if (topo.size() != c.num_branches()) throw ContractError("topology length does not match the branch count");
    LowerLevelModel m;
    m.vars = add_lifted_vars(m.system, c, load);
    std::vector<Operand> x;
    for (std::uint8_t st : topo.status) x.push_back(Operand::fixed(st ? 1.0 : 0.0));
    m.balance = build_physics(m.system, c, load, m.vars, x);
    LinExpr obj;
    for (const BusVars& bv : m.vars.bus) obj.add(bv.dp, 1.0).add(bv.dq, 1.0);
    m.system.set_objective(Sense::Minimize, obj);
    return m;
}

LoadUpdate load_update(const LowerLevelModel& m, const LoadProfile& load) {
    if (load.pd.size() != m.vars.bus.size() || load.qd.size() != m.vars.bus.size())
        throw ContractError("load profile length does not match the model");
    LoadUpdate u;
    for (std::size_t i = 0; i < m.vars.bus.size(); ++i) {
        u.var_upper.emplace_back(m.vars.bus[i].dp, load.pd[i]);
        u.var_upper.emplace_back(m.vars.bus[i].dq, load.qd[i]);
        u.row_rhs.emplace_back(m.balance.p[i], load.pd[i]);
        u.row_rhs.emplace_back(m.balance.q[i], load.qd[i]);
    }
    return u;
}

OvfModel build_ovf_model(const NetworkCase& c, const LoadProfile& load, const std::vector<BranchId>& candidate_lines,
                         std::size_t k, const SurrogateEmitter& surrogate, double lambda, double s_bar) {
    if (!(lambda >= 0.0)) throw ContractError("penalty lambda must be nonnegative");
    if (!(s_bar > 0.0)) throw ContractError("slack cap s_bar must be positive");
    if (!surrogate) throw ContractError("a surrogate emitter is required");
    OvfModel m;
    m.vars = add_lifted_vars(m.system, c, load);
    m.x.assign(c.num_branches(), -1);
    std::vector<Operand> x(c.num_branches(), Operand::fixed(1.0));
    LinExpr budget;
    for (BranchId id : candidate_lines) {
        const std::size_t l = c.branch_index(id);
        if (m.x[l] >= 0) throw ContractError("duplicate candidate line " + std::to_string(id));
        m.x[l] = m.system.add_binary("x_" + std::to_string(id), 0);
        x[l] = Operand::variable(m.x[l]);
        budget.add(m.x[l], 1.0);
    }
    const double need = static_cast<double>(candidate_lines.size()) - static_cast<double>(k);
    if (!candidate_lines.empty()) m.system.add_ge(budget, need, RowFamily::Budget, "budget");
    build_physics(m.system, c, load, m.vars, x);

    m.eta_hat = surrogate(m.system, x);
    m.slack = m.system.add_variable("s_delta", 0.0, s_bar);
    LinExpr shed;
    for (const BusVars& bv : m.vars.bus) shed.add(bv.dp, 1.0).add(bv.dq, 1.0);
    m.coupling = m.system.add_le(shed - LinExpr::var(m.eta_hat) - LinExpr::var(m.slack), 0.0, RowFamily::Coupling,
                                 "coupling");
    m.system.set_objective(Sense::Maximize, shed - lambda * LinExpr::var(m.slack));
    m.system.validate();
    return m;
}

}  // namespace awls
