#include "awls/pipeline/awls_solve.hpp"

#include <chrono>
#include <cmath>

#include "awls/errors.hpp"

namespace awls {

InputBox surrogate_box(const NetworkCase& c, const std::vector<BranchId>& candidate_lines, const LoadProfile& load) {
    load.validate(c);
    InputBox box;
    box.lower.assign(c.num_branches(), 1.0);
    box.upper.assign(c.num_branches(), 1.0);
    for (BranchId id : candidate_lines) box.lower[c.branch_index(id)] = 0.0;
    for (const auto* v : {&load.pd, &load.qd}) {
        box.lower.insert(box.lower.end(), v->begin(), v->end());
        box.upper.insert(box.upper.end(), v->begin(), v->end());
    }
    return box;
}

std::vector<Operand> surrogate_operands(const std::vector<Operand>& x, const LoadProfile& load) {
    std::vector<Operand> in = x;
    for (double v : load.pd) in.push_back(Operand::fixed(v));
    for (double v : load.qd) in.push_back(Operand::fixed(v));
    return in;
}

SurrogateEmitter nn_emitter(const ReluNet& net, const ReluBounds& bounds, const LoadProfile& load) {
    return [&net, &bounds, load](ConstraintSystem& s, const std::vector<Operand>& x) {
        return encode_milp(s, net, bounds, surrogate_operands(x, load)).output;
    };
}

namespace {

using Clock = std::chrono::steady_clock;

void check_net(const NetworkCase& c, const ReluNet& net) {
    if (net.spec().num_lines != c.num_branches() || net.spec().num_buses != c.num_buses())
        throw ContractError("surrogate input layout does not match the case");
}

ReluBounds bounds_or_compute(const NetworkCase& c, const LoadProfile& load, const ReluNet& net,
                             const ReluBounds& bounds, const std::vector<BranchId>& cand, double clamp) {
    if (!bounds.layers.empty()) return bounds;
    return compute_bounds(net, surrogate_box(c, cand, load), clamp);
}

Topology topology_of(const NetworkCase& c, const std::vector<VarId>& xvar, const std::vector<double>& a) {
    Topology t = Topology::all_on(c.num_branches());
    for (std::size_t l = 0; l < xvar.size(); ++l)
        if (xvar[l] >= 0) t.status[l] = std::lround(a[static_cast<std::size_t>(xvar[l])]) ? 1 : 0;
    return t;
}

void fill(AwlsSolution& out, const NetworkCase& c, const std::vector<VarId>& xvar, const SolveResult& r,
          VarId eta) {
    out.status = r.status;
    out.nodes = r.nodes;
    if (r.assignment.empty()) return;
    out.objective = r.objective;
    out.topology = topology_of(c, xvar, r.assignment);
    out.predicted = r.assignment[static_cast<std::size_t>(eta)];
    for (const PoolEntry& e : r.pool) out.pool.push_back(topology_of(c, xvar, e.assignment));
    if (out.pool.empty() || out.pool.front() != out.topology) out.pool.insert(out.pool.begin(), out.topology);
}

SolverConfig pool_config(const AwlsConfig& config, const std::vector<VarId>& xvar) {
    SolverConfig sc = config.solver;
    sc.pool_top_k = true;
    sc.pool_key.clear();
    for (VarId v : xvar)
        if (v >= 0) sc.pool_key.push_back(v);
    return sc;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

AwlsSolution solve_direct_nn(const NetworkCase& c, const LoadProfile& load, const ReluNet& net,
                             const ReluBounds& bounds, const std::vector<BranchId>& candidate_lines, std::size_t k,
                             const AwlsConfig& config) {
    const auto t0 = Clock::now();
    check_net(c, net);
    const ReluBounds b = bounds_or_compute(c, load, net, bounds, candidate_lines, config.big_m);
    ConstraintSystem s;
    std::vector<VarId> xvar(c.num_branches(), -1);
    std::vector<Operand> x(c.num_branches(), Operand::fixed(1.0));
    LinExpr budget;
    for (BranchId id : candidate_lines) {
        const std::size_t l = c.branch_index(id);
        if (xvar[l] >= 0) throw ContractError("duplicate candidate line " + std::to_string(id));
        xvar[l] = s.add_binary("x_" + std::to_string(id), 0);
        x[l] = Operand::variable(xvar[l]);
        budget.add(xvar[l], 1.0);
    }
    if (!candidate_lines.empty())
        s.add_ge(budget, static_cast<double>(candidate_lines.size()) - static_cast<double>(k), RowFamily::Budget,
                 "budget");
    const NnEncoding enc = encode_milp(s, net, b, surrogate_operands(x, load));
    s.set_objective(Sense::Maximize, LinExpr::var(enc.output));

    const SolveResult r = solve_milp(s, pool_config(config, xvar));
    AwlsSolution out;
    fill(out, c, xvar, r, enc.output);
    out.relu_binaries = enc.binaries;
    out.seconds = seconds_since(t0);
    return out;
}

AwlsSolution solve_pcnn(const NetworkCase& c, const LoadProfile& load, const ReluNet& net, const ReluBounds& bounds,
                        const std::vector<BranchId>& candidate_lines, std::size_t k, double lambda,
                        const AwlsConfig& config) {
    const auto t0 = Clock::now();
    if (!(lambda > 0.0)) throw ContractError("penalty lambda must be positive");
    check_net(c, net);
    const ReluBounds b = bounds_or_compute(c, load, net, bounds, candidate_lines, config.big_m);
    const double s_bar = config.s_bar > 0.0 ? config.s_bar : load.total();
    std::size_t relu_bins = 0;
    SurrogateEmitter emit = [&](ConstraintSystem& s, const std::vector<Operand>& x) {
        const NnEncoding enc = encode_milp(s, net, b, surrogate_operands(x, load));
        relu_bins = enc.binaries;
        return enc.output;
    };
    const OvfModel m = build_ovf_model(c, load, candidate_lines, k, emit, lambda, s_bar);
    const SolveResult r = solve_milp(m.system, pool_config(config, m.x));
    AwlsSolution out;
    fill(out, c, m.x, r, m.eta_hat);
    if (!r.assignment.empty()) {
        out.slack = r.assignment[static_cast<std::size_t>(m.slack)];
        double shed = 0.0;
        for (const BusVars& bv : m.vars.bus) shed += r.assignment[bv.dp] + r.assignment[bv.dq];
        out.model_shed = shed;
    }
    out.relu_binaries = relu_bins;
    out.seconds = seconds_since(t0);
    return out;
}

Refinement refine_pool(const NetworkCase& c, const LoadProfile& load, const std::vector<Topology>& pool,
                       ShedEvaluator& evaluator) {
    if (pool.empty()) throw ContractError("cannot refine an empty pool");
    Refinement r;
    for (const Topology& t : pool) {
        if (t.size() != c.num_branches()) throw ContractError("pool topology length does not match the case");
        r.values.push_back(evaluator.shed(t, load));
    }
    for (std::size_t i = 1; i < r.values.size(); ++i)
        if (r.values[i] > r.values[r.index]) r.index = i;
    r.topology = pool[r.index];
    r.shed = r.values[r.index];
    return r;
}

Refinement refine_pool(const NetworkCase& c, const LoadProfile& load, const std::vector<Topology>& pool) {
    ShedEvaluator ev(c);
    return refine_pool(c, load, pool, ev);
}

}  // namespace awls
