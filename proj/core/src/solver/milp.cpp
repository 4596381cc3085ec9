#include "awls/solver/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "awls/errors.hpp"

namespace awls {
namespace {

constexpr double kIntTol = 1e-6;

struct Node {
    double bound;  // in "larger is better" orientation
    long seq;
    std::vector<std::int8_t> fix;  // per binary: -1 free, 0, 1
    Basis basis;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.seq < b.seq;
    }
};

class Pool {
public:
    Pool(std::size_t k, std::vector<VarId> key) : k_(k), key_(std::move(key)) {}

    void offer(double score, double objective, const std::vector<double>& x) {
        std::vector<std::int8_t> key;
        key.reserve(key_.size());
        for (VarId v : key_) key.push_back(static_cast<std::int8_t>(std::lround(x[v])));
        for (Entry& e : entries_) {
            if (e.key != key) continue;
            if (score > e.score) {
                e.score = score;
                e.entry = {objective, x};
                sort();
            }
            return;
        }
        entries_.push_back({score, std::move(key), {objective, x}});
        sort();
        if (entries_.size() > k_) entries_.pop_back();
    }

    bool full() const { return entries_.size() >= k_; }
    double worst_score() const { return entries_.back().score; }

    std::vector<PoolEntry> entries() const {
        std::vector<PoolEntry> out;
        for (const Entry& e : entries_) out.push_back(e.entry);
        return out;
    }

private:
    struct Entry {
        double score;
        std::vector<std::int8_t> key;
        PoolEntry entry;
    };
    void sort() {
        std::stable_sort(entries_.begin(), entries_.end(),
                         [](const Entry& a, const Entry& b) { return a.score > b.score; });
    }
    std::size_t k_;
    std::vector<VarId> key_;
    std::vector<Entry> entries_;
};

// Activity-based bound propagation over the linear rows. Continuous bounds
// are tightened internally only; the caller sees binary fixings.
class Propagator {
public:
    explicit Propagator(const ConstraintSystem& s) : n_(static_cast<int>(s.num_variables())) {
        lo0_.resize(n_);
        up0_.resize(n_);
        binary_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            lo0_[j] = s.variables()[j].lower;
            up0_[j] = s.variables()[j].upper;
            binary_[j] = s.variables()[j].type == VarType::Binary;
        }
        std::vector<std::vector<int>> by_var(n_);
        start_.push_back(0);
        for (const Row& r : s.rows()) {
            const int id = static_cast<int>(rlo_.size());
            for (const Term& t : r.terms) {
                if (t.coef == 0.0) continue;
                var_.push_back(t.var);
                coef_.push_back(t.coef);
                by_var[t.var].push_back(id);
            }
            start_.push_back(static_cast<int>(var_.size()));
            rlo_.push_back(r.lower);
            rup_.push_back(r.upper);
        }
        vstart_.push_back(0);
        for (const auto& rows : by_var) {
            vrows_.insert(vrows_.end(), rows.begin(), rows.end());
            vstart_.push_back(static_cast<int>(vrows_.size()));
        }
    }

    // fix: per binary in `bins` order, -1 free. Returns false on a provably
    // infeasible node; otherwise fills in newly implied binary values.
    bool run(const std::vector<VarId>& bins, std::vector<std::int8_t>& fix) {
        lo_ = lo0_;
        up_ = up0_;
        std::vector<char> queued(rlo_.size(), 0);
        std::vector<int> queue;
        auto touch = [&](int v) {
            for (int e = vstart_[v]; e < vstart_[v + 1]; ++e)
                if (!queued[vrows_[e]]) {
                    queued[vrows_[e]] = 1;
                    queue.push_back(vrows_[e]);
                }
        };
        for (std::size_t i = 0; i < bins.size(); ++i)
            if (fix[i] >= 0) {
                lo_[bins[i]] = up_[bins[i]] = fix[i];
                touch(bins[i]);
            }
        std::size_t head = 0;
        const std::size_t budget = 20 * rlo_.size() + 1000;
        while (head < queue.size() && head < budget) {
            const int r = queue[head++];
            queued[r] = 0;
            if (!row(r, touch)) return false;
        }
        for (std::size_t i = 0; i < bins.size(); ++i)
            if (fix[i] < 0 && lo_[bins[i]] == up_[bins[i]]) fix[i] = static_cast<std::int8_t>(lo_[bins[i]]);
        return true;
    }

private:
    template <class Touch>
    bool row(int r, Touch& touch) {
        double mn = 0.0, mx = 0.0;
        int mn_inf = 0, mx_inf = 0;
        for (int e = start_[r]; e < start_[r + 1]; ++e) {
            const double a = coef_[e];
            const double l = lo_[var_[e]], u = up_[var_[e]];
            const double cmin = a > 0 ? a * l : a * u;
            const double cmax = a > 0 ? a * u : a * l;
            if (std::isfinite(cmin)) mn += cmin; else ++mn_inf;
            if (std::isfinite(cmax)) mx += cmax; else ++mx_inf;
        }
        const double L = rlo_[r], U = rup_[r];
        const double slack = 1e-6 * (1.0 + std::max(std::abs(mn), std::abs(mx)));
        if (mn_inf == 0 && mn > U + slack) return false;
        if (mx_inf == 0 && mx < L - slack) return false;
        for (int e = start_[r]; e < start_[r + 1]; ++e) {
            const int v = var_[e];
            const double a = coef_[e];
            const double l = lo_[v], u = up_[v];
            const double cmin = a > 0 ? a * l : a * u;
            const double cmax = a > 0 ? a * u : a * l;
            double nl = -kInf, nu = kInf;
            // a x <= U - (rest of min activity)
            if (std::isfinite(U)) {
                const bool own = !std::isfinite(cmin);
                if (mn_inf - (own ? 1 : 0) == 0) {
                    const double rest = own ? mn : mn - cmin;
                    const double b = (U - rest + slack) / a;
                    if (a > 0) nu = b; else nl = b;
                }
            }
            if (std::isfinite(L)) {
                const bool own = !std::isfinite(cmax);
                if (mx_inf - (own ? 1 : 0) == 0) {
                    const double rest = own ? mx : mx - cmax;
                    const double b = (L - rest - slack) / a;
                    if (a > 0) nl = std::max(nl, b); else nu = std::min(nu, b);
                }
            }
            if (binary_[v]) {
                nl = nl > 1e-6 ? 1.0 : 0.0;
                nu = nu < 1.0 - 1e-6 ? 0.0 : 1.0;
            }
            bool changed = false;
            const double step = 1e-6 * (1.0 + std::abs(u - l) + std::abs(l));
            if (nl > l + step || (binary_[v] && nl > l)) {
                lo_[v] = nl;
                changed = true;
            }
            if (nu < u - step || (binary_[v] && nu < u)) {
                up_[v] = nu;
                changed = true;
            }
            if (lo_[v] > up_[v] + 1e-6 * (1.0 + std::abs(lo_[v]))) return false;
            if (lo_[v] > up_[v]) lo_[v] = up_[v];
            if (changed) touch(v);
        }
        return true;
    }

    int n_;
    std::vector<double> lo0_, up0_, lo_, up_;
    std::vector<char> binary_;
    std::vector<int> start_, var_;
    std::vector<double> coef_, rlo_, rup_;
    std::vector<int> vstart_, vrows_;
};

}  // namespace

SolveResult solve_milp(const ConstraintSystem& system, const SolverConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        if (config.time_limit <= 0.0) return false;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > config.time_limit;
    };

    const double sgn = system.objective().sense == Sense::Maximize ? 1.0 : -1.0;
    std::vector<VarId> bins;
    for (std::size_t j = 0; j < system.num_variables(); ++j)
        if (system.variables()[j].type == VarType::Binary) bins.push_back(static_cast<VarId>(j));
    std::vector<double> blo, bhi;
    for (VarId b : bins) {
        blo.push_back(std::max(0.0, std::ceil(system.variable(b).lower - kIntTol)));
        bhi.push_back(std::min(1.0, std::floor(system.variable(b).upper + kIntTol)));
    }
    std::vector<VarId> key = config.pool_key.empty() ? bins : config.pool_key;
    Pool pool(config.pool_size, key);
    // binaries outside the pool key cannot produce new pool entries
    std::vector<char> in_key(bins.size(), config.pool_key.empty() ? 1 : 0);
    for (VarId v : config.pool_key)
        for (std::size_t i = 0; i < bins.size(); ++i)
            if (bins[i] == v) in_key[i] = 1;

    LpSolver lp(system, config);
    Propagator propagator(system);
    SolveResult result;
    double incumbent = -kInf;
    bool complete = true;
    bool any_leaf = false;
    double global_bound = kInf;
    double lost_bound = -kInf;  // bounds of nodes dropped on solver trouble

    auto gap_allows = [&](double bound) {
        const double tol = std::max(config.abs_gap_tol, config.gap_tol * std::abs(incumbent));
        return bound > incumbent + tol;
    };
    auto prune_level = [&](double bound) {
        if (config.pool_top_k && !pool.full()) return false;
        if (config.pool_top_k) return bound <= pool.worst_score() + config.abs_gap_tol && !gap_allows(bound);
        return !gap_allows(bound);
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long seq = 0;
    open.push({kInf, seq++, std::vector<std::int8_t>(bins.size(), -1), lp.basis()});

    while (!open.empty()) {
        const double top = open.top().bound;
        global_bound = std::min(global_bound, std::max({top, incumbent, lost_bound}));
        result.bound_trace.push_back(sgn * global_bound);
        if (std::isfinite(incumbent) && prune_level(top)) break;
        if (result.nodes >= config.node_limit || out_of_time()) {
            complete = false;
            break;
        }
        Node node = open.top();
        open.pop();
        if (config.propagate && !propagator.run(bins, node.fix)) {
            ++result.nodes;
            continue;
        }

        for (std::size_t i = 0; i < bins.size(); ++i) {
            if (node.fix[i] < 0) lp.set_var_bounds(bins[i], blo[i], bhi[i]);
            else lp.set_var_bounds(bins[i], node.fix[i], node.fix[i]);
        }
        lp.set_basis(node.basis);
        SolveResult rel = lp.solve();
        ++result.nodes;
        result.iterations += rel.iterations;
        result.cuts += rel.cuts;
        if (rel.status == SolveStatus::Infeasible) continue;
        if (rel.status == SolveStatus::Unbounded) {
            if (result.nodes == 1) {
                result.status = SolveStatus::Unbounded;
                return result;
            }
            complete = false;
            lost_bound = std::max(lost_bound, node.bound);
            continue;
        }
        if (rel.status != SolveStatus::Optimal) {
            complete = false;
            lost_bound = std::max(lost_bound, node.bound);
            continue;
        }
        const double score = std::min(sgn * rel.objective, node.bound);
        if (std::isfinite(incumbent) && prune_level(score)) continue;

        int pick = -1;
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const double v = rel.assignment[bins[i]];
            if (std::abs(v - std::round(v)) <= kIntTol) continue;
            if (pick < 0) {
                pick = static_cast<int>(i);
                continue;
            }
            const int pi = system.variable(bins[i]).priority;
            const int pp = system.variable(bins[pick]).priority;
            const double fi = std::abs(v - 0.5);
            const double fp = std::abs(rel.assignment[bins[pick]] - 0.5);
            if (pi > pp || (pi == pp && fi < fp - 1e-12)) pick = static_cast<int>(i);
        }

        if (pick < 0) {
            const Basis here = lp.basis();
            for (std::size_t i = 0; i < bins.size(); ++i) {
                const double v = std::round(rel.assignment[bins[i]]);
                lp.set_var_bounds(bins[i], v, v);
            }
            SolveResult leaf = lp.solve();
            result.iterations += leaf.iterations;
            if (leaf.status != SolveStatus::Optimal) {
                lp.set_basis(here);
                continue;
            }
            for (VarId b : bins) leaf.assignment[b] = std::round(leaf.assignment[b]);
            const double ls = sgn * leaf.objective;
            any_leaf = true;
            pool.offer(ls, leaf.objective, leaf.assignment);
            if (ls > incumbent) {
                incumbent = ls;
                result.objective = leaf.objective;
                result.assignment = leaf.assignment;
            }
            if (!config.pool_top_k) continue;
            // Other integer points may hide in this subtree; keep splitting on free binaries.
            for (std::size_t i = 0; i < bins.size(); ++i)
                if (node.fix[i] < 0 && blo[i] < bhi[i] && in_key[i] &&
                    (pick < 0 || system.variable(bins[i]).priority > system.variable(bins[pick]).priority))
                    pick = static_cast<int>(i);
            if (pick < 0) continue;
            lp.set_basis(here);
        }

        const Basis here = lp.basis();
        const double v = rel.assignment[bins[pick]];
        const std::int8_t near = v >= 0.5 ? 1 : 0;
        for (std::int8_t val : {static_cast<std::int8_t>(1 - near), near}) {
            Node child{score, seq++, node.fix, here};
            child.fix[static_cast<std::size_t>(pick)] = val;
            open.push(std::move(child));
        }
    }

    double final_bound = std::max(incumbent, lost_bound);
    if (!open.empty()) final_bound = std::max(final_bound, open.top().bound);
    global_bound = std::min(global_bound, final_bound);
    result.bound_trace.push_back(sgn * global_bound);
    result.pool = pool.entries();
    result.best_bound = sgn * global_bound;
    if (!any_leaf) {
        result.status = complete ? SolveStatus::Infeasible : SolveStatus::IterationLimit;
        return result;
    }
    result.status = complete ? SolveStatus::Optimal : SolveStatus::IterationLimit;
    return result;
}

void EmbeddedMilpBackend::load(const ConstraintSystem& system) {
    system.validate();
    system_ = std::make_unique<ConstraintSystem>(system);
}

SolveResult EmbeddedMilpBackend::solve(const SolverConfig& config) {
    if (!system_) throw ContractError("backend has no system loaded");
    last_ = solve_milp(*system_, config);
    return last_;
}

std::unique_ptr<MilpBackend> make_milp_backend(std::string_view name) {
    if (name == "embedded") return std::make_unique<EmbeddedMilpBackend>();
    throw ContractError("unknown MILP backend: " + std::string(name));
}

}  // namespace awls
