#include "awls/solver/lp.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "awls/errors.hpp"

namespace awls {

const char* status_name(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration-limit";
    }
    return "?";
}

void SolverConfig::validate() const {
    if (!(feasibility_tol > 0.0) || !(gap_tol >= 0.0) || !(abs_gap_tol > 0.0))
        throw ContractError("solver tolerances must be positive");
    if (pool_size == 0) throw ContractError("pool size must be at least 1");
    if (node_limit <= 0 || iteration_limit <= 0) throw ContractError("solver limits must be positive");
    if (time_limit < 0.0) throw ContractError("time limit must be nonnegative");
    if (!(perturbation >= 0.0)) throw ContractError("perturbation must be nonnegative");
}

namespace {

constexpr double kBig = 1e7;  // artificial box for infinite bounds
constexpr double kPivotTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPrimalTol = 1e-9;
constexpr std::size_t kRefactorEvery = 64;

using SpMat = Eigen::SparseMatrix<double>;

}  // namespace

struct LpSolver::Impl {
    SolverConfig cfg;
    int n = 0;
    std::vector<double> c;  // minimization form
    std::vector<double> cw;  // working costs: c plus the current perturbation
    double c0 = 0.0;
    bool maximize = false;

    // Constraint ids: [0, n) variable bounds, [n, n + m) rows.
    std::vector<double> lo, up;
    std::vector<int> row_start{0};
    std::vector<int> row_var;
    std::vector<double> row_coef;
    std::vector<double> row_norm;
    std::vector<ConvexRow> convex;

    std::vector<int> basis;
    std::vector<std::int8_t> side;
    std::vector<int> pos_of;
    std::vector<double> x;  // by variable
    std::vector<double> y;  // by basis position

    // Base factor: basic bounds fix their variables; the basic rows restricted
    // to the remaining columns form a square matrix M.
    std::vector<int> col_of;
    std::vector<int> fvars;
    std::vector<int> rpos;
    std::vector<int> base;  // basis at the last refactor
    mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    bool factored = false;

    struct Eta {
        int q;
        double aq;
        std::vector<int> idx;
        std::vector<double> val;
    };
    std::vector<Eta> etas;

    long iterations = 0;
    int cuts = 0;

    int num_constraints() const { return static_cast<int>(lo.size()); }
    int num_rows() const { return num_constraints() - n; }

    bool free_sign(int id) const { return lo[id] == up[id]; }

    double side_value(int id, int s) const {
        const double v = s > 0 ? lo[id] : up[id];
        if (std::isfinite(v)) return v;
        return s > 0 ? -kBig : kBig;
    }

    double activity(int id, const std::vector<double>& v) const {
        if (id < n) return v[id];
        const int r = id - n;
        double a = 0.0;
        for (int k = row_start[r]; k < row_start[r + 1]; ++k) a += row_coef[k] * v[row_var[k]];
        return a;
    }

    double norm(int id) const { return id < n ? 1.0 : row_norm[id - n]; }

    void append_row(const std::vector<Term>& terms, double l, double u) {
        double nn = 0.0;
        for (const Term& t : terms) {
            if (t.coef == 0.0) continue;
            row_var.push_back(t.var);
            row_coef.push_back(t.coef);
            nn += t.coef * t.coef;
        }
        row_start.push_back(static_cast<int>(row_var.size()));
        row_norm.push_back(std::max(std::sqrt(nn), 1e-12));
        lo.push_back(l);
        up.push_back(u);
        pos_of.push_back(-1);
    }

    void cold_basis() {
        basis.assign(n, 0);
        side.assign(n, 1);
        std::fill(pos_of.begin(), pos_of.end(), -1);
        for (int j = 0; j < n; ++j) {
            int s;
            if (c[j] > 0.0) s = 1;
            else if (c[j] < 0.0) s = -1;
            else s = std::isfinite(lo[j]) || !std::isfinite(up[j]) ? 1 : -1;
            basis[j] = j;
            side[j] = static_cast<std::int8_t>(s);
            pos_of[j] = j;
        }
        factored = false;
        etas.clear();
    }

    bool refactor() {
        etas.clear();
        base = basis;
        col_of.assign(n, -1);
        fvars.clear();
        rpos.clear();
        std::vector<char> fixed(n, 0);
        for (int p = 0; p < n; ++p) {
            if (basis[p] < n) {
                if (fixed[basis[p]]) return factored = false;
                fixed[basis[p]] = 1;
            } else {
                rpos.push_back(p);
            }
        }
        for (int j = 0; j < n; ++j)
            if (!fixed[j]) {
                col_of[j] = static_cast<int>(fvars.size());
                fvars.push_back(j);
            }
        const int k = static_cast<int>(rpos.size());
        if (k != static_cast<int>(fvars.size())) return factored = false;
        if (k > 0) {
            std::vector<Eigen::Triplet<double>> trip;
            for (int i = 0; i < k; ++i) {
                const int r = basis[rpos[i]] - n;
                for (int e = row_start[r]; e < row_start[r + 1]; ++e)
                    if (col_of[row_var[e]] >= 0) trip.emplace_back(i, col_of[row_var[e]], row_coef[e]);
            }
            SpMat m(k, k);
            m.setFromTriplets(trip.begin(), trip.end());
            m.makeCompressed();
            lu.analyzePattern(m);
            lu.factorize(m);
            if (lu.info() != Eigen::Success) return factored = false;
            // SparseLU accepts some numerically singular matrices; reject tiny pivots.
            const double logdet = lu.logAbsDeterminant();
            if (!std::isfinite(logdet)) return factored = false;
        }
        return factored = true;
    }

    // x = B^{-1} rhs, rhs indexed by position.
    std::vector<double> ftran(std::vector<double> rhs) const {
        for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
            double dot = 0.0;
            for (std::size_t e = 0; e < it->idx.size(); ++e) dot += it->val[e] * rhs[it->idx[e]];
            rhs[it->q] -= (dot - rhs[it->q]) / it->aq;
        }
        std::vector<double> out(n, 0.0);
        for (int p = 0; p < n; ++p)
            if (base[p] < n) out[base[p]] = rhs[p];
        const int k = static_cast<int>(rpos.size());
        if (k > 0) {
            Eigen::VectorXd b(k);
            for (int i = 0; i < k; ++i) {
                const int r = base[rpos[i]] - n;
                double v = rhs[rpos[i]];
                for (int e = row_start[r]; e < row_start[r + 1]; ++e)
                    if (col_of[row_var[e]] < 0) v -= row_coef[e] * out[row_var[e]];
                b[i] = v;
            }
            Eigen::VectorXd z = lu.solve(b);
            for (int i = 0; i < k; ++i) out[fvars[i]] = z[i];
        }
        return out;
    }

    // u = B^{-T} v, v indexed by variable; result by position.
    std::vector<double> btran(const std::vector<double>& v) const {
        std::vector<double> u(n, 0.0);
        const int k = static_cast<int>(rpos.size());
        std::vector<double> acc(v);
        if (k > 0) {
            Eigen::VectorXd b(k);
            for (int i = 0; i < k; ++i) b[i] = v[fvars[i]];
            Eigen::VectorXd z = lu.transpose().solve(b);
            for (int i = 0; i < k; ++i) {
                u[rpos[i]] = z[i];
                const int r = base[rpos[i]] - n;
                for (int e = row_start[r]; e < row_start[r + 1]; ++e) acc[row_var[e]] -= z[i] * row_coef[e];
            }
        }
        for (int p = 0; p < n; ++p)
            if (base[p] < n) u[p] = acc[base[p]];
        for (const Eta& et : etas) {
            const double uq = u[et.q] / et.aq;
            for (std::size_t e = 0; e < et.idx.size(); ++e)
                if (et.idx[e] != et.q) u[et.idx[e]] -= et.val[e] * uq;
            u[et.q] = uq;
        }
        return u;
    }

    std::vector<double> normal(int id) const {
        std::vector<double> v(n, 0.0);
        if (id < n) {
            v[id] = 1.0;
        } else {
            const int r = id - n;
            for (int e = row_start[r]; e < row_start[r + 1]; ++e) v[row_var[e]] += row_coef[e];
        }
        return v;
    }

    void recompute_primal() {
        std::vector<double> rhs(n);
        for (int p = 0; p < n; ++p) rhs[p] = side_value(basis[p], side[p]);
        x = ftran(std::move(rhs));
    }

    void recompute_dual() { y = btran(cw); }

    void ensure_factor() {
        if (factored) return;
        if (!refactor()) {
            cold_basis();
            refactor();
        }
    }

    // Flips sign-violating positions to their opposite side where it exists.
    bool restore_dual_feasibility() {
        bool ok = true;
        for (int p = 0; p < n; ++p) {
            const int id = basis[p];
            if (free_sign(id) || side[p] * y[p] >= -kDualTol) continue;
            const double other = side[p] > 0 ? up[id] : lo[id];
            if (std::isfinite(other)) side[p] = static_cast<std::int8_t>(-side[p]);
            else ok = false;
        }
        return ok;
    }

    bool dual_feasible() const {
        for (int p = 0; p < n; ++p)
            if (!free_sign(basis[p]) && side[p] * y[p] < -kDualTol) return false;
        return true;
    }

    void push_eta(int q, const std::vector<double>& alpha) {
        Eta et{q, alpha[q], {}, {}};
        for (int p = 0; p < n; ++p)
            if (alpha[p] != 0.0) {
                et.idx.push_back(p);
                et.val.push_back(alpha[p]);
            }
        etas.push_back(std::move(et));
    }

    void replace(int q, int id, int s, const std::vector<double>& alpha) {
        pos_of[basis[q]] = -1;
        basis[q] = id;
        side[q] = static_cast<std::int8_t>(s);
        pos_of[id] = q;
        push_eta(q, alpha);
        ++iterations;
        if (etas.size() >= kRefactorEvery) {
            if (!refactor()) {
                cold_basis();
                refactor();
            }
            recompute_dual();
            restore_dual_feasibility();
        }
    }

    SolveStatus dual_phase() {
        bool bland = cfg.degenerate_pivot_limit <= 0;
        int degenerate = 0;
        while (true) {
            if (iterations >= cfg.iteration_limit) return SolveStatus::IterationLimit;
            recompute_primal();
            int r = -1, sr = 0;
            double best = 0.0;
            for (int id = 0; id < num_constraints(); ++id) {
                if (pos_of[id] >= 0) continue;
                const double a = activity(id, x);
                double v;
                int s;
                if (a < lo[id]) {
                    v = lo[id] - a;
                    s = 1;
                } else if (a > up[id]) {
                    v = a - up[id];
                    s = -1;
                } else {
                    continue;
                }
                const double score = v / norm(id);
                if (score <= kPrimalTol) continue;
                if (bland) {
                    r = id;
                    sr = s;
                    break;
                }
                if (score > best) {
                    best = score;
                    r = id;
                    sr = s;
                }
            }
            if (r < 0) return SolveStatus::Optimal;

            const std::vector<double> alpha = btran(normal(r));
            int q = -1;
            double t = 0.0;
            if (!bland) {
                double tmax = kInf;
                for (int p = 0; p < n; ++p) {
                    if (free_sign(basis[p])) continue;
                    const double a = sr * side[p] * alpha[p];
                    if (a <= kPivotTol) continue;
                    tmax = std::min(tmax, (std::max(side[p] * y[p], 0.0) + kDualTol) / a);
                }
                double amax = 0.0;
                for (int p = 0; p < n; ++p) {
                    if (free_sign(basis[p])) continue;
                    const double a = sr * side[p] * alpha[p];
                    if (a <= kPivotTol) continue;
                    const double ratio = std::max(side[p] * y[p], 0.0) / a;
                    if (ratio <= tmax && std::abs(alpha[p]) > amax) {
                        amax = std::abs(alpha[p]);
                        q = p;
                        t = ratio;
                    }
                }
            } else {
                double rmin = kInf;
                for (int p = 0; p < n; ++p) {
                    if (free_sign(basis[p])) continue;
                    const double a = sr * side[p] * alpha[p];
                    if (a <= kPivotTol) continue;
                    const double ratio = std::max(side[p] * y[p], 0.0) / a;
                    if (ratio < rmin - 1e-12 || (ratio <= rmin + 1e-12 && q >= 0 && basis[p] < basis[q])) {
                        rmin = std::min(rmin, ratio);
                        q = p;
                        t = ratio;
                    }
                }
            }
            if (q < 0) return SolveStatus::Infeasible;

            for (int p = 0; p < n; ++p) y[p] -= t * sr * alpha[p];
            y[q] = sr * t;
            degenerate = t <= 1e-12 ? degenerate + 1 : 0;
            if (!bland && degenerate >= cfg.degenerate_pivot_limit) bland = true;
            replace(q, r, sr, alpha);
        }
    }

    SolveStatus primal_phase() {
        bool bland = cfg.degenerate_pivot_limit <= 0;
        int degenerate = 0;
        while (true) {
            if (iterations >= cfg.iteration_limit) return SolveStatus::IterationLimit;
            recompute_primal();
            recompute_dual();
            int q = -1;
            double worst = -kDualTol;
            for (int p = 0; p < n; ++p) {
                if (free_sign(basis[p])) continue;
                const double v = side[p] * y[p];
                if (bland ? (v < -kDualTol && (q < 0 || basis[p] < basis[q])) : v < worst) {
                    worst = v;
                    q = p;
                }
            }
            if (q < 0) return SolveStatus::Optimal;

            std::vector<double> e(n, 0.0);
            e[q] = side[q];
            const std::vector<double> d = ftran(std::move(e));
            const int idq = basis[q];
            double step = kInf;
            int enter = -1, es = 0;
            double erate = 0.0;
            {
                const double other = side[q] > 0 ? up[idq] : lo[idq];
                if (std::isfinite(other)) step = std::abs(other - side_value(idq, side[q]));
            }
            for (int id = 0; id < num_constraints(); ++id) {
                if (pos_of[id] >= 0) continue;
                const double rate = activity(id, d);
                if (std::abs(rate) <= kPivotTol) continue;
                const double a = activity(id, x);
                double s_i;
                int side_i;
                if (rate < 0.0 && std::isfinite(lo[id])) {
                    s_i = std::max(a - lo[id], 0.0) / -rate;
                    side_i = 1;
                } else if (rate > 0.0 && std::isfinite(up[id])) {
                    s_i = std::max(up[id] - a, 0.0) / rate;
                    side_i = -1;
                } else {
                    continue;
                }
                const bool better = bland ? (s_i < step - 1e-12 || (s_i <= step + 1e-12 && enter >= 0 && id < enter))
                                          : (s_i < step - 1e-12 ||
                                             (s_i <= step + 1e-12 && std::abs(rate) > std::abs(erate)));
                if (better) {
                    step = std::min(step, s_i);
                    enter = id;
                    es = side_i;
                    erate = rate;
                }
            }
            if (!std::isfinite(step)) return SolveStatus::Unbounded;
            degenerate = step <= 1e-12 ? degenerate + 1 : 0;
            if (!bland && degenerate >= cfg.degenerate_pivot_limit) bland = true;
            if (enter < 0) {
                side[q] = static_cast<std::int8_t>(-side[q]);
                ++iterations;
                continue;
            }
            replace(q, enter, es, btran(normal(enter)));
        }
    }

    bool separate() {
        bool added = false;
        for (const ConvexRow& cr : convex) {
            if (auto cut = cr.separate(x, cfg.feasibility_tol)) {
                append_row(cut->terms, cut->lower, cut->upper);
                ++cuts;
                added = true;
            }
        }
        return added;
    }

    // Shifts every sign-constrained multiplier strictly inside its feasible
    // side by adding B^T eps to the costs; breaks dual degeneracy.
    void perturb(std::mt19937_64& rng) {
        cw = c;
        if (cfg.perturbation <= 0.0) return;
        double cmax = 1.0;
        for (double v : c) cmax = std::max(cmax, std::abs(v));
        std::uniform_real_distribution<double> u(0.5, 1.5);
        for (int p = 0; p < n; ++p) {
            const int id = basis[p];
            const double r = u(rng);
            if (free_sign(id)) continue;
            const double eps = side[p] * cfg.perturbation * cmax * r;
            if (id < n) {
                cw[id] += eps;
            } else {
                for (int e = row_start[id - n]; e < row_start[id - n + 1]; ++e) cw[row_var[e]] += eps * row_coef[e];
            }
            y[p] += eps;
        }
    }

    // Dual simplex plus cut rounds at the current working costs.
    SolveStatus settle(int& rounds) {
        int flips = 0;
        while (true) {
            SolveStatus st = dual_phase();
            if (st != SolveStatus::Optimal) return st;
            if (!etas.empty() && !refactor()) {
                cold_basis();
                refactor();
                recompute_dual();
                restore_dual_feasibility();
                continue;
            }
            recompute_primal();
            recompute_dual();
            if (!dual_feasible()) {
                if (flips++ < 50 && restore_dual_feasibility()) continue;
                st = primal_phase();
                if (st != SolveStatus::Optimal) return st;
            }
            if (!convex.empty() && separate()) {
                if (++rounds > cfg.max_cut_rounds) return SolveStatus::IterationLimit;
                continue;
            }
            return SolveStatus::Optimal;
        }
    }

    SolveStatus run() {
        std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        cw = c;
        ensure_factor();
        recompute_primal();
        recompute_dual();
        if (!restore_dual_feasibility()) {
            cold_basis();
            ensure_factor();
            recompute_dual();
        }
        int rounds = 0;
        while (true) {
            perturb(rng);
            SolveStatus st = settle(rounds);
            cw = c;
            if (st != SolveStatus::Optimal) return st;
            recompute_dual();
            if (!dual_feasible()) {
                st = primal_phase();
                if (st != SolveStatus::Optimal) return st;
            }
            if (!convex.empty() && separate()) {
                if (++rounds > cfg.max_cut_rounds) return SolveStatus::IterationLimit;
                continue;
            }
            break;
        }
        for (int p = 0; p < n; ++p) {
            const int id = basis[p];
            const double v = side[p] > 0 ? lo[id] : up[id];
            if (!std::isfinite(v) && std::abs(y[p]) > kDualTol) return SolveStatus::Unbounded;
        }
        return SolveStatus::Optimal;
    }
};

LpSolver::LpSolver(const ConstraintSystem& system, SolverConfig config) : impl_(std::make_unique<Impl>()) {
    config.validate();
    system.validate();
    Impl& s = *impl_;
    s.cfg = std::move(config);
    s.n = static_cast<int>(system.num_variables());
    if (s.n == 0) throw ContractError("LP needs at least one variable");
    s.maximize = system.objective().sense == Sense::Maximize;
    const double sign = s.maximize ? -1.0 : 1.0;
    s.c.assign(s.n, 0.0);
    for (const Term& t : system.objective().expr.terms) s.c[t.var] += sign * t.coef;
    s.c0 = system.objective().expr.constant;
    for (const Variable& v : system.variables()) {
        s.lo.push_back(v.type == VarType::Binary ? std::max(v.lower, 0.0) : v.lower);
        s.up.push_back(v.type == VarType::Binary ? std::min(v.upper, 1.0) : v.upper);
    }
    s.pos_of.assign(s.n, -1);
    for (const Row& r : system.rows()) s.append_row(r.terms, r.lower, r.upper);
    s.convex = system.convex_rows();
    s.cold_basis();
}

LpSolver::~LpSolver() = default;
LpSolver::LpSolver(LpSolver&&) noexcept = default;
LpSolver& LpSolver::operator=(LpSolver&&) noexcept = default;

SolveResult LpSolver::solve() {
    Impl& s = *impl_;
    const long it0 = s.iterations;
    const int cuts0 = s.cuts;
    SolveResult res;
    res.status = s.run();
    res.iterations = s.iterations - it0;
    res.cuts = s.cuts - cuts0;
    if (res.status == SolveStatus::Optimal || res.status == SolveStatus::IterationLimit) {
        res.assignment = s.x;
        double obj = s.c0;
        const double sign = s.maximize ? -1.0 : 1.0;
        for (int j = 0; j < s.n; ++j) obj += sign * s.c[j] * s.x[j];
        res.objective = obj;
        res.best_bound = obj;
    }
    return res;
}

void LpSolver::set_var_bounds(VarId v, double lower, double upper) {
    if (v < 0 || v >= impl_->n) throw ContractError("set_var_bounds: unknown variable");
    if (lower > upper) throw ContractError("set_var_bounds: lower > upper");
    impl_->lo[v] = lower;
    impl_->up[v] = upper;
}

void LpSolver::set_row_bounds(RowId r, double lower, double upper) {
    if (r < 0 || r >= impl_->num_rows()) throw ContractError("set_row_bounds: unknown row");
    if (lower > upper) throw ContractError("set_row_bounds: lower > upper");
    impl_->lo[impl_->n + r] = lower;
    impl_->up[impl_->n + r] = upper;
}

double LpSolver::var_lower(VarId v) const { return impl_->lo.at(static_cast<std::size_t>(v)); }
double LpSolver::var_upper(VarId v) const { return impl_->up.at(static_cast<std::size_t>(v)); }

RowId LpSolver::add_row(const Row& row) {
    for (const Term& t : row.terms)
        if (t.var < 0 || t.var >= impl_->n) throw ContractError("add_row: unknown variable");
    impl_->append_row(row.terms, row.lower, row.upper);
    return impl_->num_rows() - 1;
}

std::size_t LpSolver::num_rows() const { return static_cast<std::size_t>(impl_->num_rows()); }

Basis LpSolver::basis() const { return {impl_->basis, impl_->side}; }

void LpSolver::set_basis(const Basis& b) {
    Impl& s = *impl_;
    if (static_cast<int>(b.ids.size()) != s.n || b.sides.size() != b.ids.size())
        throw ContractError("set_basis: size mismatch");
    std::fill(s.pos_of.begin(), s.pos_of.end(), -1);
    for (int p = 0; p < s.n; ++p) {
        const int id = b.ids[p];
        if (id < 0 || id >= s.num_constraints() || s.pos_of[id] >= 0) {
            s.cold_basis();
            return;
        }
        s.pos_of[id] = p;
    }
    s.basis = b.ids;
    s.side = b.sides;
    s.factored = false;
    s.etas.clear();
}

void LpSolver::reset() { impl_->cold_basis(); }

SolveResult solve_lp(const ConstraintSystem& system, const SolverConfig& config) {
    LpSolver lp(system, config);
    return lp.solve();
}

}  // namespace awls
