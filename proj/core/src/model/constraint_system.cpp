#include "awls/model/constraint_system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "awls/errors.hpp"

namespace awls {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
    for (const Term& t : o.terms) terms.push_back({t.var, -t.coef});
    constant -= o.constant;
    return *this;
}

LinExpr& LinExpr::operator*=(double s) {
    for (Term& t : terms) t.coef *= s;
    constant *= s;
    return *this;
}

double LinExpr::evaluate(std::span<const double> x) const {
    double v = constant;
    for (const Term& t : terms) v += t.coef * x[static_cast<std::size_t>(t.var)];
    return v;
}

void LinExpr::compact() {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> out;
    out.reserve(terms.size());
    for (const Term& t : terms) {
        if (!out.empty() && out.back().var == t.var) out.back().coef += t.coef;
        else out.push_back(t);
    }
    std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
    terms = std::move(out);
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }

const char* family_name(RowFamily f) {
    switch (f) {
    case RowFamily::General: return "general";
    case RowFamily::VoltageEnvelope: return "voltage-envelope";
    case RowFamily::SwitchLink: return "switch-link";
    case RowFamily::Cosine: return "cosine";
    case RowFamily::Sine: return "sine";
    case RowFamily::AngleLimit: return "angle-limit";
    case RowFamily::Product: return "product";
    case RowFamily::FlowDefinition: return "flow-definition";
    case RowFamily::FlowSwitch: return "flow-switch";
    case RowFamily::Thermal: return "thermal";
    case RowFamily::Balance: return "balance";
    case RowFamily::Budget: return "budget";
    case RowFamily::Coupling: return "coupling";
    case RowFamily::Relu: return "relu";
    case RowFamily::Cut: return "cut";
    }
    return "?";
}

double Row::activity(std::span<const double> x) const {
    double a = 0.0;
    for (const Term& t : terms) a += t.coef * x[static_cast<std::size_t>(t.var)];
    return a;
}

double Row::violation(std::span<const double> x) const {
    const double a = activity(x);
    return std::max({0.0, lower - a, a - upper});
}

double ConvexRow::value(std::span<const double> x) const {
    if (const auto* sq = std::get_if<SquareRow>(&shape)) {
        const double v = x[static_cast<std::size_t>(sq->var)];
        return sq->scale * v * v + sq->linear.evaluate(x);
    }
    const auto& d = std::get<DiskRow>(shape);
    return std::hypot(d.p.evaluate(x), d.q.evaluate(x)) - d.radius;
}

Row ConvexRow::square_tangent(double point) const {
    const auto& sq = std::get<SquareRow>(shape);
    // scale*v^2 >= scale*(2 p v - p^2)
    Row r;
    r.family = RowFamily::Cut;
    r.name = name + "_tan";
    r.terms.push_back({sq.var, 2.0 * sq.scale * point});
    r.terms.insert(r.terms.end(), sq.linear.terms.begin(), sq.linear.terms.end());
    r.upper = sq.scale * point * point - sq.linear.constant;
    return r;
}

Row ConvexRow::disk_facet(double phi) const {
    const auto& d = std::get<DiskRow>(shape);
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    Row r;
    r.family = RowFamily::Cut;
    r.name = name + "_facet";
    for (const Term& t : d.p.terms) r.terms.push_back({t.var, cp * t.coef});
    for (const Term& t : d.q.terms) r.terms.push_back({t.var, sp * t.coef});
    r.upper = d.radius - cp * d.p.constant - sp * d.q.constant;
    return r;
}

std::optional<Row> ConvexRow::separate(std::span<const double> x, double tol) const {
    if (value(x) <= tol) return std::nullopt;
    if (const auto* sq = std::get_if<SquareRow>(&shape))
        return square_tangent(x[static_cast<std::size_t>(sq->var)]);
    const auto& d = std::get<DiskRow>(shape);
    return disk_facet(std::atan2(d.q.evaluate(x), d.p.evaluate(x)));
}

VarId ConstraintSystem::add_variable(std::string name, double lower, double upper, VarType type, int priority) {
    if (lower > upper) throw ContractError("variable " + name + " has lower > upper");
    vars_.push_back({std::move(name), lower, upper, type, priority});
    return static_cast<VarId>(vars_.size() - 1);
}

RowId ConstraintSystem::add_row(const LinExpr& expr, double lower, double upper, RowFamily family,
                                std::string name) {
    LinExpr e = expr;
    e.compact();
    Row r;
    r.terms = std::move(e.terms);
    r.lower = lower - e.constant;
    r.upper = upper - e.constant;
    r.family = family;
    r.name = std::move(name);
    for (const Term& t : r.terms)
        if (t.var < 0 || static_cast<std::size_t>(t.var) >= vars_.size())
            throw ContractError("row " + r.name + " references undeclared variable " + std::to_string(t.var));
    rows_.push_back(std::move(r));
    return static_cast<RowId>(rows_.size() - 1);
}

int ConstraintSystem::add_convex(ConvexRow row, int seed_points) {
    if (const auto* sq = std::get_if<SquareRow>(&row.shape)) {
        const Variable& v = variable(sq->var);
        double lo = std::isfinite(v.lower) ? v.lower : -1.0;
        double hi = std::isfinite(v.upper) ? v.upper : 1.0;
        std::vector<double> pts;
        for (int k = 0; k < seed_points; ++k)
            pts.push_back(seed_points == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (seed_points - 1));
        return add_convex(std::move(row), pts);
    }
    for (int k = 0; k < seed_points; ++k) {
        Row r = row.disk_facet(2.0 * std::numbers::pi * k / seed_points);
        r.family = row.family;
        rows_.push_back(std::move(r));
    }
    convex_.push_back(std::move(row));
    return static_cast<int>(convex_.size() - 1);
}

int ConstraintSystem::add_convex(ConvexRow row, std::span<const double> tangent_points) {
    if (!std::holds_alternative<SquareRow>(row.shape))
        throw ContractError("explicit tangent points apply to square rows only");
    if (!(std::get<SquareRow>(row.shape).scale > 0.0)) throw ContractError("square row needs scale > 0");
    for (double p : tangent_points) {
        Row r = row.square_tangent(p);
        r.family = row.family;
        rows_.push_back(std::move(r));
    }
    convex_.push_back(std::move(row));
    return static_cast<int>(convex_.size() - 1);
}

void ConstraintSystem::set_objective(Sense sense, LinExpr expr) {
    expr.compact();
    objective_ = {sense, std::move(expr)};
}

void ConstraintSystem::set_bounds(VarId v, double lower, double upper) {
    if (lower > upper) throw ContractError("set_bounds: lower > upper");
    auto& var = vars_.at(static_cast<std::size_t>(v));
    var.lower = lower;
    var.upper = upper;
}

void ConstraintSystem::set_row_bounds(RowId r, double lower, double upper) {
    auto& row = rows_.at(static_cast<std::size_t>(r));
    row.lower = lower;
    row.upper = upper;
}

std::size_t ConstraintSystem::num_binaries() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) { return v.type == VarType::Binary; }));
}

double ConstraintSystem::max_violation(std::span<const double> x, bool check_integrality) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        worst = std::max({worst, vars_[j].lower - x[j], x[j] - vars_[j].upper});
        if (check_integrality && vars_[j].type == VarType::Binary)
            worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
    }
    for (const Row& r : rows_) worst = std::max(worst, r.violation(x));
    for (const ConvexRow& c : convex_) worst = std::max(worst, c.value(x));
    return worst;
}

void ConstraintSystem::validate() const {
    const auto n = static_cast<VarId>(vars_.size());
    auto check = [&](VarId v, const std::string& where) {
        if (v < 0 || v >= n) throw ContractError(where + " references undeclared variable " + std::to_string(v));
    };
    for (const Row& r : rows_)
        for (const Term& t : r.terms) check(t.var, "row " + r.name);
    for (const ConvexRow& c : convex_) {
        if (const auto* sq = std::get_if<SquareRow>(&c.shape)) {
            check(sq->var, "convex row " + c.name);
            for (const Term& t : sq->linear.terms) check(t.var, "convex row " + c.name);
        } else {
            const auto& d = std::get<DiskRow>(c.shape);
            for (const Term& t : d.p.terms) check(t.var, "convex row " + c.name);
            for (const Term& t : d.q.terms) check(t.var, "convex row " + c.name);
        }
    }
    for (const Term& t : objective_.expr.terms) check(t.var, "objective");
}

namespace {

void write_terms(std::ostream& out, const std::vector<Term>& terms, const ConstraintSystem& s) {
    if (terms.empty()) {
        out << "0";
        return;
    }
    bool first = true;
    for (const Term& t : terms) {
        if (!first || t.coef < 0) out << (t.coef < 0 ? " - " : " + ");
        out << std::abs(t.coef) << ' ' << s.variable(t.var).name;
        first = false;
    }
}

void write_expr(std::ostream& out, const LinExpr& e, const ConstraintSystem& s) {
    write_terms(out, e.terms, s);
    if (e.constant != 0.0) out << (e.constant < 0 ? " - " : " + ") << std::abs(e.constant);
}

}  // namespace

void write_lp(const ConstraintSystem& s, std::ostream& out) {
    out.precision(17);
    out << (s.objective().sense == Sense::Maximize ? "Maximize\n" : "Minimize\n") << " obj: ";
    write_expr(out, s.objective().expr, s);
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < s.num_rows(); ++i) {
        const Row& r = s.rows()[i];
        out << " r" << i << '[' << family_name(r.family) << (r.name.empty() ? "" : ":") << r.name << "]: ";
        if (r.lower == r.upper) {
            write_terms(out, r.terms, s);
            out << " = " << r.upper << '\n';
        } else if (std::isfinite(r.lower) && std::isfinite(r.upper)) {
            out << r.lower << " <= ";
            write_terms(out, r.terms, s);
            out << " <= " << r.upper << '\n';
        } else if (std::isfinite(r.upper)) {
            write_terms(out, r.terms, s);
            out << " <= " << r.upper << '\n';
        } else {
            write_terms(out, r.terms, s);
            out << " >= " << r.lower << '\n';
        }
    }
    out << "Convex\n";
    for (std::size_t i = 0; i < s.convex_rows().size(); ++i) {
        const ConvexRow& c = s.convex_rows()[i];
        out << " q" << i << '[' << family_name(c.family) << (c.name.empty() ? "" : ":") << c.name << "]: ";
        if (const auto* sq = std::get_if<SquareRow>(&c.shape)) {
            out << sq->scale << ' ' << s.variable(sq->var).name << "^2 + (";
            write_expr(out, sq->linear, s);
            out << ") <= 0\n";
        } else {
            const auto& d = std::get<DiskRow>(c.shape);
            out << "(";
            write_expr(out, d.p, s);
            out << ")^2 + (";
            write_expr(out, d.q, s);
            out << ")^2 <= " << d.radius * d.radius << '\n';
        }
    }
    out << "Bounds\n";
    for (const Variable& v : s.variables()) {
        if (v.type == VarType::Binary) continue;
        out << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
    }
    out << "Binaries\n";
    for (const Variable& v : s.variables())
        if (v.type == VarType::Binary) out << ' ' << v.name << '\n';
    out << "End\n";
}

}  // namespace awls
