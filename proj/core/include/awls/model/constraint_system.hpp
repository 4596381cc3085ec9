#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace awls {

using VarId = int;
using RowId = int;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType : std::uint8_t { Continuous, Binary };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    VarType type = VarType::Continuous;
    int priority = 0;  // branching priority for binaries; higher branches first
};

struct Term {
    VarId var;
    double coef;
};

/// Sparse affine expression sum(coef * var) + constant.
struct LinExpr {
    std::vector<Term> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
    static LinExpr var(VarId v, double coef = 1.0) {
        LinExpr e;
        e.terms.push_back({v, coef});
        return e;
    }

    LinExpr& add(VarId v, double coef) {
        if (coef != 0.0) terms.push_back({v, coef});
        return *this;
    }
    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator-=(const LinExpr& o);
    LinExpr& operator*=(double s);
    double evaluate(std::span<const double> x) const;
    /// Merges duplicate variables and drops zero coefficients.
    void compact();
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);

/// Either a decision variable or a fixed value; used wherever a model input
/// may be optimized over or held constant (line status, surrogate inputs).
struct Operand {
    VarId var = -1;
    double constant = 0.0;

    static Operand variable(VarId v) { return {v, 0.0}; }
    static Operand fixed(double c) { return {-1, c}; }
    bool is_variable() const noexcept { return var >= 0; }
    LinExpr expr() const { return is_variable() ? LinExpr::var(var) : LinExpr(constant); }
};

/// Row groups; used for dumps and for selective membership checks.
enum class RowFamily : std::uint8_t {
    General,
    VoltageEnvelope,
    SwitchLink,
    Cosine,
    Sine,
    AngleLimit,
    Product,
    FlowDefinition,
    FlowSwitch,
    Thermal,
    Balance,
    Budget,
    Coupling,
    Relu,
    Cut,
};

const char* family_name(RowFamily f);

/// lower <= sum(coef * var) <= upper; equal bounds make an equality row.
struct Row {
    std::vector<Term> terms;
    double lower = -kInf;
    double upper = kInf;
    RowFamily family = RowFamily::General;
    std::string name;

    double activity(std::span<const double> x) const;
    /// Amount by which x violates the row (0 when satisfied).
    double violation(std::span<const double> x) const;
};

/// scale * var^2 + linear <= 0, scale > 0 (voltage-square envelope, cosine cap).
struct SquareRow {
    VarId var;
    double scale;
    LinExpr linear;
};

/// p^2 + q^2 <= radius^2 (apparent-power limit).
struct DiskRow {
    LinExpr p;
    LinExpr q;
    double radius;
};

/// Convex row drawn from the fixed catalog above; only ever touched through
/// outer linearizations (tangent cuts).
struct ConvexRow {
    std::variant<SquareRow, DiskRow> shape;
    RowFamily family = RowFamily::General;
    std::string name;

    /// Constraint function value; the row holds iff value(x) <= 0.
    double value(std::span<const double> x) const;
    /// Supporting hyperplane at the current point when value(x) > tol.
    std::optional<Row> separate(std::span<const double> x, double tol) const;
    /// Tangent of a SquareRow at var = point.
    Row square_tangent(double point) const;
    /// Supporting line of a DiskRow with outward normal at angle phi.
    Row disk_facet(double phi) const;
};

enum class Sense : std::uint8_t { Minimize, Maximize };

struct Objective {
    Sense sense = Sense::Minimize;
    LinExpr expr;
};

class ConstraintSystem {
public:
    VarId add_variable(std::string name, double lower, double upper, VarType type = VarType::Continuous,
                       int priority = 0);
    VarId add_binary(std::string name, int priority = 0) {
        return add_variable(std::move(name), 0.0, 1.0, VarType::Binary, priority);
    }

    /// lower <= expr <= upper; the expression constant is moved to the bounds.
    RowId add_row(const LinExpr& expr, double lower, double upper, RowFamily family, std::string name = {});
    RowId add_le(const LinExpr& expr, double rhs, RowFamily family, std::string name = {}) {
        return add_row(expr, -kInf, rhs, family, std::move(name));
    }
    RowId add_ge(const LinExpr& expr, double rhs, RowFamily family, std::string name = {}) {
        return add_row(expr, rhs, kInf, family, std::move(name));
    }
    RowId add_eq(const LinExpr& expr, double rhs, RowFamily family, std::string name = {}) {
        return add_row(expr, rhs, rhs, family, std::move(name));
    }

    /// Registers a convex row and seeds it: `seed_points` tangents for a
    /// SquareRow (spread over the variable's bounds), an outer polygon with
    /// `seed_points` facets for a DiskRow.
    int add_convex(ConvexRow row, int seed_points);
    /// SquareRow variant with explicit tangent points.
    int add_convex(ConvexRow row, std::span<const double> tangent_points);

    void set_objective(Sense sense, LinExpr expr);
    void set_bounds(VarId v, double lower, double upper);
    void set_row_bounds(RowId r, double lower, double upper);

    const std::vector<Variable>& variables() const noexcept { return vars_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }
    const std::vector<ConvexRow>& convex_rows() const noexcept { return convex_; }
    const Objective& objective() const noexcept { return objective_; }
    const Variable& variable(VarId v) const { return vars_.at(static_cast<std::size_t>(v)); }
    const Row& row(RowId r) const { return rows_.at(static_cast<std::size_t>(r)); }
    std::size_t num_variables() const noexcept { return vars_.size(); }
    std::size_t num_rows() const noexcept { return rows_.size(); }
    std::size_t num_binaries() const noexcept;

    double objective_value(std::span<const double> x) const { return objective_.expr.evaluate(x); }
    /// Largest violation over bounds, linear rows, convex rows and (optionally) integrality.
    double max_violation(std::span<const double> x, bool check_integrality = true) const;
    /// Throws ContractError if a row references an undeclared variable.
    void validate() const;

private:
    std::vector<Variable> vars_;
    std::vector<Row> rows_;
    std::vector<ConvexRow> convex_;
    Objective objective_;
};

/// Human-readable LP-format-like dump (objective, rows, bounds, binaries,
/// convex rows). See docs/constraint_dump.md.
void write_lp(const ConstraintSystem& system, std::ostream& out);

}  // namespace awls
