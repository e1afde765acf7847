#include "omtk/lowering.hpp"

#include "omtk/error.hpp"

#include <algorithm>

namespace omtk {

std::string_view to_string(IfThenStrength strength)
{
    return strength == IfThenStrength::Weak ? "weak" : "strong";
}

std::optional<IfThenStrength> parse_if_then_strength(std::string_view text)
{
    if (text == "weak") return IfThenStrength::Weak;
    if (text == "strong") return IfThenStrength::Strong;
    return std::nullopt;
}

namespace {

[[noreturn]] void unbounded(const LinearExpr& expr, std::span<const Variable> variables, bool need_upper)
{
    // Name the first variable whose box end blocks the computation.
    for (const auto& [var, coef] : expr.terms()) {
        const Variable& v = variables[var.value];
        bool uses_upper = (coef.sign() > 0) == need_upper;
        if ((uses_upper && !v.upper) || (!uses_upper && !v.lower)) {
            throw Error(ErrorCode::UnboundedVariable, "variable '" + v.name + "' has an infinite bound", v.name);
        }
    }
    throw Error(ErrorCode::UnboundedVariable, "expression range is unbounded");
}

Rational sup_of(const LinearExpr& expr, std::span<const Variable> variables)
{
    Range r = expr_range(expr, variables);
    if (!r.hi) {
        unbounded(expr, variables, true);
    }
    return *r.hi;
}

Rational inf_of(const LinearExpr& expr, std::span<const Variable> variables)
{
    Range r = expr_range(expr, variables);
    if (!r.lo) {
        unbounded(expr, variables, false);
    }
    return *r.lo;
}

class RowSink {
public:
    RowSink(const TypedConstraint& constraint, ConstraintId source, LoweredConstraint& out)
        : constraint_(constraint), source_(source), out_(out)
    {
    }

    /// expr (sense) rhs, with the expression's constant moved right.
    void add(const LinearExpr& expr, Sense sense, const Rational& rhs)
    {
        out_.rows.push_back(CanonicalRow{expr.terms(), sense, rhs - expr.constant(), source_, constraint_.omt_node,
            constraint_.label});
    }

private:
    const TypedConstraint& constraint_;
    ConstraintId source_;
    LoweredConstraint& out_;
};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

Rational adjusted(Rational m, const LowerOptions& options)
{
    m += options.big_m_adjustment;
    return m.sign() < 0 ? Rational(0) : m;
}

void lower_conditional(const ConditionalBound& c, std::span<const Variable> vars, const LowerOptions& options,
    RowSink& sink)
{
    const LinearExpr y(c.indicator);
    if (const auto* constant = std::get_if<Rational>(&c.bound)) {
        if (c.off_behavior == OffBehavior::ForceZero) {
            // expr - c*y (sense) 0 enforces the bound when on and pins one side to zero when off.
            sink.add(c.expr - *constant * y, c.sense, Rational(0));
            if (c.sense == Sense::LE) {
                Rational lo = inf_of(c.expr, vars);
                if (lo.sign() < 0) {
                    sink.add(c.expr - lo * y, Sense::GE, Rational(0));
                }
            } else {
                Rational hi = sup_of(c.expr, vars);
                if (hi.sign() > 0) {
                    sink.add(c.expr - hi * y, Sense::LE, Rational(0));
                }
            }
            return;
        }
        Rational m = adjusted(derive_big_m(c.expr, c.sense, *constant, vars), options);
        if (c.sense == Sense::LE) {
            sink.add(c.expr + m * y, Sense::LE, *constant + m);
        } else {
            sink.add(c.expr - m * y, Sense::GE, *constant - m);
        }
        return;
    }

    const LinearExpr gap = c.expr - std::get<LinearExpr>(c.bound);
    Rational m = adjusted(derive_big_m(gap, c.sense, Rational(0), vars), options);
    if (c.sense == Sense::LE) {
        sink.add(gap + m * y, Sense::LE, m);
    } else {
        sink.add(gap - m * y, Sense::GE, -m);
    }
    if (c.off_behavior == OffBehavior::ForceZero) {
        Rational hi = sup_of(c.expr, vars);
        Rational lo = inf_of(c.expr, vars);
        if (hi.sign() > 0) {
            sink.add(c.expr - hi * y, Sense::LE, Rational(0));
        }
        if (lo.sign() < 0) {
            sink.add(c.expr - lo * y, Sense::GE, Rational(0));
        }
    }
}

template <class Set>
void lower_set(const Set& s, RowSink& sink)
{
    LinearExpr e;
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        e.add_term(s.members[i], s.weight(i));
    }
    constexpr Sense sense = Set::kind == SetKind::Packing ? Sense::LE
                            : Set::kind == SetKind::Partitioning ? Sense::EQ
                                                                 : Sense::GE;
    sink.add(e, sense, Rational(s.rhs));
}

} // namespace

Rational derive_big_m(const LinearExpr& expr, Sense sense, const Rational& rhs, std::span<const Variable> variables)
{
    Rational m = sense == Sense::LE ? sup_of(expr, variables) - rhs : rhs - inf_of(expr, variables);
    return m.sign() < 0 ? Rational(0) : m;
}

LoweredConstraint lower_constraint(const TypedConstraint& constraint, ConstraintId source,
    std::span<const Variable> variables, const LowerOptions& options, VarId first_aux)
{
    LoweredConstraint out;
    RowSink sink(constraint, source, out);
    std::visit(
        overloaded{
            [&](const Bound& c) {
                if (const auto* constant = std::get_if<Rational>(&c.bound)) {
                    sink.add(c.expr, c.sense, *constant);
                } else {
                    sink.add(c.expr - std::get<LinearExpr>(c.bound), c.sense, Rational(0));
                }
            },
            [&](const ConditionalBound& c) { lower_conditional(c, variables, options, sink); },
            [&](const Balance& c) { sink.add(c.lhs - c.rhs, Sense::EQ, Rational(0)); },
            [&](const VariableFix& c) { sink.add(LinearExpr(c.var), Sense::EQ, c.value); },
            [&](const IfThen& c) {
                const auto k = static_cast<std::int64_t>(c.antecedents.size());
                const auto m = static_cast<std::int64_t>(c.consequents.size());
                const LinearExpr antecedents = sum_of(c.antecedents);
                if (options.if_then_strength == IfThenStrength::Weak) {
                    // m * sum(a) - sum(c) <= m (k - 1)
                    sink.add(Rational(m) * antecedents - sum_of(c.consequents), Sense::LE, Rational(m * (k - 1)));
                } else {
                    for (VarId consequent : c.consequents) {
                        sink.add(antecedents - LinearExpr(consequent), Sense::LE, Rational(k - 1));
                    }
                }
            },
            [&](const EitherOr& c) {
                // z_i = 1 relaxes alternative i; at most r-1 may be relaxed.
                LinearExpr selectors;
                for (std::size_t i = 0; i < c.alternatives.size(); ++i) {
                    const auto& alt = c.alternatives[i];
                    VarId z{first_aux.value + static_cast<std::uint32_t>(i)};
                    out.auxiliaries.push_back(CanonicalVariable{
                        std::string(kAuxPrefix) + std::to_string(z.value - variables.size()), VarKind::Binary,
                        Rational(0), Rational(1)});
                    Rational m = adjusted(derive_big_m(alt.expr, alt.sense, alt.rhs, variables), options);
                    if (alt.sense == Sense::LE) {
                        sink.add(alt.expr - m * LinearExpr(z), Sense::LE, alt.rhs);
                    } else {
                        sink.add(alt.expr + m * LinearExpr(z), Sense::GE, alt.rhs);
                    }
                    selectors.add_term(z, Rational(1));
                }
                sink.add(selectors, Sense::LE, Rational(static_cast<std::int64_t>(c.alternatives.size()) - 1));
            },
            [&](const RawRow& c) { sink.add(c.expr, c.sense, c.rhs); },
            [&](const auto& set) { lower_set(set, sink); },
        },
        constraint.body);
    return out;
}

CanonicalForm lower_model(const Model& model, const LowerOptions& options)
{
    auto diagnostics = validate(model);
    for (const auto& d : diagnostics) {
        if (d.severity == Severity::Error) {
            throw Error(ErrorCode::ValidationFailed, "model does not validate: " + d.code + ": " + d.message);
        }
    }

    CanonicalForm form;
    form.name = model.name();
    for (const auto& v : model.variables()) {
        form.variables.push_back(CanonicalVariable{v.name, v.kind, v.lower, v.upper});
    }
    const auto& constraints = model.constraints();
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        ConstraintId id{static_cast<std::uint32_t>(i)};
        VarId first_aux{static_cast<std::uint32_t>(form.variables.size())};
        LoweredConstraint lowered;
        try {
            lowered = lower_constraint(constraints[i], id, model.variables(), options, first_aux);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UnboundedVariable) {
                throw;
            }
            std::string where = "constraint #" + std::to_string(i);
            if (!constraints[i].label.empty()) {
                where += " '" + constraints[i].label + "'";
            }
            throw Error(ErrorCode::UnboundedVariable, where + ": " + e.what(), where);
        }
        form.rows.insert(form.rows.end(), lowered.rows.begin(), lowered.rows.end());
        form.variables.insert(form.variables.end(), lowered.auxiliaries.begin(), lowered.auxiliaries.end());
    }
    form.objective = model.objective().value_or(Objective{});
    return form;
}

Rational row_activity(const CanonicalRow& row, const Assignment& assignment)
{
    Rational total;
    for (const auto& [var, coef] : row.coefficients) {
        total += coef * assignment.at(var);
    }
    return total;
}

bool row_holds(const CanonicalRow& row, const Assignment& assignment)
{
    Rational activity = row_activity(row, assignment);
    switch (row.sense) {
    case Sense::LE: return activity <= row.rhs;
    case Sense::EQ: return activity == row.rhs;
    case Sense::GE: return activity >= row.rhs;
    }
    return false;
}

std::size_t model_variable_count(const CanonicalForm& form)
{
    std::size_t n = 0;
    while (n < form.variables.size() && !form.variables[n].name.starts_with(kAuxPrefix)) {
        ++n;
    }
    return n;
}

} // namespace omtk
