#pragma once

// Seeded generators for randomized template instances and models.

#include "omtk/lowering.hpp"
#include "omtk/model.hpp"
#include "omtk/omt_tree.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace omtk::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::int64_t uniform(std::int64_t lo, std::int64_t hi)
    {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    template <class T>
    const T& pick(const std::vector<T>& items)
    {
        return items[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(items.size()) - 1))];
    }

    template <class T>
    void shuffle(std::vector<T>& items)
    {
        std::shuffle(items.begin(), items.end(), rng_);
    }

    /// Nonzero integer in [-3, 3], or a decimal fraction when `fractional`.
    Rational coef(bool fractional = false)
    {
        std::int64_t v = 0;
        while (v == 0) {
            v = uniform(-3, 3);
        }
        if (fractional && coin(0.3)) {
            return Rational(v, pick(std::vector<std::int64_t>{2, 4, 5, 10}));
        }
        return Rational(v);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

struct VarPool {
    std::vector<VarId> binaries;
    std::vector<VarId> numeric; // integer or continuous, finite bounds
    std::vector<VarId> unbounded;
};

/// A few variables with small boxes (at most 6 samples each).
inline VarPool add_random_variables(Model& m, Gen& g, int binaries, int numeric, int unbounded = 0,
    bool allow_continuous = true)
{
    VarPool pool;
    int k = static_cast<int>(m.variables().size());
    for (int i = 0; i < binaries; ++i) {
        pool.binaries.push_back(m.add_binary("b" + std::to_string(k++)));
    }
    for (int i = 0; i < numeric; ++i) {
        std::int64_t lo = g.uniform(-3, 2);
        std::int64_t hi = lo + g.uniform(1, 4);
        if (allow_continuous && g.coin(0.3)) {
            pool.numeric.push_back(m.add_variable("c" + std::to_string(k++), VarKind::Continuous, Rational(lo), Rational(hi)));
        } else {
            pool.numeric.push_back(m.add_integer("n" + std::to_string(k++), lo, hi));
        }
    }
    for (int i = 0; i < unbounded; ++i) {
        bool lower_only = g.coin();
        pool.unbounded.push_back(m.add_variable("u" + std::to_string(k++), g.coin() ? VarKind::Integer : VarKind::Continuous,
            lower_only ? std::optional<Rational>(Rational(g.uniform(-2, 2))) : std::nullopt,
            lower_only ? std::nullopt : std::optional<Rational>(Rational(g.uniform(-2, 2)))));
    }
    return pool;
}

inline LinearExpr random_expr(Gen& g, const std::vector<VarId>& vars, std::size_t max_terms, bool fractional = false,
    bool constant = true)
{
    std::vector<VarId> chosen = vars;
    g.shuffle(chosen);
    chosen.resize(std::min<std::size_t>(chosen.size(), static_cast<std::size_t>(g.uniform(1, static_cast<std::int64_t>(max_terms)))));
    LinearExpr e;
    for (VarId v : chosen) {
        e.add_term(v, g.coef(fractional));
    }
    if (constant && g.coin(0.3)) {
        e.set_constant(Rational(g.uniform(-2, 2)));
    }
    return e;
}

/// A rhs strictly inside the expression's range over the box, so both truth values occur.
inline Rational interior_rhs(Gen& g, const LinearExpr& e, const Model& m)
{
    Range r = expr_range(e, m.variables());
    std::int64_t lo = r.lo ? r.lo->floor() : -5;
    std::int64_t hi = r.hi ? r.hi->ceil() : 5;
    return Rational(g.uniform(lo, hi));
}

inline Sense random_inequality(Gen& g)
{
    return g.coin() ? Sense::LE : Sense::GE;
}

template <class Set>
Set random_set(Gen& g, const std::vector<VarId>& binaries)
{
    Set s;
    s.members = binaries;
    g.shuffle(s.members);
    s.members.resize(static_cast<std::size_t>(g.uniform(2, static_cast<std::int64_t>(binaries.size()))));
    if (g.coin(0.4)) {
        std::vector<Rational> w;
        for (std::size_t i = 0; i < s.members.size(); ++i) {
            w.push_back(Rational(g.uniform(1, 3)));
        }
        s.weights = std::move(w);
    }
    s.rhs = g.uniform(1, 2);
    return s;
}

/// One model holding a single constraint of `family` over a box of at most a few thousand points.
inline Model random_family_instance(Family family, Gen& g)
{
    Model m("instance");
    switch (family) {
    case Family::Bound: {
        VarPool p = add_random_variables(m, g, 1, 3, g.coin(0.3) ? 1 : 0);
        std::vector<VarId> vars = p.numeric;
        vars.insert(vars.end(), p.binaries.begin(), p.binaries.end());
        vars.insert(vars.end(), p.unbounded.begin(), p.unbounded.end());
        Bound b;
        b.expr = random_expr(g, vars, 3);
        b.sense = random_inequality(g);
        if (g.coin()) {
            b.bound = random_expr(g, vars, 2);
        } else {
            b.bound = interior_rhs(g, b.expr, m);
        }
        m.add_constraint({b, "bound", std::nullopt});
        break;
    }
    case Family::ConditionalBound: {
        VarPool p = add_random_variables(m, g, 2, 3);
        VarId indicator = p.binaries[0];
        std::vector<VarId> vars = p.numeric;
        vars.push_back(p.binaries[1]);
        ConditionalBound c;
        c.expr = random_expr(g, vars, 3);
        c.sense = random_inequality(g);
        c.indicator = indicator;
        c.off_behavior = g.coin() ? OffBehavior::ForceZero : OffBehavior::Free;
        if (g.coin(0.35)) {
            c.bound = random_expr(g, vars, 2);
        } else {
            c.bound = interior_rhs(g, c.expr, m);
        }
        m.add_constraint({c, "conditional", std::nullopt});
        break;
    }
    case Family::Balance: {
        VarPool p = add_random_variables(m, g, 1, 3, g.coin(0.3) ? 1 : 0);
        std::vector<VarId> vars = p.numeric;
        vars.insert(vars.end(), p.binaries.begin(), p.binaries.end());
        vars.insert(vars.end(), p.unbounded.begin(), p.unbounded.end());
        Balance b{random_expr(g, vars, 2), random_expr(g, vars, 2),
            static_cast<BalanceFlavor>(g.uniform(0, 4))};
        m.add_constraint({b, "balance", std::nullopt});
        break;
    }
    case Family::SetPacking:
    case Family::SetPartitioning:
    case Family::SetCovering: {
        VarPool p = add_random_variables(m, g, static_cast<int>(g.uniform(2, 6)), 0);
        ConstraintBody body;
        if (family == Family::SetPacking) {
            body = random_set<SetPacking>(g, p.binaries);
        } else if (family == Family::SetPartitioning) {
            body = random_set<SetPartitioning>(g, p.binaries);
        } else {
            body = random_set<SetCovering>(g, p.binaries);
        }
        m.add_constraint({body, "set", std::nullopt});
        break;
    }
    case Family::VariableFix: {
        VarPool p = add_random_variables(m, g, 1, 1);
        VarId v = g.coin() ? p.binaries[0] : p.numeric[0];
        const Variable& var = m.variable(v);
        Rational value = var.kind == VarKind::Continuous
                             ? (*var.lower + *var.upper) / Rational(2)
                             : Rational(g.uniform(var.lower->num(), var.upper->num()));
        m.add_constraint({VariableFix{v, value}, "fix", std::nullopt});
        break;
    }
    case Family::IfThen: {
        const auto k = g.uniform(1, 3);
        const auto n = g.uniform(1, 3);
        VarPool p = add_random_variables(m, g, static_cast<int>(k + n), 0);
        IfThen c;
        c.antecedents.assign(p.binaries.begin(), p.binaries.begin() + k);
        c.consequents.assign(p.binaries.begin() + k, p.binaries.end());
        m.add_constraint({c, "ifthen", std::nullopt});
        break;
    }
    case Family::EitherOr: {
        VarPool p = add_random_variables(m, g, 1, 3);
        std::vector<VarId> vars = p.numeric;
        vars.push_back(p.binaries[0]);
        EitherOr e;
        const auto r = g.uniform(2, 3);
        for (std::int64_t i = 0; i < r; ++i) {
            Alternative a;
            a.expr = random_expr(g, vars, 2);
            a.sense = random_inequality(g);
            a.rhs = interior_rhs(g, a.expr, m);
            e.alternatives.push_back(std::move(a));
        }
        m.add_constraint({e, "either", std::nullopt});
        break;
    }
    case Family::RawRow: {
        VarPool p = add_random_variables(m, g, 1, 2, g.coin(0.3) ? 1 : 0);
        std::vector<VarId> vars = p.numeric;
        vars.insert(vars.end(), p.binaries.begin(), p.binaries.end());
        vars.insert(vars.end(), p.unbounded.begin(), p.unbounded.end());
        RawRow row;
        row.expr = random_expr(g, vars, 3);
        row.sense = static_cast<Sense>(g.uniform(0, 2));
        row.rhs = interior_rhs(g, row.expr, m);
        m.add_constraint({row, "raw", std::nullopt});
        break;
    }
    }
    return m;
}

/// A mixed model with decimal data, an objective and labelled, tagged constraints.
inline Model random_model(Gen& g, int index)
{
    Model m("random-" + std::to_string(index));
    VarPool p = add_random_variables(m, g, static_cast<int>(g.uniform(3, 5)), static_cast<int>(g.uniform(1, 3)),
        static_cast<int>(g.uniform(0, 1)));
    std::vector<VarId> bounded = p.numeric;
    bounded.insert(bounded.end(), p.binaries.begin(), p.binaries.end());
    std::vector<VarId> all = bounded;
    all.insert(all.end(), p.unbounded.begin(), p.unbounded.end());
    const auto count = g.uniform(2, 6);
    for (std::int64_t i = 0; i < count; ++i) {
        TypedConstraint c;
        c.label = "r" + std::to_string(i) + "/" + (g.coin() ? "with space" : "x");
        switch (g.uniform(0, 9)) {
        case 0: c.body = Bound{random_expr(g, all, 3, true), random_inequality(g), Rational(g.uniform(-3, 3), 2)}; break;
        case 1: c.body = Bound{random_expr(g, all, 2, true), random_inequality(g), random_expr(g, all, 2, true)}; break;
        case 2:
            c.body = ConditionalBound{random_expr(g, p.numeric, 2, true), random_inequality(g), Rational(g.uniform(-2, 4)),
                p.binaries[0], g.coin() ? OffBehavior::ForceZero : OffBehavior::Free};
            break;
        case 3:
            c.body = Balance{random_expr(g, all, 2, true), random_expr(g, all, 2, true), static_cast<BalanceFlavor>(g.uniform(0, 4))};
            break;
        case 4: c.body = random_set<SetPacking>(g, p.binaries); break;
        case 5: c.body = random_set<SetPartitioning>(g, p.binaries); break;
        case 6: c.body = random_set<SetCovering>(g, p.binaries); break;
        case 7: c.body = IfThen{{p.binaries[0]}, {p.binaries[1], p.binaries[2]}}; break;
        case 8: {
            EitherOr e;
            for (int k = 0; k < 2; ++k) {
                e.alternatives.push_back({random_expr(g, bounded, 2, true), random_inequality(g), Rational(g.uniform(-2, 2))});
            }
            c.body = std::move(e);
            break;
        }
        default: c.body = RawRow{random_expr(g, all, 3, true), static_cast<Sense>(g.uniform(0, 2)), Rational(g.uniform(-5, 5), 10)};
        }
        if (c.family() != Family::RawRow) {
            c.omt_node = classify(c);
        }
        m.add_constraint(std::move(c));
    }
    LinearExpr obj = random_expr(g, all, 4, true);
    obj.set_constant(Rational(g.uniform(-4, 4), 4));
    m.set_objective(Objective{g.coin() ? Direction::Maximize : Direction::Minimize, obj});
    return m;
}

} // namespace omtk::testing
