#include "omtk/error.hpp"
#include "omtk/lowering.hpp"
#include "omtk/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace omtk;

namespace {

CanonicalRow row(std::map<VarId, Rational> coefs, Sense sense, Rational rhs)
{
    return CanonicalRow{std::move(coefs), sense, rhs, ConstraintId{0}, std::nullopt, ""};
}

/// Exhaustive max of expr over an integer box, by brute force.
Rational brute_max(const LinearExpr& expr, const Model& m)
{
    std::optional<Rational> best;
    const auto& vars = m.variables();
    std::vector<std::int64_t> at(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        at[i] = vars[i].lower->num();
    }
    while (true) {
        Assignment a(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i) {
            a.set(VarId{static_cast<std::uint32_t>(i)}, Rational(at[i]));
        }
        Rational v = evaluate(expr, a);
        if (!best || v > *best) {
            best = v;
        }
        std::size_t k = 0;
        while (k < vars.size() && at[k] == vars[k].upper->num()) {
            at[k] = vars[k].lower->num();
            ++k;
        }
        if (k == vars.size()) {
            break;
        }
        ++at[k];
    }
    return *best;
}

} // namespace

TEST_CASE("derive_big_m", "[lowering]")
{
    Model m;
    VarId ti = m.add_integer("t_i", 0, 10);
    VarId tj = m.add_integer("t_j", 0, 10);
    // t_j >= t_i + 3, relaxed: t_i + 3 - t_j <= 0 needs M = max(t_i + 3 - t_j).
    LinearExpr gap = LinearExpr(ti) + LinearExpr(Rational(3)) - LinearExpr(tj);
    Rational m_le = derive_big_m(gap, Sense::LE, Rational(0), m.variables());
    CHECK(m_le == brute_max(gap, m));
    CHECK(m_le == Rational(13));
    CHECK(derive_big_m(-gap, Sense::GE, Rational(0), m.variables()) == Rational(13));

    CHECK(derive_big_m(LinearExpr(Rational(5)), Sense::LE, Rational(7), m.variables()) == Rational(0));

    VarId free_var = m.add_variable("w", VarKind::Continuous, Rational(0), std::nullopt);
    try {
        (void)derive_big_m(LinearExpr(free_var), Sense::LE, Rational(0), m.variables());
        FAIL("expected UnboundedVariable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnboundedVariable);
        CHECK(e.subject() == "w");
    }
}

TEST_CASE("if-then weak and strong rows", "[lowering]")
{
    Model m;
    VarId X = m.add_binary("X");
    VarId Y = m.add_binary("Y");
    VarId Z = m.add_binary("Z");
    TypedConstraint c{IfThen{{X}, {Y, Z}}, "", std::nullopt};
    auto weak = lower_constraint(c, m.variables(), {IfThenStrength::Weak}).rows;
    REQUIRE(weak.size() == 1);
    CHECK(weak[0] == row({{X, Rational(2)}, {Y, Rational(-1)}, {Z, Rational(-1)}}, Sense::LE, Rational(0)));
    auto strong = lower_constraint(c, m.variables(), {IfThenStrength::Strong}).rows;
    REQUIRE(strong.size() == 2);
    CHECK(strong[0] == row({{X, Rational(1)}, {Y, Rational(-1)}}, Sense::LE, Rational(0)));
    CHECK(strong[1] == row({{X, Rational(1)}, {Z, Rational(-1)}}, Sense::LE, Rational(0)));
}

TEST_CASE("conditional capacity lowers to a single row", "[lowering]")
{
    Model m;
    VarId batch = m.add_integer("batch", 0, 10);
    VarId s = m.add_binary("s");
    TypedConstraint c{ConditionalBound{LinearExpr(batch), Sense::LE, Rational(10), s, OffBehavior::ForceZero}, "",
        std::nullopt};
    auto rows = lower_constraint(c, m.variables()).rows;
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == row({{batch, Rational(1)}, {s, Rational(-10)}}, Sense::LE, Rational(0)));
}

TEST_CASE("lower_model counts rows and auxiliaries", "[lowering]")
{
    Model m("mix");
    VarId a = m.add_binary("a");
    VarId b = m.add_binary("b");
    VarId x = m.add_integer("x", 0, 7);
    m.add_constraint({SetPartitioning{{a, b}, std::nullopt, 1}, "p", std::nullopt});
    m.add_constraint({Bound{LinearExpr(x), Sense::LE, Rational(6)}, "b", std::nullopt});
    CanonicalForm f = lower_model(m);
    CHECK(f.rows.size() == 2);
    CHECK(f.variables.size() == 3);

    m.add_constraint({EitherOr{{{LinearExpr(x), Sense::LE, Rational(2)}, {LinearExpr(x), Sense::GE, Rational(5)}}},
        "gap", std::nullopt});
    f = lower_model(m);
    CHECK(f.rows.size() == 5);
    REQUIRE(f.variables.size() == 5);
    CHECK(f.variables[3].name == "__aux0");
    CHECK(f.variables[4].kind == VarKind::Binary);
    CHECK(model_variable_count(f) == 3);
    CHECK(f.rows[2].label == "gap");
    CHECK(f.rows[2].source == ConstraintId{2});

    Model bad;
    bad.add_binary("y");
    bad.append_unchecked({VariableFix{VarId{3}, Rational(1)}, "", std::nullopt});
    try {
        (void)lower_model(bad);
        FAIL("expected ValidationFailed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationFailed);
    }
}

TEST_CASE("unbounded conditional names the constraint", "[lowering]")
{
    Model m;
    VarId y = m.add_binary("y");
    VarId q = m.add_variable("q", VarKind::Continuous, Rational(0), std::nullopt);
    m.add_constraint({ConditionalBound{LinearExpr(q), Sense::LE, Rational(4), y, OffBehavior::Free}, "cap", std::nullopt});
    try {
        (void)lower_model(m);
        FAIL("expected UnboundedVariable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnboundedVariable);
        CHECK(std::string(e.what()).find("cap") != std::string::npos);
    }
}

TEST_CASE("row constants move to the right-hand side", "[lowering]")
{
    Model m;
    VarId x = m.add_integer("x", 0, 4);
    TypedConstraint c{Bound{LinearExpr(x) + LinearExpr(Rational(3)), Sense::LE, Rational(5)}, "", std::nullopt};
    auto rows = lower_constraint(c, m.variables()).rows;
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].rhs == Rational(2));
}
