#include "omtk/error.hpp"
#include "omtk/omt_tree.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>
#include <sstream>

using namespace omtk;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::IoError;
}

} // namespace

TEST_CASE("shipped tree carries the cited leaves", "[tree]")
{
    const OmtTree& t = load_tree();
    CHECK(t.node(11).label == "set-packing");
    CHECK(t.node(11).anchored);
    CHECK(t.node(17).label == "set-partitioning");
    CHECK(t.node(17).anchored);
    const OmtNode& root = t.node(t.root());
    CHECK_FALSE(root.is_leaf());
    CHECK_FALSE(root.question.empty());
    for (int id : kAnchoredNodes) {
        CHECK(t.node(id).anchored);
    }
    for (const auto& [id, node] : t.nodes()) {
        CHECK(node.is_leaf() == node.children.empty());
    }
}

TEST_CASE("embedded document matches data/omt_tree.json byte for byte", "[tree]")
{
    const std::string file = slurp(std::string(OMTK_DATA_DIR) + "/omt_tree.json");
    CHECK(std::string(builtin_tree_document()) == file);
    CHECK(load_tree().to_json() == file);
    CHECK(OmtTree::from_json(file) == load_tree());
}

TEST_CASE("descend walks answers", "[tree]")
{
    const OmtTree& t = load_tree();
    int bounds = t.descend(t.root(), "a limit or requirement on a quantity");
    CHECK(t.node(bounds).label == "bounds");
    CHECK(code_of([&] { (void)t.descend(11, "anything"); }) == ErrorCode::NotInternal);
    CHECK(code_of([&] { (void)t.descend(t.root(), "bogus"); }) == ErrorCode::UnknownAnswer);
    CHECK(code_of([&] { (void)t.node(999); }) == ErrorCode::UnknownNode);

    // Every leaf is reachable and path_to replays to it.
    for (int leaf : t.leaves()) {
        int at = t.root();
        for (const auto& answer : t.path_to(leaf)) {
            at = t.descend(at, answer);
        }
        CHECK(at == leaf);
    }
}

TEST_CASE("instantiate fills leaf templates", "[tree]")
{
    const OmtTree& t = load_tree();
    Model m;
    VarId x1 = m.add_binary("x1");
    VarId x2 = m.add_binary("x2");
    VarId x3 = m.add_binary("x3");

    TypedConstraint packing = t.instantiate(11, {{"members", std::vector<VarId>{x1, x2, x3}}});
    REQUIRE(std::holds_alternative<SetPacking>(packing.body));
    CHECK(std::get<SetPacking>(packing.body).rhs == 1);
    CHECK(packing.omt_node == 11);

    TypedConstraint fix = t.instantiate(19, {{"var", x1}, {"value", Rational(0)}});
    REQUIRE(std::holds_alternative<VariableFix>(fix.body));
    CHECK(std::get<VariableFix>(fix.body).value == Rational(0));

    TypedConstraint implication =
        t.instantiate(24, {{"antecedents", std::vector<VarId>{x1}}, {"consequents", std::vector<VarId>{x2, x3}}});
    REQUIRE(std::holds_alternative<IfThen>(implication.body));
    CHECK(std::get<IfThen>(implication.body).consequents.size() == 2);

    CHECK(code_of([&] { (void)t.instantiate(11, {}); }) == ErrorCode::MissingSlot);
    CHECK(code_of([&] { (void)t.instantiate(11, {{"members", x1}}); }) == ErrorCode::KindMismatch);
    CHECK(code_of([&] { (void)t.instantiate(10, {}); }) == ErrorCode::NotInternal);
    CHECK(code_of([&] { (void)t.instantiate(404, {}); }) == ErrorCode::UnknownNode);
}

TEST_CASE("every leaf classifies its own instances", "[tree]")
{
    const OmtTree& t = load_tree();
    Model m;
    VarId a = m.add_binary("a");
    VarId b = m.add_binary("b");
    VarId q = m.add_integer("q", 0, 5);
    for (int leaf : t.leaves()) {
        Bindings bindings;
        for (const auto& slot : t.node(leaf).template_spec->slots) {
            switch (slot.kind) {
            case SlotKind::Variable: bindings[slot.name] = slot.name == "indicator" ? a : q; break;
            case SlotKind::VariableList: bindings[slot.name] = std::vector<VarId>{a, b}; break;
            case SlotKind::Expression: bindings[slot.name] = Rational(2) * a + LinearExpr(b); break;
            case SlotKind::Rational: bindings[slot.name] = Rational(1); break;
            case SlotKind::PositiveInteger: bindings[slot.name] = std::int64_t{1}; break;
            }
        }
        TypedConstraint c = t.instantiate(leaf, bindings);
        INFO("leaf " << leaf);
        CHECK(c.omt_node == leaf);
        CHECK(classify(c) == leaf);
    }
}

TEST_CASE("classification of hand-built constraints", "[tree]")
{
    VarId x{0};
    VarId y{1};
    CHECK(classify({Balance{LinearExpr(x), LinearExpr(y), BalanceFlavor::Flow}, "", std::nullopt}) == 14);
    CHECK(classify({Bound{LinearExpr(x), Sense::LE, LinearExpr(y)}, "", std::nullopt}) == 2);
    CHECK(classify({Bound{LinearExpr(x), Sense::GE, LinearExpr(y)}, "", std::nullopt}) == 8);
    CHECK(classify({ConditionalBound{LinearExpr(x), Sense::GE, Rational(2), y, OffBehavior::ForceZero}, "",
              std::nullopt}) == 9);
    CHECK(classify({ConditionalBound{LinearExpr(x), Sense::LE, Rational(2), y, OffBehavior::ForceZero}, "",
              std::nullopt}) == 3);
    CHECK(classify({SetPartitioning{{x, y}, std::nullopt, 1}, "", std::nullopt}) == 17);
    CHECK(code_of([&] { (void)classify({RawRow{LinearExpr(x), Sense::LE, Rational(1)}, "", std::nullopt}); }) ==
          ErrorCode::Unclassifiable);
}

TEST_CASE("malformed tree documents are rejected", "[tree]")
{
    CHECK(code_of([] { (void)OmtTree::from_json("{"); }) == ErrorCode::MalformedDocument);
    CHECK(code_of([] { (void)OmtTree::from_json(R"({"schema_version":"9","root":0,"nodes":[]})"); }) ==
          ErrorCode::SchemaMismatch);
    std::string doc(builtin_tree_document());
    auto broken = nlohmann::json::parse(doc);
    broken["root"] = 12345;
    CHECK(code_of([&] { (void)OmtTree::from_json(broken.dump()); }) == ErrorCode::MalformedDocument);
}
