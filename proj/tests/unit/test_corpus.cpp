#include "omtk/corpus.hpp"
#include "omtk/model_json.hpp"
#include "omtk/oracle.hpp"

#include "test_support.hpp"

using namespace omtk;
using testing::code_of;

namespace {

std::string data_file(const std::string& name) { return testing::slurp(std::string(OMTK_DATA_DIR) + "/corpus/" + name); }

} // namespace

TEST_CASE("case registry and scales", "[corpus]")
{
    const auto& cases = list_cases();
    REQUIRE(cases.size() == 4);
    CHECK(cases[0].id == "chemical-scheduling");
    CHECK(code_of([] { (void)find_case("nope"); }) == ErrorCode::UnknownCase);
    CHECK(code_of([] { (void)build_case("vrptw-multitrip", {{"customers", 0}}); }) == ErrorCode::BadParams);
    CHECK(code_of([] { (void)build_case("vrptw-multitrip", {{"trucks", 2}}); }) == ErrorCode::BadParams);
    CHECK(code_of([] { (void)build_case("vrptw-multitrip", {{"customers", 50}}); }) == ErrorCode::ScaleTooLarge);
    CHECK(default_scale("course-timetabling") == Scale{{"courses", 2}, {"professors", 2}, {"slots", 2}});
    CHECK(default_lower_options("course-timetabling").if_then_strength == IfThenStrength::Weak);
    CHECK(default_lower_options("chemical-scheduling").if_then_strength == IfThenStrength::Strong);
}

TEST_CASE("expected node maps", "[corpus]")
{
    CHECK(expected_node_map("supply-chain-planning") ==
          NodeMap{{"set1", {12}}, {"set2", {13}}, {"set3", {2, 8}}, {"set4", {3, 9}}, {"set5", {13}}, {"set6", {2, 8}}});
    const NodeMap& tt = expected_node_map("course-timetabling");
    for (int k = 4; k <= 9; ++k) {
        CHECK(tt.at("set" + std::to_string(k)) == std::set<int>{11});
    }
    CHECK(set_label("set3a/i=0,t=1") == "set3a");
    CHECK(set_label("plain") == "plain");
}

TEST_CASE("every scale within range keeps the node map", "[corpus]")
{
    for (const auto& c : list_cases()) {
        // Each parameter at its minimum and maximum with the others at default.
        for (const auto& p : c.scale) {
            for (auto v : {p.minimum, p.maximum}) {
                Model m = build_case(c.id, {{p.name, v}});
                INFO(c.id << " " << p.name << "=" << v);
                CHECK(observed_node_map(m) == expected_node_map(c.id));
            }
        }
    }
    NodeMap chem;
    for (const auto& [set, nodes] : observed_node_map(build_case("chemical-scheduling"))) {
        chem[set] = nodes;
    }
    std::set<int> all;
    for (const auto& [set, nodes] : chem) {
        all.insert(nodes.begin(), nodes.end());
    }
    CHECK(all == std::set<int>{3, 7, 9, 11, 14});
}

TEST_CASE("shipped corpus files match the builders", "[corpus]")
{
    for (const auto& c : list_cases()) {
        INFO(c.id);
        CHECK(data_file(c.id + ".json") == write_model(build_case(c.id)));
        CHECK(data_file(c.id + ".node_map.json") == node_map_to_json(c.id).dump(2) + "\n");
    }
}

TEST_CASE("default-scale optima", "[corpus]")
{
    const std::map<std::string, Rational> optimum = {{"chemical-scheduling", Rational(13)},
        {"supply-chain-planning", Rational(19)}, {"course-timetabling", Rational(-1)}, {"vrptw-multitrip", Rational(15)}};
    for (const auto& c : list_cases()) {
        OptimumReport r = solve_by_enumeration(build_case(c.id), {std::numeric_limits<std::uint64_t>::max()});
        INFO(c.id);
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(r.objective_value == optimum.at(c.id));
    }
}
