#include "omtk/model_json.hpp"

#include "../support/random_models.hpp"
#include "test_support.hpp"

using namespace omtk;
using testing::code_of;

TEST_CASE("knapsack document matches its golden file", "[model_json]")
{
    const std::string doc = write_model(testing::knapsack());
    CHECK(doc == testing::golden("knapsack.json"));
    CHECK(parse_model(doc) == testing::knapsack());
}

TEST_CASE("documents round-trip for every family", "[model_json]")
{
    testing::Gen g(11);
    for (std::size_t f = 0; f < kFamilyCount; ++f) {
        for (int i = 0; i < 5; ++i) {
            Model m = testing::random_family_instance(static_cast<Family>(f), g);
            const std::string doc = write_model(m);
            Model back = parse_model(doc);
            CHECK(back == m);
            CHECK(write_model(back) == doc);
        }
    }
}

TEST_CASE("document errors", "[model_json]")
{
    auto doc = nlohmann::json::parse(testing::golden("knapsack.json"));

    auto old = doc;
    old["schema_version"] = "0.0";
    CHECK(code_of([&] { (void)model_from_json(old); }) == ErrorCode::SchemaMismatch);

    auto family = doc;
    family["constraints"][0]["family"] = "Quadratic";
    CHECK(code_of([&] { (void)model_from_json(family); }) == ErrorCode::MalformedDocument);

    auto unknown = doc;
    unknown["constraints"][0]["expr"]["terms"][0]["var"] = "ghost";
    CHECK(code_of([&] { (void)model_from_json(unknown); }) == ErrorCode::UnknownVariable);

    auto zero_den = doc;
    zero_den["variables"][0]["upper"] = {{"num", 1}, {"den", 0}};
    CHECK(code_of([&] { (void)model_from_json(zero_den); }) == ErrorCode::MalformedDocument);

    auto dup = doc;
    dup["variables"][1]["name"] = "x1";
    CHECK(code_of([&] { (void)model_from_json(dup); }) == ErrorCode::DuplicateName);

    CHECK(code_of([] { (void)parse_model("{not json"); }) == ErrorCode::MalformedDocument);
}

TEST_CASE("bare integers are accepted as rationals", "[model_json]")
{
    CHECK(rational_from_json(nlohmann::json(7)) == Rational(7));
    CHECK(rational_from_json(nlohmann::json{{"num", 2}, {"den", -4}}) == Rational(-1, 2));
    CHECK(to_json(Rational(3, 4)) == nlohmann::json{{"num", 3}, {"den", 4}});
}
