#include <string>

#include "doctest.h"
#include "gwi/error.hpp"
#include "gwi/limits.hpp"
#include "gwi/scenario_io.hpp"
#include "support.hpp"

using namespace gwi;

namespace {

const char* const fixtures[] = {"thm1_poisson", "thm3_cp_finite", "thm4_log2",    "thm5_nb",
                                "thm6_example1", "thm6_example2", "lf_crosscheck"};

const char* const minimal = "name = mini\n"
                            "offspring.family = bernoulli\n"
                            "offspring.rho.c = 1\n"
                            "offspring.rho.gamma = 1\n"
                            "offspring.rho.n0 = 1\n"
                            "immigration.family = bernoulli\n"
                            "immigration.m1.rule = proportional\n"
                            "immigration.m1.a = 3\n"
                            "limits.lambda = 3\n"
                            "limits.divergent = true\n";

std::string parse_error_message(const std::string& text)
{
    try {
        (void)parse_scenario(text, "t.scn");
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_SUITE("scenario_io")
{
    TEST_CASE("minimal Poisson scenario")
    {
        const auto s = parse_scenario(minimal);
        CHECK(s.name == "mini");
        CHECK(s.offspring.kind == OffspringKind::bernoulli);
        CHECK(s.immigration.rate.kind == SequenceRule::Kind::proportional);
        CHECK(s.immigration.rate.a == 3.0);
        CHECK(s.run.truncation == 0);
        const auto law = regime_classify(s);
        REQUIRE(std::holds_alternative<PoissonLaw>(law));
        CHECK(std::get<PoissonLaw>(law).lambda == 3.0);
        CHECK(describe(law) == "Poisson lambda=3");
    }

    TEST_CASE("fixture round trip")
    {
        for (const char* name : fixtures) {
            CAPTURE(name);
            const auto s = testing::load(name);
            const auto text = serialize_scenario(s);
            const auto back = parse_scenario(text, name);
            CHECK(back == s);
            CHECK(serialize_scenario(back) == text);
        }
        CHECK(std::holds_alternative<ProductLaw>(regime_classify(testing::load("thm6_example1"))));
        CHECK(std::holds_alternative<ProductLaw>(regime_classify(testing::load("thm6_example2"))));
    }

    TEST_CASE("comments and whitespace")
    {
        const std::string text = std::string("# leading comment\n\n") + minimal + "   run.seed =  42   # trailing\n";
        const auto s = parse_scenario(text);
        CHECK(s.run.seed == 42);
    }

    TEST_CASE("parse errors carry line and key")
    {
        CHECK(parse_error_message(std::string(minimal) + "offspring.colour = red\n") ==
              "t.scn:11: offspring.colour: unknown key");
        CHECK(parse_error_message(std::string(minimal) + "limits.lambda = 2\n") == "t.scn:11: limits.lambda: duplicate key");
        const auto bad_number = parse_error_message(std::string(minimal) + "run.tol = fast\n");
        CHECK(bad_number.rfind("t.scn:11: run.tol: ", 0) == 0);
        const auto no_eq = parse_error_message("name mini\n");
        CHECK(no_eq.rfind("t.scn:1: ", 0) == 0);
        const auto mixed = parse_error_message(std::string(minimal) + "immigration.weight.a = 1\n");
        CHECK(mixed.find("mutually exclusive") != std::string::npos);
        const auto family = parse_error_message("offspring.family = poisson\n");
        CHECK(family.rfind("t.scn:1: offspring.family: ", 0) == 0);
        CHECK_THROWS_AS(load_scenario("/nonexistent/x.scn"), ParseError);
    }

    TEST_CASE("validation errors")
    {
        std::string text = minimal;
        text.replace(text.find("offspring.rho.gamma = 1"), 23, "offspring.rho.gamma = 2");
        CHECK_THROWS_AS(parse_scenario(text), ValidationError);

        std::string neg = minimal;
        neg.replace(neg.find("offspring.rho.c = 1"), 19, "offspring.rho.c = -1");
        CHECK_THROWS_AS(parse_scenario(neg), ValidationError);
    }
}
