#include "doctest.h"

#include "leap/ast.hpp"
#include "leap/parser.hpp"
#include "support/fuzz.hpp"

using namespace leap;
namespace ts = leap::testsupport;

TEST_CASE("verb names, aliases and arities") {
    CHECK(verb_name(Verb::Goto) == "goto");
    CHECK(verb_name(Verb::DoNothing) == "do_nothing");
    CHECK(verb_from_name("grab") == Verb::Grasp);
    CHECK(verb_from_name("grasp") == Verb::Grasp);
    CHECK_FALSE(verb_from_name("fling").has_value());

    CHECK(verb_arity(Verb::Use) == std::pair<int, int>{1, 2});
    CHECK(verb_arity(Verb::Wait) == std::pair<int, int>{0, 1});
    CHECK(verb_arity(Verb::Grasp) == std::pair<int, int>{1, 1});

    CHECK(arity_ok(SubAction{Verb::Use, {ObjectName::lit("a")}}));
    CHECK_FALSE(arity_ok(SubAction{Verb::Grasp, {}}));
    CHECK_FALSE(arity_ok(
        SubAction{Verb::Goto, {ObjectName::lit("a"), ObjectName::lit("b")}}));
}

TEST_CASE("object name normalization") {
    CHECK(ObjectName::make("Washing Liquid")->str() == "washing_liquid");
    CHECK(ObjectName::make("towel-kitchen")->str() == "towel_kitchen");
    CHECK(ObjectName::make("milk")->str() == "milk");
    CHECK(ObjectName::make("cup_")->str() == "cup");
    CHECK_FALSE(ObjectName::make("").has_value());
    CHECK_FALSE(ObjectName::make("3pan").has_value());
    CHECK_FALSE(ObjectName::make("not").has_value());
    CHECK_FALSE(ObjectName::make("and").has_value());
    CHECK_FALSE(ObjectName::make("---").has_value());
}

TEST_CASE("condition rendering covers every surface form") {
    ObjectName milk = ObjectName::lit("milk");
    ObjectName table = ObjectName::lit("table");
    CHECK(render_condition({false, Predicate::in_hand(milk)}) == "milk in hand");
    CHECK(render_condition({true, Predicate::in_hand(milk)}) == "milk not in hand");
    CHECK(render_condition({false, Predicate::at(milk)}) == "milk in workspace");
    CHECK(render_condition({false, Predicate::open(milk)}) == "milk open");
    CHECK(render_condition({true, Predicate::clean(milk)}) == "milk not clean");
    CHECK(render_condition({false, Predicate::generic("at", {milk, table})}) == "milk at table");
    CHECK(render_condition({true, Predicate::generic("at", {milk, table})}) ==
          "milk not at table");
    CHECK(render_condition({false, Predicate::generic("ripe", {milk})}) == "milk ripe");
    CHECK(render_condition({true, Predicate::generic("near", {milk, table})}) ==
          "not near(milk, table)");
}

TEST_CASE("flatten walks bodies depth first") {
    Program p;
    p.name = "demo";
    p.body.push_back(make_act({Verb::Goto, {ObjectName::lit("milk")}}));
    p.body.push_back(make_if({false, Predicate::in_hand(ObjectName::lit("milk"))},
                             {make_act({Verb::Release, {ObjectName::lit("milk")}}),
                              make_while({false, Predicate::open(ObjectName::lit("fridge"))},
                                         {make_act({Verb::Use, {ObjectName::lit("fridge")}})})}));
    p.body.push_back(make_act({Verb::Wait, {}}));

    auto flat = flatten(p);
    REQUIRE(flat.size() == 4);
    CHECK(flat[0].verb == Verb::Goto);
    CHECK(flat[1].verb == Verb::Release);
    CHECK(flat[2].verb == Verb::Use);
    CHECK(flat[3].verb == Verb::Wait);
    CHECK(ts::count_acts(p.body) == 4);

    auto objects = mentioned_objects(p);
    REQUIRE(objects.size() == 5); // goto arg, if cond, release arg, while cond, use arg
    CHECK(objects[0].str() == "milk");
    CHECK(objects[1].str() == "milk");
    CHECK(objects[3].str() == "fridge");
}

TEST_CASE("validate_program flags structural breakage") {
    Program p;
    p.name = "broken name"; // spaces are not identifier material
    CHECK_FALSE(validate_program(p).empty());

    p.name = "ok";
    p.stop_t = *TimeStamp::parse("1");
    p.start_t = *TimeStamp::parse("2");
    CHECK_FALSE(validate_program(p).empty());

    p.start_t = TimeStamp{};
    p.stop_t = TimeStamp{};
    p.body.push_back(make_act({Verb::Grasp, {}})); // arity violation
    CHECK_FALSE(validate_program(p).empty());

    p.body.clear();
    p.body.push_back(make_if({false, Predicate::open(ObjectName::lit("fridge"))}, {}));
    auto findings = validate_program(p);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0] == "empty block");
}

TEST_CASE("validate_program enforces comment anchor discipline") {
    Program p;
    p.name = "ok";
    p.body.push_back(make_act({Verb::Wait, {}}));

    SUBCASE("clean interleave passes") {
        p.comments.push_back({1, "# preamble"});
        p.comments.push_back({3, "# after the body"});
        CHECK(validate_program(p).empty());
    }
    SUBCASE("duplicate anchors fail") {
        p.comments.push_back({1, "# a"});
        p.comments.push_back({1, "# b"});
        CHECK_FALSE(validate_program(p).empty());
    }
    SUBCASE("anchor gaps fail") {
        p.comments.push_back({9, "# far away"});
        CHECK_FALSE(validate_program(p).empty());
    }
    SUBCASE("post-header prose fails") {
        p.comments.push_back({3, "stray prose"});
        CHECK_FALSE(validate_program(p).empty());
    }
    SUBCASE("preamble may be prose but never a def line") {
        p.comments.push_back({1, "import kitchen_utils"});
        CHECK(validate_program(p).empty());
        p.comments.push_back({2, "def impostor():"});
        CHECK_FALSE(validate_program(p).empty());
    }
}

TEST_CASE("serialize emits the canonical layout") {
    Program p;
    p.name = "demo";
    p.start_t = *TimeStamp::parse("0");
    p.stop_t = *TimeStamp::parse("7.24");
    p.comments.push_back({2, "    # rinse"});
    p.body.push_back(make_if({true, Predicate::in_hand(ObjectName::lit("cucumber"))},
                             {make_act({Verb::Goto, {ObjectName::lit("cucumber")}})}));
    CHECK(serialize(p) ==
          "def demo(start_t=0, stop_t=7.24):\n"
          "    # rinse\n"
          "    if cucumber not in hand:\n"
          "        goto(cucumber)\n");
}

TEST_CASE("append_comment lands past everything already present") {
    Program p;
    p.name = "demo";
    p.body.push_back(make_act({Verb::Wait, {}}));
    append_comment(p, "# one");
    append_comment(p, "# two");
    CHECK(p.comments.size() == 2);
    CHECK(p.comments[0].line == 3);
    CHECK(p.comments[1].line == 4);
    CHECK(validate_program(p).empty());
}

TEST_CASE("fuzzed programs validate, serialize and count consistently") {
    ts::Rng rng(0x5eed001);
    for (int i = 0; i < 300; ++i) {
        ts::FuzzProgram fp = ts::random_program(rng, i);
        CAPTURE(i);
        CHECK(validate_program(fp.program).empty());
        CHECK(static_cast<int>(flatten(fp.program).size()) == fp.act_count);
        CHECK(ts::count_acts(fp.program.body) == fp.act_count);
        // Serialization is deterministic.
        CHECK(serialize(fp.program) == serialize(fp.program));
    }
}
