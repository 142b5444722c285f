#include "doctest.h"

#include <string>
#include <vector>

#include "leap/parser.hpp"
#include "leap/planner.hpp"
#include "support/oracle_planner.hpp"

using namespace leap;
namespace ts = leap::testsupport;

namespace {

Program must_parse(const std::string& text) {
    ParseResult r = parse_program(text);
    REQUIRE(r.ok());
    return r.value();
}

const ObjectName kMilk = ObjectName::lit("milk");
const ObjectName kCup = ObjectName::lit("cup");

std::vector<std::string> step_names(const Plan& plan) {
    std::vector<std::string> out;
    for (const PlanStep& step : plan.steps) {
        out.push_back(step.is_primitive() ? render_call(step.primitive())
                                          : "call " + step.call().name);
    }
    return out;
}

bool goal_true(const WorldState& state, const Goal& goal) {
    for (const Condition& c : goal.conditions) {
        if (holds(state, c) != Truth::True) return false;
    }
    return true;
}

} // namespace

TEST_CASE("an unheld object needs goto before grasp") {
    Goal goal{{Condition{false, Predicate::in_hand(kMilk)}}};
    std::vector<ObjectName> universe{kMilk};
    auto r = plan(WorldState{}, goal, {}, default_schemas(), universe, 6);
    REQUIRE(r.ok());
    CHECK(step_names(r.value()) == std::vector<std::string>{"goto(milk)", "grasp(milk)"});
}

TEST_CASE("a present object is grasped directly") {
    WorldState s;
    s.set(Predicate::at(kMilk), Truth::True);
    Goal goal{{Condition{false, Predicate::in_hand(kMilk)}}};
    std::vector<ObjectName> universe{kMilk};
    auto r = plan(s, goal, {}, default_schemas(), universe, 6);
    REQUIRE(r.ok());
    CHECK(step_names(r.value()) == std::vector<std::string>{"grasp(milk)"});
}

TEST_CASE("a satisfied goal yields the empty plan") {
    WorldState s;
    s.set(Predicate::in_hand(kMilk), Truth::True);
    Goal goal{{Condition{false, Predicate::in_hand(kMilk)}}};
    std::vector<ObjectName> universe{kMilk};
    auto r = plan(s, goal, {}, default_schemas(), universe, 6);
    REQUIRE(r.ok());
    CHECK(r.value().cost() == 0);
}

TEST_CASE("guards reject degenerate queries") {
    Goal goal{{Condition{false, Predicate::in_hand(kMilk)}}};
    auto r = plan(WorldState{}, goal, {}, default_schemas(), {}, 6);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().kind == PlanError::Kind::Guard);

    std::vector<ObjectName> too_many;
    for (int i = 0; i < 65; ++i) too_many.push_back(ObjectName::lit("o" + std::to_string(i)));
    r = plan(WorldState{}, goal, {}, default_schemas(), too_many, 6);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().kind == PlanError::Kind::Guard);

    std::vector<ObjectName> universe{kMilk};
    r = plan(WorldState{}, goal, {}, default_schemas(), universe, 0);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().kind == PlanError::Kind::Guard);
    r = plan(WorldState{}, goal, {}, default_schemas(), universe, kMaxPlanDepth + 1);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().kind == PlanError::Kind::Guard);
}

TEST_CASE("unreachable goals report no_plan") {
    Goal goal{{Condition{false, Predicate::clean(kMilk)}}};
    std::vector<ObjectName> universe{kMilk};
    auto r = plan(WorldState{}, goal, {}, default_schemas(), universe, 4);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().kind == PlanError::Kind::NoPlan);
    CHECK(r.error().message.find("depth 4") != std::string::npos);
}

TEST_CASE("ties break lexicographically and results are depth-stable") {
    WorldState s;
    s.set(Predicate::in_hand(kMilk), Truth::True);
    s.set(Predicate::in_hand(kCup), Truth::True);
    Goal goal{{Condition{true, Predicate::in_hand(kMilk)},
               Condition{true, Predicate::in_hand(kCup)}}};
    std::vector<ObjectName> universe{kMilk, kCup};

    auto r = plan(s, goal, {}, default_schemas(), universe, 4);
    REQUIRE(r.ok());
    // release(cup) orders before release(milk); both 2-step plans reach the goal.
    CHECK(step_names(r.value()) ==
          std::vector<std::string>{"release(cup)", "release(milk)"});

    auto deep = plan(s, goal, {}, default_schemas(), universe, kMaxPlanDepth);
    REQUIRE(deep.ok());
    CHECK(step_names(deep.value()) == step_names(r.value()));
}

TEST_CASE("an admissible library call can beat primitive sequences") {
    Program handoff = must_parse("def handoff(start_t=0, stop_t=2):\n"
                                 "    if milk in hand:\n"
                                 "        release(milk)\n"
                                 "    if cup in hand:\n"
                                 "        release(cup)\n");
    WorldState s;
    s.set(Predicate::in_hand(kMilk), Truth::True);
    s.set(Predicate::in_hand(kCup), Truth::True);
    Goal goal{{Condition{true, Predicate::in_hand(kMilk)},
               Condition{true, Predicate::in_hand(kCup)}}};
    std::vector<ObjectName> universe{kMilk, kCup};
    std::vector<Program> library{handoff};

    auto r = plan(s, goal, library, default_schemas(), universe, 4);
    REQUIRE(r.ok());
    CHECK(step_names(r.value()) == std::vector<std::string>{"call handoff"});
}

TEST_CASE("library programs that strictly violate are never called") {
    Program dash = must_parse("def dash(start_t=0, stop_t=1):\n"
                              "    goto(milk)\n");
    Goal goal{{Condition{false, Predicate::at(kMilk)}}};
    std::vector<ObjectName> universe{kMilk};
    std::vector<Program> library{dash};

    auto r = plan(WorldState{}, goal, library, default_schemas(), universe, 4);
    REQUIRE(r.ok());
    CHECK(step_names(r.value()) == std::vector<std::string>{"goto(milk)"});
}

TEST_CASE("plan_to_program renders primitives and inlines calls") {
    Program handoff = must_parse("def handoff(start_t=0, stop_t=2):\n"
                                 "    if milk in hand:\n"
                                 "        release(milk)\n"
                                 "    if cup in hand:\n"
                                 "        release(cup)\n");
    Plan plan_steps;
    plan_steps.steps.push_back(PlanStep{SubAction{Verb::Goto, {kMilk}}});
    plan_steps.steps.push_back(
        PlanStep{CallStep{"handoff", std::make_shared<Program>(handoff)}});

    auto rendered = plan_to_program(plan_steps, "plan_out");
    REQUIRE(rendered.ok());
    CHECK(serialize(rendered.value()) == "def plan_out(start_t=0, stop_t=0):\n"
                                         "    goto(milk)\n"
                                         "    # inlined from handoff\n"
                                         "    if milk in hand:\n"
                                         "        release(milk)\n"
                                         "    if cup in hand:\n"
                                         "        release(cup)\n");
    CHECK(validate_program(rendered.value()).empty());

    CHECK_FALSE(plan_to_program(plan_steps, "9plan").ok());
    CHECK_FALSE(plan_to_program(plan_steps, "").ok());
}

TEST_CASE("planning twice from equal inputs gives equal plans") {
    ts::Rng rng(0xde7d);
    for (int i = 0; i < 10; ++i) {
        ts::PlanInstance inst = ts::random_instance(rng, i);
        auto a = plan(inst.initial, inst.goal, inst.library, default_schemas(), inst.universe,
                      inst.max_depth);
        auto b = plan(inst.initial, inst.goal, inst.library, default_schemas(), inst.universe,
                      inst.max_depth);
        CAPTURE(i);
        REQUIRE(a.ok() == b.ok());
        if (a.ok()) CHECK(step_names(a.value()) == step_names(b.value()));
    }
}

TEST_CASE("random instances agree with the exhaustive oracle and replay cleanly") {
    ts::Rng rng(0x9a13);
    SchemaTable schemas = default_schemas();
    int solvable = 0;
    int unsolvable = 0;
    int with_calls = 0;
    for (int i = 0; i < 40; ++i) {
        ts::PlanInstance inst = ts::random_instance(rng, i);
        auto oracle = ts::oracle_min_plan_length(inst.initial, inst.goal, inst.library, schemas,
                                                 inst.universe, inst.max_depth);
        auto result =
            plan(inst.initial, inst.goal, inst.library, schemas, inst.universe, inst.max_depth);
        CAPTURE(i);
        if (oracle.has_value()) {
            ++solvable;
            REQUIRE(result.ok());
            CHECK(result.value().cost() == *oracle);
            for (const PlanStep& step : result.value().steps) {
                if (!step.is_primitive()) ++with_calls;
            }
            auto rendered = plan_to_program(result.value(), "replay");
            REQUIRE(rendered.ok());
            ExecOptions closed;
            closed.mode = ExecMode::Closed;
            ExecReport replay = execute(rendered.value(), inst.initial, schemas, closed);
            CHECK(replay.valid);
            CHECK(goal_true(replay.final_state, inst.goal));
        } else {
            ++unsolvable;
            REQUIRE_FALSE(result.ok());
            CHECK(result.error().kind == PlanError::Kind::NoPlan);
        }
    }
    // The sample must exercise all three interesting shapes.
    CHECK(solvable > 0);
    CHECK(unsolvable > 0);
    CHECK(with_calls > 0);
}
