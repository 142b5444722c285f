#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "leap/ast.hpp"
#include "leap/expected.hpp"
#include "leap/semantics.hpp"

namespace leap {

// A goal is a conjunction: every condition must hold True (not merely
// not-False) in the final state.
struct Goal {
    std::vector<Condition> conditions;
};

// A plan step is either a grounded primitive or a call to a library program.
// Call keeps a snapshot of the callee so the plan stays self-contained.
struct CallStep {
    std::string name;
    std::shared_ptr<const Program> program;
};

struct PlanStep {
    std::variant<SubAction, CallStep> v;

    bool is_primitive() const { return std::holds_alternative<SubAction>(v); }
    const SubAction& primitive() const { return std::get<SubAction>(v); }
    const CallStep& call() const { return std::get<CallStep>(v); }
};

struct Plan {
    std::vector<PlanStep> steps;
    std::size_t cost() const { return steps.size(); }
};

struct PlanError {
    enum class Kind { NoPlan, Guard } kind = Kind::NoPlan;
    std::string message;
};

inline constexpr int kMaxPlanDepth = 12;
inline constexpr std::size_t kMaxPlanObjects = 64;

// Breadth-first search from the initial state over every grounded primitive
// (schema x object universe, all legal arities) plus whole library programs
// (admissible only when a strict-mode execution from the current state is
// violation-free and inside the fuel budget). Primitives apply under the
// closed world: an unset atom counts as False, so from an empty state
// grasp(milk) needs goto(milk) first. Returns the minimum-length
// plan; ties resolve to the lexicographically least step sequence (primitives
// before calls, then verb name, then argument names, calls by program name),
// so equal queries always yield equal plans. Guard errors: empty or oversize
// (> 64) universe, max_depth outside 1..12.
Expected<Plan, PlanError> plan(const WorldState& initial, const Goal& goal,
                               std::span<const Program> library, const SchemaTable& schemas,
                               std::span<const ObjectName> object_universe, int max_depth);

// Renders a plan as a runnable program: primitives become statements, calls
// inline the callee's body behind a comment naming the source program.
// start_t and stop_t are 0. Fails only on an invalid program name.
Expected<Program, std::string> plan_to_program(const Plan& plan, const std::string& name);

} // namespace leap
