#include "leap/planner.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace leap {

namespace {

bool goal_satisfied(const WorldState& state, const Goal& goal) {
    for (const Condition& c : goal.conditions) {
        if (holds(state, c) != Truth::True) return false;
    }
    return true;
}

struct Candidate {
    // Primitive when program is null.
    SubAction action;
    const Program* program = nullptr;
    std::string call_name;
};

// Candidate order defines the deterministic tie-break: primitives first
// ordered by (verb name, args), then calls ordered by program name.
std::vector<Candidate> candidate_actions(std::span<const Program> library,
                                         const SchemaTable& schemas,
                                         std::span<const ObjectName> universe) {
    std::vector<ObjectName> objects(universe.begin(), universe.end());
    std::sort(objects.begin(), objects.end());
    objects.erase(std::unique(objects.begin(), objects.end()), objects.end());

    std::vector<Verb> verbs;
    for (const auto& [verb, schema] : schemas) verbs.push_back(verb);
    std::sort(verbs.begin(), verbs.end(), [](Verb a, Verb b) {
        return verb_name(a) < verb_name(b);
    });

    std::vector<Candidate> out;
    for (Verb verb : verbs) {
        auto [lo, hi] = verb_arity(verb);
        for (int arity = lo; arity <= hi; ++arity) {
            if (arity == 0) {
                out.push_back(Candidate{SubAction{verb, {}}, nullptr, {}});
            } else if (arity == 1) {
                for (const ObjectName& a : objects) {
                    out.push_back(Candidate{SubAction{verb, {a}}, nullptr, {}});
                }
            } else {
                for (const ObjectName& a : objects) {
                    for (const ObjectName& b : objects) {
                        out.push_back(Candidate{SubAction{verb, {a, b}}, nullptr, {}});
                    }
                }
            }
        }
    }
    std::vector<const Program*> sorted_library;
    for (const Program& p : library) sorted_library.push_back(&p);
    std::stable_sort(sorted_library.begin(), sorted_library.end(),
                     [](const Program* a, const Program* b) { return a->name < b->name; });
    for (const Program* p : sorted_library) {
        out.push_back(Candidate{SubAction{}, p, p->name});
    }
    return out;
}

} // namespace

Expected<Plan, PlanError> plan(const WorldState& initial, const Goal& goal,
                               std::span<const Program> library, const SchemaTable& schemas,
                               std::span<const ObjectName> object_universe, int max_depth) {
    if (object_universe.empty()) {
        return PlanError{PlanError::Kind::Guard, "object universe is empty"};
    }
    {
        std::set<ObjectName> unique(object_universe.begin(), object_universe.end());
        if (unique.size() > kMaxPlanObjects) {
            return PlanError{PlanError::Kind::Guard,
                             "object universe exceeds " + std::to_string(kMaxPlanObjects) +
                                 " objects"};
        }
    }
    if (max_depth < 1 || max_depth > kMaxPlanDepth) {
        return PlanError{PlanError::Kind::Guard,
                         "max_depth must be in 1.." + std::to_string(kMaxPlanDepth)};
    }

    if (goal_satisfied(initial, goal)) return Plan{};

    std::vector<Candidate> candidates = candidate_actions(library, schemas, object_universe);

    struct Node {
        WorldState state;
        std::size_t parent;
        std::size_t candidate;
    };
    std::vector<Node> nodes;
    std::set<std::map<Predicate, bool>> visited;
    nodes.push_back(Node{initial, 0, 0});
    visited.insert(initial.facts());

    auto reconstruct = [&](std::size_t leaf) {
        std::vector<std::size_t> chain;
        for (std::size_t n = leaf; n != 0; n = nodes[n].parent) chain.push_back(nodes[n].candidate);
        std::reverse(chain.begin(), chain.end());
        Plan plan;
        for (std::size_t ci : chain) {
            const Candidate& c = candidates[ci];
            if (c.program) {
                plan.steps.push_back(
                    PlanStep{CallStep{c.call_name, std::make_shared<Program>(*c.program)}});
            } else {
                plan.steps.push_back(PlanStep{c.action});
            }
        }
        return plan;
    };

    ExecOptions strict_opts;
    strict_opts.mode = ExecMode::Strict;
    strict_opts.fuel = kDefaultFuel;

    std::size_t frontier_begin = 0;
    std::size_t frontier_end = nodes.size();
    for (int depth = 1; depth <= max_depth; ++depth) {
        for (std::size_t ni = frontier_begin; ni < frontier_end; ++ni) {
            for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
                const Candidate& c = candidates[ci];
                WorldState next;
                if (c.program) {
                    ExecReport r = execute(*c.program, nodes[ni].state, schemas, strict_opts);
                    if (!r.valid || r.fuel_exhausted()) continue;
                    next = std::move(r.final_state);
                } else {
                    StepResult sr = step(nodes[ni].state, c.action, schemas, ExecMode::Closed);
                    if (sr.violation) continue;
                    next = std::move(sr.state);
                }
                if (!visited.insert(next.facts()).second) continue;
                nodes.push_back(Node{std::move(next), ni, ci});
                if (goal_satisfied(nodes.back().state, goal)) {
                    return reconstruct(nodes.size() - 1);
                }
            }
        }
        frontier_begin = frontier_end;
        frontier_end = nodes.size();
        if (frontier_begin == frontier_end) break; // state space exhausted
    }
    return PlanError{PlanError::Kind::NoPlan,
                     "no plan within depth " + std::to_string(max_depth)};
}

Expected<Program, std::string> plan_to_program(const Plan& plan, const std::string& name) {
    bool name_ok = !name.empty() && name[0] >= 'a' && name[0] <= 'z';
    for (char c : name) {
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) name_ok = false;
    }
    if (!name_ok) {
        return std::string("'" + name + "' is not a valid program name");
    }
    Program out;
    out.name = name;
    out.start_t = TimeStamp{0, 0};
    out.stop_t = TimeStamp{0, 0};
    for (const PlanStep& step : plan.steps) {
        if (step.is_primitive()) {
            out.body.push_back(make_act(step.primitive()));
        } else {
            append_comment(out, "    # inlined from " + step.call().name);
            const Program& callee = *step.call().program;
            for (const Stmt& stmt : callee.body) out.body.push_back(stmt);
        }
    }
    return out;
}

} // namespace leap
