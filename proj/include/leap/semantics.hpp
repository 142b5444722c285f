#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leap/ast.hpp"
#include "leap/expected.hpp"

namespace leap {

// Kleene three-valued truth. Ordering False < Unknown < True makes min/max
// the natural and/or.
enum class Truth { False, Unknown, True };

Truth truth_not(Truth t);
Truth truth_and(Truth a, Truth b);
Truth truth_or(Truth a, Truth b);
std::string_view truth_name(Truth t);

// Open-world state: a predicate absent from the map is Unknown. Only True and
// False are stored, so equal states compare equal regardless of history.
class WorldState {
public:
    Truth lookup(const Predicate& p) const;
    void set(const Predicate& p, Truth value); // Unknown erases
    bool contains(const Predicate& p) const { return facts_.count(p) != 0; }

    const std::map<Predicate, bool>& facts() const { return facts_; }
    std::size_t size() const { return facts_.size(); }

    bool operator==(const WorldState&) const = default;

private:
    std::map<Predicate, bool> facts_;
};

// Evaluates a condition in a state: predicate truth, negated through
// truth_not (Unknown stays Unknown).
Truth holds(const WorldState& state, const Condition& condition);

// Schema templates refer to the action's argument slots (0-based) or to
// literal objects, so one schema covers every grounding.
struct TemplateTerm {
    bool is_slot = false;
    int slot = 0; // 0 or 1
    ObjectName literal = ObjectName::lit("x");

    static TemplateTerm slot_ref(int slot) { return TemplateTerm{true, slot, ObjectName::lit("x")}; }
    static TemplateTerm lit_ref(ObjectName name) {
        return TemplateTerm{false, 0, std::move(name)};
    }
    bool operator==(const TemplateTerm&) const = default;
};

struct ConditionTemplate {
    bool negated = false;
    PredicateKind kind = PredicateKind::Generic;
    std::string generic_name; // Generic only
    std::vector<TemplateTerm> args;
    // Restricts the template to one grounding arity (-1: applies whenever the
    // referenced slots exist). Lets positioned(x) and positioned(x, y) coexist.
    int exact_args = -1;

    // Highest slot index referenced, or -1 for fully literal templates. A
    // template applies to an action only when the action supplies that slot.
    int max_slot() const;
    // Grounds against the action's argument list. Precondition: applicable.
    Condition ground(std::span<const ObjectName> args) const;

    bool operator==(const ConditionTemplate&) const = default;
};

// One precondition entry: a disjunction of templates (singleton for the
// common case). Needed because 2-arg Use requires At(y) OR InHand(y).
struct PreconditionGroup {
    std::vector<ConditionTemplate> any_of;
    bool operator==(const PreconditionGroup&) const = default;
};

struct SchemaEffect {
    ConditionTemplate condition;
    Truth value = Truth::True; // truth assigned to the condition (negation folds in)
    bool operator==(const SchemaEffect&) const = default;
};

struct ActionSchema {
    Verb verb = Verb::DoNothing;
    int slots = 0; // 0..2: how many argument slots templates may reference
    std::vector<PreconditionGroup> preconditions;
    std::vector<SchemaEffect> postconditions;
    bool operator==(const ActionSchema&) const = default;
};

// One schema per verb.
using SchemaTable = std::map<Verb, ActionSchema>;

// The built-in table (goto establishes At, grasp requires At and not InHand,
// and so on). Wait and DoNothing have no preconditions or effects.
SchemaTable default_schemas();

// Overlay file: one entry per line,
//   verb(arity): pre <cond>[, <cond>...]; post <cond>=<true|false>[, ...]
// where 'x'/'y' inside conditions denote argument slots 1/2 and any other
// identifier is a literal object. '#' comments and blank lines are skipped.
// Entries merge onto the defaults (preconditions and effects appended).
Expected<SchemaTable, std::string> parse_schema_overlay(std::string_view text,
                                                        SchemaTable base = default_schemas());

enum class ViolationReason { PreconditionFalse, PreconditionUnknown };

struct Violation {
    std::size_t step_index = 0; // index into ExecReport::trace
    SubAction sub_action;
    Condition failed;
    ViolationReason reason = ViolationReason::PreconditionFalse;
    WorldState state_snapshot; // state at the moment of the attempt
};

// How Unknown predicate values are treated at preconditions:
//   Optimistic  assume the needed value, record the assumption, continue.
//   Strict      any Unknown precondition is a violation.
//   Closed      closed world: an unset atom counts as False, so negated
//               conditions over unknown atoms succeed and positive ones fail.
//               Used by the planner's primitive expansion.
enum class ExecMode { Optimistic, Strict, Closed };

struct ExecOptions {
    int fuel = 64; // shared loop-iteration budget per execute()
    ExecMode mode = ExecMode::Optimistic;
};

inline constexpr int kDefaultFuel = 64;

struct TraceEntry {
    SubAction action;
    WorldState state_after; // unchanged from state-before when the step violated
};

struct ExecReport {
    bool valid = true; // violations.empty()
    WorldState final_state;
    std::vector<TraceEntry> trace;
    std::vector<Violation> violations;
    std::map<std::string, int> loop_iterations;    // loop site path -> iterations run
    std::vector<std::string> fuel_exhausted_sites; // loops cut off by the budget
    // chain() only: (program name, index of its first trace entry).
    std::vector<std::pair<std::string, std::size_t>> program_marks;

    bool fuel_exhausted() const { return !fuel_exhausted_sites.empty(); }
};

struct StepResult {
    WorldState state;
    std::optional<Violation> violation;
    // Predicates written while applying the step, split by cause. Effects are
    // schema postconditions; assumptions are recorded Unknown preconditions.
    std::vector<Predicate> effect_writes;
    std::vector<Predicate> assumption_writes;
};

// Applies one sub-action. A False precondition leaves the state untouched and
// reports a Violation; Unknown preconditions are optimistically assumed True
// and recorded into the state (Strict mode reports them instead). Throws
// std::invalid_argument when the action's arity is outside its verb's range;
// that is an ill-formed action, not a domain violation.
StepResult step(const WorldState& state, const SubAction& action, const SchemaTable& schemas,
                ExecMode mode = ExecMode::Optimistic);

// Runs a whole program. If-bodies run when the condition is True (or Unknown,
// optimistically assumed and recorded; Strict skips instead). While-bodies
// re-evaluate per iteration against the updated state and draw one unit of
// fuel per iteration from a budget shared by every loop in this call; an
// Unknown loop condition assumed True is flipped False after the first
// iteration unless a body effect wrote its predicate. Violations skip the
// action and execution continues.
ExecReport execute(const Program& program, const WorldState& initial, const SchemaTable& schemas,
                   const ExecOptions& options = {});

// Threads final states through a sequence of programs; each program gets a
// fresh fuel budget, traces concatenate with program_marks at the joins.
ExecReport chain(std::span<const Program> programs, const WorldState& initial,
                 const SchemaTable& schemas, const ExecOptions& options = {});

// State files: one condition per line in the parser's condition surface; a
// negated line sets its predicate False, a plain line sets it True. Returns
// a message naming the first offending line on failure.
Expected<WorldState, std::string> parse_state_text(std::string_view text);
std::string render_state(const WorldState& state); // same format, sorted

} // namespace leap
