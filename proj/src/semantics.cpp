#include "leap/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "leap/parser.hpp"

namespace leap {

Truth truth_not(Truth t) {
    switch (t) {
    case Truth::True: return Truth::False;
    case Truth::False: return Truth::True;
    case Truth::Unknown: return Truth::Unknown;
    }
    return Truth::Unknown;
}

Truth truth_and(Truth a, Truth b) { return std::min(a, b); }
Truth truth_or(Truth a, Truth b) { return std::max(a, b); }

std::string_view truth_name(Truth t) {
    switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    case Truth::Unknown: return "unknown";
    }
    return "unknown";
}

Truth WorldState::lookup(const Predicate& p) const {
    auto it = facts_.find(p);
    if (it == facts_.end()) return Truth::Unknown;
    return it->second ? Truth::True : Truth::False;
}

void WorldState::set(const Predicate& p, Truth value) {
    if (value == Truth::Unknown) {
        facts_.erase(p);
    } else {
        facts_[p] = (value == Truth::True);
    }
}

Truth holds(const WorldState& state, const Condition& condition) {
    Truth t = state.lookup(condition.pred);
    return condition.negated ? truth_not(t) : t;
}

int ConditionTemplate::max_slot() const {
    int m = -1;
    for (const TemplateTerm& term : args) {
        if (term.is_slot && term.slot > m) m = term.slot;
    }
    return m;
}

Condition ConditionTemplate::ground(std::span<const ObjectName> action_args) const {
    Predicate pred;
    pred.kind = kind;
    pred.name = generic_name;
    pred.args.reserve(args.size());
    for (const TemplateTerm& term : args) {
        if (term.is_slot) {
            assert(term.slot >= 0 && static_cast<std::size_t>(term.slot) < action_args.size());
            pred.args.push_back(action_args[static_cast<std::size_t>(term.slot)]);
        } else {
            pred.args.push_back(term.literal);
        }
    }
    return Condition{negated, std::move(pred)};
}

namespace {

bool applicable(const ConditionTemplate& t, std::size_t nargs) {
    if (t.exact_args >= 0 && static_cast<std::size_t>(t.exact_args) != nargs) return false;
    return static_cast<std::size_t>(t.max_slot() + 1) <= nargs;
}

ConditionTemplate tpl(bool negated, PredicateKind kind, std::string name,
                      std::vector<TemplateTerm> args, int exact_args = -1) {
    return ConditionTemplate{negated, kind, std::move(name), std::move(args), exact_args};
}

TemplateTerm s0() { return TemplateTerm::slot_ref(0); }
TemplateTerm s1() { return TemplateTerm::slot_ref(1); }

} // namespace

SchemaTable default_schemas() {
    SchemaTable table;
    {
        ActionSchema s;
        s.verb = Verb::Goto;
        s.slots = 1;
        s.preconditions = {{{tpl(true, PredicateKind::At, "", {s0()})}}};
        s.postconditions = {{tpl(false, PredicateKind::At, "", {s0()}), Truth::True}};
        table[s.verb] = s;
    }
    {
        ActionSchema s;
        s.verb = Verb::Grasp;
        s.slots = 1;
        s.preconditions = {{{tpl(false, PredicateKind::At, "", {s0()})}},
                           {{tpl(true, PredicateKind::InHand, "", {s0()})}}};
        s.postconditions = {{tpl(false, PredicateKind::InHand, "", {s0()}), Truth::True}};
        table[s.verb] = s;
    }
    {
        ActionSchema s;
        s.verb = Verb::Release;
        s.slots = 1;
        s.preconditions = {{{tpl(false, PredicateKind::InHand, "", {s0()})}}};
        s.postconditions = {{tpl(false, PredicateKind::InHand, "", {s0()}), Truth::False}};
        table[s.verb] = s;
    }
    {
        ActionSchema s;
        s.verb = Verb::Move;
        s.slots = 2;
        s.preconditions = {{{tpl(false, PredicateKind::InHand, "", {s0()})}}};
        s.postconditions = {
            {tpl(false, PredicateKind::Generic, "near", {s0(), s1()}), Truth::True}};
        table[s.verb] = s;
    }
    {
        ActionSchema s;
        s.verb = Verb::Use;
        s.slots = 2;
        s.preconditions = {{{tpl(false, PredicateKind::InHand, "", {s0()})}},
                           {{tpl(false, PredicateKind::At, "", {s1()}),
                             tpl(false, PredicateKind::InHand, "", {s1()})}}};
        table[s.verb] = s;
    }
    {
        ActionSchema s;
        s.verb = Verb::Position;
        s.slots = 2;
        s.preconditions = {{{tpl(false, PredicateKind::InHand, "", {s0()})}}};
        s.postconditions = {
            {tpl(false, PredicateKind::Generic, "positioned", {s0()}, 1), Truth::True},
            {tpl(false, PredicateKind::Generic, "positioned", {s0(), s1()}, 2), Truth::True}};
        table[s.verb] = s;
    }
    {
        ActionSchema s;
        s.verb = Verb::Wait;
        s.slots = 0;
        table[s.verb] = s;
    }
    {
        ActionSchema s;
        s.verb = Verb::DoNothing;
        s.slots = 0;
        table[s.verb] = s;
    }
    return table;
}

namespace {

void apply_effect(WorldState& state, const SchemaEffect& effect,
                  std::span<const ObjectName> args, std::vector<Predicate>* written) {
    Condition ground = effect.condition.ground(args);
    Truth target = ground.negated ? truth_not(effect.value) : effect.value;
    state.set(ground.pred, target);
    if (written) written->push_back(ground.pred);
}

// Makes the condition hold (True) in the state.
void record_condition(WorldState& state, const Condition& condition, Truth wanted = Truth::True) {
    Truth target = condition.negated ? truth_not(wanted) : wanted;
    state.set(condition.pred, target);
}

} // namespace

StepResult step(const WorldState& state, const SubAction& action, const SchemaTable& schemas,
                ExecMode mode) {
    if (!arity_ok(action)) {
        auto [lo, hi] = verb_arity(action.verb);
        throw std::invalid_argument("arity mismatch: " + render_call(action) + " (expected " +
                                    std::to_string(lo) + ".." + std::to_string(hi) + " args)");
    }
    StepResult result;
    result.state = state;
    auto table_it = schemas.find(action.verb);
    if (table_it == schemas.end()) return result; // no schema: vacuous action
    const ActionSchema& schema = table_it->second;
    std::size_t nargs = action.args.size();

    // First pass: evaluate every precondition group against the incoming
    // state. A False group wins over a later Unknown one.
    std::vector<Condition> unknown_picks;
    for (const PreconditionGroup& group : schema.preconditions) {
        Truth open_value = Truth::False;   // OR of the alternatives as-is
        Truth closed_value = Truth::False; // same with unset atoms read as False
        std::optional<Condition> first_applicable;
        std::optional<Condition> first_unknown;
        bool any_applicable = false;
        for (const ConditionTemplate& alt : group.any_of) {
            if (!applicable(alt, nargs)) continue;
            any_applicable = true;
            Condition ground = alt.ground(action.args);
            if (!first_applicable) first_applicable = ground;
            Truth t = holds(state, ground);
            open_value = truth_or(open_value, t);
            if (t == Truth::Unknown) {
                if (!first_unknown) first_unknown = ground;
                t = ground.negated ? Truth::True : Truth::False;
            }
            closed_value = truth_or(closed_value, t);
        }
        if (!any_applicable) continue;
        const Truth value = mode == ExecMode::Closed ? closed_value : open_value;
        if (value == Truth::False) {
            Violation v;
            v.sub_action = action;
            const bool was_unknown = open_value == Truth::Unknown;
            v.failed = was_unknown ? *first_unknown : *first_applicable;
            v.reason = was_unknown ? ViolationReason::PreconditionUnknown
                                   : ViolationReason::PreconditionFalse;
            v.state_snapshot = state;
            result.violation = v;
            return result; // state untouched
        }
        if (value == Truth::Unknown) {
            if (mode == ExecMode::Strict) {
                Violation v;
                v.sub_action = action;
                v.failed = *first_unknown;
                v.reason = ViolationReason::PreconditionUnknown;
                v.state_snapshot = state;
                result.violation = v;
                return result;
            }
            unknown_picks.push_back(*first_unknown);
        }
    }
    // Optimistic assumptions land before effects so effects win on overlap.
    for (const Condition& pick : unknown_picks) {
        record_condition(result.state, pick);
        result.assumption_writes.push_back(pick.pred);
    }
    for (const SchemaEffect& effect : schema.postconditions) {
        if (!applicable(effect.condition, nargs)) continue;
        apply_effect(result.state, effect, action.args, &result.effect_writes);
    }
    return result;
}

namespace {

class Executor {
public:
    Executor(const SchemaTable& schemas, const ExecOptions& options, WorldState state)
        : schemas_(schemas), options_(options), state_(std::move(state)),
          fuel_(options.fuel) {}

    void run_program(const Program& program, const std::string& site_prefix) {
        run_body(program.body, site_prefix);
    }

    WorldState take_state() { return std::move(state_); }
    ExecReport& report() { return report_; }

private:
    void run_body(const std::vector<Stmt>& body, const std::string& prefix) {
        for (std::size_t i = 0; i < body.size(); ++i) {
            std::string site = prefix.empty() ? std::to_string(i) : prefix + "." + std::to_string(i);
            const Stmt& stmt = body[i];
            if (stmt.is<ActStmt>()) {
                run_act(stmt.as<ActStmt>().action);
            } else if (stmt.is<IfStmt>()) {
                run_if(stmt.as<IfStmt>(), site);
            } else {
                run_while(stmt.as<WhileStmt>(), site);
            }
        }
    }

    void run_act(const SubAction& action) {
        StepResult result = step(state_, action, schemas_, options_.mode);
        TraceEntry entry;
        entry.action = action;
        if (result.violation) {
            entry.state_after = state_; // unchanged
            result.violation->step_index = report_.trace.size();
            report_.violations.push_back(std::move(*result.violation));
        } else {
            state_ = std::move(result.state);
            entry.state_after = state_;
            for (const Predicate& p : result.effect_writes) {
                note_effect_write(p);
            }
        }
        report_.trace.push_back(std::move(entry));
    }

    void run_if(const IfStmt& node, const std::string& site) {
        Truth t = holds(state_, node.condition);
        if (t == Truth::False) return;
        if (t == Truth::Unknown) {
            // Only the optimistic mode assumes its way into the branch.
            if (options_.mode != ExecMode::Optimistic) return;
            record_condition(state_, node.condition);
        }
        run_body(node.body, site);
    }

    void run_while(const WhileStmt& node, const std::string& site) {
        while (true) {
            Truth t = holds(state_, node.condition);
            if (t == Truth::False) break;
            bool assumed = false;
            if (t == Truth::Unknown) {
                if (options_.mode != ExecMode::Optimistic) break;
                record_condition(state_, node.condition);
                assumed = true;
            }
            if (fuel_ <= 0) {
                report_.fuel_exhausted_sites.push_back(site);
                break;
            }
            --fuel_;
            watch_.push_back({node.condition.pred, false});
            run_body(node.body, site);
            bool effect_wrote = watch_.back().second;
            watch_.pop_back();
            report_.loop_iterations[site] += 1;
            if (assumed && !effect_wrote) {
                // The assumption was never backed by an effect: flip the
                // condition off so the loop cannot spin on pure optimism.
                record_condition(state_, node.condition, Truth::False);
                break;
            }
        }
    }

    void note_effect_write(const Predicate& p) {
        for (auto& frame : watch_) {
            if (frame.first == p) frame.second = true;
        }
    }

    const SchemaTable& schemas_;
    const ExecOptions& options_;
    WorldState state_;
    int fuel_;
    ExecReport report_;
    std::vector<std::pair<Predicate, bool>> watch_;
};

} // namespace

ExecReport execute(const Program& program, const WorldState& initial, const SchemaTable& schemas,
                   const ExecOptions& options) {
    Executor exec(schemas, options, initial);
    exec.run_program(program, "");
    ExecReport report = std::move(exec.report());
    report.final_state = exec.take_state();
    report.valid = report.violations.empty();
    return report;
}

ExecReport chain(std::span<const Program> programs, const WorldState& initial,
                 const SchemaTable& schemas, const ExecOptions& options) {
    ExecReport combined;
    WorldState state = initial;
    for (std::size_t i = 0; i < programs.size(); ++i) {
        const Program& program = programs[i];
        ExecReport part = execute(program, state, schemas, options);
        std::size_t offset = combined.trace.size();
        combined.program_marks.emplace_back(program.name, offset);
        for (TraceEntry& entry : part.trace) combined.trace.push_back(std::move(entry));
        for (Violation& v : part.violations) {
            v.step_index += offset;
            combined.violations.push_back(std::move(v));
        }
        std::string key_prefix = std::to_string(i) + ":" + program.name + ":";
        for (const auto& [site, count] : part.loop_iterations) {
            combined.loop_iterations[key_prefix + site] = count;
        }
        for (const std::string& site : part.fuel_exhausted_sites) {
            combined.fuel_exhausted_sites.push_back(key_prefix + site);
        }
        state = part.final_state;
    }
    combined.final_state = std::move(state);
    combined.valid = combined.violations.empty();
    return combined;
}

namespace {

Expected<ConditionTemplate, std::string> template_from_condition(const Condition& condition,
                                                                 int arity) {
    ConditionTemplate out;
    out.negated = condition.negated;
    out.kind = condition.pred.kind;
    out.generic_name = condition.pred.name;
    out.exact_args = arity; // the entry speaks only about its declared arity
    for (const ObjectName& arg : condition.pred.args) {
        if (arg.str() == "x") {
            if (arity < 1) return std::string("slot x requires arity >= 1");
            out.args.push_back(TemplateTerm::slot_ref(0));
        } else if (arg.str() == "y") {
            if (arity < 2) return std::string("slot y requires arity >= 2");
            out.args.push_back(TemplateTerm::slot_ref(1));
        } else {
            out.args.push_back(TemplateTerm::lit_ref(arg));
        }
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return parts;
}

} // namespace

Expected<SchemaTable, std::string> parse_schema_overlay(std::string_view text, SchemaTable base) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, (nl == std::string_view::npos ? text.size() : nl) - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto fail = [&](const std::string& msg) {
            return std::string("overlay line ") + std::to_string(line_no) + ": " + msg;
        };

        // verb(arity): sections
        std::size_t lp = line.find('(');
        std::size_t rp = line.find(')');
        if (lp == std::string_view::npos || rp == std::string_view::npos || rp < lp) {
            return fail("expected 'verb(arity):'");
        }
        auto verb = verb_from_name(trim(line.substr(0, lp)));
        if (!verb) return fail("unknown verb '" + std::string(trim(line.substr(0, lp))) + "'");
        std::string_view arity_text = trim(line.substr(lp + 1, rp - lp - 1));
        if (arity_text.size() != 1 || arity_text[0] < '0' || arity_text[0] > '2') {
            return fail("arity must be 0, 1 or 2");
        }
        int arity = arity_text[0] - '0';
        auto [lo, hi] = verb_arity(*verb);
        if (arity < lo || arity > hi) {
            return fail(std::string(verb_name(*verb)) + " arity must be in " + std::to_string(lo) +
                        ".." + std::to_string(hi));
        }
        std::size_t colon = line.find(':', rp);
        if (colon == std::string_view::npos) return fail("expected ':' after verb(arity)");

        ActionSchema& schema = base[*verb];
        schema.verb = *verb;
        if (arity > schema.slots) schema.slots = arity;

        for (std::string_view section : split(line.substr(colon + 1), ';')) {
            section = trim(section);
            if (section.empty()) continue;
            bool is_pre = section.rfind("pre", 0) == 0 &&
                          (section.size() == 3 || section[3] == ' ' || section[3] == '\t');
            bool is_post = section.rfind("post", 0) == 0 &&
                           (section.size() == 4 || section[4] == ' ' || section[4] == '\t');
            if (!is_pre && !is_post) return fail("section must start with 'pre' or 'post'");
            std::string_view body = trim(section.substr(is_pre ? 3 : 4));
            if (body.empty()) continue;
            for (std::string_view item : split(body, ',')) {
                item = trim(item);
                if (item.empty()) return fail("empty condition");
                if (is_pre) {
                    auto cond = parse_condition_text(item);
                    if (!cond.ok()) {
                        return fail("bad condition '" + std::string(item) + "': " +
                                    cond.error().message);
                    }
                    auto t = template_from_condition(cond.value(), arity);
                    if (!t.ok()) return fail(t.error());
                    schema.preconditions.push_back(PreconditionGroup{{t.value()}});
                } else {
                    std::size_t eq = item.rfind('=');
                    if (eq == std::string_view::npos) {
                        return fail("post condition needs '=true' or '=false'");
                    }
                    std::string_view value_text = trim(item.substr(eq + 1));
                    Truth value;
                    if (value_text == "true") {
                        value = Truth::True;
                    } else if (value_text == "false") {
                        value = Truth::False;
                    } else {
                        return fail("effect value must be 'true' or 'false'");
                    }
                    auto cond = parse_condition_text(trim(item.substr(0, eq)));
                    if (!cond.ok()) {
                        return fail("bad condition '" + std::string(item.substr(0, eq)) + "': " +
                                    cond.error().message);
                    }
                    auto t = template_from_condition(cond.value(), arity);
                    if (!t.ok()) return fail(t.error());
                    schema.postconditions.push_back(SchemaEffect{t.value(), value});
                }
            }
        }
    }
    return base;
}

Expected<WorldState, std::string> parse_state_text(std::string_view text) {
    WorldState state;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, (nl == std::string_view::npos ? text.size() : nl) - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto cond = parse_condition_text(line);
        if (!cond.ok()) {
            return std::string("state line ") + std::to_string(line_no) + ": " +
                   cond.error().message;
        }
        const Condition& c = cond.value();
        state.set(c.pred, c.negated ? Truth::False : Truth::True);
    }
    return state;
}

std::string render_state(const WorldState& state) {
    std::string out;
    for (const auto& [pred, value] : state.facts()) {
        out += render_condition(Condition{!value, pred});
        out.push_back('\n');
    }
    return out;
}

} // namespace leap
