#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "leap/decimal.hpp"

namespace leap {

// The closed verb vocabulary. Everything an action program can do is one of
// these eight; "grab" is accepted as an alias of grasp, "goto" is canonical.
enum class Verb {
    DoNothing,
    Grasp,
    Release,
    Move,
    Use,
    Position,
    Goto,
    Wait,
};

inline constexpr int kVerbCount = 8;

// Canonical surface name, e.g. Verb::Goto -> "goto".
std::string_view verb_name(Verb verb);
// Accepts canonical names plus aliases ("grab" -> Grasp).
std::optional<Verb> verb_from_name(std::string_view name);
// Inclusive arity range permitted for the verb (do_nothing/wait: 0..1,
// grasp/release/goto: 1..1, move/use/position: 1..2).
std::pair<int, int> verb_arity(Verb verb);

// Lowercase identifier naming an object: [a-z][a-z0-9_]*, not a reserved word.
// Construction normalizes (lowercase, space/hyphen runs to '_'); the class is
// immutable afterwards, so a held ObjectName is always well-formed.
class ObjectName {
public:
    // Returns nullopt if no valid identifier remains after normalization
    // (empty, leading digit, or a reserved word: "not", "and").
    static std::optional<ObjectName> make(std::string_view raw);
    // Convenience for trusted literals; asserts on failure.
    static ObjectName lit(std::string_view raw);

    const std::string& str() const { return value_; }

    bool operator==(const ObjectName&) const = default;
    auto operator<=>(const ObjectName&) const = default;

private:
    explicit ObjectName(std::string value) : value_(std::move(value)) {}
    std::string value_;
};

struct SubAction {
    Verb verb = Verb::DoNothing;
    std::vector<ObjectName> args;

    bool operator==(const SubAction&) const = default;
    auto operator<=>(const SubAction&) const = default;
};

// True when args.size() lies in the verb's arity range.
bool arity_ok(const SubAction& action);
// Canonical call rendering, e.g. "use(faucet, cucumber)".
std::string render_call(const SubAction& action);

enum class PredicateKind { InHand, At, Open, Clean, Generic };

// Ground atom over objects. Built-in kinds carry exactly one argument; At(x)
// means "x is in the actor's workspace". Generic covers everything else
// (relations like near(x, y), dataset one-offs like ripe(x)).
struct Predicate {
    PredicateKind kind = PredicateKind::Generic;
    std::string name; // Generic only; empty for built-ins.
    std::vector<ObjectName> args;

    static Predicate in_hand(ObjectName x);
    static Predicate at(ObjectName x);
    static Predicate open(ObjectName x);
    static Predicate clean(ObjectName x);
    static Predicate generic(std::string name, std::vector<ObjectName> args);

    bool operator==(const Predicate&) const = default;
    auto operator<=>(const Predicate&) const = default;
};

struct Condition {
    bool negated = false;
    Predicate pred;

    Condition negate() const { return Condition{!negated, pred}; }

    bool operator==(const Condition&) const = default;
    auto operator<=>(const Condition&) const = default;
};

// Surface rendering without the leading if/while keyword or trailing colon,
// e.g. "cucumber not in hand", "milk at table", "not near(milk, cup)".
std::string render_condition(const Condition& condition);

struct Stmt;

struct ActStmt {
    SubAction action;
    bool operator==(const ActStmt&) const = default;
};

struct IfStmt {
    Condition condition;
    std::vector<Stmt> body; // non-empty
    bool operator==(const IfStmt&) const = default;
};

struct WhileStmt {
    Condition condition;
    std::vector<Stmt> body; // non-empty
    bool operator==(const WhileStmt&) const = default;
};

struct Stmt {
    std::variant<ActStmt, IfStmt, WhileStmt> node;

    template <typename T>
    bool is() const {
        return std::holds_alternative<T>(node);
    }
    template <typename T>
    const T& as() const {
        return std::get<T>(node);
    }
    template <typename T>
    T& as() {
        return std::get<T>(node);
    }

    bool operator==(const Stmt&) const = default;
};

inline Stmt make_act(SubAction action) { return Stmt{ActStmt{std::move(action)}}; }
inline Stmt make_if(Condition c, std::vector<Stmt> body) {
    return Stmt{IfStmt{std::move(c), std::move(body)}};
}
inline Stmt make_while(Condition c, std::vector<Stmt> body) {
    return Stmt{WhileStmt{std::move(c), std::move(body)}};
}

// A verbatim source line (comment, blank, or opaque preamble such as an
// import) anchored to a 1-based line number within the program's own text.
// The header and statements occupy whichever lines the comments leave free,
// so parse -> serialize reproduces the original layout byte for byte.
struct Comment {
    int line = 1;
    std::string text; // full line, no trailing newline

    bool operator==(const Comment&) const = default;
};

struct Program {
    std::string name;
    TimeStamp start_t;
    TimeStamp stop_t;
    std::vector<Comment> comments;
    std::vector<Stmt> body;

    bool operator==(const Program&) const = default;
};

inline constexpr int kMaxNestingDepth = 8;

// Structural invariant check: verb arities, non-empty blocks, nesting depth,
// time ordering, name well-formedness, comment anchor discipline. Returns
// human-readable findings; empty means the program is valid.
std::vector<std::string> validate_program(const Program& program);

// Deterministic canonical text: "def name(start_t=V, stop_t=V):" header,
// 4-space indents, LF endings, trailing newline, comments re-inserted at
// their anchors. Total over all programs; byte-stable for valid ones.
std::string serialize(const Program& program);

// Depth-first, source-order list of every sub-action (If/While bodies
// included unconditionally; conditions contribute nothing).
std::vector<SubAction> flatten(const Program& program);

// Objects mentioned anywhere: sub-action args plus condition args, in order
// of appearance, duplicates preserved. Feeds analytics and planning universes.
std::vector<ObjectName> mentioned_objects(const Program& program);

// Appends a comment occupying the next free line after everything currently
// in the program (used by builders like plan_to_program).
void append_comment(Program& program, std::string text);

} // namespace leap
