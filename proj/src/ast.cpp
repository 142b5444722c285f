#include "leap/ast.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace leap {

namespace {

struct VerbInfo {
    Verb verb;
    std::string_view name;
    int min_args;
    int max_args;
};

constexpr std::array<VerbInfo, kVerbCount> kVerbTable{{
    {Verb::DoNothing, "do_nothing", 0, 1},
    {Verb::Grasp, "grasp", 1, 1},
    {Verb::Release, "release", 1, 1},
    {Verb::Move, "move", 1, 2},
    {Verb::Use, "use", 1, 2},
    {Verb::Position, "position", 1, 2},
    {Verb::Goto, "goto", 1, 1},
    {Verb::Wait, "wait", 0, 1},
}};

const VerbInfo& info(Verb verb) {
    for (const auto& row : kVerbTable) {
        if (row.verb == verb) return row;
    }
    return kVerbTable[0];
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (s[0] < 'a' || s[0] > 'z') return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

bool is_reserved_identifier(std::string_view s) {
    return s == "not" || s == "and";
}

// Bare phrase position in the condition surface; these words would collide
// with the fixed phrases or the negation marker.
bool bare_phrase_ok(std::string_view name) {
    return is_identifier(name) && name != "in" && name != "at" && name != "open" &&
           name != "clean" && !is_reserved_identifier(name);
}

} // namespace

std::string_view verb_name(Verb verb) { return info(verb).name; }

std::optional<Verb> verb_from_name(std::string_view name) {
    if (name == "grab") return Verb::Grasp;
    for (const auto& row : kVerbTable) {
        if (row.name == name) return row.verb;
    }
    return std::nullopt;
}

std::pair<int, int> verb_arity(Verb verb) {
    const auto& row = info(verb);
    return {row.min_args, row.max_args};
}

std::optional<ObjectName> ObjectName::make(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            out.push_back(c);
        } else if (c == ' ' || c == '-' || c == '_') {
            if (!out.empty() && out.back() != '_') out.push_back('_');
        }
        // anything else is dropped
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    if (!is_identifier(out) || is_reserved_identifier(out)) return std::nullopt;
    return ObjectName(std::move(out));
}

ObjectName ObjectName::lit(std::string_view raw) {
    auto made = make(raw);
    if (!made) return ObjectName("invalid");
    return *made;
}

bool arity_ok(const SubAction& action) {
    auto [lo, hi] = verb_arity(action.verb);
    int n = static_cast<int>(action.args.size());
    return n >= lo && n <= hi;
}

std::string render_call(const SubAction& action) {
    std::string out{verb_name(action.verb)};
    out.push_back('(');
    for (std::size_t i = 0; i < action.args.size(); ++i) {
        if (i) out += ", ";
        out += action.args[i].str();
    }
    out.push_back(')');
    return out;
}

Predicate Predicate::in_hand(ObjectName x) {
    return Predicate{PredicateKind::InHand, "", {std::move(x)}};
}
Predicate Predicate::at(ObjectName x) { return Predicate{PredicateKind::At, "", {std::move(x)}}; }
Predicate Predicate::open(ObjectName x) {
    return Predicate{PredicateKind::Open, "", {std::move(x)}};
}
Predicate Predicate::clean(ObjectName x) {
    return Predicate{PredicateKind::Clean, "", {std::move(x)}};
}
Predicate Predicate::generic(std::string name, std::vector<ObjectName> args) {
    return Predicate{PredicateKind::Generic, std::move(name), std::move(args)};
}

std::string render_condition(const Condition& condition) {
    const Predicate& p = condition.pred;
    auto subject_form = [&](std::string_view phrase) {
        std::string out = p.args[0].str();
        if (condition.negated) out += " not";
        out.push_back(' ');
        out += phrase;
        return out;
    };
    switch (p.kind) {
    case PredicateKind::InHand:
        if (p.args.size() == 1) return subject_form("in hand");
        break;
    case PredicateKind::At:
        if (p.args.size() == 1) return subject_form("in workspace");
        break;
    case PredicateKind::Open:
        if (p.args.size() == 1) return subject_form("open");
        break;
    case PredicateKind::Clean:
        if (p.args.size() == 1) return subject_form("clean");
        break;
    case PredicateKind::Generic:
        if (p.args.size() == 2 && p.name == "at") {
            std::string out = p.args[0].str();
            if (condition.negated) out += " not";
            out += " at ";
            out += p.args[1].str();
            return out;
        }
        if (p.args.size() == 1 && bare_phrase_ok(p.name)) return subject_form(p.name);
        break;
    }
    // Call-form escape: total over every representable predicate.
    std::string out;
    if (condition.negated) out += "not ";
    out += p.name.empty() ? std::string("pred") : p.name;
    out.push_back('(');
    for (std::size_t i = 0; i < p.args.size(); ++i) {
        if (i) out += ", ";
        out += p.args[i].str();
    }
    out.push_back(')');
    return out;
}

namespace {

void emit_stmts(const std::vector<Stmt>& body, int depth, std::vector<std::string>& out) {
    std::string indent(static_cast<std::size_t>(depth) * 4, ' ');
    for (const Stmt& stmt : body) {
        if (stmt.is<ActStmt>()) {
            out.push_back(indent + render_call(stmt.as<ActStmt>().action));
        } else if (stmt.is<IfStmt>()) {
            const auto& node = stmt.as<IfStmt>();
            out.push_back(indent + "if " + render_condition(node.condition) + ":");
            emit_stmts(node.body, depth + 1, out);
        } else {
            const auto& node = stmt.as<WhileStmt>();
            out.push_back(indent + "while " + render_condition(node.condition) + ":");
            emit_stmts(node.body, depth + 1, out);
        }
    }
}

std::vector<std::string> structural_lines(const Program& program) {
    std::vector<std::string> lines;
    lines.push_back("def " + program.name + "(start_t=" + program.start_t.str() +
                    ", stop_t=" + program.stop_t.str() + "):");
    emit_stmts(program.body, 1, lines);
    return lines;
}

std::vector<Comment> sorted_comments(const Program& program) {
    std::vector<Comment> cs = program.comments;
    std::stable_sort(cs.begin(), cs.end(),
                     [](const Comment& a, const Comment& b) { return a.line < b.line; });
    return cs;
}

} // namespace

std::string serialize(const Program& program) {
    std::vector<std::string> structural = structural_lines(program);
    std::vector<Comment> comments = sorted_comments(program);

    std::string out;
    std::size_t ci = 0;
    std::size_t si = 0;
    int line_no = 1;
    while (ci < comments.size() || si < structural.size()) {
        if (ci < comments.size() && comments[ci].line <= line_no) {
            out += comments[ci].text;
            ++ci;
        } else if (si < structural.size()) {
            out += structural[si];
            ++si;
        } else {
            // Anchor gap past the last structural line; pad (invalid programs only).
        }
        out.push_back('\n');
        ++line_no;
    }
    return out;
}

namespace {

void flatten_into(const std::vector<Stmt>& body, std::vector<SubAction>& out) {
    for (const Stmt& stmt : body) {
        if (stmt.is<ActStmt>()) {
            out.push_back(stmt.as<ActStmt>().action);
        } else if (stmt.is<IfStmt>()) {
            flatten_into(stmt.as<IfStmt>().body, out);
        } else {
            flatten_into(stmt.as<WhileStmt>().body, out);
        }
    }
}

void objects_into(const std::vector<Stmt>& body, std::vector<ObjectName>& out) {
    for (const Stmt& stmt : body) {
        if (stmt.is<ActStmt>()) {
            const auto& a = stmt.as<ActStmt>().action;
            out.insert(out.end(), a.args.begin(), a.args.end());
        } else if (stmt.is<IfStmt>()) {
            const auto& node = stmt.as<IfStmt>();
            out.insert(out.end(), node.condition.pred.args.begin(), node.condition.pred.args.end());
            objects_into(node.body, out);
        } else {
            const auto& node = stmt.as<WhileStmt>();
            out.insert(out.end(), node.condition.pred.args.begin(), node.condition.pred.args.end());
            objects_into(node.body, out);
        }
    }
}

} // namespace

std::vector<SubAction> flatten(const Program& program) {
    std::vector<SubAction> out;
    flatten_into(program.body, out);
    return out;
}

std::vector<ObjectName> mentioned_objects(const Program& program) {
    std::vector<ObjectName> out;
    objects_into(program.body, out);
    return out;
}

namespace {

void check_predicate(const Predicate& p, std::vector<std::string>& findings) {
    if (p.kind == PredicateKind::Generic) {
        if (!is_identifier(p.name) || is_reserved_identifier(p.name)) {
            findings.push_back("generic predicate name '" + p.name + "' is not a valid identifier");
        }
    } else {
        if (p.args.size() != 1) {
            findings.push_back("built-in predicate must carry exactly 1 argument");
        }
        if (!p.name.empty()) {
            findings.push_back("built-in predicate must not carry a name");
        }
    }
}

void check_stmts(const std::vector<Stmt>& body, int depth, std::vector<std::string>& findings) {
    if (depth > kMaxNestingDepth) {
        findings.push_back("nesting depth exceeds " + std::to_string(kMaxNestingDepth));
        return;
    }
    for (const Stmt& stmt : body) {
        if (stmt.is<ActStmt>()) {
            const auto& a = stmt.as<ActStmt>().action;
            if (!arity_ok(a)) {
                findings.push_back("arity violation in " + render_call(a));
            }
        } else {
            const Condition& c =
                stmt.is<IfStmt>() ? stmt.as<IfStmt>().condition : stmt.as<WhileStmt>().condition;
            const std::vector<Stmt>& inner =
                stmt.is<IfStmt>() ? stmt.as<IfStmt>().body : stmt.as<WhileStmt>().body;
            check_predicate(c.pred, findings);
            if (inner.empty()) {
                findings.push_back("empty block");
            }
            check_stmts(inner, depth + 1, findings);
        }
    }
}

bool comment_is_blank_or_hash(const std::string& text) {
    for (char c : text) {
        if (c == '#') return true;
        if (c != ' ') return false;
    }
    return true; // all spaces or empty
}

} // namespace

std::vector<std::string> validate_program(const Program& program) {
    std::vector<std::string> findings;
    if (!is_identifier(program.name)) {
        findings.push_back("program name '" + program.name + "' is not a valid identifier");
    }
    if (program.stop_t.millis < program.start_t.millis) {
        findings.push_back("stop_t precedes start_t");
    }
    for (const TimeStamp& t : {program.start_t, program.stop_t}) {
        if (t.frac_digits < 0 || t.frac_digits > 3 || t.millis < 0) {
            findings.push_back("malformed timestamp");
        } else {
            static const std::int64_t scale[4] = {1000, 100, 10, 1};
            if (t.millis % scale[t.frac_digits] != 0) {
                findings.push_back("timestamp precision does not cover its millis");
            }
        }
    }
    check_stmts(program.body, 1, findings);

    // Comment discipline: strictly increasing anchors starting at or after
    // line 1, no anchor gaps, post-header lines must re-parse as comments,
    // pre-header lines must not start a new header.
    std::vector<Comment> comments = sorted_comments(program);
    for (std::size_t i = 0; i < comments.size(); ++i) {
        if (comments[i].line < 1) findings.push_back("comment anchor below line 1");
        if (i && comments[i].line == comments[i - 1].line) {
            findings.push_back("duplicate comment anchor " + std::to_string(comments[i].line));
        }
        if (comments[i].text.find('\n') != std::string::npos) {
            findings.push_back("comment text contains a newline");
        }
    }
    std::size_t structural_count = structural_lines(program).size();
    std::size_t ci = 0;
    std::size_t si = 0;
    int line_no = 1;
    bool header_emitted = false;
    while (ci < comments.size() || si < structural_count) {
        if (ci < comments.size() && comments[ci].line <= line_no) {
            if (comments[ci].line < line_no) {
                findings.push_back("comment anchor collision at line " +
                                   std::to_string(comments[ci].line));
            }
            const std::string& text = comments[ci].text;
            if (header_emitted) {
                if (!comment_is_blank_or_hash(text)) {
                    findings.push_back("comment after header is neither blank nor '#': '" + text +
                                       "'");
                }
            } else {
                if (text.rfind("def ", 0) == 0) {
                    findings.push_back("preamble line must not start with 'def '");
                }
            }
            ++ci;
        } else if (si < structural_count) {
            if (si == 0) header_emitted = true;
            ++si;
        } else {
            findings.push_back("comment anchor gap at line " + std::to_string(line_no));
            break;
        }
        ++line_no;
    }
    return findings;
}

void append_comment(Program& program, std::string text) {
    std::size_t lines = structural_lines(program).size() + program.comments.size();
    program.comments.push_back(Comment{static_cast<int>(lines) + 1, std::move(text)});
}

} // namespace leap
