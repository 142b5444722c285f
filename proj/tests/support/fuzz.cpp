#include "support/fuzz.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string>

#include "leap/decimal.hpp"

namespace leap::testsupport {

namespace {

const std::array<const char*, 8> kObjects = {"milk",  "cup",    "table", "knife",
                                             "bowl",  "fridge", "sink",  "carrot"};
const std::array<const char*, 5> kBarePhrases = {"ripe", "chopped", "dry", "hot", "full"};
const std::array<const char*, 2> kCallPhrases = {"near", "beside"};
const std::array<const char*, 6> kWords = {"rinse", "slowly", "twice", "top", "left", "edge"};

ObjectName pick_object(Rng& rng) {
    return ObjectName::lit(kObjects[rng.below(kObjects.size())]);
}

Condition random_condition(Rng& rng) {
    const bool negated = rng.chance(40);
    switch (rng.below(7)) {
    case 0: return Condition{negated, Predicate::in_hand(pick_object(rng))};
    case 1: return Condition{negated, Predicate::at(pick_object(rng))};
    case 2: return Condition{negated, Predicate::open(pick_object(rng))};
    case 3: return Condition{negated, Predicate::clean(pick_object(rng))};
    case 4: {
        ObjectName a = pick_object(rng);
        ObjectName b = pick_object(rng);
        return Condition{negated, Predicate::generic("at", {a, b})};
    }
    case 5:
        return Condition{negated, Predicate::generic(kBarePhrases[rng.below(kBarePhrases.size())],
                                                     {pick_object(rng)})};
    default: {
        ObjectName a = pick_object(rng);
        ObjectName b = pick_object(rng);
        return Condition{negated,
                         Predicate::generic(kCallPhrases[rng.below(kCallPhrases.size())], {a, b})};
    }
    }
}

SubAction random_act(Rng& rng) {
    SubAction action;
    action.verb = static_cast<Verb>(rng.below(static_cast<std::size_t>(kVerbCount)));
    auto [lo, hi] = verb_arity(action.verb);
    int n = lo + static_cast<int>(rng.below(static_cast<std::size_t>(hi - lo + 1)));
    for (int i = 0; i < n; ++i) action.args.push_back(pick_object(rng));
    return action;
}

std::vector<Stmt> random_block(Rng& rng, int depth, int& acts) {
    std::vector<Stmt> body;
    std::size_t n = 1 + rng.below(3);
    for (std::size_t i = 0; i < n; ++i) {
        if (depth < 6 && rng.chance(depth == 1 ? 35 : 20)) {
            Condition cond = random_condition(rng);
            std::vector<Stmt> inner = random_block(rng, depth + 1, acts);
            if (rng.chance(50)) {
                body.push_back(make_if(cond, std::move(inner)));
            } else {
                body.push_back(make_while(cond, std::move(inner)));
            }
        } else {
            body.push_back(make_act(random_act(rng)));
            ++acts;
        }
    }
    return body;
}

TimeStamp random_time(Rng& rng) {
    int frac = static_cast<int>(rng.below(4));
    static const std::int64_t scale[4] = {1000, 100, 10, 1};
    std::int64_t ms = static_cast<std::int64_t>(rng.below(20001));
    ms -= ms % scale[frac];
    return TimeStamp::from_millis(ms, frac);
}

std::string random_comment_text(Rng& rng) {
    switch (rng.below(5)) {
    case 0: return "";
    case 1: return "    ";
    case 2: return std::string("# ") + kWords[rng.below(kWords.size())];
    case 3: return std::string("    # ") + kWords[rng.below(kWords.size())] + " " +
                   kWords[rng.below(kWords.size())];
    default: return std::string("  # ") + kWords[rng.below(kWords.size())];
    }
}

// One structural line per statement, plus the header.
int structural_line_count(const std::vector<Stmt>& body) {
    int n = 0;
    for (const Stmt& stmt : body) {
        ++n;
        if (stmt.is<IfStmt>()) n += structural_line_count(stmt.as<IfStmt>().body);
        if (stmt.is<WhileStmt>()) n += structural_line_count(stmt.as<WhileStmt>().body);
    }
    return n;
}

} // namespace

FuzzProgram random_program(Rng& rng, int index) {
    FuzzProgram out;
    Program& p = out.program;
    p.name = "fuzz_" + std::to_string(1000 + index);

    TimeStamp a = random_time(rng);
    TimeStamp b = random_time(rng);
    if (b.millis < a.millis) std::swap(a, b);
    p.start_t = a;
    p.stop_t = b;

    p.body = random_block(rng, 1, out.act_count);

    // Comment anchors: distinct positions inside the final interleaved line
    // range, so each comment lands exactly at its anchor when serialized.
    int structural = 1 + structural_line_count(p.body);
    std::size_t comment_count = rng.below(4);
    std::set<int> anchors;
    int total = structural;
    for (std::size_t k = 0; k < comment_count; ++k) {
        ++total;
        int line = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(total)));
        while (anchors.contains(line)) {
            line = line % total + 1;
        }
        anchors.insert(line);
    }
    for (int line : anchors) {
        p.comments.push_back(Comment{line, random_comment_text(rng)});
    }
    return out;
}

int count_acts(const std::vector<Stmt>& body) {
    int n = 0;
    for (const Stmt& stmt : body) {
        if (stmt.is<ActStmt>()) {
            ++n;
        } else if (stmt.is<IfStmt>()) {
            n += count_acts(stmt.as<IfStmt>().body);
        } else {
            n += count_acts(stmt.as<WhileStmt>().body);
        }
    }
    return n;
}

} // namespace leap::testsupport
