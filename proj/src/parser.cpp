#include "leap/parser.hpp"

#include <algorithm>
#include <cassert>

namespace leap {

std::string_view parse_error_kind_name(ParseErrorKind kind) {
    switch (kind) {
    case ParseErrorKind::BadHeader: return "bad_header";
    case ParseErrorKind::BadIndent: return "bad_indent";
    case ParseErrorKind::UnknownVerb: return "unknown_verb";
    case ParseErrorKind::BadCondition: return "bad_condition";
    case ParseErrorKind::BadArity: return "bad_arity";
    case ParseErrorKind::UnexpectedToken: return "unexpected_token";
    case ParseErrorKind::EmptyBlock: return "empty_block";
    }
    return "unknown";
}

namespace {

struct Line {
    std::string_view text; // without newline
    std::size_t offset;    // byte offset of the line start
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::size_t end = (nl == std::string_view::npos) ? text.size() : nl;
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (nl == std::string_view::npos) {
            if (!line.empty() || pos < text.size()) lines.push_back({line, pos});
            break;
        }
        lines.push_back({line, pos});
        pos = nl + 1;
        if (pos == text.size()) break; // trailing newline, no extra empty line
    }
    return lines;
}

struct Tok {
    enum Type { Word, LParen, RParen, Comma, Colon, Equals, End } type = End;
    std::string_view text;
    int col = 1; // 1-based column of the first character
};

std::vector<Tok> tokenize(std::string_view line, int start_col = 1) {
    std::vector<Tok> toks;
    std::size_t i = 0;
    auto col = [&](std::size_t k) { return start_col + static_cast<int>(k); };
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        Tok t;
        t.col = col(i);
        switch (c) {
        case '(': t.type = Tok::LParen; t.text = line.substr(i, 1); ++i; break;
        case ')': t.type = Tok::RParen; t.text = line.substr(i, 1); ++i; break;
        case ',': t.type = Tok::Comma; t.text = line.substr(i, 1); ++i; break;
        case ':': t.type = Tok::Colon; t.text = line.substr(i, 1); ++i; break;
        case '=': t.type = Tok::Equals; t.text = line.substr(i, 1); ++i; break;
        default: {
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '(' &&
                   line[j] != ')' && line[j] != ',' && line[j] != ':' && line[j] != '=') {
                ++j;
            }
            t.type = Tok::Word;
            t.text = line.substr(i, j - i);
            i = j;
            break;
        }
        }
        toks.push_back(t);
    }
    Tok end;
    end.type = Tok::End;
    end.col = col(line.size());
    toks.push_back(end);
    return toks;
}

// Identifier-shaped normalization without the reserved-word check (program
// names may be anything identifier-like).
std::optional<std::string> normalize_identifier(std::string_view raw) {
    std::string out;
    for (char c : raw) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            out.push_back(c);
        } else if (c == ' ' || c == '-' || c == '_') {
            if (!out.empty() && out.back() != '_') out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    if (out.empty() || out[0] < 'a' || out[0] > 'z') return std::nullopt;
    return out;
}

class ChunkParser {
public:
    explicit ChunkParser(std::string_view text) : text_(text), lines_(split_lines(text)) {}

    ParseResult run() {
        std::size_t header_idx = lines_.size();
        for (std::size_t i = 0; i < lines_.size(); ++i) {
            if (lines_[i].text.rfind("def ", 0) == 0) {
                header_idx = i;
                break;
            }
        }
        if (header_idx == lines_.size()) {
            return error(lines_.empty() ? 1 : 1, 1, ParseErrorKind::BadHeader,
                         "no 'def' header found");
        }
        for (std::size_t i = 0; i < header_idx; ++i) {
            program_.comments.push_back(
                Comment{static_cast<int>(i) + 1, std::string(lines_[i].text)});
        }
        if (auto err = parse_header(header_idx)) return *err;
        if (auto err = parse_body(header_idx + 1)) return *err;
        return program_;
    }

private:
    ParseError error(std::size_t line_idx, int col, ParseErrorKind kind, std::string message) {
        ParseError e;
        e.line = static_cast<int>(line_idx);
        e.column = col;
        e.kind = kind;
        e.message = std::move(message);
        std::size_t idx = line_idx == 0 ? 0 : line_idx - 1;
        if (idx < lines_.size()) {
            e.span.begin = lines_[idx].offset + static_cast<std::size_t>(col > 0 ? col - 1 : 0);
            e.span.end = lines_[idx].offset + lines_[idx].text.size();
            if (e.span.begin > e.span.end) e.span.begin = e.span.end;
        }
        return e;
    }

    std::optional<ParseError> parse_header(std::size_t idx) {
        const Line& line = lines_[idx];
        int line_no = static_cast<int>(idx) + 1;
        auto toks = tokenize(line.text.substr(4), 5);
        std::size_t i = 0;
        auto fail = [&](int col, const std::string& msg) {
            return error(static_cast<std::size_t>(line_no), col, ParseErrorKind::BadHeader, msg);
        };
        if (toks[i].type != Tok::Word) return fail(toks[i].col, "expected program name after 'def'");
        auto name = normalize_identifier(toks[i].text);
        if (!name) return fail(toks[i].col, "program name is not a valid identifier");
        program_.name = *name;
        ++i;
        if (toks[i].type != Tok::LParen) return fail(toks[i].col, "expected '(' after program name");
        ++i;
        auto parse_time = [&](std::string_view key, TimeStamp& out) -> std::optional<ParseError> {
            if (toks[i].type != Tok::Word || toks[i].text != key) {
                return fail(toks[i].col, "expected '" + std::string(key) + "='");
            }
            ++i;
            if (toks[i].type != Tok::Equals) return fail(toks[i].col, "expected '='");
            ++i;
            if (toks[i].type != Tok::Word) return fail(toks[i].col, "expected a time value");
            auto t = TimeStamp::parse(toks[i].text);
            if (!t) {
                return fail(toks[i].col, "malformed time value '" + std::string(toks[i].text) +
                                             "' (decimal, at most 3 fraction digits)");
            }
            out = *t;
            ++i;
            return std::nullopt;
        };
        if (auto err = parse_time("start_t", program_.start_t)) return err;
        if (toks[i].type != Tok::Comma) return fail(toks[i].col, "expected ','");
        ++i;
        if (auto err = parse_time("stop_t", program_.stop_t)) return err;
        if (toks[i].type != Tok::RParen) return fail(toks[i].col, "expected ')'");
        ++i;
        if (toks[i].type != Tok::Colon) return fail(toks[i].col, "expected ':'");
        ++i;
        if (toks[i].type != Tok::End) return fail(toks[i].col, "unexpected text after header");
        if (program_.stop_t.millis < program_.start_t.millis) {
            return fail(5, "stop_t precedes start_t");
        }
        return std::nullopt;
    }

    std::optional<ParseError> parse_body(std::size_t first) {
        stack_.push_back(&program_.body);
        for (std::size_t idx = first; idx < lines_.size(); ++idx) {
            const Line& line = lines_[idx];
            int line_no = static_cast<int>(idx) + 1;
            std::size_t first_non_space = line.text.find_first_not_of(' ');
            if (first_non_space == std::string_view::npos || line.text[first_non_space] == '#') {
                program_.comments.push_back(Comment{line_no, std::string(line.text)});
                continue;
            }
            // Leading whitespace: spaces only, multiples of four.
            for (std::size_t k = 0; k < first_non_space; ++k) {
                if (line.text[k] == '\t') {
                    return error(static_cast<std::size_t>(line_no), static_cast<int>(k) + 1,
                                 ParseErrorKind::BadIndent, "tab in indentation");
                }
            }
            if (line.text[first_non_space] == '\t') {
                return error(static_cast<std::size_t>(line_no),
                             static_cast<int>(first_non_space) + 1, ParseErrorKind::BadIndent,
                             "tab in indentation");
            }
            if (first_non_space % 4 != 0) {
                return error(static_cast<std::size_t>(line_no),
                             static_cast<int>(first_non_space) + 1, ParseErrorKind::BadIndent,
                             "indentation must be a multiple of 4 spaces");
            }
            int depth = static_cast<int>(first_non_space / 4);
            if (depth == 0) {
                return error(static_cast<std::size_t>(line_no), 1, ParseErrorKind::BadIndent,
                             "statement must be indented inside the program body");
            }
            if (depth > kMaxNestingDepth) {
                return error(static_cast<std::size_t>(line_no),
                             static_cast<int>(first_non_space) + 1, ParseErrorKind::BadIndent,
                             "nesting depth exceeds " + std::to_string(kMaxNestingDepth));
            }
            int open_depth = static_cast<int>(stack_.size());
            if (pending_open_) {
                if (depth == open_depth + 1) {
                    stack_.push_back(pending_body_);
                    pending_open_ = false;
                } else if (depth <= open_depth) {
                    return error(pending_line_, pending_col_, ParseErrorKind::EmptyBlock,
                                 "block body is empty");
                } else {
                    return error(static_cast<std::size_t>(line_no),
                                 static_cast<int>(first_non_space) + 1, ParseErrorKind::BadIndent,
                                 "over-indented line");
                }
            } else {
                if (depth > open_depth) {
                    return error(static_cast<std::size_t>(line_no),
                                 static_cast<int>(first_non_space) + 1, ParseErrorKind::BadIndent,
                                 "unexpected indent");
                }
                while (depth < static_cast<int>(stack_.size())) stack_.pop_back();
            }
            if (auto err = parse_statement(idx, line.text.substr(first_non_space),
                                           static_cast<int>(first_non_space) + 1)) {
                return err;
            }
        }
        if (pending_open_) {
            return error(pending_line_, pending_col_, ParseErrorKind::EmptyBlock,
                         "block body is empty");
        }
        return std::nullopt;
    }

    std::optional<ParseError> parse_statement(std::size_t idx, std::string_view rest,
                                              int start_col) {
        int line_no = static_cast<int>(idx) + 1;
        auto toks = tokenize(rest, start_col);
        if (toks[0].type != Tok::Word) {
            return error(static_cast<std::size_t>(line_no), toks[0].col,
                         ParseErrorKind::UnexpectedToken, "expected a statement");
        }
        std::string_view head = toks[0].text;
        if (head == "if" || head == "while") {
            if (toks.size() < 2 || toks[toks.size() - 2].type != Tok::Colon) {
                return error(static_cast<std::size_t>(line_no), toks[toks.size() - 1].col,
                             ParseErrorKind::UnexpectedToken, "expected ':' to end the block header");
            }
            auto cond = parse_condition_tokens(toks, 1, toks.size() - 2,
                                               static_cast<std::size_t>(line_no));
            if (!cond.ok()) return cond.error();
            std::vector<Stmt>* container = stack_.back();
            if (head == "if") {
                container->push_back(make_if(cond.value(), {}));
                pending_body_ = &container->back().as<IfStmt>().body;
            } else {
                container->push_back(make_while(cond.value(), {}));
                pending_body_ = &container->back().as<WhileStmt>().body;
            }
            pending_open_ = true;
            pending_line_ = static_cast<std::size_t>(line_no);
            pending_col_ = toks[0].col;
            return std::nullopt;
        }
        // Sub-action call.
        auto verb = verb_from_name(head);
        if (!verb) {
            auto folded = normalize_identifier(head);
            if (folded) verb = verb_from_name(*folded);
        }
        if (!verb) {
            return error(static_cast<std::size_t>(line_no), toks[0].col,
                         ParseErrorKind::UnknownVerb,
                         "unknown verb '" + std::string(head) + "'");
        }
        std::size_t i = 1;
        if (toks[i].type != Tok::LParen) {
            return error(static_cast<std::size_t>(line_no), toks[i].col,
                         ParseErrorKind::UnexpectedToken,
                         "expected '(' (sub-actions use call syntax)");
        }
        ++i;
        SubAction action;
        action.verb = *verb;
        if (toks[i].type != Tok::RParen) {
            while (true) {
                if (toks[i].type != Tok::Word) {
                    return error(static_cast<std::size_t>(line_no), toks[i].col,
                                 ParseErrorKind::UnexpectedToken, "expected an object name");
                }
                auto obj = ObjectName::make(toks[i].text);
                if (!obj) {
                    return error(static_cast<std::size_t>(line_no), toks[i].col,
                                 ParseErrorKind::UnexpectedToken,
                                 "invalid object name '" + std::string(toks[i].text) + "'");
                }
                action.args.push_back(*obj);
                ++i;
                if (toks[i].type == Tok::Comma) {
                    ++i;
                    continue;
                }
                break;
            }
        }
        if (toks[i].type != Tok::RParen) {
            return error(static_cast<std::size_t>(line_no), toks[i].col,
                         ParseErrorKind::UnexpectedToken, "expected ')'");
        }
        ++i;
        if (toks[i].type != Tok::End) {
            return error(static_cast<std::size_t>(line_no), toks[i].col,
                         ParseErrorKind::UnexpectedToken, "unexpected text after call");
        }
        if (!arity_ok(action)) {
            auto [lo, hi] = verb_arity(action.verb);
            return error(static_cast<std::size_t>(line_no), toks[0].col, ParseErrorKind::BadArity,
                         std::string(verb_name(action.verb)) + " takes " + std::to_string(lo) +
                             (lo == hi ? "" : ".." + std::to_string(hi)) + " argument" +
                             (hi == 1 ? "" : "s") + ", got " +
                             std::to_string(action.args.size()));
        }
        stack_.back()->push_back(make_act(std::move(action)));
        return std::nullopt;
    }

    Expected<Condition, ParseError> parse_condition_tokens(const std::vector<Tok>& toks,
                                                           std::size_t begin, std::size_t end,
                                                           std::size_t line_no) {
        auto fail = [&](int col, const std::string& msg) {
            return error(line_no, col, ParseErrorKind::BadCondition, msg);
        };
        if (begin >= end) {
            return fail(toks[begin].col, "missing condition");
        }
        std::size_t i = begin;
        bool negated = false;

        auto parse_call = [&](std::string_view raw_name,
                              int name_col) -> Expected<Condition, ParseError> {
            auto name = ObjectName::make(raw_name);
            if (!name) {
                return fail(name_col,
                            "invalid predicate name '" + std::string(raw_name) + "'");
            }
            ++i; // name
            ++i; // '('
            std::vector<ObjectName> args;
            if (i < end && toks[i].type != Tok::RParen) {
                while (true) {
                    if (i >= end || toks[i].type != Tok::Word) {
                        return fail(toks[i < end ? i : end].col, "expected an object name");
                    }
                    auto obj = ObjectName::make(toks[i].text);
                    if (!obj) {
                        return fail(toks[i].col,
                                    "invalid object name '" + std::string(toks[i].text) + "'");
                    }
                    args.push_back(*obj);
                    ++i;
                    if (i < end && toks[i].type == Tok::Comma) {
                        ++i;
                        continue;
                    }
                    break;
                }
            }
            if (i >= end || toks[i].type != Tok::RParen) {
                return fail(toks[i < end ? i : end].col, "expected ')'");
            }
            ++i;
            if (i != end) {
                return fail(toks[i].col, "unexpected text after condition");
            }
            return Condition{negated, Predicate::generic(name->str(), std::move(args))};
        };

        if (toks[i].type == Tok::Word && toks[i].text == "not") {
            // Negated call form: not pred(obj, ...).
            if (i + 1 < end && toks[i + 1].type == Tok::Word && i + 2 < end &&
                toks[i + 2].type == Tok::LParen) {
                negated = true;
                ++i;
                return parse_call(toks[i].text, toks[i].col);
            }
            return fail(toks[i].col, "a condition cannot start with 'not'");
        }
        if (toks[i].type != Tok::Word) {
            return fail(toks[i].col, "expected an object name");
        }
        if (i + 1 < end && toks[i + 1].type == Tok::LParen) {
            return parse_call(toks[i].text, toks[i].col);
        }
        auto subject = ObjectName::make(toks[i].text);
        if (!subject) {
            return fail(toks[i].col, "invalid object name '" + std::string(toks[i].text) + "'");
        }
        ++i;
        if (i < end && toks[i].type == Tok::Word && toks[i].text == "not") {
            negated = true;
            ++i;
        }
        if (i >= end || toks[i].type != Tok::Word) {
            return fail(toks[i < end ? i : end - 1].col, "missing predicate phrase");
        }
        std::string_view phrase = toks[i].text;
        auto finish = [&](Predicate pred, std::size_t next) -> Expected<Condition, ParseError> {
            if (next != end) {
                return fail(toks[next].col, "unexpected text after condition");
            }
            return Condition{negated, std::move(pred)};
        };
        if (phrase == "in") {
            if (i + 1 < end && toks[i + 1].type == Tok::Word) {
                if (toks[i + 1].text == "hand") {
                    return finish(Predicate::in_hand(*subject), i + 2);
                }
                if (toks[i + 1].text == "workspace") {
                    return finish(Predicate::at(*subject), i + 2);
                }
            }
            return fail(toks[i].col, "expected 'in hand' or 'in workspace'");
        }
        if (phrase == "open") return finish(Predicate::open(*subject), i + 1);
        if (phrase == "clean") return finish(Predicate::clean(*subject), i + 1);
        if (phrase == "at") {
            if (i + 1 < end && toks[i + 1].type == Tok::Word) {
                auto target = ObjectName::make(toks[i + 1].text);
                if (!target) {
                    return fail(toks[i + 1].col,
                                "invalid object name '" + std::string(toks[i + 1].text) + "'");
                }
                return finish(Predicate::generic("at", {*subject, *target}), i + 2);
            }
            return fail(toks[i].col, "expected an object after 'at'");
        }
        auto name = ObjectName::make(phrase);
        if (!name) {
            return fail(toks[i].col, "invalid predicate phrase '" + std::string(phrase) + "'");
        }
        return finish(Predicate::generic(name->str(), {*subject}), i + 1);
    }

    std::string_view text_;
    std::vector<Line> lines_;
    Program program_;
    std::vector<std::vector<Stmt>*> stack_;
    bool pending_open_ = false;
    std::vector<Stmt>* pending_body_ = nullptr;
    std::size_t pending_line_ = 1;
    int pending_col_ = 1;
};

} // namespace

ParseResult parse_program(std::string_view text) { return ChunkParser(text).run(); }

std::vector<ParseResult> parse_corpus(std::string_view text) {
    std::vector<Line> lines = split_lines(text);
    std::vector<std::size_t> starts; // indices of def lines
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].text.rfind("def ", 0) == 0) starts.push_back(i);
    }
    std::vector<ParseResult> results;
    if (starts.empty()) {
        bool blank_only = true;
        for (const Line& l : lines) {
            if (l.text.find_first_not_of(" \t") != std::string_view::npos) blank_only = false;
        }
        if (!blank_only) results.push_back(parse_program(text));
        return results;
    }
    // Chunk 0 keeps the file preamble; later chunks start at their def line.
    for (std::size_t c = 0; c < starts.size(); ++c) {
        std::size_t begin_line = (c == 0) ? 0 : starts[c];
        std::size_t end_line = (c + 1 < starts.size()) ? starts[c + 1] : lines.size();
        std::size_t begin = lines[begin_line].offset;
        std::size_t end = (end_line < lines.size()) ? lines[end_line].offset : text.size();
        ParseResult r = parse_program(text.substr(begin, end - begin));
        if (!r.ok()) {
            // Report file-absolute locations.
            r.error().line += static_cast<int>(begin_line);
            r.error().span.begin += begin;
            r.error().span.end += begin;
        }
        results.push_back(std::move(r));
    }
    return results;
}

Expected<Condition, ParseError> parse_condition_text(std::string_view text) {
    // Reuse the statement machinery through a tiny synthetic program.
    std::string synthetic = "def cond_probe(start_t=0, stop_t=0):\n    if ";
    std::size_t prefix_cols = 4 + 3; // indent + "if "
    synthetic.append(text);
    synthetic.append(":\n        wait()\n");
    ParseResult r = parse_program(synthetic);
    if (!r.ok()) {
        ParseError e = r.error();
        e.line = 1;
        if (e.column > static_cast<int>(prefix_cols)) {
            e.column -= static_cast<int>(prefix_cols);
        } else {
            e.column = 1;
        }
        e.span = SourceSpan{0, text.size()};
        return e;
    }
    const Program& p = r.value();
    assert(p.body.size() == 1 && p.body[0].is<IfStmt>());
    return p.body[0].as<IfStmt>().condition;
}

std::optional<std::string> sniff_program_name(std::string_view chunk) {
    for (const Line& line : split_lines(chunk)) {
        if (line.text.rfind("def ", 0) != 0) continue;
        std::string_view rest = line.text.substr(4);
        std::size_t cut = rest.find_first_of("(:");
        if (cut != std::string_view::npos) rest = rest.substr(0, cut);
        auto name = normalize_identifier(rest);
        if (name) return name;
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace leap
