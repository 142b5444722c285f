#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leap/ast.hpp"
#include "leap/expected.hpp"

namespace leap {

enum class ParseErrorKind {
    BadHeader,
    BadIndent,
    UnknownVerb,
    BadCondition,
    BadArity,
    UnexpectedToken,
    EmptyBlock,
};

std::string_view parse_error_kind_name(ParseErrorKind kind);

// Byte offsets into the parsed text (half-open).
struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct ParseError {
    int line = 1;   // 1-based, always points inside the parsed text
    int column = 1; // 1-based
    ParseErrorKind kind = ParseErrorKind::BadHeader;
    std::string message;
    SourceSpan span;
};

using ParseResult = Expected<Program, ParseError>;

// Parses exactly one program (leading opaque preamble lines allowed). Total:
// never throws or aborts, every failure is a ParseError with a location.
ParseResult parse_program(std::string_view text);

// Splits on "def " at indent 0 and parses each chunk independently, so one
// malformed entry cannot take down its neighbours. Error locations are
// adjusted to file-absolute lines. Whitespace-only input yields no entries.
std::vector<ParseResult> parse_corpus(std::string_view text);

// Condition surface used by block headers, goal expressions and state files:
//   <obj> [not] (in hand | in workspace | open | clean | at <obj> | <ident>)
//   [not] <ident>(<obj>, ...)
Expected<Condition, ParseError> parse_condition_text(std::string_view text);

// Best-effort program name from a chunk's def line, for pairing results to
// clips even when the full parse failed. nullopt if no def line is present.
std::optional<std::string> sniff_program_name(std::string_view chunk);

} // namespace leap
