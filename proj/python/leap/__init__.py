"""Action-program toolkit: parse, validate, execute, plan, compile."""

from ._leap import (
    DEFAULT_FUEL,
    MAX_BUNDLES_PER_QUERY,
    MAX_SEQUENCE_LENGTH,
    Program,
    aggregate_preconditions,
    chain,
    compare,
    compile_query,
    compile_stub,
    corpus_stats_csv,
    execute,
    ingest,
    parse_corpus,
    parse_program,
    plan,
    validate_bundles,
)

__all__ = [
    "DEFAULT_FUEL",
    "MAX_BUNDLES_PER_QUERY",
    "MAX_SEQUENCE_LENGTH",
    "Program",
    "aggregate_preconditions",
    "chain",
    "compare",
    "compile_query",
    "compile_stub",
    "corpus_stats_csv",
    "execute",
    "ingest",
    "parse_corpus",
    "parse_program",
    "plan",
    "validate_bundles",
]
