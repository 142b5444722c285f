#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leap/ast.hpp"

namespace leap {

// One flattened sub-action under soft object labels: argument order is
// forgotten, both args of a 2-arg call land in one unordered set.
struct SubActionItem {
    Verb verb = Verb::DoNothing;
    std::set<ObjectName> objects;

    bool operator==(const SubActionItem&) const = default;
    auto operator<=>(const SubActionItem&) const = default;
};

using SubActionSet = std::set<SubActionItem>;

SubActionItem soften(const SubAction& action);
SubActionSet to_subaction_set(std::span<const SubAction> seq);
SubActionSet program_subaction_set(const Program& program);

// e.g. "use{cucumber, faucet}" (objects in sorted order), "wait{}".
std::string render_subaction_item(const SubActionItem& item);

struct ComparisonReport {
    double containment_score = 1.0; // |pred ∩ gt| / |pred|, 1.0 when pred empty
    bool set_equal = true;          // missing and extra both empty
    double verb_accuracy = 1.0;     // same formula on the verb projection
    double object_accuracy = 1.0;   // same formula on the object projection
    SubActionSet missing;           // in ground truth, absent from prediction
    SubActionSet extra;             // predicted, absent from ground truth
};

// Set-level comparison of the two programs' flattened sub-actions. Ordering
// and repetition never matter; argument order never matters.
ComparisonReport compare(const Program& predicted, const Program& ground_truth);

// Collects every If/While condition in source order (pre-order, a nested
// condition follows its parent) and joins renderings "if <condition>" with
// " and ". No conditionals yields "".
std::string aggregate_preconditions(const Program& program);

// Sequences are capped at 9 sub-actions downstream.
inline constexpr std::size_t kMaxSequenceLength = 9;
std::vector<SubAction> truncate_sequence(std::vector<SubAction> seq);

struct CorpusStats {
    // verb class -> (flatten length -> number of programs)
    std::map<std::string, std::map<std::size_t, std::size_t>> subactions_per_verb;
    // every mention counts: sub-action args and condition args, duplicates too
    std::map<ObjectName, std::size_t> object_frequency;
    std::size_t program_count = 0;
    std::size_t parse_failure_count = 0; // filled by callers that ingest raw text
};

struct ClassedProgram {
    std::string verb_class;
    Program program;
};

CorpusStats corpus_stats(std::span<const ClassedProgram> programs);

// CSV with header "verb_class,subaction_count,frequency", rows sorted by
// class then count. LF endings, trailing newline.
std::string render_verb_csv(const CorpusStats& stats);
// CSV with header "object,frequency", rows sorted by object name.
std::string render_object_csv(const CorpusStats& stats);

// Fallback class when no mapping is supplied: the program name's leading
// word, e.g. "wipe_spoon" -> "wipe".
std::string default_verb_class(std::string_view program_name);

} // namespace leap
