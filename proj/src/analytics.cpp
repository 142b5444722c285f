#include "leap/analytics.hpp"

#include <algorithm>

namespace leap {
namespace {

std::set<Verb> verb_projection(const SubActionSet& set) {
    std::set<Verb> out;
    for (const SubActionItem& item : set) out.insert(item.verb);
    return out;
}

std::set<ObjectName> object_projection(const SubActionSet& set) {
    std::set<ObjectName> out;
    for (const SubActionItem& item : set) out.insert(item.objects.begin(), item.objects.end());
    return out;
}

template <typename T>
double precision_score(const std::set<T>& pred, const std::set<T>& gt) {
    if (pred.empty()) return 1.0;
    std::size_t hits = 0;
    for (const T& item : pred)
        if (gt.contains(item)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

void collect_conditions(const std::vector<Stmt>& body, std::vector<const Condition*>& out) {
    for (const Stmt& stmt : body) {
        if (stmt.is<IfStmt>()) {
            const IfStmt& node = stmt.as<IfStmt>();
            out.push_back(&node.condition);
            collect_conditions(node.body, out);
        } else if (stmt.is<WhileStmt>()) {
            const WhileStmt& node = stmt.as<WhileStmt>();
            out.push_back(&node.condition);
            collect_conditions(node.body, out);
        }
    }
}

} // namespace

SubActionItem soften(const SubAction& action) {
    SubActionItem item;
    item.verb = action.verb;
    item.objects.insert(action.args.begin(), action.args.end());
    return item;
}

SubActionSet to_subaction_set(std::span<const SubAction> seq) {
    SubActionSet out;
    for (const SubAction& action : seq) out.insert(soften(action));
    return out;
}

SubActionSet program_subaction_set(const Program& program) {
    return to_subaction_set(flatten(program));
}

std::string render_subaction_item(const SubActionItem& item) {
    std::string out{verb_name(item.verb)};
    out += '{';
    bool first = true;
    for (const ObjectName& obj : item.objects) {
        if (!first) out += ", ";
        first = false;
        out += obj.str();
    }
    out += '}';
    return out;
}

ComparisonReport compare(const Program& predicted, const Program& ground_truth) {
    const SubActionSet pred = program_subaction_set(predicted);
    const SubActionSet gt = program_subaction_set(ground_truth);

    ComparisonReport report;
    for (const SubActionItem& item : pred)
        if (!gt.contains(item)) report.extra.insert(item);
    for (const SubActionItem& item : gt)
        if (!pred.contains(item)) report.missing.insert(item);

    if (pred.empty()) {
        report.containment_score = 1.0;
    } else {
        report.containment_score =
            static_cast<double>(pred.size() - report.extra.size()) /
            static_cast<double>(pred.size());
    }
    report.set_equal = report.missing.empty() && report.extra.empty();
    report.verb_accuracy = precision_score(verb_projection(pred), verb_projection(gt));
    report.object_accuracy = precision_score(object_projection(pred), object_projection(gt));
    return report;
}

std::string aggregate_preconditions(const Program& program) {
    std::vector<const Condition*> conditions;
    collect_conditions(program.body, conditions);
    std::string out;
    for (const Condition* condition : conditions) {
        if (!out.empty()) out += " and ";
        out += "if ";
        out += render_condition(*condition);
    }
    return out;
}

std::vector<SubAction> truncate_sequence(std::vector<SubAction> seq) {
    if (seq.size() > kMaxSequenceLength) seq.resize(kMaxSequenceLength);
    return seq;
}

CorpusStats corpus_stats(std::span<const ClassedProgram> programs) {
    CorpusStats stats;
    for (const ClassedProgram& entry : programs) {
        ++stats.program_count;
        stats.subactions_per_verb[entry.verb_class][flatten(entry.program).size()] += 1;
        for (const ObjectName& obj : mentioned_objects(entry.program))
            stats.object_frequency[obj] += 1;
    }
    return stats;
}

std::string render_verb_csv(const CorpusStats& stats) {
    std::string out = "verb_class,subaction_count,frequency\n";
    for (const auto& [verb_class, histogram] : stats.subactions_per_verb) {
        for (const auto& [count, frequency] : histogram) {
            out += verb_class;
            out += ',';
            out += std::to_string(count);
            out += ',';
            out += std::to_string(frequency);
            out += '\n';
        }
    }
    return out;
}

std::string render_object_csv(const CorpusStats& stats) {
    std::string out = "object,frequency\n";
    for (const auto& [object, frequency] : stats.object_frequency) {
        out += object.str();
        out += ',';
        out += std::to_string(frequency);
        out += '\n';
    }
    return out;
}

std::string default_verb_class(std::string_view program_name) {
    const std::size_t underscore = program_name.find('_');
    return std::string(program_name.substr(0, underscore));
}

} // namespace leap
