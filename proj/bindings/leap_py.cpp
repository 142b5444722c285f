// Python face of the toolkit. Wraps the main operations; Program stays an
// opaque handle, everything else crosses as plain strings, dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "leap/analytics.hpp"
#include "leap/ast.hpp"
#include "leap/parser.hpp"
#include "leap/planner.hpp"
#include "leap/prompt.hpp"
#include "leap/semantics.hpp"

namespace py = pybind11;

namespace {

std::string render_parse_error(const leap::ParseError& error) {
    return "line " + std::to_string(error.line) + ", column " + std::to_string(error.column) +
           ": " + std::string(leap::parse_error_kind_name(error.kind)) + ": " + error.message;
}

leap::Program parse_or_raise(const std::string& text) {
    auto result = leap::parse_program(text);
    if (!result.ok()) throw py::value_error(render_parse_error(result.error()));
    return result.value();
}

leap::WorldState state_or_raise(const std::string& state_text) {
    if (state_text.empty()) return {};
    auto result = leap::parse_state_text(state_text);
    if (!result.ok()) throw py::value_error(result.error());
    return result.value();
}

leap::SchemaTable schemas_or_raise(const std::string& overlay_text) {
    if (overlay_text.empty()) return leap::default_schemas();
    auto result = leap::parse_schema_overlay(overlay_text);
    if (!result.ok()) throw py::value_error(result.error());
    return result.value();
}

py::dict report_to_dict(const leap::ExecReport& report) {
    py::dict out;
    out["valid"] = report.valid;
    out["fuel_exhausted"] = report.fuel_exhausted();
    out["final_state"] = leap::render_state(report.final_state);
    py::list violations;
    for (const leap::Violation& v : report.violations) {
        py::dict entry;
        entry["step"] = v.step_index;
        entry["call"] = leap::render_call(v.sub_action);
        entry["requires"] = leap::render_condition(v.failed);
        entry["reason"] =
            v.reason == leap::ViolationReason::PreconditionUnknown ? "unknown" : "false";
        violations.append(std::move(entry));
    }
    out["violations"] = std::move(violations);
    py::list trace;
    for (const leap::TraceEntry& entry : report.trace)
        trace.append(leap::render_call(entry.action));
    out["trace"] = std::move(trace);
    return out;
}

leap::ExecOptions options_for(bool strict, int fuel) {
    if (fuel < 1) throw py::value_error("fuel must be positive");
    return {fuel, strict ? leap::ExecMode::Strict : leap::ExecMode::Optimistic};
}

} // namespace

PYBIND11_MODULE(_leap, m) {
    m.doc() = "Action-program toolkit: parse, validate, execute, plan, compile";
    m.attr("MAX_BUNDLES_PER_QUERY") = leap::kMaxBundlesPerQuery;
    m.attr("DEFAULT_FUEL") = leap::kDefaultFuel;
    m.attr("MAX_SEQUENCE_LENGTH") = leap::kMaxSequenceLength;

    py::class_<leap::Program>(m, "Program")
        .def_property_readonly("name", [](const leap::Program& p) { return p.name; })
        .def("serialize", [](const leap::Program& p) { return leap::serialize(p); })
        .def("sub_actions",
             [](const leap::Program& p) {
                 std::vector<std::string> out;
                 for (const leap::SubAction& action : leap::flatten(p))
                     out.push_back(leap::render_call(action));
                 return out;
             })
        .def("validate", [](const leap::Program& p) { return leap::validate_program(p); })
        .def("objects",
             [](const leap::Program& p) {
                 std::vector<std::string> out;
                 for (const leap::ObjectName& name : leap::mentioned_objects(p))
                     out.push_back(name.str());
                 return out;
             })
        .def("__repr__", [](const leap::Program& p) { return "<Program " + p.name + ">"; });

    m.def("parse_program", &parse_or_raise, py::arg("text"),
          "Parse one program; raises ValueError on the first syntax error.");

    m.def(
        "parse_corpus",
        [](const std::string& text) {
            std::vector<leap::Program> programs;
            std::vector<std::string> errors;
            for (const auto& result : leap::parse_corpus(text)) {
                if (result.ok())
                    programs.push_back(result.value());
                else
                    errors.push_back(render_parse_error(result.error()));
            }
            return py::make_tuple(std::move(programs), std::move(errors));
        },
        py::arg("text"), "Split a multi-program file; returns (programs, error_messages).");

    m.def(
        "execute",
        [](const leap::Program& program, const std::string& state, bool strict, int fuel,
           const std::string& schemas) {
            return report_to_dict(leap::execute(program, state_or_raise(state),
                                                schemas_or_raise(schemas),
                                                options_for(strict, fuel)));
        },
        py::arg("program"), py::arg("state") = "", py::arg("strict") = false,
        py::arg("fuel") = leap::kDefaultFuel, py::arg("schemas") = "",
        "Run one program; state and schemas use the same text formats as the CLI.");

    m.def(
        "chain",
        [](const std::vector<leap::Program>& programs, const std::string& state, bool strict,
           int fuel, const std::string& schemas) {
            return report_to_dict(leap::chain(programs, state_or_raise(state),
                                              schemas_or_raise(schemas),
                                              options_for(strict, fuel)));
        },
        py::arg("programs"), py::arg("state") = "", py::arg("strict") = false,
        py::arg("fuel") = leap::kDefaultFuel, py::arg("schemas") = "",
        "Run programs back to back over one evolving state.");

    m.def(
        "plan",
        [](const std::string& goal, const std::string& state,
           const std::vector<leap::Program>& library, int max_depth, const std::string& name,
           const std::string& schemas) {
            leap::WorldState initial = state_or_raise(state);
            leap::SchemaTable table = schemas_or_raise(schemas);

            leap::Goal parsed_goal;
            std::size_t begin = 0;
            while (begin <= goal.size()) {
                std::size_t end = goal.find(',', begin);
                if (end == std::string::npos) end = goal.size();
                std::string part = goal.substr(begin, end - begin);
                const std::size_t first = part.find_first_not_of(" \t");
                if (first != std::string::npos) {
                    const std::size_t last = part.find_last_not_of(" \t");
                    part = part.substr(first, last - first + 1);
                    auto condition = leap::parse_condition_text(part);
                    if (!condition.ok())
                        throw py::value_error("goal '" + part +
                                              "': " + condition.error().message);
                    parsed_goal.conditions.push_back(condition.value());
                }
                begin = end + 1;
            }
            if (parsed_goal.conditions.empty())
                throw py::value_error("goal must name at least one condition");

            std::vector<leap::ObjectName> universe;
            auto add_object = [&universe](const leap::ObjectName& object) {
                for (const leap::ObjectName& existing : universe)
                    if (existing == object) return;
                universe.push_back(object);
            };
            for (const leap::Condition& condition : parsed_goal.conditions)
                for (const leap::ObjectName& arg : condition.pred.args) add_object(arg);
            for (const auto& [predicate, value] : initial.facts()) {
                (void)value;
                for (const leap::ObjectName& arg : predicate.args) add_object(arg);
            }
            for (const leap::Program& program : library)
                for (const leap::ObjectName& object : leap::mentioned_objects(program))
                    add_object(object);

            auto found = leap::plan(initial, parsed_goal, library, table, universe, max_depth);
            if (!found.ok()) throw std::runtime_error(found.error().message);
            auto program = leap::plan_to_program(found.value(), name);
            if (!program.ok()) throw py::value_error(program.error());
            return program.value();
        },
        py::arg("goal"), py::arg("state") = "", py::arg("library") = std::vector<leap::Program>{},
        py::arg("max_depth") = 6, py::arg("name") = "synthesized", py::arg("schemas") = "",
        "Synthesize a program reaching the comma-separated goal conditions.");

    m.def(
        "validate_bundles",
        [](const std::string& bundles_json) {
            auto bundles = leap::bundles_from_json(bundles_json);
            if (!bundles.ok()) throw py::value_error(bundles.error());
            std::vector<std::string> findings;
            for (const leap::EventBundle& bundle : bundles.value())
                for (const std::string& finding : leap::validate_bundle(bundle))
                    findings.push_back(bundle.clip_id + ": " + finding);
            return findings;
        },
        py::arg("bundles_json"), "Structural findings for every bundle in the JSON text.");

    m.def(
        "compile_query",
        [](const std::string& bundles_json, const std::string& library_text) {
            auto bundles = leap::bundles_from_json(bundles_json);
            if (!bundles.ok()) throw py::value_error(bundles.error());
            for (const leap::EventBundle& bundle : bundles.value()) {
                auto findings = leap::validate_bundle(bundle);
                if (!findings.empty())
                    throw py::value_error(bundle.clip_id + ": " + findings.front());
            }
            leap::QuerySpec spec;
            spec.library_text = library_text;
            spec.bundles = bundles.value();
            auto query = leap::assemble_query(spec);
            if (!query.ok()) throw py::value_error(query.error());
            return query.value().text;
        },
        py::arg("bundles_json"), py::arg("library_text") = "",
        "Compile event bundles into one completion query.");

    m.def(
        "compile_stub",
        [](const std::string& bundle_json) {
            auto bundles = leap::bundles_from_json(bundle_json);
            if (!bundles.ok()) throw py::value_error(bundles.error());
            if (bundles.value().size() != 1)
                throw py::value_error("expected exactly one bundle");
            return leap::compile_stub(bundles.value().front());
        },
        py::arg("bundle_json"), "Render a single bundle as its program stub.");

    m.def(
        "ingest",
        [](const std::string& raw, const std::vector<std::string>& clip_ids) {
            leap::IngestReport report = leap::ingest_results(raw, clip_ids);
            py::dict out;
            py::list matched;
            for (const leap::IngestEntry& entry : report.matched) {
                py::dict item;
                item["clip_id"] = entry.clip_id;
                if (entry.result.ok()) {
                    item["program"] = entry.result.value();
                    item["error"] = py::none();
                } else {
                    item["program"] = py::none();
                    item["error"] = render_parse_error(entry.result.error());
                }
                matched.append(std::move(item));
            }
            out["matched"] = std::move(matched);
            out["unmatched"] = report.unmatched_clip_ids;
            out["extra"] = report.extra_programs;
            return out;
        },
        py::arg("raw"), py::arg("clip_ids"),
        "Pair completion-response programs to clips by name.");

    m.def(
        "compare",
        [](const leap::Program& predicted, const leap::Program& ground_truth) {
            leap::ComparisonReport report = leap::compare(predicted, ground_truth);
            py::dict out;
            out["containment"] = report.containment_score;
            out["set_equal"] = report.set_equal;
            out["verb_accuracy"] = report.verb_accuracy;
            out["object_accuracy"] = report.object_accuracy;
            std::vector<std::string> missing;
            for (const leap::SubActionItem& item : report.missing)
                missing.push_back(leap::render_subaction_item(item));
            std::vector<std::string> extra;
            for (const leap::SubActionItem& item : report.extra)
                extra.push_back(leap::render_subaction_item(item));
            out["missing"] = std::move(missing);
            out["extra"] = std::move(extra);
            return out;
        },
        py::arg("predicted"), py::arg("ground_truth"),
        "Set-level score of a predicted program against ground truth.");

    m.def(
        "aggregate_preconditions",
        [](const leap::Program& program) { return leap::aggregate_preconditions(program); },
        py::arg("program"), "Every conditional in source order, joined with ' and '.");

    m.def(
        "corpus_stats_csv",
        [](const std::vector<leap::Program>& programs,
           const std::map<std::string, std::string>& classes) {
            std::vector<leap::ClassedProgram> classed;
            for (const leap::Program& program : programs) {
                auto it = classes.find(program.name);
                classed.push_back({it != classes.end() ? it->second
                                                       : leap::default_verb_class(program.name),
                                   program});
            }
            leap::CorpusStats stats = leap::corpus_stats(classed);
            return py::make_tuple(leap::render_verb_csv(stats),
                                  leap::render_object_csv(stats));
        },
        py::arg("programs"), py::arg("classes") = std::map<std::string, std::string>{},
        "Returns (subactions_per_verb_csv, object_frequency_csv).");
}
