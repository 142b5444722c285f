// leap: command-line front end for the action-program toolkit.
//
// Exit codes are stable: 0 success, 1 findings (parse errors, violations,
// malformed bundles, unmatched comparisons), 2 usage or config error,
// 3 I/O error. Code 4 is reserved for external-client failures and is never
// produced here; the CLI performs no network calls.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "leap/analytics.hpp"
#include "leap/ast.hpp"
#include "leap/parser.hpp"
#include "leap/planner.hpp"
#include "leap/prompt.hpp"
#include "leap/semantics.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return buf.str();
}

bool write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    return out.good();
}

std::string format3(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", value);
    return buf;
}

std::string render_parse_error(const std::string& file, const leap::ParseError& error) {
    return file + ":" + std::to_string(error.line) + ":" + std::to_string(error.column) +
           ": error: " + std::string(leap::parse_error_kind_name(error.kind)) + ": " +
           error.message;
}

std::string render_violation(const leap::Violation& violation) {
    std::string out = "step " + std::to_string(violation.step_index) + " " +
                      leap::render_call(violation.sub_action) + ": requires " +
                      leap::render_condition(violation.failed);
    out += violation.reason == leap::ViolationReason::PreconditionUnknown ? " (found unknown)"
                                                                          : " (found false)";
    return out;
}

std::string render_item_list(const leap::SubActionSet& set) {
    std::string out = "[";
    bool first = true;
    for (const leap::SubActionItem& item : set) {
        if (!first) out += " ";
        first = false;
        out += leap::render_subaction_item(item);
    }
    out += "]";
    return out;
}

// Shared option values; CLI11 fills them before the handler runs.
struct Options {
    std::vector<std::string> paths;
    std::string state_file;
    std::string schemas_file;
    int fuel = leap::kDefaultFuel;
    bool strict = false;
    bool json = false;
    std::string goal_expr;
    std::string library_dir;
    std::string library_file;
    int max_depth = 6;
    std::string emit_name = "synthesized";
    int batch = static_cast<int>(leap::kMaxBundlesPerQuery);
    std::string out_dir = ".";
    std::string verbs_file;
    std::string pred_path;
    std::string gt_path;
};

int cmd_parse(const Options& opt) {
    bool findings = false;
    ojson report = ojson::array();
    for (const std::string& path : opt.paths) {
        auto text = read_file(path);
        if (!text) {
            std::cerr << "leap: cannot read " << path << "\n";
            return kExitIo;
        }
        auto results = leap::parse_corpus(*text);
        ojson entry;
        entry["file"] = path;
        entry["programs"] = ojson::array();
        entry["errors"] = ojson::array();
        std::vector<std::string> names;
        for (const auto& result : results) {
            if (result.ok()) {
                const leap::Program& program = result.value();
                names.push_back(program.name);
                ojson p;
                p["name"] = program.name;
                p["sub_actions"] = leap::flatten(program).size();
                entry["programs"].push_back(std::move(p));
            } else {
                findings = true;
                const leap::ParseError& e = result.error();
                if (!opt.json) std::cout << render_parse_error(path, e) << "\n";
                ojson j;
                j["line"] = e.line;
                j["column"] = e.column;
                j["kind"] = std::string(leap::parse_error_kind_name(e.kind));
                j["message"] = e.message;
                entry["errors"].push_back(std::move(j));
            }
        }
        if (!opt.json) {
            std::cout << path << ": " << names.size() << " program(s)";
            for (std::size_t i = 0; i < names.size(); ++i)
                std::cout << (i == 0 ? ": " : ", ") << names[i];
            std::cout << "\n";
        }
        report.push_back(std::move(entry));
    }
    if (opt.json) std::cout << report.dump(2) << "\n";
    return findings ? kExitFindings : kExitOk;
}

// Loads --state/--schemas inputs shared by validate and plan. Returns an
// exit code on failure, 0 on success.
int load_context(const Options& opt, leap::WorldState& state, leap::SchemaTable& schemas) {
    schemas = leap::default_schemas();
    if (!opt.state_file.empty()) {
        auto text = read_file(opt.state_file);
        if (!text) {
            std::cerr << "leap: cannot read " << opt.state_file << "\n";
            return kExitIo;
        }
        auto parsed = leap::parse_state_text(*text);
        if (!parsed) {
            std::cerr << "leap: " << opt.state_file << ": " << parsed.error() << "\n";
            return kExitUsage;
        }
        state = parsed.value();
    }
    if (!opt.schemas_file.empty()) {
        auto text = read_file(opt.schemas_file);
        if (!text) {
            std::cerr << "leap: cannot read " << opt.schemas_file << "\n";
            return kExitIo;
        }
        auto parsed = leap::parse_schema_overlay(*text);
        if (!parsed) {
            std::cerr << "leap: " << opt.schemas_file << ": " << parsed.error() << "\n";
            return kExitUsage;
        }
        schemas = parsed.value();
    }
    return kExitOk;
}

int cmd_validate(const Options& opt) {
    if (opt.fuel < 1) {
        std::cerr << "leap: --fuel must be positive\n";
        return kExitUsage;
    }
    leap::WorldState initial;
    leap::SchemaTable schemas;
    if (int code = load_context(opt, initial, schemas); code != kExitOk) return code;

    const leap::ExecOptions exec_options{
        opt.fuel, opt.strict ? leap::ExecMode::Strict : leap::ExecMode::Optimistic};
    bool findings = false;
    for (const std::string& path : opt.paths) {
        auto text = read_file(path);
        if (!text) {
            std::cerr << "leap: cannot read " << path << "\n";
            return kExitIo;
        }
        for (const auto& result : leap::parse_corpus(*text)) {
            if (!result.ok()) {
                findings = true;
                std::cout << render_parse_error(path, result.error()) << "\n";
                continue;
            }
            const leap::Program& program = result.value();
            leap::ExecReport report = leap::execute(program, initial, schemas, exec_options);
            if (report.valid) {
                std::cout << path << ":" << program.name << ": valid";
            } else {
                findings = true;
                std::cout << path << ":" << program.name << ": INVALID ("
                          << report.violations.size() << " violation(s))";
            }
            if (report.fuel_exhausted()) {
                std::cout << " [fuel exhausted at";
                for (const std::string& site : report.fuel_exhausted_sites)
                    std::cout << " " << site;
                std::cout << "]";
            }
            std::cout << "\n";
            for (const leap::Violation& violation : report.violations)
                std::cout << "    " << render_violation(violation) << "\n";
        }
    }
    return findings ? kExitFindings : kExitOk;
}

int cmd_plan(const Options& opt) {
    leap::WorldState initial;
    leap::SchemaTable schemas;
    if (int code = load_context(opt, initial, schemas); code != kExitOk) return code;

    leap::Goal goal;
    {
        std::stringstream parts(opt.goal_expr);
        std::string part;
        while (std::getline(parts, part, ',')) {
            const std::size_t begin = part.find_first_not_of(" \t");
            if (begin == std::string::npos) continue;
            const std::size_t end = part.find_last_not_of(" \t");
            part = part.substr(begin, end - begin + 1);
            auto condition = leap::parse_condition_text(part);
            if (!condition) {
                std::cerr << "leap: goal '" << part << "': " << condition.error().message << "\n";
                return kExitUsage;
            }
            goal.conditions.push_back(condition.value());
        }
    }
    if (goal.conditions.empty()) {
        std::cerr << "leap: --goal must name at least one condition\n";
        return kExitUsage;
    }

    std::vector<leap::Program> library;
    if (!opt.library_dir.empty()) {
        std::error_code ec;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(opt.library_dir, ec)) {
            if (entry.is_regular_file() && entry.path().extension() == ".leap")
                files.push_back(entry.path());
        }
        if (ec) {
            std::cerr << "leap: cannot read directory " << opt.library_dir << "\n";
            return kExitIo;
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& file : files) {
            auto text = read_file(file.string());
            if (!text) {
                std::cerr << "leap: cannot read " << file.string() << "\n";
                return kExitIo;
            }
            for (const auto& result : leap::parse_corpus(*text)) {
                if (!result.ok()) {
                    std::cerr << "leap: library "
                              << render_parse_error(file.string(), result.error()) << "\n";
                    return kExitUsage;
                }
                library.push_back(result.value());
            }
        }
    }

    // The search universe is everything the query mentions: goal objects,
    // state objects, and objects of library programs.
    std::vector<leap::ObjectName> universe;
    auto add_object = [&universe](const leap::ObjectName& name) {
        for (const leap::ObjectName& existing : universe)
            if (existing == name) return;
        universe.push_back(name);
    };
    for (const leap::Condition& condition : goal.conditions)
        for (const leap::ObjectName& arg : condition.pred.args) add_object(arg);
    for (const auto& [predicate, value] : initial.facts()) {
        (void)value;
        for (const leap::ObjectName& arg : predicate.args) add_object(arg);
    }
    for (const leap::Program& program : library)
        for (const leap::ObjectName& name : leap::mentioned_objects(program)) add_object(name);

    auto result = leap::plan(initial, goal, library, schemas, universe, opt.max_depth);
    if (!result) {
        const leap::PlanError& error = result.error();
        std::cerr << "leap: " << error.message << "\n";
        return error.kind == leap::PlanError::Kind::Guard ? kExitUsage : kExitFindings;
    }
    auto program = leap::plan_to_program(result.value(), opt.emit_name);
    if (!program) {
        std::cerr << "leap: " << program.error() << "\n";
        return kExitUsage;
    }
    std::cout << leap::serialize(program.value());
    return kExitOk;
}

int cmd_compile(const Options& opt) {
    if (opt.batch < 1 || opt.batch > static_cast<int>(leap::kMaxBundlesPerQuery)) {
        std::cerr << "leap: --batch must lie in 1.." << leap::kMaxBundlesPerQuery << "\n";
        return kExitUsage;
    }
    std::string library_text;
    if (!opt.library_file.empty()) {
        auto text = read_file(opt.library_file);
        if (!text) {
            std::cerr << "leap: cannot read " << opt.library_file << "\n";
            return kExitIo;
        }
        library_text = std::move(*text);
    }

    std::vector<leap::EventBundle> bundles;
    bool findings = false;
    for (const std::string& path : opt.paths) {
        auto text = read_file(path);
        if (!text) {
            std::cerr << "leap: cannot read " << path << "\n";
            return kExitIo;
        }
        auto parsed = leap::bundles_from_json(*text);
        if (!parsed) {
            findings = true;
            std::cout << path << ": " << parsed.error() << "\n";
            continue;
        }
        for (leap::EventBundle& bundle : parsed.value()) {
            for (const std::string& finding : leap::validate_bundle(bundle)) {
                findings = true;
                std::cout << path << ":" << bundle.clip_id << ": " << finding << "\n";
            }
            bundles.push_back(std::move(bundle));
        }
    }
    if (findings) return kExitFindings;
    if (bundles.empty()) {
        std::cerr << "leap: no bundles to compile\n";
        return kExitUsage;
    }

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    std::size_t query_index = 0;
    for (std::size_t begin = 0; begin < bundles.size(); begin += opt.batch) {
        const std::size_t end = std::min(bundles.size(), begin + opt.batch);
        leap::QuerySpec spec;
        spec.library_text = library_text;
        spec.bundles.assign(bundles.begin() + begin, bundles.begin() + end);
        auto query = leap::assemble_query(spec);
        if (!query) {
            std::cerr << "leap: " << query.error() << "\n";
            return kExitUsage;
        }
        ++query_index;
        char name[32];
        std::snprintf(name, sizeof(name), "query_%03zu.txt", query_index);
        const fs::path out_path = fs::path(opt.out_dir) / name;
        if (!write_file(out_path, query.value().text)) {
            std::cerr << "leap: cannot write " << out_path.string() << "\n";
            return kExitIo;
        }
        std::cout << "wrote " << out_path.string() << " (" << query.value().stub_count
                  << " stub(s))\n";
    }
    return kExitOk;
}

int cmd_stats(const Options& opt) {
    std::map<std::string, std::string> class_of;
    if (!opt.verbs_file.empty()) {
        auto text = read_file(opt.verbs_file);
        if (!text) {
            std::cerr << "leap: cannot read " << opt.verbs_file << "\n";
            return kExitIo;
        }
        std::stringstream lines(*text);
        std::string line;
        int line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            const std::size_t comma = line.find(',');
            if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size()) {
                std::cerr << "leap: " << opt.verbs_file << ":" << line_no
                          << ": expected 'program_name,verb_class'\n";
                return kExitUsage;
            }
            class_of[line.substr(0, comma)] = line.substr(comma + 1);
        }
    }

    std::vector<leap::ClassedProgram> programs;
    std::size_t failures = 0;
    for (const std::string& path : opt.paths) {
        auto text = read_file(path);
        if (!text) {
            std::cerr << "leap: cannot read " << path << "\n";
            return kExitIo;
        }
        for (const auto& result : leap::parse_corpus(*text)) {
            if (!result.ok()) {
                ++failures;
                std::cout << render_parse_error(path, result.error()) << "\n";
                continue;
            }
            const leap::Program& program = result.value();
            auto it = class_of.find(program.name);
            std::string verb_class =
                it != class_of.end() ? it->second : leap::default_verb_class(program.name);
            programs.push_back({std::move(verb_class), program});
        }
    }

    leap::CorpusStats stats = leap::corpus_stats(programs);
    stats.parse_failure_count = failures;

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    const fs::path verb_path = fs::path(opt.out_dir) / "subactions_per_verb.csv";
    const fs::path object_path = fs::path(opt.out_dir) / "object_frequency.csv";
    if (!write_file(verb_path, leap::render_verb_csv(stats)) ||
        !write_file(object_path, leap::render_object_csv(stats))) {
        std::cerr << "leap: cannot write under " << opt.out_dir << "\n";
        return kExitIo;
    }
    std::cout << stats.program_count << " program(s), " << stats.parse_failure_count
              << " parse failure(s); wrote " << verb_path.string() << ", "
              << object_path.string() << "\n";
    return kExitOk;
}

int cmd_compare(const Options& opt) {
    struct Corpus {
        std::vector<leap::Program> programs;
        std::size_t errors = 0;
    };
    auto load = [](const std::string& path, Corpus& corpus, bool quiet) -> int {
        auto text = read_file(path);
        if (!text) {
            std::cerr << "leap: cannot read " << path << "\n";
            return kExitIo;
        }
        for (const auto& result : leap::parse_corpus(*text)) {
            if (result.ok()) {
                corpus.programs.push_back(result.value());
            } else {
                ++corpus.errors;
                if (!quiet) std::cout << render_parse_error(path, result.error()) << "\n";
            }
        }
        return kExitOk;
    };

    Corpus pred;
    Corpus gt;
    if (int code = load(opt.pred_path, pred, opt.json); code != kExitOk) return code;
    if (int code = load(opt.gt_path, gt, opt.json); code != kExitOk) return code;

    std::map<std::string, const leap::Program*> pred_by_name;
    std::vector<std::string> duplicate_predictions;
    for (const leap::Program& program : pred.programs) {
        if (!pred_by_name.emplace(program.name, &program).second)
            duplicate_predictions.push_back(program.name);
    }

    ojson out;
    out["pairs"] = ojson::array();
    out["unmatched_ground_truth"] = ojson::array();
    out["unmatched_predictions"] = ojson::array();

    std::vector<std::string> claimed;
    double sum_containment = 0.0;
    double sum_verbs = 0.0;
    double sum_objects = 0.0;
    std::size_t pairs = 0;
    for (const leap::Program& truth : gt.programs) {
        auto it = pred_by_name.find(truth.name);
        if (it == pred_by_name.end()) {
            out["unmatched_ground_truth"].push_back(truth.name);
            if (!opt.json) std::cout << truth.name << ": no prediction\n";
            continue;
        }
        claimed.push_back(truth.name);
        leap::ComparisonReport report = leap::compare(*it->second, truth);
        ++pairs;
        sum_containment += report.containment_score;
        sum_verbs += report.verb_accuracy;
        sum_objects += report.object_accuracy;
        if (opt.json) {
            ojson j;
            j["name"] = truth.name;
            j["containment"] = report.containment_score;
            j["set_equal"] = report.set_equal;
            j["verb_accuracy"] = report.verb_accuracy;
            j["object_accuracy"] = report.object_accuracy;
            j["missing"] = ojson::array();
            for (const auto& item : report.missing)
                j["missing"].push_back(leap::render_subaction_item(item));
            j["extra"] = ojson::array();
            for (const auto& item : report.extra)
                j["extra"].push_back(leap::render_subaction_item(item));
            out["pairs"].push_back(std::move(j));
        } else {
            std::cout << truth.name << ": containment=" << format3(report.containment_score)
                      << " set_equal=" << (report.set_equal ? "yes" : "no")
                      << " verbs=" << format3(report.verb_accuracy)
                      << " objects=" << format3(report.object_accuracy)
                      << " missing=" << render_item_list(report.missing)
                      << " extra=" << render_item_list(report.extra) << "\n";
        }
    }
    bool unmatched = !duplicate_predictions.empty();
    for (const auto& [name, program] : pred_by_name) {
        (void)program;
        if (std::find(claimed.begin(), claimed.end(), name) == claimed.end()) {
            unmatched = true;
            out["unmatched_predictions"].push_back(name);
            if (!opt.json) std::cout << name << ": no ground truth\n";
        }
    }
    for (const std::string& name : duplicate_predictions) {
        out["unmatched_predictions"].push_back(name + " (duplicate)");
        if (!opt.json) std::cout << name << ": duplicate prediction\n";
    }
    unmatched = unmatched || !out["unmatched_ground_truth"].empty();

    if (pairs > 0) {
        const double n = static_cast<double>(pairs);
        if (opt.json) {
            out["mean"] = {{"containment", sum_containment / n},
                           {"verb_accuracy", sum_verbs / n},
                           {"object_accuracy", sum_objects / n},
                           {"pairs", pairs}};
        } else {
            std::cout << "mean over " << pairs
                      << " pair(s): containment=" << format3(sum_containment / n)
                      << " verbs=" << format3(sum_verbs / n)
                      << " objects=" << format3(sum_objects / n) << "\n";
        }
    } else if (!opt.json) {
        std::cout << "no matched pairs\n";
    }
    if (opt.json) std::cout << out.dump(2) << "\n";

    const bool findings = pred.errors > 0 || gt.errors > 0 || unmatched;
    return findings ? kExitFindings : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LEAP action-program toolkit"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* parse = app.add_subcommand("parse", "Parse program files and report errors");
    parse->add_option("paths", opt.paths, "program files")->required()->expected(-1);
    parse->add_flag("--json", opt.json, "machine-readable output");

    CLI::App* validate =
        app.add_subcommand("validate", "Execute programs and report violations");
    validate->add_option("paths", opt.paths, "program files")->required()->expected(-1);
    validate->add_option("--state", opt.state_file, "initial state file (one condition per line)");
    validate->add_option("--schemas", opt.schemas_file, "schema overlay file");
    validate->add_option("--fuel", opt.fuel, "loop iteration budget");
    validate->add_flag("--strict", opt.strict, "treat unknown preconditions as violations");

    CLI::App* plan = app.add_subcommand("plan", "Synthesize a program reaching a goal");
    plan->add_option("--state", opt.state_file, "initial state file");
    plan->add_option("--goal", opt.goal_expr, "comma-separated goal conditions")->required();
    plan->add_option("--library", opt.library_dir, "directory of .leap programs");
    plan->add_option("--max-depth", opt.max_depth, "search depth bound (1..12)");
    plan->add_option("--emit", opt.emit_name, "name of the synthesized program");
    plan->add_option("--schemas", opt.schemas_file, "schema overlay file");

    CLI::App* compile = app.add_subcommand("compile", "Compile event bundles into query files");
    compile->add_option("paths", opt.paths, "bundle JSON files")->required()->expected(-1);
    compile->add_option("--library", opt.library_file, "exemplar corpus file");
    compile->add_option("--batch", opt.batch, "stubs per query (default 35)");
    compile->add_option("--out", opt.out_dir, "output directory");

    CLI::App* stats = app.add_subcommand("stats", "Corpus statistics CSVs");
    stats->add_option("paths", opt.paths, "program files")->required()->expected(-1);
    stats->add_option("--verbs", opt.verbs_file, "program_name,verb_class mapping file");
    stats->add_option("--out", opt.out_dir, "output directory");

    CLI::App* compare = app.add_subcommand("compare", "Score predictions against ground truth");
    compare->add_option("predicted", opt.pred_path, "predicted corpus")->required();
    compare->add_option("ground_truth", opt.gt_path, "ground-truth corpus")->required();
    compare->add_flag("--json", opt.json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (parse->parsed()) return cmd_parse(opt);
    if (validate->parsed()) return cmd_validate(opt);
    if (plan->parsed()) return cmd_plan(opt);
    if (compile->parsed()) return cmd_compile(opt);
    if (stats->parsed()) return cmd_stats(opt);
    if (compare->parsed()) return cmd_compare(opt);
    return kExitUsage;
}
