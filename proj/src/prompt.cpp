#include "leap/prompt.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace leap {
namespace {

using nlohmann::json;

// Comment lines wrap so that "# " plus the words stays within 36 columns;
// the 4-space indent does not count. Quoted phrases never break mid-phrase.
constexpr std::size_t kWrapWidth = 36;

bool valid_clip_name(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return true;
}

std::vector<std::string> tokenize_sentence(std::string_view sentence) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < sentence.size()) {
        while (i < sentence.size() && sentence[i] == ' ') ++i;
        if (i >= sentence.size()) break;
        std::size_t j = i;
        bool in_quotes = false;
        while (j < sentence.size() && (in_quotes || sentence[j] != ' ')) {
            if (sentence[j] == '"') in_quotes = !in_quotes;
            ++j;
        }
        tokens.emplace_back(sentence.substr(i, j - i));
        i = j;
    }
    return tokens;
}

void push_wrapped(std::vector<std::string>& lines, std::string_view sentence) {
    std::string current;
    for (const std::string& token : tokenize_sentence(sentence)) {
        if (current.empty()) {
            current = "# " + token;
        } else if (current.size() + 1 + token.size() <= kWrapWidth) {
            current += ' ';
            current += token;
        } else {
            lines.push_back(std::move(current));
            current = "# " + token;
        }
    }
    if (!current.empty()) lines.push_back(std::move(current));
}

std::string join_quoted(const std::vector<std::string>& phrases) {
    std::string out;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        if (i > 0) out += " and ";
        out += '"';
        out += phrases[i];
        out += '"';
    }
    return out;
}

Expected<TimeStamp, std::string> read_time(const json& j) {
    if (j.is_string()) {
        auto parsed = TimeStamp::parse(j.get<std::string>());
        if (!parsed) return std::string("bad time literal \"" + j.get<std::string>() + "\"");
        return *parsed;
    }
    if (j.is_number()) {
        double v = j.get<double>();
        if (v < 0.0) return std::string("negative time");
        return TimeStamp::from_seconds(v);
    }
    return std::string("time must be a number or a decimal string");
}

Expected<EventBundle, std::string> bundle_from_json(const json& j) {
    if (!j.is_object()) return std::string("bundle must be a JSON object");
    EventBundle b;

    if (!j.contains("clip_id") || !j["clip_id"].is_string())
        return std::string("missing clip_id");
    b.clip_id = j["clip_id"].get<std::string>();

    for (const char* field : {"start_t", "stop_t"}) {
        if (!j.contains(field)) return std::string("missing ") + field;
        auto t = read_time(j[field]);
        if (!t) return std::string(field) + ": " + t.error();
        (std::string_view(field) == "start_t" ? b.start_t : b.stop_t) = t.value();
    }

    if (j.contains("audio_events")) {
        if (!j["audio_events"].is_array()) return std::string("audio_events must be an array");
        for (const json& e : j["audio_events"]) {
            if (!e.is_object() || !e.contains("label") || !e["label"].is_string() ||
                !e.contains("begin_s") || !e.contains("end_s")) {
                return std::string("audio event needs label, begin_s, end_s");
            }
            auto begin = read_time(e["begin_s"]);
            auto end = read_time(e["end_s"]);
            if (!begin) return "audio begin_s: " + begin.error();
            if (!end) return "audio end_s: " + end.error();
            b.audio_events.push_back({e["label"].get<std::string>(), begin.value(), end.value()});
        }
    }

    if (j.contains("locomotion")) {
        if (!j["locomotion"].is_array()) return std::string("locomotion must be an array");
        for (const json& e : j["locomotion"]) {
            if (!e.is_object() || !e.contains("begin_s") || !e.contains("end_s"))
                return std::string("locomotion segment needs begin_s, end_s");
            auto begin = read_time(e["begin_s"]);
            auto end = read_time(e["end_s"]);
            if (!begin) return "locomotion begin_s: " + begin.error();
            if (!end) return "locomotion end_s: " + end.error();
            b.locomotion.push_back({begin.value(), end.value()});
        }
    }

    for (const char* field : {"narration_before", "narration_after"}) {
        if (!j.contains(field)) continue;
        if (!j[field].is_array()) return std::string(field) + " must be an array of strings";
        auto& dest = std::string_view(field) == "narration_before" ? b.narration_before
                                                                   : b.narration_after;
        for (const json& e : j[field]) {
            if (!e.is_string()) return std::string(field) + " must be an array of strings";
            dest.push_back(e.get<std::string>());
        }
    }

    if (j.contains("detected_objects")) {
        if (!j["detected_objects"].is_array())
            return std::string("detected_objects must be an array of strings");
        for (const json& e : j["detected_objects"]) {
            if (!e.is_string())
                return std::string("detected_objects must be an array of strings");
            auto name = ObjectName::make(e.get<std::string>());
            if (!name) return "bad object name \"" + e.get<std::string>() + "\"";
            bool seen = false;
            for (const ObjectName& existing : b.detected_objects)
                if (existing == *name) seen = true;
            if (!seen) b.detected_objects.push_back(*name);
        }
    }

    if (j.contains("contacts")) {
        if (!j["contacts"].is_array()) return std::string("contacts must be an array");
        for (const json& e : j["contacts"]) {
            if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string())
                return std::string("contact needs a kind");
            auto kind = contact_kind_from_name(e["kind"].get<std::string>());
            if (!kind) return "unknown contact kind \"" + e["kind"].get<std::string>() + "\"";
            ContactEvent c;
            c.kind = *kind;
            if (e.contains("object")) {
                if (!e["object"].is_string()) return std::string("contact object must be a string");
                auto name = ObjectName::make(e["object"].get<std::string>());
                if (!name) return "bad object name \"" + e["object"].get<std::string>() + "\"";
                c.object = *name;
            }
            if (e.contains("time_s")) {
                auto t = read_time(e["time_s"]);
                if (!t) return "contact time_s: " + t.error();
                c.time_s = t.value();
            }
            b.contacts.push_back(std::move(c));
        }
    }

    return b;
}

} // namespace

std::string_view contact_kind_name(ContactKind kind) {
    switch (kind) {
    case ContactKind::Grabbed: return "grabbed";
    case ContactKind::Released: return "released";
    case ContactKind::HoldingAtStart: return "holding_at_start";
    case ContactKind::HoldingNothingAtStart: return "holding_nothing_at_start";
    }
    return "";
}

std::optional<ContactKind> contact_kind_from_name(std::string_view name) {
    if (name == "grabbed") return ContactKind::Grabbed;
    if (name == "released") return ContactKind::Released;
    if (name == "holding_at_start") return ContactKind::HoldingAtStart;
    if (name == "holding_nothing_at_start") return ContactKind::HoldingNothingAtStart;
    return std::nullopt;
}

std::vector<std::string> validate_bundle(const EventBundle& bundle) {
    std::vector<std::string> findings;
    auto flag = [&](std::string text) { findings.push_back(std::move(text)); };

    if (!valid_clip_name(bundle.clip_id))
        flag("clip_id \"" + bundle.clip_id + "\" is not a valid program name");
    if (bundle.stop_t < bundle.start_t) {
        flag("stop_t precedes start_t");
        return findings; // no meaningful duration to check spans against
    }
    const TimeStamp duration = bundle.stop_t.minus(bundle.start_t);

    auto check_span = [&](const std::string& what, const TimeStamp& begin, const TimeStamp& end) {
        if (end < begin) flag(what + ": end_s precedes begin_s");
        if (duration < end) flag(what + ": end_s " + end.str() + " exceeds clip duration " +
                                 duration.str());
    };

    for (std::size_t i = 0; i < bundle.audio_events.size(); ++i) {
        const AudioEvent& e = bundle.audio_events[i];
        std::string what = "audio event " + std::to_string(i);
        if (e.label.empty()) flag(what + ": empty label");
        check_span(what, e.begin_s, e.end_s);
    }
    for (std::size_t i = 0; i < bundle.locomotion.size(); ++i) {
        const LocomotionSegment& s = bundle.locomotion[i];
        check_span("locomotion segment " + std::to_string(i), s.begin_s, s.end_s);
    }

    for (std::size_t i = 0; i < bundle.detected_objects.size(); ++i)
        for (std::size_t k = i + 1; k < bundle.detected_objects.size(); ++k)
            if (bundle.detected_objects[i] == bundle.detected_objects[k])
                flag("detected_objects: duplicate \"" + bundle.detected_objects[i].str() + "\"");

    bool holding_some = false;
    bool holding_none = false;
    for (std::size_t i = 0; i < bundle.contacts.size(); ++i) {
        const ContactEvent& c = bundle.contacts[i];
        std::string what = "contact " + std::to_string(i);
        switch (c.kind) {
        case ContactKind::Grabbed:
        case ContactKind::Released:
            if (!c.object) flag(what + ": missing object");
            if (!c.time_s) {
                flag(what + ": missing time_s");
            } else if (duration < *c.time_s) {
                flag(what + ": time_s " + c.time_s->str() + " exceeds clip duration " +
                     duration.str());
            }
            break;
        case ContactKind::HoldingAtStart:
            holding_some = true;
            if (!c.object) flag(what + ": missing object");
            break;
        case ContactKind::HoldingNothingAtStart:
            holding_none = true;
            break;
        }
    }
    if (holding_some && holding_none) flag("contacts: conflicting start-of-clip holding records");

    return findings;
}

Expected<std::vector<EventBundle>, std::string> bundles_from_json(std::string_view text) {
    json root = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (root.is_discarded()) return std::string("invalid JSON");

    std::vector<json> items;
    if (root.is_array()) {
        items.assign(root.begin(), root.end());
    } else if (root.is_object()) {
        items.push_back(root);
    } else {
        return std::string("expected a bundle object or an array of bundles");
    }

    std::vector<EventBundle> bundles;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto parsed = bundle_from_json(items[i]);
        if (!parsed) {
            std::string where = "bundle " + std::to_string(i);
            if (items[i].is_object() && items[i].contains("clip_id") &&
                items[i]["clip_id"].is_string()) {
                where += " (" + items[i]["clip_id"].get<std::string>() + ")";
            }
            return where + ": " + parsed.error();
        }
        bundles.push_back(std::move(parsed.value()));
    }
    return bundles;
}

std::string compile_stub(const EventBundle& bundle) {
    const TimeStamp duration = bundle.stop_t.minus(bundle.start_t);
    std::vector<std::string> lines;

    for (const AudioEvent& e : bundle.audio_events) {
        lines.push_back("# Heard sound of " + e.label + " at time");
        lines.push_back("# " + e.begin_s.str2() + " sec to " + e.end_s.str2() + " sec");
    }
    for (const LocomotionSegment& s : bundle.locomotion) {
        lines.push_back("# Go to object from time " + s.begin_s.str2() + " sec to");
        lines.push_back("# time " + s.end_s.str2() + " sec");
    }

    if (!bundle.narration_before.empty() || !bundle.narration_after.empty()) {
        std::string sentence;
        if (!bundle.narration_before.empty()) {
            sentence += "The actions performed right before this were " +
                        join_quoted(bundle.narration_before) + ".";
        }
        if (!bundle.narration_after.empty()) {
            if (!sentence.empty()) sentence += ' ';
            sentence += "The actions performed right after this were " +
                        join_quoted(bundle.narration_after);
        }
        push_wrapped(lines, sentence);
    }

    if (!bundle.detected_objects.empty()) {
        std::string sentence = "objects = [";
        for (std::size_t i = 0; i < bundle.detected_objects.size(); ++i) {
            if (i > 0) sentence += ", ";
            sentence += bundle.detected_objects[i].str();
        }
        sentence += ']';
        push_wrapped(lines, sentence);
    }

    for (const ContactEvent& c : bundle.contacts) {
        const std::string obj = c.object ? c.object->str() : "?";
        switch (c.kind) {
        case ContactKind::Grabbed:
            lines.push_back("# Grabbed " + obj + " at time(s) " +
                            (c.time_s ? c.time_s->str2() : "?"));
            break;
        case ContactKind::Released:
            lines.push_back("# Released " + obj + " at time(s) " +
                            (c.time_s ? c.time_s->str2() : "?"));
            break;
        case ContactKind::HoldingAtStart:
            lines.push_back("# Holding " + obj + " at start.");
            break;
        case ContactKind::HoldingNothingAtStart:
            lines.push_back("# Holding nothing at start.");
            break;
        }
    }

    std::string out = "def " + bundle.clip_id + "(start_t=0, stop_t=" + duration.str() + "):\n";
    for (const std::string& line : lines) {
        out += "    ";
        out += line;
        out += '\n';
    }
    return out;
}

Expected<QueryText, std::string> assemble_query(const QuerySpec& spec) {
    if (spec.bundles.empty()) return std::string("query needs at least one bundle");
    if (spec.bundles.size() > kMaxBundlesPerQuery) {
        return "query holds " + std::to_string(spec.bundles.size()) + " bundles; the limit is " +
               std::to_string(kMaxBundlesPerQuery);
    }

    std::string text;
    if (!spec.preamble.empty()) {
        text += spec.preamble;
        if (text.back() != '\n') text += '\n';
        text += '\n';
    }
    if (!spec.library_text.empty()) {
        text += spec.library_text;
        if (text.back() != '\n') text += '\n';
    }
    text += "# ";
    text += std::string(40, '-');
    text += '\n';
    for (std::size_t i = 0; i < spec.bundles.size(); ++i) {
        if (i > 0) text += '\n';
        text += compile_stub(spec.bundles[i]);
    }
    return QueryText{std::move(text), spec.bundles.size()};
}

std::string_view submit_status_name(SubmitStatus status) {
    switch (status) {
    case SubmitStatus::Ok: return "ok";
    case SubmitStatus::TransportError: return "transport_error";
    case SubmitStatus::QuotaError: return "quota_error";
    case SubmitStatus::MalformedResponse: return "malformed_response";
    }
    return "";
}

bool submit_status_retryable(SubmitStatus status) {
    return status == SubmitStatus::TransportError || status == SubmitStatus::QuotaError;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string query_hash(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(text)));
    return std::string(buf);
}

std::optional<std::string> ResponseCache::load(const std::string& query) const {
    namespace fs = std::filesystem;
    const fs::path path = fs::path(dir_) / (query_hash(query) + ".json");
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str(), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    if (!j.contains("query") || !j["query"].is_string() || !j.contains("response") ||
        !j["response"].is_string()) {
        return std::nullopt;
    }
    // Guards against hash collisions and stale records: the stored query must
    // be byte-identical to the one being asked for.
    if (j["query"].get<std::string>() != query) return std::nullopt;
    return j["response"].get<std::string>();
}

void ResponseCache::store(const std::string& query, const std::string& response) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    const std::string hash = query_hash(query);
    const fs::path final_path = fs::path(dir_) / (hash + ".json");
    const fs::path temp_path = fs::path(dir_) / (hash + ".json.tmp");

    json j;
    j["query_hash"] = hash;
    j["query"] = query;
    j["response"] = response;
    {
        std::ofstream out(temp_path, std::ios::binary | std::ios::trunc);
        if (!out) return;
        out << j.dump(2) << '\n';
        if (!out.good()) return;
    }
    fs::rename(temp_path, final_path, ec);
    if (ec) fs::remove(temp_path, ec);
}

SubmitResult submit(const QueryText& query, CompletionClient& client,
                    const ResponseCache* cache) {
    if (cache) {
        if (auto hit = cache->load(query.text)) {
            return SubmitResult{SubmitStatus::Ok, std::move(*hit), true};
        }
    }
    CompletionResult res = client.complete(query.text);
    if (res.status == SubmitStatus::Ok && cache) cache->store(query.text, res.text);
    return SubmitResult{res.status, std::move(res.text), false};
}

IngestReport ingest_results(std::string_view raw, std::span<const std::string> clip_ids) {
    struct Chunk {
        std::size_t begin_offset = 0;
        int begin_line = 0; // 0-based count of lines before the chunk
        std::string text;
        std::optional<std::string> name;
        std::optional<ParseResult> result;
        bool claimed = false;
    };

    // Same chunking rule as corpus parsing: a column-0 "def " line starts a
    // new program, and whatever precedes the first one (prose, blank lines)
    // belongs to the first chunk.
    std::vector<std::pair<std::size_t, int>> def_positions; // offset, 0-based line
    {
        std::size_t pos = 0;
        int line_no = 0;
        while (pos <= raw.size()) {
            std::size_t eol = raw.find('\n', pos);
            if (eol == std::string_view::npos) eol = raw.size();
            if (raw.substr(pos, eol - pos).starts_with("def ")) {
                def_positions.emplace_back(pos, line_no);
            }
            if (eol >= raw.size()) break;
            pos = eol + 1;
            ++line_no;
        }
    }
    std::vector<Chunk> chunks;
    for (std::size_t k = 0; k < def_positions.size(); ++k) {
        Chunk c;
        c.begin_offset = k == 0 ? 0 : def_positions[k].first;
        c.begin_line = k == 0 ? 0 : def_positions[k].second;
        const std::size_t end =
            k + 1 < def_positions.size() ? def_positions[k + 1].first : raw.size();
        c.text = std::string(raw.substr(c.begin_offset, end - c.begin_offset));
        chunks.push_back(std::move(c));
    }

    for (Chunk& c : chunks) {
        ParseResult r = parse_program(c.text);
        if (r.ok()) {
            c.name = r.value().name;
        } else {
            c.name = sniff_program_name(c.text);
            ParseError& e = r.error();
            e.line += c.begin_line;
            e.span.begin += c.begin_offset;
            e.span.end += c.begin_offset;
        }
        c.result = std::move(r);
    }

    std::unordered_map<std::string, std::vector<std::size_t>> by_name;
    for (std::size_t i = 0; i < chunks.size(); ++i)
        if (chunks[i].name) by_name[*chunks[i].name].push_back(i);

    IngestReport report;
    for (const std::string& clip : clip_ids) {
        bool found = false;
        auto it = by_name.find(clip);
        if (it != by_name.end()) {
            for (std::size_t idx : it->second) {
                if (!chunks[idx].claimed) {
                    chunks[idx].claimed = true;
                    report.matched.push_back(IngestEntry{clip, std::move(*chunks[idx].result)});
                    found = true;
                    break;
                }
            }
        }
        if (!found) report.unmatched_clip_ids.push_back(clip);
    }
    for (const Chunk& c : chunks) {
        if (c.claimed) continue;
        if (c.name) {
            report.extra_programs.push_back(*c.name);
        } else {
            report.extra_programs.push_back("unparsed chunk at line " +
                                            std::to_string(c.begin_line + 1));
        }
    }
    return report;
}

IngestReport ingest_results(std::string_view raw, const QuerySpec& spec) {
    std::vector<std::string> clip_ids;
    clip_ids.reserve(spec.bundles.size());
    for (const EventBundle& b : spec.bundles) clip_ids.push_back(b.clip_id);
    return ingest_results(raw, clip_ids);
}

} // namespace leap
