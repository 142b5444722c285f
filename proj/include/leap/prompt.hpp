#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leap/ast.hpp"
#include "leap/decimal.hpp"
#include "leap/expected.hpp"
#include "leap/parser.hpp"

namespace leap {

struct AudioEvent {
    std::string label;
    TimeStamp begin_s;
    TimeStamp end_s;
};

struct LocomotionSegment {
    TimeStamp begin_s;
    TimeStamp end_s;
};

enum class ContactKind { Grabbed, Released, HoldingAtStart, HoldingNothingAtStart };

std::string_view contact_kind_name(ContactKind kind);
std::optional<ContactKind> contact_kind_from_name(std::string_view name);

struct ContactEvent {
    ContactKind kind = ContactKind::HoldingNothingAtStart;
    std::optional<ObjectName> object; // required for grabbed/released/holding_at_start
    std::optional<TimeStamp> time_s;  // required for grabbed/released
};

// Everything the upstream detectors produced for one clip. Event times are
// clip-relative (inside [0, stop_t - start_t]); detected_objects keeps
// first-detection order, deduplicated.
struct EventBundle {
    std::string clip_id;
    TimeStamp start_t;
    TimeStamp stop_t;
    std::vector<AudioEvent> audio_events;
    std::vector<LocomotionSegment> locomotion;
    std::vector<std::string> narration_before;
    std::vector<std::string> narration_after;
    std::vector<ObjectName> detected_objects;
    std::vector<ContactEvent> contacts;
};

// Invariant check; returns human-readable findings, empty when sound.
std::vector<std::string> validate_bundle(const EventBundle& bundle);

// JSON input, one object per clip (a file may hold one object or an array).
// Field names match the structure above; contact kinds are snake_case.
Expected<std::vector<EventBundle>, std::string> bundles_from_json(std::string_view text);

// Renders the bundle as a program stub: header with clip-relative times and
// one comment block per non-empty component, in the fixed order
// audio -> locomotion -> narration -> objects -> contacts. Deterministic and
// injective on clip_id. Times inside comments use exactly 2 fraction digits.
std::string compile_stub(const EventBundle& bundle);

inline constexpr std::size_t kMaxBundlesPerQuery = 35;

struct QuerySpec {
    std::string library_text; // exemplar programs, used verbatim
    std::vector<EventBundle> bundles;
    std::string preamble;            // optional instruction text, default empty
    std::string estimated_cost_note; // informational only
};

struct QueryText {
    std::string text;
    std::size_t stub_count = 0;
};

// library_text, separator line, then the stubs separated by blank lines.
// Rejects empty batches and batches over 35 bundles.
Expected<QueryText, std::string> assemble_query(const QuerySpec& spec);

enum class SubmitStatus { Ok, TransportError, QuotaError, MalformedResponse };

std::string_view submit_status_name(SubmitStatus status);
bool submit_status_retryable(SubmitStatus status); // transport/quota are, malformed is not

struct CompletionResult {
    SubmitStatus status = SubmitStatus::Ok;
    std::string text;
};

// Boundary to the external completion service. The toolkit ships no real
// transport; tests and callers supply stubs or recordings.
class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual CompletionResult complete(const std::string& query) = 0;
};

// Always answers with a fixed text and counts invocations.
class ScriptedClient : public CompletionClient {
public:
    explicit ScriptedClient(std::string response) : response_(std::move(response)) {}
    CompletionResult complete(const std::string&) override {
        ++calls;
        return CompletionResult{SubmitStatus::Ok, response_};
    }
    int calls = 0;

private:
    std::string response_;
};

class FailingClient : public CompletionClient {
public:
    explicit FailingClient(SubmitStatus status) : status_(status) {}
    CompletionResult complete(const std::string&) override {
        ++calls;
        return CompletionResult{status_, ""};
    }
    int calls = 0;

private:
    SubmitStatus status_;
};

std::uint64_t fnv1a64(std::string_view text);
std::string query_hash(std::string_view text); // 16 hex digits

// Stores responses on disk keyed by query hash; the stored record carries the
// full query text, so a hash collision can never serve a foreign response.
class ResponseCache {
public:
    explicit ResponseCache(std::string dir) : dir_(std::move(dir)) {}
    std::optional<std::string> load(const std::string& query) const;
    void store(const std::string& query, const std::string& response) const;
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
};

struct SubmitResult {
    SubmitStatus status = SubmitStatus::Ok;
    std::string text;
    bool from_cache = false;
};

// Serves from the cache when possible; otherwise asks the client and caches
// successful responses. Error statuses pass through uncached.
SubmitResult submit(const QueryText& query, CompletionClient& client,
                    const ResponseCache* cache = nullptr);

struct IngestEntry {
    std::string clip_id;
    Expected<Program, ParseError> result;
};

struct IngestReport {
    std::vector<IngestEntry> matched; // one per clip_id found in the response
    std::vector<std::string> unmatched_clip_ids;
    std::vector<std::string> extra_programs;
};

// Pairs response programs to clips by function name == clip_id. Chunks that
// fail to parse still pair up when their def line names a known clip.
IngestReport ingest_results(std::string_view raw, std::span<const std::string> clip_ids);
IngestReport ingest_results(std::string_view raw, const QuerySpec& spec);

} // namespace leap
