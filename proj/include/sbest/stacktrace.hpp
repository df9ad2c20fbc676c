#ifndef SBEST_STACKTRACE_HPP
#define SBEST_STACKTRACE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sbest/method_id.hpp"

namespace sbest {

struct StackFrame {
    std::string class_fqn;
    std::string method_name;
    std::optional<std::string> file_name;  // nullopt for Unknown Source / Native Method
    std::optional<int> line_number;        // >= 1 when known
    std::size_t frame_index = 0;           // position within its segment

    MethodId method_id() const { return MethodId::from_frame(class_fqn, method_name); }

    friend bool operator==(const StackFrame&, const StackFrame&) = default;
};

/// One exception segment with its frames and the flat list of "Caused by"
/// segments that followed it. Causes never carry causes of their own.
struct ParsedStackTrace {
    std::string exception_fqn;
    std::optional<std::string> message;
    std::vector<StackFrame> frames;
    std::vector<ParsedStackTrace> causes;

    friend bool operator==(const ParsedStackTrace&, const ParsedStackTrace&) = default;
};

struct GrammarConfig {
    /// Decode `&lt;` `&gt;` `&amp;` `&quot;` `&#39;` before matching, for
    /// traces pasted from HTML bug trackers.
    bool decode_html_entities = true;
    /// Drop frames belonging to "Suppressed:" blocks.
    bool skip_suppressed = true;
};

/// Extracts every Java stack trace in `text`, in order of appearance.
/// Never throws on malformed input; unrecognised regions are skipped.
std::vector<ParsedStackTrace> parse_stack_traces(std::string_view text,
                                                 const GrammarConfig& grammar = {});

/// Renders the trace in the JVM's printed form. Parsing the result yields
/// an equal structure.
std::string render_text(const ParsedStackTrace& trace);

/// Canonical JSON: {exception, message, frames[{class,method,file,line}], causes}.
nlohmann::json to_json(const ParsedStackTrace& trace);
nlohmann::json to_json(std::span<const ParsedStackTrace> traces);

/// Internal (project-owned) methods of a trace in first-occurrence order,
/// primary frames first, then each cause segment in order.
struct InternalFrameView {
    std::vector<MethodId> methods;
    std::vector<const ParsedStackTrace*> source_traces;

    bool empty() const noexcept { return methods.empty(); }
    /// 1-based first-occurrence position of `m` (using same_method), or nullopt.
    std::optional<std::size_t> position_of(const MethodId& m) const;
};

/// True when `class_fqn` lies under `prefix`. The prefix must end on a
/// package or class boundary: `org.apache.commons.lang` does not cover
/// `org.apache.commons.lang3.StringUtils`.
bool matches_prefix(std::string_view class_fqn, std::string_view prefix) noexcept;

InternalFrameView internal_view(const ParsedStackTrace& trace,
                                std::span<const std::string> prefixes);

/// View over several traces, concatenated in order then deduplicated.
InternalFrameView internal_view(std::span<const ParsedStackTrace> traces,
                                std::span<const std::string> prefixes);

/// First min(m, |methods|) entries of the view.
std::vector<MethodId> top_internal_methods(const InternalFrameView& view, std::size_t m);

/// Every frame of the trace in flattened order (primary, then causes).
std::vector<const StackFrame*> flatten_frames(const ParsedStackTrace& trace);

}  // namespace sbest

#endif  // SBEST_STACKTRACE_HPP
