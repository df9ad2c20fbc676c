#include "sbest/stacktrace.hpp"

#include <algorithm>
#include <charconv>
#include <regex>
#include <unordered_set>

namespace sbest {

namespace {

// `at [loader/][module/]pkg.Class.method(source)`; anything after the
// closing parenthesis (logback jar annotations) is ignored.
const std::regex& frame_re() {
    static const std::regex re(R"(^\s*at\s+(\S+?)\(([^()]*)\).*$)");
    return re;
}
const std::regex& ellipsis_re() {
    static const std::regex re(R"(^\s*\.\.\.\s*\d+\s+(more|common frames omitted)\s*$)");
    return re;
}
const std::regex& caused_by_re() {
    static const std::regex re(R"(^\s*Caused by:\s*(.*)$)");
    return re;
}
const std::regex& suppressed_re() {
    static const std::regex re(R"(^\s*Suppressed:\s*(.*)$)");
    return re;
}
// Whole-line exception header, optionally prefixed by the JVM's
// uncaught-exception banner.
const std::regex& header_re() {
    static const std::regex re(
        R"(^\s*(?:Exception in thread "[^"]*"\s+)?([A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)(?::(.*))?$)");
    return re;
}
// Exception-looking class name anywhere in a line (log prefixes etc).
const std::regex& embedded_header_re() {
    static const std::regex re(
        R"(([A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)+(?:Exception|Error|Throwable))(?::(.*))?$)");
    return re;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string decode_entities(std::string_view s) {
    static constexpr std::pair<std::string_view, char> kEntities[] = {
        {"&lt;", '<'}, {"&gt;", '>'}, {"&amp;", '&'}, {"&quot;", '"'}, {"&#39;", '\''}};
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        bool replaced = false;
        if (s[i] == '&') {
            for (auto [entity, c] : kEntities) {
                if (s.substr(i, entity.size()) == entity) {
                    out += c;
                    i += entity.size();
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out += s[i++];
    }
    return out;
}

int indent_columns(std::string_view line) {
    int col = 0;
    for (char c : line) {
        if (c == '\t')
            col += 4;
        else if (c == ' ')
            col += 1;
        else
            break;
    }
    return col;
}

std::optional<StackFrame> match_frame(const std::string& line) {
    std::smatch m;
    if (!std::regex_match(line, m, frame_re())) return std::nullopt;
    std::string target = m[1].str();
    if (const auto slash = target.rfind('/'); slash != std::string::npos)
        target = target.substr(slash + 1);
    const auto dot = target.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == target.size()) return std::nullopt;

    StackFrame frame;
    frame.class_fqn = target.substr(0, dot);
    frame.method_name = target.substr(dot + 1);

    const std::string source_text = m[2].str();
    const std::string_view source = trim(source_text);
    if (source.empty() || source == "Unknown Source" || source == "Native Method" ||
        source.starts_with("Unknown Source:")) {
        return frame;
    }
    const auto colon = source.rfind(':');
    if (colon == std::string_view::npos) {
        frame.file_name = std::string(source);
        return frame;
    }
    frame.file_name = std::string(source.substr(0, colon));
    const std::string_view digits = source.substr(colon + 1);
    int line_no = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), line_no);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && line_no >= 1)
        frame.line_number = line_no;
    return frame;
}

struct Header {
    std::string exception;
    std::optional<std::string> message;
};

std::optional<std::string> clean_message(std::string_view raw) {
    const auto t = trim(raw);
    if (t.empty()) return std::nullopt;
    return std::string(t);
}

std::optional<Header> match_header(const std::string& line) {
    std::smatch m;
    if (!std::regex_match(line, m, header_re())) return std::nullopt;
    Header h{m[1].str(), std::nullopt};
    if (m[2].matched) h.message = clean_message(m[2].str());
    return h;
}

std::optional<Header> search_header(const std::string& line) {
    std::smatch m;
    if (!std::regex_search(line, m, embedded_header_re())) return std::nullopt;
    Header h{m[1].str(), std::nullopt};
    if (m[2].matched) h.message = clean_message(m[2].str());
    return h;
}

// Header text following "Caused by:"; tolerant of non-identifier content.
Header cause_header(const std::string& rest) {
    if (auto h = match_header(rest)) return *h;
    const std::string_view t = trim(rest);
    const auto colon = t.find(": ");
    if (colon == std::string_view::npos) return {std::string(t), std::nullopt};
    return {std::string(t.substr(0, colon)), clean_message(t.substr(colon + 1))};
}

class Parser {
public:
    Parser(std::string_view text, const GrammarConfig& grammar) {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view raw = text.substr(start, end - start);
            if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
            lines_.push_back(grammar.decode_html_entities ? decode_entities(raw)
                                                          : std::string(raw));
            start = end + 1;
        }
        skip_suppressed_ = grammar.skip_suppressed;
    }

    std::vector<ParsedStackTrace> run() {
        for (std::size_t i = 0; i < lines_.size(); ++i) step(i);
        close();
        return std::move(traces_);
    }

private:
    void step(std::size_t i) {
        const std::string& line = lines_[i];
        if (auto frame = match_frame(line)) {
            if (suppressed_column_ && indent_columns(line) > *suppressed_column_) return;
            suppressed_column_.reset();
            if (!current_) open_orphan(i);
            push_frame(std::move(*frame));
            return;
        }
        if (std::regex_match(line, ellipsis_re())) {
            if (suppressed_column_ && indent_columns(line) <= *suppressed_column_)
                suppressed_column_.reset();
            return;
        }
        std::smatch m;
        if (std::regex_match(line, m, caused_by_re())) {
            const int column = indent_columns(line);
            if (suppressed_column_ && *suppressed_column_ > 0 && column >= *suppressed_column_)
                return;
            suppressed_column_.reset();
            Header h = cause_header(m[1].str());
            if (current_) {
                current_->causes.push_back({std::move(h.exception), std::move(h.message), {}, {}});
                in_cause_ = true;
            } else if (next_is_frame(i)) {
                open(std::move(h));
            }
            return;
        }
        if (std::regex_match(line, m, suppressed_re())) {
            if (!current_) return;
            if (skip_suppressed_) {
                suppressed_column_ = indent_columns(line);
            } else {
                Header h = cause_header(m[1].str());
                current_->causes.push_back({std::move(h.exception), std::move(h.message), {}, {}});
                in_cause_ = true;
            }
            return;
        }
        close();
        if (next_is_frame(i)) {
            if (auto h = match_header(line)) open(std::move(*h));
        }
    }

    bool next_is_frame(std::size_t i) const {
        return i + 1 < lines_.size() && match_frame(lines_[i + 1]).has_value();
    }

    void open(Header h) {
        close();
        current_ = ParsedStackTrace{std::move(h.exception), std::move(h.message), {}, {}};
        in_cause_ = false;
    }

    // Frames with no recognised header: borrow an exception name from the
    // preceding line when it carries one, otherwise leave it empty.
    void open_orphan(std::size_t i) {
        Header h;
        if (i > 0) {
            if (auto found = search_header(lines_[i - 1])) h = std::move(*found);
        }
        open(std::move(h));
    }

    void push_frame(StackFrame frame) {
        auto& segment = in_cause_ ? current_->causes.back() : *current_;
        frame.frame_index = segment.frames.size();
        segment.frames.push_back(std::move(frame));
    }

    void close() {
        if (current_ && !current_->frames.empty()) traces_.push_back(std::move(*current_));
        current_.reset();
        in_cause_ = false;
        suppressed_column_.reset();
    }

    std::vector<std::string> lines_;
    std::vector<ParsedStackTrace> traces_;
    std::optional<ParsedStackTrace> current_;
    bool in_cause_ = false;
    bool skip_suppressed_ = true;
    std::optional<int> suppressed_column_;
};

void render_segment(const ParsedStackTrace& t, std::string& out) {
    out += t.exception_fqn;
    if (t.message) {
        out += ": ";
        out += *t.message;
    }
    out += '\n';
    for (const auto& f : t.frames) {
        out += "\tat ";
        out += f.class_fqn;
        out += '.';
        out += f.method_name;
        out += '(';
        if (!f.file_name) {
            out += "Unknown Source";
        } else {
            out += *f.file_name;
            if (f.line_number) {
                out += ':';
                out += std::to_string(*f.line_number);
            }
        }
        out += ")\n";
    }
}

}  // namespace

std::vector<ParsedStackTrace> parse_stack_traces(std::string_view text,
                                                 const GrammarConfig& grammar) {
    return Parser(text, grammar).run();
}

std::string render_text(const ParsedStackTrace& trace) {
    std::string out;
    render_segment(trace, out);
    for (const auto& cause : trace.causes) {
        out += "Caused by: ";
        render_segment(cause, out);
    }
    return out;
}

nlohmann::json to_json(const ParsedStackTrace& trace) {
    using nlohmann::json;
    json frames = json::array();
    for (const auto& f : trace.frames) {
        frames.push_back({{"class", f.class_fqn},
                          {"method", f.method_name},
                          {"file", f.file_name ? json(*f.file_name) : json(nullptr)},
                          {"line", f.line_number ? json(*f.line_number) : json(nullptr)}});
    }
    json causes = json::array();
    for (const auto& c : trace.causes) causes.push_back(to_json(c));
    return {{"exception", trace.exception_fqn},
            {"message", trace.message ? json(*trace.message) : json(nullptr)},
            {"frames", std::move(frames)},
            {"causes", std::move(causes)}};
}

nlohmann::json to_json(std::span<const ParsedStackTrace> traces) {
    auto out = nlohmann::json::array();
    for (const auto& t : traces) out.push_back(to_json(t));
    return out;
}

std::vector<const StackFrame*> flatten_frames(const ParsedStackTrace& trace) {
    std::vector<const StackFrame*> out;
    for (const auto& f : trace.frames) out.push_back(&f);
    for (const auto& c : trace.causes)
        for (const auto& f : c.frames) out.push_back(&f);
    return out;
}

std::optional<std::size_t> InternalFrameView::position_of(const MethodId& m) const {
    for (std::size_t i = 0; i < methods.size(); ++i)
        if (same_method(methods[i], m)) return i + 1;
    return std::nullopt;
}

bool matches_prefix(std::string_view class_fqn, std::string_view prefix) noexcept {
    if (prefix.empty() || !class_fqn.starts_with(prefix)) return false;
    if (class_fqn.size() == prefix.size()) return true;
    const char last = prefix.back();
    if (last == '.' || last == '$') return true;
    const char next = class_fqn[prefix.size()];
    return next == '.' || next == '$';
}

InternalFrameView internal_view(std::span<const ParsedStackTrace> traces,
                                std::span<const std::string> prefixes) {
    InternalFrameView view;
    std::unordered_set<std::string> seen;
    for (const auto& trace : traces) {
        view.source_traces.push_back(&trace);
        for (const StackFrame* f : flatten_frames(trace)) {
            const bool internal = std::any_of(prefixes.begin(), prefixes.end(), [&](const auto& p) {
                return matches_prefix(f->class_fqn, p);
            });
            if (!internal) continue;
            MethodId id = f->method_id();
            if (seen.insert(id.str()).second) view.methods.push_back(std::move(id));
        }
    }
    return view;
}

InternalFrameView internal_view(const ParsedStackTrace& trace,
                                std::span<const std::string> prefixes) {
    return internal_view(std::span<const ParsedStackTrace>(&trace, 1), prefixes);
}

std::vector<MethodId> top_internal_methods(const InternalFrameView& view, std::size_t m) {
    const auto n = std::min(m, view.methods.size());
    return {view.methods.begin(), view.methods.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace sbest
