#ifndef SBEST_CORPUS_HPP
#define SBEST_CORPUS_HPP

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbest/baselines.hpp"
#include "sbest/callgraph.hpp"
#include "sbest/coverage.hpp"
#include "sbest/eval.hpp"
#include "sbest/sbest.hpp"
#include "sbest/stacktrace.hpp"

namespace sbest {

enum class Technique { kOchiai, kStackTrace, kSbOnly, kSbest };

inline constexpr Technique kAllTechniques[] = {Technique::kOchiai, Technique::kStackTrace,
                                               Technique::kSbOnly, Technique::kSbest};

std::string_view technique_name(Technique t);
/// Accepts OCHIAI, STACKTRACE, SB_ONLY, SBEST (case-insensitive).
std::optional<Technique> parse_technique(std::string_view text);

/// Which parsed trace of a report drives the analysis.
struct TraceChoice {
    enum class Kind { kFirst, kIndex, kMerge };
    Kind kind = Kind::kFirst;
    std::size_t index = 0;

    std::string describe() const;
};

/// Parses `first`, `merge` or a 0-based index.
std::optional<TraceChoice> parse_trace_choice(std::string_view text);

/// Contents of bug.cfg (`key=value`, `#` comments).
struct BugConfig {
    std::vector<std::string> internal_prefixes;
    std::optional<std::size_t> x;
    std::optional<std::size_t> m;
    std::optional<TraceChoice> trace;
    std::vector<std::string> warnings;
};

BugConfig parse_bug_config(std::string_view text);

/// Settings from the command line; unset fields fall back to bug.cfg, then
/// to the built-in defaults.
struct RunConfig {
    Technique technique = Technique::kSbest;
    std::optional<std::size_t> x;
    std::optional<std::size_t> m;
    std::vector<std::string> prefixes;
    std::optional<TraceChoice> trace;
    TieMode tie = TieMode::kCanonical;
    bool paper_mode = false;
    bool all_frames = false;  // call-graph distance from every frame, not only internal ones
    bool undirected = false;
    std::size_t parallel = 1;
};

struct EffectiveConfig {
    std::size_t x = 15;
    std::size_t m = 5;
    std::vector<std::string> prefixes;
    TraceChoice trace;
};

EffectiveConfig resolve_config(const RunConfig& run, const BugConfig& bug);

/// A fully loaded bug directory.
struct Bug {
    std::string project;
    std::string id;
    std::filesystem::path dir;
    CoverageDataset dataset;
    std::vector<ParsedStackTrace> traces;
    std::optional<GroundTruth> truth;  // absent when buggy_methods.txt is missing
    BugConfig config;
};

/// Loads the documented per-bug layout. buggy_methods.txt and
/// stacktrace.txt are optional at this level; callers that need them check.
Bug load_bug(const std::filesystem::path& dir, std::string project = {}, std::string id = {});

/// Internal frames of the selected trace(s).
InternalFrameView select_internal_view(const Bug& bug, const EffectiveConfig& cfg);

struct LocalizeResult {
    Technique technique = Technique::kSbest;
    EffectiveConfig config;
    RankedList ranking;
    std::optional<SbestResult> sbest;  // SBEST and SB_ONLY only
    std::vector<std::string> warnings;
    bool no_failing_tests = false;
};

/// Runs one technique on one bug. SBEST and SB_ONLY throw when the selected
/// trace has no internal frames.
LocalizeResult localize(const Bug& bug, const RunConfig& run, Technique technique);
LocalizeResult localize(const Bug& bug, const EffectiveConfig& cfg, Technique technique);

struct BugRef {
    std::string project;
    std::string id;
    std::filesystem::path dir;
};

/// `<root>/<project>/<bug>/` directories, sorted by (project, bug).
std::vector<BugRef> discover_corpus(const std::filesystem::path& root);

struct SkippedBug {
    std::string project;
    std::string id;
    std::string technique;  // empty when the bug failed to load
    std::string reason;
};

struct BugResult {
    std::string project;
    std::string id;
    Technique technique = Technique::kSbest;
    BugMetrics metrics;
    bool excluded = false;  // --paper-mode exclusion
};

struct ReportRow {
    std::string system;  // project name or "Total"
    Technique technique = Technique::kSbest;
    AggregateMetrics metrics;
};

struct EvaluationReport {
    std::vector<ReportRow> rows;  // per project (sorted), then Total
    std::vector<BugResult> per_bug;
    std::vector<SkippedBug> skipped;
    std::size_t bugs_found = 0;
};

EvaluationReport evaluate_corpus(const std::filesystem::path& root, const RunConfig& run,
                                 std::span<const Technique> techniques);

struct SweepRow {
    std::size_t x = 0;
    std::size_t m = 0;
    AggregateMetrics metrics;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // x-major, grids in the given order
    std::vector<SkippedBug> skipped;
    std::size_t bugs_found = 0;
};

SweepReport sweep(const std::filesystem::path& root, const RunConfig& run,
                  std::span<const std::size_t> x_grid, std::span<const std::size_t> m_grid);

struct BugDistance {
    std::string project;
    std::string id;
    DistanceResult result;
};

struct DistanceCorpusReport {
    std::vector<BugDistance> per_bug;
    std::vector<SkippedBug> skipped;
    DistanceSummary summary;
};

class MissingArtifactError : public Error {
public:
    using Error::Error;
};

/// Distance for one bug directory. Throws MissingArtifactError when
/// callgraph.csv is absent.
DistanceResult bug_distance(const std::filesystem::path& dir, const RunConfig& run);

DistanceCorpusReport corpus_distance(const std::filesystem::path& root, const RunConfig& run);

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace sbest

#endif  // SBEST_CORPUS_HPP
