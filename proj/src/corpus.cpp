#include "sbest/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

namespace sbest {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<std::size_t> parse_positive(std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) return std::nullopt;
    return v;
}

std::vector<std::string> split_prefixes(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(',', start);
        const auto item = trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (!item.empty()) out.emplace_back(item);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

const std::vector<ParsedStackTrace>& require_traces(const Bug& bug) {
    if (bug.traces.empty()) throw Error("no stack trace found in stacktrace.txt");
    return bug.traces;
}

std::vector<MethodId> frame_methods(std::span<const ParsedStackTrace> traces) {
    std::vector<MethodId> out;
    std::unordered_set<std::string> seen;
    for (const auto& t : traces)
        for (const StackFrame* f : flatten_frames(t)) {
            auto id = f->method_id();
            if (seen.insert(id.str()).second) out.push_back(std::move(id));
        }
    return out;
}

std::span<const ParsedStackTrace> selected_traces(std::span<const ParsedStackTrace> traces,
                                                  const TraceChoice& choice) {
    switch (choice.kind) {
        case TraceChoice::Kind::kMerge: return traces;
        case TraceChoice::Kind::kIndex:
            if (choice.index >= traces.size())
                throw Error("trace index " + std::to_string(choice.index) + " out of range (" +
                            std::to_string(traces.size()) + " traces parsed)");
            return traces.subspan(choice.index, 1);
        case TraceChoice::Kind::kFirst: break;
    }
    return traces.subspan(0, 1);
}

std::vector<std::string> merge_warnings(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

std::string_view technique_name(Technique t) {
    switch (t) {
        case Technique::kOchiai: return "OCHIAI";
        case Technique::kStackTrace: return "STACKTRACE";
        case Technique::kSbOnly: return "SB_ONLY";
        case Technique::kSbest: break;
    }
    return "SBEST";
}

std::optional<Technique> parse_technique(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (Technique t : kAllTechniques)
        if (technique_name(t) == upper) return t;
    return std::nullopt;
}

std::string TraceChoice::describe() const {
    switch (kind) {
        case Kind::kMerge: return "merge";
        case Kind::kIndex: return std::to_string(index);
        case Kind::kFirst: break;
    }
    return "first";
}

std::optional<TraceChoice> parse_trace_choice(std::string_view text) {
    text = trim(text);
    if (text == "first") return TraceChoice{};
    if (text == "merge") return TraceChoice{TraceChoice::Kind::kMerge, 0};
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return TraceChoice{TraceChoice::Kind::kIndex, v};
}

BugConfig parse_bug_config(std::string_view text) {
    BugConfig cfg;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error("bug.cfg line " + std::to_string(line_no) + ": expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        auto bad = [&] {
            return Error("bug.cfg line " + std::to_string(line_no) + ": bad value for " + std::string(key));
        };
        if (key == "internal_prefixes") {
            cfg.internal_prefixes = split_prefixes(value);
        } else if (key == "x") {
            if (!(cfg.x = parse_positive(value))) throw bad();
        } else if (key == "m") {
            if (!(cfg.m = parse_positive(value))) throw bad();
        } else if (key == "trace") {
            if (!(cfg.trace = parse_trace_choice(value))) throw bad();
        } else {
            cfg.warnings.push_back("bug.cfg: ignoring unknown key '" + std::string(key) + "'");
        }
    }
    return cfg;
}

EffectiveConfig resolve_config(const RunConfig& run, const BugConfig& bug) {
    EffectiveConfig eff;
    eff.x = run.x.value_or(bug.x.value_or(eff.x));
    eff.m = run.m.value_or(bug.m.value_or(eff.m));
    eff.prefixes = !run.prefixes.empty() ? run.prefixes : bug.internal_prefixes;
    eff.trace = run.trace.value_or(bug.trace.value_or(TraceChoice{}));
    return eff;
}

Bug load_bug(const fs::path& dir, std::string project, std::string id) {
    if (!fs::is_directory(dir)) throw Error("not a bug directory: " + dir.string());
    if (id.empty()) id = dir.filename().string();
    Bug bug{std::move(project), id, dir, load_dataset(dir), {}, std::nullopt, {}};
    if (fs::is_regular_file(dir / "stacktrace.txt"))
        bug.traces = parse_stack_traces(read_file(dir / "stacktrace.txt"));
    if (fs::is_regular_file(dir / "buggy_methods.txt"))
        bug.truth = load_ground_truth(dir / "buggy_methods.txt", id);
    if (fs::is_regular_file(dir / "bug.cfg")) bug.config = parse_bug_config(read_file(dir / "bug.cfg"));
    return bug;
}

InternalFrameView select_internal_view(const Bug& bug, const EffectiveConfig& cfg) {
    if (cfg.prefixes.empty())
        throw Error("no internal package prefixes configured (bug.cfg internal_prefixes or --prefixes)");
    if (bug.traces.empty()) return {};
    return internal_view(selected_traces(bug.traces, cfg.trace), cfg.prefixes);
}

LocalizeResult localize(const Bug& bug, const RunConfig& run, Technique technique) {
    return localize(bug, resolve_config(run, bug.config), technique);
}

LocalizeResult localize(const Bug& bug, const EffectiveConfig& cfg, Technique technique) {
    LocalizeResult out;
    out.technique = technique;
    out.config = cfg;
    out.warnings = bug.config.warnings;
    if (bug.traces.size() > 1 && technique != Technique::kOchiai &&
        cfg.trace.kind == TraceChoice::Kind::kFirst)
        out.warnings.push_back(std::to_string(bug.traces.size()) +
                               " stack traces in report; using the first");

    switch (technique) {
        case Technique::kOchiai: {
            auto base = ochiai_baseline(bug.dataset);
            out.ranking = std::move(base.ranking);
            out.no_failing_tests = base.no_failing_tests;
            out.warnings = merge_warnings(std::move(out.warnings), base.warnings);
            break;
        }
        case Technique::kStackTrace: {
            const auto view = select_internal_view(bug, cfg);
            const auto universe = ranking_universe(bug.dataset, view);
            auto st = stack_trace_ranking(view, universe);
            out.ranking = std::move(st.ranking);
            out.warnings = merge_warnings(std::move(out.warnings), st.warnings);
            break;
        }
        case Technique::kSbOnly:
        case Technique::kSbest: {
            require_traces(bug);
            const auto view = select_internal_view(bug, cfg);
            if (view.empty()) throw Error("stack trace unusable: no frame matches the internal prefixes");
            const SbestConfig sc{cfg.x, cfg.m};
            auto res = technique == Technique::kSbest ? sbest_rank(bug.dataset, view, sc)
                                                      : sb_score_only(bug.dataset, view, sc);
            out.ranking = res.ranking;
            out.warnings = merge_warnings(std::move(out.warnings), res.warnings);
            out.sbest = std::move(res);
            break;
        }
    }
    out.no_failing_tests = bug.dataset.failing_tests().empty();
    return out;
}

std::vector<BugRef> discover_corpus(const fs::path& root) {
    if (!fs::is_directory(root)) throw Error("not a directory: " + root.string());
    std::vector<BugRef> refs;
    for (const auto& project : fs::directory_iterator(root)) {
        if (!project.is_directory()) continue;
        for (const auto& bug : fs::directory_iterator(project.path())) {
            if (!bug.is_directory()) continue;
            refs.push_back({project.path().filename().string(), bug.path().filename().string(), bug.path()});
        }
    }
    std::sort(refs.begin(), refs.end(), [](const BugRef& a, const BugRef& b) {
        return std::tie(a.project, a.id) < std::tie(b.project, b.id);
    });
    return refs;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

struct LoadedBug {
    std::optional<Bug> bug;
    std::string error;
};

std::vector<LoadedBug> load_all(std::span<const BugRef> refs, std::size_t workers) {
    std::vector<LoadedBug> loaded(refs.size());
    parallel_for(refs.size(), workers, [&](std::size_t i) {
        try {
            auto bug = load_bug(refs[i].dir, refs[i].project, refs[i].id);
            if (!bug.truth) throw Error("missing buggy_methods.txt");
            loaded[i].bug = std::move(bug);
        } catch (const std::exception& e) {
            loaded[i].error = e.what();
        }
    });
    return loaded;
}

}  // namespace

EvaluationReport evaluate_corpus(const fs::path& root, const RunConfig& run,
                                 std::span<const Technique> techniques) {
    EvaluationReport report;
    const auto refs = discover_corpus(root);
    report.bugs_found = refs.size();
    const auto loaded = load_all(refs, run.parallel);

    // results[bug][technique]
    struct Cell {
        std::optional<BugResult> result;
        std::string error;
    };
    std::vector<std::vector<Cell>> cells(refs.size(), std::vector<Cell>(techniques.size()));
    parallel_for(refs.size(), run.parallel, [&](std::size_t i) {
        if (!loaded[i].bug) return;
        const Bug& bug = *loaded[i].bug;
        for (std::size_t t = 0; t < techniques.size(); ++t) {
            try {
                const auto res = localize(bug, run, techniques[t]);
                const auto ranked = apply_tie_mode(res.ranking, *bug.truth, run.tie);
                BugResult r{bug.project, bug.id, techniques[t], evaluate_bug(ranked, *bug.truth), false};
                r.excluded = run.paper_mode && techniques[t] == Technique::kOchiai && res.no_failing_tests;
                cells[i][t].result = r;
            } catch (const std::exception& e) {
                cells[i][t].error = e.what();
            }
        }
    });

    std::set<std::string> projects;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        projects.insert(refs[i].project);
        if (!loaded[i].bug) {
            report.skipped.push_back({refs[i].project, refs[i].id, "", loaded[i].error});
            continue;
        }
        for (std::size_t t = 0; t < techniques.size(); ++t) {
            if (cells[i][t].result)
                report.per_bug.push_back(*cells[i][t].result);
            else
                report.skipped.push_back({refs[i].project, refs[i].id,
                                          std::string(technique_name(techniques[t])), cells[i][t].error});
        }
    }

    auto row_for = [&](const std::string& system, Technique t, bool total) {
        std::vector<BugMetrics> metrics;
        for (const auto& r : report.per_bug)
            if (r.technique == t && !r.excluded && (total || r.project == system))
                metrics.push_back(r.metrics);
        return ReportRow{system, t, aggregate(metrics)};
    };
    for (const auto& p : projects)
        for (Technique t : techniques) report.rows.push_back(row_for(p, t, false));
    for (Technique t : techniques) report.rows.push_back(row_for("Total", t, true));
    return report;
}

SweepReport sweep(const fs::path& root, const RunConfig& run, std::span<const std::size_t> x_grid,
                  std::span<const std::size_t> m_grid) {
    if (x_grid.empty() || m_grid.empty()) throw Error("sweep grids must be non-empty");
    SweepReport report;
    const auto refs = discover_corpus(root);
    report.bugs_found = refs.size();
    const auto loaded = load_all(refs, run.parallel);
    for (std::size_t i = 0; i < refs.size(); ++i)
        if (!loaded[i].bug) report.skipped.push_back({refs[i].project, refs[i].id, "", loaded[i].error});

    const Technique technique =
        run.technique == Technique::kSbOnly ? Technique::kSbOnly : Technique::kSbest;
    for (std::size_t x : x_grid) {
        for (std::size_t m : m_grid) {
            std::vector<std::optional<BugMetrics>> per_bug(refs.size());
            std::vector<std::string> errors(refs.size());
            parallel_for(refs.size(), run.parallel, [&](std::size_t i) {
                if (!loaded[i].bug) return;
                const Bug& bug = *loaded[i].bug;
                try {
                    auto eff = resolve_config(run, bug.config);
                    eff.x = x;
                    eff.m = m;
                    const auto res = localize(bug, eff, technique);
                    per_bug[i] = evaluate_bug(apply_tie_mode(res.ranking, *bug.truth, run.tie), *bug.truth);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            });
            std::vector<BugMetrics> metrics;
            for (std::size_t i = 0; i < refs.size(); ++i) {
                if (per_bug[i])
                    metrics.push_back(*per_bug[i]);
                else if (loaded[i].bug)
                    report.skipped.push_back({refs[i].project, refs[i].id,
                                              "x=" + std::to_string(x) + ",m=" + std::to_string(m),
                                              errors[i]});
            }
            report.rows.push_back({x, m, aggregate(metrics)});
        }
    }
    return report;
}

DistanceResult bug_distance(const fs::path& dir, const RunConfig& run) {
    if (!fs::is_regular_file(dir / "callgraph.csv"))
        throw MissingArtifactError("missing " + (dir / "callgraph.csv").string());
    const auto graph = load_call_graph(dir / "callgraph.csv");
    if (!fs::is_regular_file(dir / "stacktrace.txt"))
        throw Error("missing " + (dir / "stacktrace.txt").string());
    if (!fs::is_regular_file(dir / "buggy_methods.txt"))
        throw Error("missing " + (dir / "buggy_methods.txt").string());
    const auto traces = parse_stack_traces(read_file(dir / "stacktrace.txt"));
    if (traces.empty()) throw Error("no stack trace found in stacktrace.txt");
    const auto truth = load_ground_truth(dir / "buggy_methods.txt", dir.filename().string());
    BugConfig bug_cfg;
    if (fs::is_regular_file(dir / "bug.cfg")) bug_cfg = parse_bug_config(read_file(dir / "bug.cfg"));
    const auto eff = resolve_config(run, bug_cfg);

    const auto chosen = selected_traces(traces, eff.trace);
    std::vector<MethodId> sources;
    if (run.all_frames) {
        sources = frame_methods(chosen);
    } else {
        if (eff.prefixes.empty())
            throw Error("no internal package prefixes configured (bug.cfg internal_prefixes or --prefixes)");
        sources = internal_view(chosen, eff.prefixes).methods;
        if (sources.empty()) throw Error("stack trace unusable: no frame matches the internal prefixes");
    }
    return min_distance(graph, sources, truth.buggy_methods, DistanceOptions{run.undirected});
}

DistanceCorpusReport corpus_distance(const fs::path& root, const RunConfig& run) {
    DistanceCorpusReport report;
    const auto refs = discover_corpus(root);
    std::vector<std::optional<DistanceResult>> results(refs.size());
    std::vector<std::string> errors(refs.size());
    parallel_for(refs.size(), run.parallel, [&](std::size_t i) {
        try {
            results[i] = bug_distance(refs[i].dir, run);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    std::vector<DistanceResult> ok;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (results[i]) {
            report.per_bug.push_back({refs[i].project, refs[i].id, *results[i]});
            ok.push_back(*results[i]);
        } else {
            report.skipped.push_back({refs[i].project, refs[i].id, "", errors[i]});
        }
    }
    report.summary = distance_report(ok);
    return report;
}

}  // namespace sbest
