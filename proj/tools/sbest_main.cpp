// sbest: method-level fault localization from crash stack traces and test
// coverage spectra.
//
// Exit codes: 0 success, 1 empty or invalid corpus/bug data, 2 bad arguments
// or paths, 3 missing optional artifact (callgraph.csv).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sbest/corpus.hpp"
#include "sbest/report.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kInvalidData = 1, kBadArgs = 2, kMissingArtifact = 3 };

struct Options {
    std::string path;
    std::string technique;
    std::size_t x = 0;
    std::size_t m = 0;
    std::string prefixes;
    std::string trace;
    std::string tie = "canonical";
    std::string format = "csv";
    std::string output;
    std::string per_bug;
    std::string x_grid = "5,10,15,20,25";
    std::string m_grid = "5,10,15";
    bool explain = false;
    bool paper_mode = false;
    bool undirected = false;
    bool all_frames = false;
    std::size_t parallel = 1;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<std::size_t> parse_grid(const std::string& s, const char* flag) {
    std::vector<std::size_t> out;
    for (const auto& item : split_csv(s)) {
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || v == 0) throw UsageError(std::string("bad value in ") + flag + ": " + item);
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(std::string(flag) + " is empty");
    return out;
}

sbest::RunConfig run_config(const Options& o, const CLI::App& sub) {
    sbest::RunConfig run;
    if (!o.technique.empty()) {
        auto t = sbest::parse_technique(o.technique);
        if (!t) throw UsageError("unknown technique: " + o.technique);
        run.technique = *t;
    }
    const auto given = [&](const char* name) {
        const auto* opt = sub.get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (given("--x")) run.x = o.x;
    if (given("--m")) run.m = o.m;
    run.prefixes = split_csv(o.prefixes);
    if (!o.trace.empty()) {
        run.trace = sbest::parse_trace_choice(o.trace);
        if (!run.trace) throw UsageError("bad --trace value: " + o.trace);
    }
    auto tie = sbest::parse_tie_mode(o.tie);
    if (!tie) throw UsageError("bad --tie value: " + o.tie);
    run.tie = *tie;
    run.paper_mode = o.paper_mode;
    run.undirected = o.undirected;
    run.all_frames = o.all_frames;
    run.parallel = o.parallel;
    return run;
}

void write_output(const Options& o, const std::string& text) {
    if (o.output.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(o.output, std::ios::binary);
    if (!out) throw UsageError("cannot write " + o.output);
    out << text;
}

void warn(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void warn_skipped(const std::vector<sbest::SkippedBug>& skipped) {
    for (const auto& s : skipped)
        std::cerr << "skipped: " << s.project << '/' << s.id << (s.technique.empty() ? "" : " [" + s.technique + "]")
                  << ": " << s.reason << '\n';
}

bool is_bug_dir(const fs::path& p) {
    for (const char* name : {"tests.csv", "stacktrace.txt", "callgraph.csv", "buggy_methods.txt", "bug.cfg"})
        if (fs::exists(p / name)) return true;
    return false;
}

int cmd_parse_trace(const Options& o) {
    const fs::path path(o.path);
    if (!fs::is_regular_file(path)) {
        std::cerr << "error: not a readable file: " << o.path << '\n';
        return kBadArgs;
    }
    std::string text;
    try {
        text = sbest::read_file(path);
    } catch (const sbest::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadArgs;
    }
    const auto traces = sbest::parse_stack_traces(text);
    write_output(o, sbest::to_json(traces).dump(2) + '\n');
    return kOk;
}

int cmd_localize(const Options& o, const CLI::App& sub) {
    const auto run = run_config(o, sub);
    if (!fs::is_directory(o.path)) {
        std::cerr << "error: not a directory: " << o.path << '\n';
        return kBadArgs;
    }
    const auto bug = sbest::load_bug(o.path);
    const auto result = sbest::localize(bug, run, run.technique);
    warn(result.warnings);
    if (o.explain)
        write_output(o, sbest::explain_json(result, bug).dump(2) + '\n');
    else if (o.format == "json")
        write_output(o, sbest::ranking_json(result, bug).dump(2) + '\n');
    else
        write_output(o, sbest::ranking_csv(result.ranking));
    return kOk;
}

int cmd_evaluate(const Options& o, const CLI::App& sub) {
    const auto run = run_config(o, sub);
    if (!fs::is_directory(o.path)) {
        std::cerr << "error: not a directory: " << o.path << '\n';
        return kBadArgs;
    }
    std::vector<sbest::Technique> techniques;
    if (o.technique.empty())
        techniques.assign(std::begin(sbest::kAllTechniques), std::end(sbest::kAllTechniques));
    else
        techniques.push_back(run.technique);
    const auto report = sbest::evaluate_corpus(o.path, run, techniques);
    warn_skipped(report.skipped);
    if (report.bugs_found == 0 || report.per_bug.empty()) {
        std::cerr << "error: no bug could be evaluated under " << o.path << '\n';
        return kInvalidData;
    }
    if (!o.per_bug.empty()) {
        std::ofstream out(o.per_bug, std::ios::binary);
        if (!out) throw UsageError("cannot write " + o.per_bug);
        out << sbest::per_bug_csv(report);
    }
    write_output(o, o.format == "json" ? sbest::evaluation_json(report, run).dump(2) + '\n'
                                       : sbest::evaluation_csv(report));
    return kOk;
}

int cmd_sweep(const Options& o, const CLI::App& sub) {
    const auto run = run_config(o, sub);
    const auto xs = parse_grid(o.x_grid, "--x-grid");
    const auto ms = parse_grid(o.m_grid, "--m-grid");
    if (!fs::is_directory(o.path)) {
        std::cerr << "error: not a directory: " << o.path << '\n';
        return kBadArgs;
    }
    const auto report = sbest::sweep(o.path, run, xs, ms);
    warn_skipped(report.skipped);
    if (report.bugs_found == 0 || report.rows.empty() || report.rows.front().metrics.q == 0) {
        std::cerr << "error: no bug could be evaluated under " << o.path << '\n';
        return kInvalidData;
    }
    write_output(o, o.format == "json" ? sbest::sweep_json(report, run).dump(2) + '\n' : sbest::sweep_csv(report));
    return kOk;
}

int cmd_distance(const Options& o, const CLI::App& sub) {
    const auto run = run_config(o, sub);
    const fs::path path(o.path);
    if (!fs::is_directory(path)) {
        std::cerr << "error: not a directory: " << o.path << '\n';
        return kBadArgs;
    }
    if (is_bug_dir(path)) {
        sbest::DistanceResult result;
        try {
            result = sbest::bug_distance(path, run);
        } catch (const sbest::MissingArtifactError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kMissingArtifact;
        }
        warn(result.warnings);
        if (o.format == "json") {
            write_output(o, sbest::distance_json(result).dump(2) + '\n');
        } else {
            sbest::DistanceCorpusReport single;
            single.per_bug.push_back({path.parent_path().filename().string(), path.filename().string(), result});
            single.summary = sbest::distance_report(std::span(&result, 1));
            write_output(o, sbest::distance_csv(single));
        }
        return kOk;
    }
    const auto report = sbest::corpus_distance(path, run);
    warn_skipped(report.skipped);
    if (report.per_bug.empty()) {
        std::cerr << "error: no bug with a call graph under " << o.path << '\n';
        return kInvalidData;
    }
    write_output(o, o.format == "json" ? sbest::distance_json(report).dump(2) + '\n' : sbest::distance_csv(report));
    return kOk;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--prefixes", o.prefixes, "Comma-separated internal package prefixes (overrides bug.cfg)");
    sub->add_option("--trace", o.trace, "Trace to use when a report holds several: first, merge or an index");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("-o,--output", o.output, "Write the primary output to a file instead of stdout");
}

void add_ranking(CLI::App* sub, Options& o) {
    sub->add_option("--technique", o.technique, "OCHIAI, STACKTRACE, SB_ONLY or SBEST");
    sub->add_option("--x", o.x, "Proxy failing-test threshold (default 15)")->check(CLI::PositiveNumber);
    sub->add_option("--m", o.m, "Top internal stack methods used for selection (default 5)")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fault localization from crash stack traces and test coverage"};
    app.require_subcommand(1);
    Options o;

    auto* parse = app.add_subcommand("parse-trace", "Parse stack traces from a text file into JSON");
    parse->add_option("file", o.path, "Bug report or stacktrace.txt")->required();
    parse->add_option("-o,--output", o.output, "Write JSON to a file instead of stdout");

    auto* localize = app.add_subcommand("localize", "Rank suspicious methods for one bug directory");
    localize->add_option("bug_dir", o.path, "Bug directory")->required();
    add_ranking(localize, o);
    add_common(localize, o);
    localize->add_flag("--explain", o.explain, "Dump proxy selection and score decomposition as JSON");

    auto* evaluate = app.add_subcommand("evaluate", "Score techniques over a <project>/<bug>/ corpus");
    evaluate->add_option("dataset_root", o.path, "Corpus root")->required();
    add_ranking(evaluate, o);
    add_common(evaluate, o);
    evaluate->add_option("--tie", o.tie, "Tie handling when scoring: canonical, best or worst");
    evaluate->add_flag("--paper-mode", o.paper_mode, "Exclude bugs without failing tests from Ochiai aggregates");
    evaluate->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);
    evaluate->add_option("--per-bug", o.per_bug, "Also write per-bug metrics CSV to this file");

    auto* sweep = app.add_subcommand("sweep", "Evaluate SBEST over grids of X and M");
    sweep->add_option("dataset_root", o.path, "Corpus root")->required();
    add_ranking(sweep, o);
    add_common(sweep, o);
    sweep->add_option("--x-grid", o.x_grid, "Comma-separated X values");
    sweep->add_option("--m-grid", o.m_grid, "Comma-separated M values");
    sweep->add_option("--tie", o.tie, "Tie handling when scoring: canonical, best or worst");
    sweep->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);

    auto* distance = app.add_subcommand("distance", "Call-graph distance from trace methods to buggy methods");
    distance->add_option("path", o.path, "Bug directory or corpus root")->required();
    add_common(distance, o);
    distance->add_flag("--undirected", o.undirected, "Traverse call edges in both directions");
    distance->add_flag("--all-frames", o.all_frames, "Start from every frame, not only internal ones");
    distance->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadArgs;
    }

    try {
        if (*parse) return cmd_parse_trace(o);
        if (*localize) return cmd_localize(o, *localize);
        if (*evaluate) return cmd_evaluate(o, *evaluate);
        if (*sweep) return cmd_sweep(o, *sweep);
        if (*distance) return cmd_distance(o, *distance);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadArgs;
    } catch (const sbest::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidData;
    }
    return kBadArgs;
}
