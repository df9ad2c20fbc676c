#include "sbest/report.hpp"

#include <array>
#include <charconv>

namespace sbest {

using nlohmann::json;

namespace {

json warnings_json(const std::vector<std::string>& warnings) {
    json out = json::array();
    for (const auto& w : warnings) out.push_back(w);
    return out;
}

json config_json(const LocalizeResult& r, const Bug& bug) {
    json prefixes = json::array();
    for (const auto& p : r.config.prefixes) prefixes.push_back(p);
    return {{"bug", bug.id},
            {"technique", technique_name(r.technique)},
            {"x", r.config.x},
            {"m", r.config.m},
            {"internal_prefixes", std::move(prefixes)},
            {"trace", r.config.trace.describe()},
            {"traces_found", bug.traces.size()},
            {"tie_policy", r.ranking.tie_policy},
            {"tests", bug.dataset.test_count()},
            {"failing_tests", bug.dataset.failing_tests().size()},
            {"methods", bug.dataset.method_count()},
            {"warnings", warnings_json(r.warnings)}};
}

std::string metric_or_dash(const AggregateMetrics& m, double v) {
    return m.q ? format_fixed(v, 5) : std::string("-");
}

json aggregate_json(const AggregateMetrics& m) {
    return {{"n_bugs", m.q},
            {"top1", m.top1},
            {"top3", m.top3},
            {"top5", m.top5},
            {"map", m.q ? json(m.map) : json(nullptr)},
            {"mrr", m.q ? json(m.mrr) : json(nullptr)}};
}

json skipped_json(const std::vector<SkippedBug>& skipped) {
    json out = json::array();
    for (const auto& s : skipped)
        out.push_back({{"project", s.project}, {"bug", s.id}, {"technique", s.technique}, {"reason", s.reason}});
    return out;
}

json run_json(const RunConfig& run) {
    json prefixes = json::array();
    for (const auto& p : run.prefixes) prefixes.push_back(p);
    return {{"x", run.x ? json(*run.x) : json(nullptr)},
            {"m", run.m ? json(*run.m) : json(nullptr)},
            {"prefixes", std::move(prefixes)},
            {"trace", run.trace ? json(run.trace->describe()) : json(nullptr)},
            {"tie", tie_mode_name(run.tie)},
            {"paper_mode", run.paper_mode}};
}

// RFC 4180 quoting; method signatures may contain commas.
std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string join_path(const std::vector<MethodId>& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += " -> ";
        out += path[i].str();
    }
    return out;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
    std::array<char, 400> buf{};
    const auto [ptr, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
    if (ec != std::errc()) throw Error("cannot format value");
    return std::string(buf.data(), ptr);
}

std::string ranking_csv(const RankedList& ranked) {
    std::string out = "rank,method,score\n";
    for (const auto& e : ranked.entries) {
        out += std::to_string(e.rank);
        out += ',';
        out += csv_field(e.method.str());
        out += ',';
        out += format_fixed(e.score, 6);
        out += '\n';
    }
    return out;
}

json ranking_json(const LocalizeResult& result, const Bug& bug) {
    json entries = json::array();
    for (const auto& e : result.ranking.entries)
        entries.push_back({{"rank", e.rank}, {"method", e.method.str()}, {"score", e.score}});
    return {{"metadata", config_json(result, bug)}, {"ranking", std::move(entries)}};
}

json explain_json(const LocalizeResult& result, const Bug& bug) {
    json out = {{"metadata", config_json(result, bug)}};
    if (!result.sbest) {
        out["proxy_selection"] = nullptr;
        return out;
    }
    const auto& s = *result.sbest;
    json top = json::array();
    for (const auto& m : s.selection.top_methods) top.push_back(m.str());
    json per_test = json::array();
    const auto tests = bug.dataset.tests();
    for (std::size_t t = 0; t < s.selection.per_test_score.size(); ++t)
        per_test.push_back({{"test", tests[t].name},
                            {"outcome", tests[t].outcome == Outcome::kFail ? "FAIL" : "PASS"},
                            {"st_covered_lines", s.selection.per_test_score[t]}});
    json selected = json::array();
    for (auto t : s.selection.selected) selected.push_back(tests[t].name);
    out["proxy_selection"] = {{"top_methods", std::move(top)},
                              {"per_test", std::move(per_test)},
                              {"selected", std::move(selected)},
                              {"truncated", s.selection.truncated},
                              {"disjoint", s.proxy_disjoint}};
    json methods = json::array();
    for (std::size_t i = 0; i < s.scores.size(); ++i)
        methods.push_back({{"rank", i + 1},
                           {"method", s.scores[i].method.str()},
                           {"sb_score", s.scores[i].sb_score},
                           {"st_score", s.scores[i].st_score},
                           {"total", s.scores[i].total}});
    out["methods"] = std::move(methods);
    return out;
}

std::string evaluation_csv(const EvaluationReport& report) {
    std::string out = "system,n_bugs,technique,top1,top3,top5,map,mrr\n";
    for (const auto& r : report.rows) {
        const auto& m = r.metrics;
        out += csv_field(r.system) + ',' + std::to_string(m.q) + ',' + std::string(technique_name(r.technique)) + ',' +
               std::to_string(m.top1) + ',' + std::to_string(m.top3) + ',' + std::to_string(m.top5) + ',' +
               metric_or_dash(m, m.map) + ',' + metric_or_dash(m, m.mrr) + '\n';
    }
    return out;
}

std::string per_bug_csv(const EvaluationReport& report) {
    std::string out = "project,bug,technique,first_rank,ap,rr,top1,top3,top5,excluded\n";
    for (const auto& r : report.per_bug) {
        const auto& m = r.metrics;
        out += csv_field(r.project) + ',' + csv_field(r.id) + ',' + std::string(technique_name(r.technique)) + ',' +
               (m.first_rank ? std::to_string(*m.first_rank) : std::string("-")) + ',' +
               format_fixed(m.ap, 6) + ',' + format_fixed(m.reciprocal_rank, 6) + ',' +
               (m.top1 ? "1" : "0") + ',' + (m.top3 ? "1" : "0") + ',' + (m.top5 ? "1" : "0") + ',' +
               (r.excluded ? "1" : "0") + '\n';
    }
    return out;
}

json evaluation_json(const EvaluationReport& report, const RunConfig& run) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        auto row = aggregate_json(r.metrics);
        row["system"] = r.system;
        row["technique"] = technique_name(r.technique);
        rows.push_back(std::move(row));
    }
    json per_bug = json::array();
    for (const auto& r : report.per_bug)
        per_bug.push_back({{"project", r.project},
                           {"bug", r.id},
                           {"technique", technique_name(r.technique)},
                           {"first_rank", r.metrics.first_rank ? json(*r.metrics.first_rank) : json(nullptr)},
                           {"ap", r.metrics.ap},
                           {"rr", r.metrics.reciprocal_rank},
                           {"excluded", r.excluded}});
    return {{"config", run_json(run)},
            {"bugs_found", report.bugs_found},
            {"rows", std::move(rows)},
            {"per_bug", std::move(per_bug)},
            {"skipped", skipped_json(report.skipped)}};
}

std::string sweep_csv(const SweepReport& report) {
    std::string out = "x,m,n_bugs,top1,top3,top5,map,mrr\n";
    for (const auto& r : report.rows) {
        const auto& m = r.metrics;
        out += std::to_string(r.x) + ',' + std::to_string(r.m) + ',' + std::to_string(m.q) + ',' +
               std::to_string(m.top1) + ',' + std::to_string(m.top3) + ',' + std::to_string(m.top5) + ',' +
               metric_or_dash(m, m.map) + ',' + metric_or_dash(m, m.mrr) + '\n';
    }
    return out;
}

json sweep_json(const SweepReport& report, const RunConfig& run) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        auto row = aggregate_json(r.metrics);
        row["x"] = r.x;
        row["m"] = r.m;
        rows.push_back(std::move(row));
    }
    return {{"config", run_json(run)},
            {"bugs_found", report.bugs_found},
            {"rows", std::move(rows)},
            {"skipped", skipped_json(report.skipped)}};
}

json distance_json(const DistanceResult& result) {
    json path = json::array();
    for (const auto& m : result.witness_path) path.push_back(m.str());
    return {{"distance", result.distance ? json(*result.distance) : json("UNREACHABLE")},
            {"witness_path", std::move(path)},
            {"warnings", warnings_json(result.warnings)}};
}

std::string distance_csv(const DistanceCorpusReport& report) {
    std::string out = "project,bug,distance,witness_path\n";
    for (const auto& b : report.per_bug) {
        out += csv_field(b.project) + ',' + csv_field(b.id) + ',' +
               (b.result.distance ? std::to_string(*b.result.distance) : std::string("UNREACHABLE")) + ',' +
               csv_field(join_path(b.result.witness_path)) + '\n';
    }
    const auto& s = report.summary;
    out += "# bugs=" + std::to_string(s.bugs) + " zero=" + std::to_string(s.zero) +
           " reachable=" + std::to_string(s.reachable) + " zero_fraction=" + format_fixed(s.zero_fraction, 5) +
           " reachable_fraction=" + format_fixed(s.reachable_fraction, 5) +
           " mean_distance=" + format_fixed(s.mean_distance, 5) + '\n';
    return out;
}

json distance_json(const DistanceCorpusReport& report) {
    json per_bug = json::array();
    for (const auto& b : report.per_bug) {
        auto row = distance_json(b.result);
        row["project"] = b.project;
        row["bug"] = b.id;
        per_bug.push_back(std::move(row));
    }
    const auto& s = report.summary;
    return {{"per_bug", std::move(per_bug)},
            {"skipped", skipped_json(report.skipped)},
            {"summary",
             {{"bugs", s.bugs},
              {"zero", s.zero},
              {"reachable", s.reachable},
              {"zero_fraction", s.zero_fraction},
              {"reachable_fraction", s.reachable_fraction},
              {"mean_distance", s.mean_distance}}}};
}

}  // namespace sbest
