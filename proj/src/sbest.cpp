#include "sbest/sbest.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace sbest {

namespace {

std::vector<std::size_t> resolve(const CoverageDataset& ds, std::span<const MethodId> methods,
                                 std::vector<std::string>* warnings) {
    std::set<std::size_t> ordinals;
    for (const auto& m : methods) {
        const auto matched = ds.matching_methods(m);
        if (matched.size() > 1 && warnings)
            warnings->push_back("trace method " + m.str() + " matches " +
                                std::to_string(matched.size()) +
                                " spectra overloads; using the signature-less key");
        ordinals.insert(matched.begin(), matched.end());
    }
    return {ordinals.begin(), ordinals.end()};
}

SbestResult run(const CoverageDataset& ds, const InternalFrameView& trace, const SbestConfig& cfg,
                bool with_st) {
    if (cfg.x < 1 || cfg.m < 1) throw Error("X and M must be at least 1");
    if (trace.empty()) throw Error("stack trace has no internal frames");

    SbestResult out;
    const auto top = top_internal_methods(trace, cfg.m);
    resolve(ds, top, &out.warnings);

    std::vector<std::size_t> failing;
    try {
        out.selection = select_proxy_failing(ds, top, cfg.x);
        failing = out.selection.selected;
    } catch (const DisjointTraceError& e) {
        out.proxy_disjoint = true;
        out.selection.top_methods = top;
        const CountVector per_test = st_covered_lines(ds, top);
        out.selection.per_test_score.assign(per_test.data(), per_test.data() + per_test.size());
        out.warnings.emplace_back(std::string(e.what()) + "; SB scores are 0");
    }

    std::vector<double> sb(ds.method_count(), 0.0);
    if (!out.proxy_disjoint) {
        const auto counts = spectrum_counts(ds, failing);
        for (std::size_t k = 0; k < counts.size(); ++k) sb[k] = ochiai(counts[k]);
    }

    std::vector<MethodScore> scores;
    scores.reserve(ds.method_count() + trace.methods.size());
    auto add = [&](const MethodId& m, double raw_sb) {
        const double st = with_st ? st_score(m, trace) : 0.0;
        const double total = raw_sb + st;
        scores.push_back({m, total - st, st, total});
    };
    for (std::size_t k = 0; k < ds.method_count(); ++k) add(ds.methods()[k], sb[k]);
    for (const auto& m : trace.methods)
        if (ds.matching_methods(m).empty()) add(m, 0.0);

    std::vector<ScoredMethod> scored;
    scored.reserve(scores.size());
    for (const auto& s : scores) scored.push_back({s.method, s.total});
    out.ranking = rank(std::move(scored));

    std::sort(scores.begin(), scores.end(), [](const MethodScore& a, const MethodScore& b) {
        if (a.total != b.total) return a.total > b.total;
        return a.method < b.method;
    });
    out.scores = std::move(scores);
    return out;
}

}  // namespace

CountVector st_covered_lines(const CoverageDataset& ds, std::span<const MethodId> top_methods) {
    CountVector out = CountVector::Zero(static_cast<Eigen::Index>(ds.test_count()));
    for (std::size_t k : resolve(ds, top_methods, nullptr)) out += ds.lines_covered(k);
    return out;
}

std::int64_t st_covered_lines(const CoverageDataset& ds, std::span<const MethodId> top_methods,
                              std::size_t test) {
    if (test >= ds.test_count()) throw Error("test id out of range: " + std::to_string(test));
    return st_covered_lines(ds, top_methods)(static_cast<Eigen::Index>(test));
}

ProxySelection select_proxy_failing(const CoverageDataset& ds, std::span<const MethodId> top_methods,
                                    std::size_t x) {
    if (x < 1) throw Error("X must be at least 1");
    ProxySelection sel;
    sel.top_methods.assign(top_methods.begin(), top_methods.end());
    const CountVector per_test = st_covered_lines(ds, top_methods);
    sel.per_test_score.assign(per_test.data(), per_test.data() + per_test.size());

    std::vector<std::size_t> candidates;
    for (std::size_t t = 0; t < sel.per_test_score.size(); ++t)
        if (sel.per_test_score[t] > 0) candidates.push_back(t);
    if (candidates.empty())
        throw DisjointTraceError("stack trace disjoint from coverage: no test covers a top trace method");

    const auto tests = ds.tests();
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        if (sel.per_test_score[a] != sel.per_test_score[b])
            return sel.per_test_score[a] > sel.per_test_score[b];
        if (tests[a].name != tests[b].name) return tests[a].name < tests[b].name;
        return a < b;
    });
    sel.truncated = candidates.size() < x;
    candidates.resize(std::min(candidates.size(), x));
    sel.selected = std::move(candidates);
    return sel;
}

double st_score(const MethodId& m, const InternalFrameView& internal) {
    const auto pos = internal.position_of(m);
    if (!pos) return 0.0;
    if (*pos <= SbestConfig::kStCapRank) return 1.0 / static_cast<double>(*pos);
    return SbestConfig::kStFloor;
}

SbestResult sbest_rank(const CoverageDataset& ds, const InternalFrameView& trace,
                       const SbestConfig& cfg) {
    return run(ds, trace, cfg, true);
}

SbestResult sb_score_only(const CoverageDataset& ds, const InternalFrameView& trace,
                          const SbestConfig& cfg) {
    return run(ds, trace, cfg, false);
}

}  // namespace sbest
