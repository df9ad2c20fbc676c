#include "sbest/baselines.hpp"

#include <set>

namespace sbest {

StackTraceRanking stack_trace_ranking(const InternalFrameView& trace,
                                      std::span<const MethodId> universe) {
    StackTraceRanking out;
    if (trace.empty()) out.warnings.emplace_back("empty stack trace: ranking is pure tie-break order");

    std::set<MethodId> members(universe.begin(), universe.end());
    for (const auto& m : trace.methods) {
        bool matched = false;
        for (const auto& u : universe) matched = matched || same_method(u, m);
        if (!matched) members.insert(m);
    }

    std::vector<ScoredMethod> scored;
    scored.reserve(members.size());
    for (const auto& m : members) {
        const auto pos = trace.position_of(m);
        scored.push_back({m, pos ? 1.0 / static_cast<double>(*pos) : 0.0});
    }
    out.ranking = rank(std::move(scored));
    return out;
}

std::vector<MethodId> ranking_universe(const CoverageDataset& ds, const InternalFrameView& trace) {
    std::vector<MethodId> out(ds.methods().begin(), ds.methods().end());
    for (const auto& m : trace.methods)
        if (ds.matching_methods(m).empty()) out.push_back(m);
    return out;
}

}  // namespace sbest
