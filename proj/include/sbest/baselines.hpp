#ifndef SBEST_BASELINES_HPP
#define SBEST_BASELINES_HPP

#include <span>
#include <string>
#include <vector>

#include "sbest/coverage.hpp"
#include "sbest/sbfl.hpp"
#include "sbest/stacktrace.hpp"

namespace sbest {

struct StackTraceRanking {
    RankedList ranking;
    std::vector<std::string> warnings;
};

/// Trace methods first in internal-frame order, every other universe method
/// after them in canonical order. A trace method stands in for all universe
/// methods it matches (overloads share its position). Trace entries score
/// 1/position, the tail scores 0.
StackTraceRanking stack_trace_ranking(const InternalFrameView& trace,
                                      std::span<const MethodId> universe);

/// Spectra methods plus trace methods the spectra do not know.
std::vector<MethodId> ranking_universe(const CoverageDataset& ds, const InternalFrameView& trace);

}  // namespace sbest

#endif  // SBEST_BASELINES_HPP
