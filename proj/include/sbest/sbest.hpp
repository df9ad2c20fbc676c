#ifndef SBEST_SBEST_HPP
#define SBEST_SBEST_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbest/coverage.hpp"
#include "sbest/sbfl.hpp"
#include "sbest/stacktrace.hpp"

namespace sbest {

struct SbestConfig {
    std::size_t x = 15;  // proxy failing-test threshold
    std::size_t m = 5;   // top internal stack methods used for selection

    static constexpr std::size_t kStCapRank = 10;
    static constexpr double kStFloor = 0.1;
};

/// Raised by select_proxy_failing when no test covers any top trace method.
class DisjointTraceError : public Error {
public:
    using Error::Error;
};

struct ProxySelection {
    std::vector<MethodId> top_methods;
    std::vector<std::int64_t> per_test_score;  // indexed by test id
    std::vector<std::size_t> selected;         // (score desc, name asc)
    bool truncated = false;                    // fewer than X positive tests
};

/// Covered lines of the top methods, per test. Trace methods match spectra
/// methods through same_method, so a signature-less frame sums over all
/// overloads; methods absent from the spectra contribute nothing.
CountVector st_covered_lines(const CoverageDataset& ds, std::span<const MethodId> top_methods);

std::int64_t st_covered_lines(const CoverageDataset& ds, std::span<const MethodId> top_methods,
                              std::size_t test);

/// The X tests with the most covered top-method lines; zero-coverage tests
/// are never selected. Throws DisjointTraceError when nothing qualifies.
ProxySelection select_proxy_failing(const CoverageDataset& ds, std::span<const MethodId> top_methods,
                                    std::size_t x);

/// Positional bonus: 1/rank up to rank 10, 0.1 beyond, 0 when absent.
double st_score(const MethodId& m, const InternalFrameView& internal);

struct MethodScore {
    MethodId method;
    double sb_score = 0.0;
    double st_score = 0.0;
    double total = 0.0;
};

struct SbestResult {
    RankedList ranking;
    std::vector<MethodScore> scores;  // same order as ranking.entries
    ProxySelection selection;
    bool proxy_disjoint = false;
    std::vector<std::string> warnings;
};

/// Ochiai over the proxy failing set plus the positional ST score.
///
/// The stored SB component is `total - st_score` evaluated in double
/// precision, so the decomposition holds bit for bit; it differs from the
/// raw Ochiai value by at most one ulp of the total.
SbestResult sbest_rank(const CoverageDataset& ds, const InternalFrameView& trace,
                       const SbestConfig& cfg = {});

/// Same pipeline with the ST score forced to 0.
SbestResult sb_score_only(const CoverageDataset& ds, const InternalFrameView& trace,
                          const SbestConfig& cfg = {});

}  // namespace sbest

#endif  // SBEST_SBEST_HPP
