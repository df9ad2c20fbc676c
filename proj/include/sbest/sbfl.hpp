#ifndef SBEST_SBFL_HPP
#define SBEST_SBFL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbest/coverage.hpp"
#include "sbest/method_id.hpp"

namespace sbest {

/// Test partition for one method: first digit = covered, second = failed.
struct SpectrumCounts {
    std::int64_t n00 = 0;  // not covered, passed
    std::int64_t n10 = 0;  // covered, passed
    std::int64_t n01 = 0;  // not covered, failed
    std::int64_t n11 = 0;  // covered, failed

    std::int64_t total() const noexcept { return n00 + n10 + n01 + n11; }
    friend bool operator==(const SpectrumCounts&, const SpectrumCounts&) = default;
};

/// Counts for every method of `ds`, aligned with `ds.methods()`. A method is
/// covered by a test when the test hits at least one of its lines. `failing`
/// designates the failing tests; every other test counts as passing.
std::vector<SpectrumCounts> spectrum_counts(const CoverageDataset& ds,
                                            std::span<const std::size_t> failing);

/// n11 / sqrt((n11 + n01) * (n11 + n10)), or 0 when the denominator is 0.
double ochiai(const SpectrumCounts& c) noexcept;

struct ScoredMethod {
    MethodId method;
    double score = 0.0;
};

struct RankedEntry {
    std::size_t rank = 0;  // 1-based ordinal
    MethodId method;
    double score = 0.0;
};

inline constexpr const char* kDefaultTiePolicy = "score-desc,method-asc";

struct RankedList {
    std::vector<RankedEntry> entries;
    std::string tie_policy = kDefaultTiePolicy;

    std::size_t size() const noexcept { return entries.size(); }
    bool empty() const noexcept { return entries.empty(); }
};

/// Orders by score descending, ties by canonical MethodId ascending, and
/// assigns ordinal ranks 1..N. Throws on non-finite scores or duplicates.
RankedList rank(std::vector<ScoredMethod> scores);

/// Ochiai ranking of every spectra method with an arbitrary failing set.
RankedList ochiai_ranking(const CoverageDataset& ds, std::span<const std::size_t> failing);

struct BaselineResult {
    RankedList ranking;
    std::vector<std::string> warnings;
    bool no_failing_tests = false;
};

/// Ochiai with the observed FAIL outcomes as the failing set.
BaselineResult ochiai_baseline(const CoverageDataset& ds);

}  // namespace sbest

#endif  // SBEST_SBFL_HPP
