#ifndef SBEST_EVAL_HPP
#define SBEST_EVAL_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbest/method_id.hpp"
#include "sbest/sbfl.hpp"

namespace sbest {

struct GroundTruth {
    std::string bug_id;
    std::vector<MethodId> buggy_methods;  // non-empty, no duplicates
};

/// One canonical MethodId per line; blank lines and `#` comments ignored.
GroundTruth parse_ground_truth(std::string_view text, std::string bug_id);
GroundTruth load_ground_truth(const std::filesystem::path& path, std::string bug_id);

/// rel(k) for every rank. Each buggy method is credited to at most one
/// ranked entry (the first that matches it), so overloads sharing a
/// signature-less ground-truth entry cannot inflate precision.
std::vector<bool> relevance(const RankedList& ranked, const GroundTruth& truth);

/// Fraction of the top `k` entries that are faulty. Throws for k outside 1..N.
double precision_at_k(const RankedList& ranked, const GroundTruth& truth, std::size_t k);

/// (1/M) * sum_k P@k * rel(k); buggy methods missing from the list lower AP
/// only through M.
double average_precision(const RankedList& ranked, const GroundTruth& truth);

/// 1/r for the first faulty rank r, 0 when none is ranked.
double reciprocal_rank(const RankedList& ranked, const GroundTruth& truth);

inline constexpr std::size_t kTopK[] = {1, 3, 5};

struct BugMetrics {
    double ap = 0.0;
    std::optional<std::size_t> first_rank;
    double reciprocal_rank = 0.0;
    bool top1 = false;
    bool top3 = false;
    bool top5 = false;
};

BugMetrics evaluate_bug(const RankedList& ranked, const GroundTruth& truth);

struct AggregateMetrics {
    std::size_t q = 0;
    double map = 0.0;
    double mrr = 0.0;
    std::size_t top1 = 0;
    std::size_t top3 = 0;
    std::size_t top5 = 0;
};

/// Means of AP and RR plus Top-K hit counts. An empty input yields zeros.
AggregateMetrics aggregate(std::span<const BugMetrics> per_bug);

/// How equal scores are resolved when scoring a ranking.
enum class TieMode {
    kCanonical,  // keep the ranking's own order
    kBest,       // faulty methods first inside each tied group
    kWorst,      // faulty methods last inside each tied group
};

std::optional<TieMode> parse_tie_mode(std::string_view text);
std::string_view tie_mode_name(TieMode mode);

/// Reorders entries within groups of equal score and renumbers ranks.
RankedList apply_tie_mode(const RankedList& ranked, const GroundTruth& truth, TieMode mode);

}  // namespace sbest

#endif  // SBEST_EVAL_HPP
