#include "sbest/eval.hpp"

#include <algorithm>

#include "sbest/coverage.hpp"

namespace sbest {

GroundTruth parse_ground_truth(std::string_view text, std::string bug_id) {
    GroundTruth truth{std::move(bug_id), {}};
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') continue;
        line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
        try {
            auto m = MethodId::parse(line);
            if (std::find(truth.buggy_methods.begin(), truth.buggy_methods.end(), m) ==
                truth.buggy_methods.end())
                truth.buggy_methods.push_back(std::move(m));
        } catch (const Error& e) {
            throw Error("buggy_methods.txt line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (truth.buggy_methods.empty()) throw Error("buggy_methods.txt lists no methods");
    return truth;
}

GroundTruth load_ground_truth(const std::filesystem::path& path, std::string bug_id) {
    return parse_ground_truth(read_file(path), std::move(bug_id));
}

std::vector<bool> relevance(const RankedList& ranked, const GroundTruth& truth) {
    std::vector<bool> rel(ranked.size(), false);
    std::vector<bool> credited(truth.buggy_methods.size(), false);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        for (std::size_t b = 0; b < truth.buggy_methods.size(); ++b) {
            if (!credited[b] && same_method(ranked.entries[i].method, truth.buggy_methods[b])) {
                credited[b] = true;
                rel[i] = true;
                break;
            }
        }
    }
    return rel;
}

double precision_at_k(const RankedList& ranked, const GroundTruth& truth, std::size_t k) {
    if (k < 1 || k > ranked.size())
        throw Error("precision_at_k: k=" + std::to_string(k) + " outside 1.." +
                    std::to_string(ranked.size()));
    const auto rel = relevance(ranked, truth);
    const auto hits = std::count(rel.begin(), rel.begin() + static_cast<std::ptrdiff_t>(k), true);
    return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision(const RankedList& ranked, const GroundTruth& truth) {
    const auto rel = relevance(ranked, truth);
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < rel.size(); ++i) {
        if (!rel[i]) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    return sum / static_cast<double>(truth.buggy_methods.size());
}

double reciprocal_rank(const RankedList& ranked, const GroundTruth& truth) {
    const auto rel = relevance(ranked, truth);
    const auto it = std::find(rel.begin(), rel.end(), true);
    if (it == rel.end()) return 0.0;
    return 1.0 / static_cast<double>(it - rel.begin() + 1);
}

BugMetrics evaluate_bug(const RankedList& ranked, const GroundTruth& truth) {
    BugMetrics m;
    m.ap = average_precision(ranked, truth);
    const auto rel = relevance(ranked, truth);
    if (auto it = std::find(rel.begin(), rel.end(), true); it != rel.end())
        m.first_rank = static_cast<std::size_t>(it - rel.begin()) + 1;
    m.reciprocal_rank = m.first_rank ? 1.0 / static_cast<double>(*m.first_rank) : 0.0;
    m.top1 = m.first_rank && *m.first_rank <= 1;
    m.top3 = m.first_rank && *m.first_rank <= 3;
    m.top5 = m.first_rank && *m.first_rank <= 5;
    return m;
}

AggregateMetrics aggregate(std::span<const BugMetrics> per_bug) {
    AggregateMetrics a;
    a.q = per_bug.size();
    double ap_sum = 0.0;
    double rr_sum = 0.0;
    for (const auto& b : per_bug) {
        ap_sum += b.ap;
        rr_sum += b.reciprocal_rank;
        a.top1 += b.top1;
        a.top3 += b.top3;
        a.top5 += b.top5;
    }
    if (a.q) {
        a.map = ap_sum / static_cast<double>(a.q);
        a.mrr = rr_sum / static_cast<double>(a.q);
    }
    return a;
}

std::optional<TieMode> parse_tie_mode(std::string_view text) {
    if (text == "canonical") return TieMode::kCanonical;
    if (text == "best") return TieMode::kBest;
    if (text == "worst") return TieMode::kWorst;
    return std::nullopt;
}

std::string_view tie_mode_name(TieMode mode) {
    switch (mode) {
        case TieMode::kBest: return "best";
        case TieMode::kWorst: return "worst";
        case TieMode::kCanonical: break;
    }
    return "canonical";
}

RankedList apply_tie_mode(const RankedList& ranked, const GroundTruth& truth, TieMode mode) {
    if (mode == TieMode::kCanonical) return ranked;
    RankedList out = ranked;
    out.tie_policy = std::string("score-desc,faulty-") + (mode == TieMode::kBest ? "first" : "last");
    auto is_faulty = [&](const RankedEntry& e) {
        return std::any_of(truth.buggy_methods.begin(), truth.buggy_methods.end(),
                           [&](const MethodId& b) { return same_method(e.method, b); });
    };
    auto& entries = out.entries;
    for (std::size_t lo = 0; lo < entries.size();) {
        std::size_t hi = lo + 1;
        while (hi < entries.size() && entries[hi].score == entries[lo].score) ++hi;
        auto first = entries.begin() + static_cast<std::ptrdiff_t>(lo);
        auto last = entries.begin() + static_cast<std::ptrdiff_t>(hi);
        if (mode == TieMode::kBest)
            std::stable_partition(first, last, is_faulty);
        else
            std::stable_partition(first, last, [&](const RankedEntry& e) { return !is_faulty(e); });
        lo = hi;
    }
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = i + 1;
    return out;
}

}  // namespace sbest
