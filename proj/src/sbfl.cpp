#include "sbest/sbfl.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace sbest {

std::vector<SpectrumCounts> spectrum_counts(const CoverageDataset& ds,
                                            std::span<const std::size_t> failing) {
    const auto T = static_cast<Eigen::Index>(ds.test_count());
    CountVector fail_indicator = CountVector::Zero(T);
    for (std::size_t t : failing) {
        if (t >= ds.test_count()) throw Error("failing test id out of range: " + std::to_string(t));
        fail_indicator(static_cast<Eigen::Index>(t)) = 1;
    }
    const std::int64_t n_fail = fail_indicator.sum();
    const std::int64_t n_pass = static_cast<std::int64_t>(T) - n_fail;

    // Binarize: covered iff at least one line hit.
    Eigen::SparseMatrix<std::int64_t, Eigen::ColMajor> covered =
        ds.method_counts().cast<std::int64_t>();
    covered.coeffs().setOnes();

    const CountVector n11 = covered.transpose() * fail_indicator;
    const CountVector n_cov = covered.transpose() * CountVector::Ones(T);

    std::vector<SpectrumCounts> out(ds.method_count());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        auto& c = out[k];
        c.n11 = n11(i);
        c.n10 = n_cov(i) - n11(i);
        c.n01 = n_fail - c.n11;
        c.n00 = n_pass - c.n10;
    }
    return out;
}

double ochiai(const SpectrumCounts& c) noexcept {
    const double denom = std::sqrt(static_cast<double>(c.n11 + c.n01) * static_cast<double>(c.n11 + c.n10));
    if (denom == 0.0) return 0.0;
    return static_cast<double>(c.n11) / denom;
}

RankedList rank(std::vector<ScoredMethod> scores) {
    std::unordered_set<std::string> seen;
    for (const auto& s : scores) {
        if (!std::isfinite(s.score)) throw Error("non-finite score for " + s.method.str());
        if (!seen.insert(s.method.str()).second) throw Error("duplicate method in ranking: " + s.method.str());
    }
    std::sort(scores.begin(), scores.end(), [](const ScoredMethod& a, const ScoredMethod& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.method < b.method;
    });
    RankedList out;
    out.entries.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out.entries.push_back({i + 1, std::move(scores[i].method), scores[i].score});
    }
    return out;
}

RankedList ochiai_ranking(const CoverageDataset& ds, std::span<const std::size_t> failing) {
    const auto counts = spectrum_counts(ds, failing);
    std::vector<ScoredMethod> scored;
    scored.reserve(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) scored.push_back({ds.methods()[k], ochiai(counts[k])});
    return rank(std::move(scored));
}

BaselineResult ochiai_baseline(const CoverageDataset& ds) {
    const auto failing = ds.failing_tests();
    BaselineResult out{ochiai_ranking(ds, failing), {}, failing.empty()};
    if (out.no_failing_tests) out.warnings.emplace_back("no failing tests: all Ochiai scores are 0");
    return out;
}

}  // namespace sbest
