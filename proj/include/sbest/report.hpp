#ifndef SBEST_REPORT_HPP
#define SBEST_REPORT_HPP

#include <string>

#include "json.hpp"

#include "sbest/corpus.hpp"

namespace sbest {

/// Fixed-point decimal of the exact binary value, ties to even.
std::string format_fixed(double value, int decimals);

/// `rank,method,score` with six-decimal scores.
std::string ranking_csv(const RankedList& ranked);

/// {metadata: {...effective config, warnings}, ranking: [{rank, method, score}]}.
nlohmann::json ranking_json(const LocalizeResult& result, const Bug& bug);

/// Proxy selection and per-method score decomposition (SBEST / SB_ONLY).
nlohmann::json explain_json(const LocalizeResult& result, const Bug& bug);

/// system,n_bugs,technique,top1,top3,top5,map,mrr
std::string evaluation_csv(const EvaluationReport& report);
std::string per_bug_csv(const EvaluationReport& report);
nlohmann::json evaluation_json(const EvaluationReport& report, const RunConfig& run);

/// x,m,n_bugs,top1,top3,top5,map,mrr
std::string sweep_csv(const SweepReport& report);
nlohmann::json sweep_json(const SweepReport& report, const RunConfig& run);

nlohmann::json distance_json(const DistanceResult& result);
std::string distance_csv(const DistanceCorpusReport& report);
nlohmann::json distance_json(const DistanceCorpusReport& report);

}  // namespace sbest

#endif  // SBEST_REPORT_HPP
