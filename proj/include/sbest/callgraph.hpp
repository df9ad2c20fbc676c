#ifndef SBEST_CALLGRAPH_HPP
#define SBEST_CALLGRAPH_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbest/method_id.hpp"

namespace sbest {

/// Directed static call graph (caller -> callee). Duplicate edges collapse.
class CallGraph {
public:
    std::size_t add_node(const MethodId& m);
    void add_edge(const MethodId& caller, const MethodId& callee);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    std::span<const MethodId> nodes() const noexcept { return nodes_; }
    std::span<const std::size_t> callees(std::size_t node) const { return out_[node]; }
    std::span<const std::size_t> callers(std::size_t node) const { return in_[node]; }
    bool has_edge(const MethodId& caller, const MethodId& callee) const;

    /// Nodes that same_method matches against `m`.
    std::vector<std::size_t> matching_nodes(const MethodId& m) const;

private:
    std::vector<MethodId> nodes_;
    std::map<MethodId, std::size_t> index_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
    std::size_t edge_count_ = 0;
};

/// CSV with header `caller,callee`, one canonical MethodId per field.
CallGraph parse_call_graph(std::string_view csv);
CallGraph load_call_graph(const std::filesystem::path& path);

struct DistanceOptions {
    bool undirected = false;
};

struct DistanceResult {
    std::optional<std::size_t> distance;  // nullopt = unreachable
    std::vector<MethodId> witness_path;   // distance + 1 methods when reachable
    std::vector<std::string> warnings;

    bool reachable() const noexcept { return distance.has_value(); }
};

/// Fewest call edges from any trace method to any buggy method (multi-source
/// BFS). Zero when the two sets share a method.
DistanceResult min_distance(const CallGraph& g, std::span<const MethodId> trace_methods,
                            std::span<const MethodId> buggy, const DistanceOptions& opts = {});

struct DistanceSummary {
    std::size_t bugs = 0;
    std::size_t zero = 0;
    std::size_t reachable = 0;
    double zero_fraction = 0.0;
    double reachable_fraction = 0.0;
    double mean_distance = 0.0;  // over reachable bugs; 0 when none
};

DistanceSummary distance_report(std::span<const DistanceResult> results);

}  // namespace sbest

#endif  // SBEST_CALLGRAPH_HPP
