#include "sbest/callgraph.hpp"

#include <algorithm>
#include <deque>

#include "sbest/coverage.hpp"

namespace sbest {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Commas inside a parameter list do not separate fields.
std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '(') ++depth;
        if (line[i] == ')') --depth;
        if (line[i] == ',' && depth == 0) {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    out.push_back(trim(line.substr(start)));
    return out;
}

}  // namespace

std::size_t CallGraph::add_node(const MethodId& m) {
    auto [it, inserted] = index_.try_emplace(m, nodes_.size());
    if (inserted) {
        nodes_.push_back(m);
        out_.emplace_back();
        in_.emplace_back();
    }
    return it->second;
}

void CallGraph::add_edge(const MethodId& caller, const MethodId& callee) {
    const auto a = add_node(caller);
    const auto b = add_node(callee);
    auto& succ = out_[a];
    if (std::find(succ.begin(), succ.end(), b) != succ.end()) return;
    succ.push_back(b);
    in_[b].push_back(a);
    ++edge_count_;
}

bool CallGraph::has_edge(const MethodId& caller, const MethodId& callee) const {
    auto a = index_.find(caller);
    auto b = index_.find(callee);
    if (a == index_.end() || b == index_.end()) return false;
    const auto& succ = out_[a->second];
    return std::find(succ.begin(), succ.end(), b->second) != succ.end();
}

std::vector<std::size_t> CallGraph::matching_nodes(const MethodId& m) const {
    std::vector<std::size_t> out;
    if (auto it = index_.find(m); it != index_.end() && m.has_signature()) {
        out.push_back(it->second);
        return out;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (same_method(nodes_[i], m)) out.push_back(i);
    return out;
}

CallGraph parse_call_graph(std::string_view csv) {
    CallGraph g;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < csv.size()) {
        auto end = csv.find('\n', start);
        if (end == std::string_view::npos) end = csv.size();
        const auto line = trim(csv.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "caller" || fields[1] != "callee")
                throw Error("callgraph.csv line " + std::to_string(line_no) +
                            ": expected header 'caller,callee'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw Error("callgraph.csv line " + std::to_string(line_no) + ": expected two fields");
        try {
            g.add_edge(MethodId::parse(fields[0]), MethodId::parse(fields[1]));
        } catch (const Error& e) {
            throw Error("callgraph.csv line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen) throw Error("callgraph.csv: missing header 'caller,callee'");
    return g;
}

CallGraph load_call_graph(const std::filesystem::path& path) {
    return parse_call_graph(read_file(path));
}

DistanceResult min_distance(const CallGraph& g, std::span<const MethodId> trace_methods,
                            std::span<const MethodId> buggy, const DistanceOptions& opts) {
    if (trace_methods.empty() || buggy.empty())
        throw Error("min_distance needs non-empty trace and buggy method sets");
    DistanceResult out;

    for (const auto& t : trace_methods) {
        for (const auto& b : buggy) {
            if (same_method(t, b)) {
                out.distance = 0;
                out.witness_path = {t};
                return out;
            }
        }
    }

    std::vector<std::size_t> sources;
    for (const auto& t : trace_methods) {
        const auto nodes = g.matching_nodes(t);
        if (nodes.empty()) out.warnings.push_back("trace method not in call graph: " + t.str());
        sources.insert(sources.end(), nodes.begin(), nodes.end());
    }
    std::vector<char> is_target(g.node_count(), 0);
    for (const auto& b : buggy) {
        const auto nodes = g.matching_nodes(b);
        if (nodes.empty()) out.warnings.push_back("buggy method not in call graph: " + b.str());
        for (auto n : nodes) is_target[n] = 1;
    }

    constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(g.node_count(), kUnseen);
    std::vector<std::size_t> dist(g.node_count(), kUnseen);
    std::deque<std::size_t> queue;
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    for (auto s : sources) {
        dist[s] = 0;
        parent[s] = s;
        queue.push_back(s);
    }
    auto visit = [&](std::size_t from, std::size_t to) {
        if (dist[to] != kUnseen) return;
        dist[to] = dist[from] + 1;
        parent[to] = from;
        queue.push_back(to);
    };
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        if (is_target[u]) {
            out.distance = dist[u];
            for (auto v = u;; v = parent[v]) {
                out.witness_path.push_back(g.nodes()[v]);
                if (parent[v] == v) break;
            }
            std::reverse(out.witness_path.begin(), out.witness_path.end());
            return out;
        }
        for (auto v : g.callees(u)) visit(u, v);
        if (opts.undirected)
            for (auto v : g.callers(u)) visit(u, v);
    }
    return out;
}

DistanceSummary distance_report(std::span<const DistanceResult> results) {
    DistanceSummary s;
    s.bugs = results.size();
    std::size_t total = 0;
    for (const auto& r : results) {
        if (!r.reachable()) continue;
        ++s.reachable;
        if (*r.distance == 0) ++s.zero;
        total += *r.distance;
    }
    if (s.bugs) {
        s.zero_fraction = static_cast<double>(s.zero) / static_cast<double>(s.bugs);
        s.reachable_fraction = static_cast<double>(s.reachable) / static_cast<double>(s.bugs);
    }
    if (s.reachable) s.mean_distance = static_cast<double>(total) / static_cast<double>(s.reachable);
    return s;
}

}  // namespace sbest
