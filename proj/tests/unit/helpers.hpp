#pragma once

#include <cstdint>
#include <queue>
#include <set>
#include <vector>

#include "mmsvirus/callgraph.hpp"

namespace testutil {

inline mmsv::CallGraph path_graph(std::size_t n, std::vector<mmsv::OsLabel> labels = {}, unsigned classes = 1) {
    std::vector<mmsv::Edge> edges;
    for (mmsv::NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return mmsv::CallGraph(n, edges, std::move(labels), classes);
}

inline mmsv::CallGraph complete_graph(std::size_t n) {
    std::vector<mmsv::Edge> edges;
    for (mmsv::NodeId i = 0; i < n; ++i)
        for (mmsv::NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return mmsv::CallGraph(n, edges);
}

// Plain adjacency-list reachability, independent of the library's BFS and
// union-find code.
inline std::vector<std::vector<std::size_t>> adjacency(const mmsv::CallGraph& g) {
    std::vector<std::vector<std::size_t>> adj(g.size());
    for (auto [u, v] : g.edges()) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    return adj;
}

inline std::set<std::size_t> reachable(const std::vector<std::vector<std::size_t>>& adj, std::size_t root,
                                       const std::vector<bool>& allowed) {
    std::set<std::size_t> seen{root};
    std::queue<std::size_t> q;
    q.push(root);
    while (!q.empty()) {
        auto u = q.front();
        q.pop();
        for (auto v : adj[u])
            if (allowed[v] && seen.insert(v).second) q.push(v);
    }
    return seen;
}

inline std::set<std::size_t> reachable(const mmsv::CallGraph& g, std::size_t root) {
    return reachable(adjacency(g), root, std::vector<bool>(g.size(), true));
}

// Nodes of the root's component among nodes running os.
inline std::set<std::size_t> os_component(const mmsv::CallGraph& g, std::size_t root, mmsv::OsLabel os) {
    std::vector<bool> allowed(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) allowed[i] = g.os(static_cast<mmsv::NodeId>(i)) == os;
    return reachable(adjacency(g), root, allowed);
}

}  // namespace testutil
