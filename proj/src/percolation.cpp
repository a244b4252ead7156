#include "mmsvirus/percolation.hpp"

#include "mmsvirus/format.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <set>
#include <stdexcept>

namespace mmsv {

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1), sets_(n), largest_(n > 0 ? 1 : 0) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<NodeId>(i);
}

NodeId UnionFind::find(NodeId x) noexcept {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(NodeId x, NodeId y) noexcept {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (size_[x] < size_[y]) std::swap(x, y);
    parent_[y] = x;
    size_[x] += size_[y];
    largest_ = std::max(largest_, size_[x]);
    --sets_;
    return true;
}

CallGraph susceptible_subgraph(const CallGraph& graph, OsLabel target_os, std::vector<NodeId>* original_ids) {
    std::vector<NodeId> keep;
    for (NodeId u = 0; u < graph.size(); ++u)
        if (graph.os(u) == target_os) keep.push_back(u);
    return induced_subgraph(graph, keep, original_ids);
}

namespace {

// Shared finishing pass: raw per-node root labels -> dense report.
template <class RootOf>
ComponentReport make_report(std::size_t n, RootOf root_of) {
    ComponentReport r;
    r.component_id.assign(n, 0);
    constexpr NodeId kUnset = UINT32_MAX;
    std::vector<NodeId> dense(n, kUnset);
    for (NodeId u = 0; u < n; ++u) {
        const NodeId root = root_of(u);
        if (dense[root] == kUnset) {
            dense[root] = static_cast<NodeId>(r.component_sizes.size());
            r.component_sizes.push_back(0);
        }
        r.component_id[u] = dense[root];
        ++r.component_sizes[dense[root]];
    }
    r.component_count = r.component_sizes.size();
    std::size_t best = 0;
    for (std::size_t c = 0; c < r.component_sizes.size(); ++c)
        if (r.component_sizes[c] > r.component_sizes[best]) best = c;
    r.largest_size = r.component_count ? r.component_sizes[best] : 0;
    r.largest_fraction = n ? static_cast<double>(r.largest_size) / static_cast<double>(n) : 0.0;
    r.member_of_largest.assign(n, false);
    for (NodeId u = 0; u < n; ++u) r.member_of_largest[u] = r.component_count && r.component_id[u] == best;
    return r;
}

}  // namespace

ComponentReport components(const CallGraph& graph) {
    UnionFind uf(graph.size());
    for (NodeId u = 0; u < graph.size(); ++u)
        for (NodeId v : graph.contacts(u))
            if (u < v) uf.unite(u, v);
    return make_report(graph.size(), [&](NodeId u) { return uf.find(u); });
}

ComponentReport components_bfs(const CallGraph& graph) {
    const std::size_t n = graph.size();
    constexpr NodeId kUnset = UINT32_MAX;
    std::vector<NodeId> root(n, kUnset);
    std::deque<NodeId> queue;
    for (NodeId s = 0; s < n; ++s) {
        if (root[s] != kUnset) continue;
        root[s] = s;
        queue.push_back(s);
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            for (NodeId v : graph.contacts(u)) {
                if (root[v] != kUnset) continue;
                root[v] = s;
                queue.push_back(v);
            }
        }
    }
    return make_report(n, [&](NodeId u) { return root[u]; });
}

namespace {

// Draws scan links one at a time; rejects self pairs, call-graph edges and
// repeats.
class ScanLinkSource {
public:
    ScanLinkSource(const CallGraph& sub, Seed seed) : sub_(sub), rng_(seed) {
        const auto n = static_cast<std::uint64_t>(sub.size());
        available_ = n * (n - (n > 0 ? 1 : 0)) / 2 - sub.edge_count();
    }

    Edge next() {
        if (drawn_.size() >= available_) throw std::invalid_argument("no unlinked susceptible pairs remain");
        for (;;) {
            auto u = static_cast<NodeId>(rng_.below(sub_.size()));
            auto v = static_cast<NodeId>(rng_.below(sub_.size()));
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            const auto book = sub_.contacts(u);
            if (std::binary_search(book.begin(), book.end(), v)) continue;
            if (!drawn_.insert({u, v}).second) continue;
            return {u, v};
        }
    }

private:
    const CallGraph& sub_;
    Rng rng_;
    std::set<Edge> drawn_;
    std::uint64_t available_ = 0;
};

}  // namespace

ComponentReport scan_augmented_components(const CallGraph& graph, OsLabel target_os, std::size_t extra_links,
                                          Seed seed) {
    const CallGraph sub = susceptible_subgraph(graph, target_os);
    if (extra_links == 0) return components(sub);
    if (sub.size() < 2) throw std::invalid_argument("scan augmentation needs at least two susceptible handsets");
    ScanLinkSource source(sub, seed);
    std::vector<Edge> edges = sub.edges();
    for (std::size_t i = 0; i < extra_links; ++i) edges.push_back(source.next());
    return components(CallGraph(sub.size(), edges, sub.os_labels(), sub.os_classes()));
}

std::vector<double> scan_augmentation_curve(const CallGraph& graph, OsLabel target_os,
                                            std::span<const std::size_t> link_counts, Seed seed) {
    const CallGraph sub = susceptible_subgraph(graph, target_os);
    const std::size_t most = link_counts.empty() ? 0 : *std::max_element(link_counts.begin(), link_counts.end());
    if (most > 0 && sub.size() < 2)
        throw std::invalid_argument("scan augmentation needs at least two susceptible handsets");

    UnionFind uf(sub.size());
    for (auto [u, v] : sub.edges()) uf.unite(u, v);
    std::vector<std::size_t> largest_after(most + 1);
    largest_after[0] = uf.largest();
    if (most > 0) {
        ScanLinkSource source(sub, seed);
        for (std::size_t i = 1; i <= most; ++i) {
            auto [u, v] = source.next();
            uf.unite(u, v);
            largest_after[i] = uf.largest();
        }
    }
    std::vector<double> out;
    out.reserve(link_counts.size());
    for (std::size_t k : link_counts)
        out.push_back(sub.size() ? static_cast<double>(largest_after[k]) / static_cast<double>(sub.size()) : 0.0);
    return out;
}

std::vector<GiantPoint> giant_fraction_curve(const CallGraph& graph, std::span<const double> shares_sweep,
                                             Seed seed) {
    std::vector<GiantPoint> out;
    for (double m : shares_sweep) {
        if (!(m > 0.0 && m <= 1.0)) throw std::invalid_argument("market share must lie in (0, 1]");
        const double shares[] = {m, 1.0 - m};
        const CallGraph labeled = assign_os(graph, shares, seed);
        out.push_back({m, components(susceptible_subgraph(labeled, 0))});
    }
    return out;
}

void write_component_csv(std::ostream& out, std::span<const GiantPoint> points) {
    out << "m,component_count,largest_size,largest_fraction\n";
    for (const auto& p : points)
        out << shortest(p.m) << ',' << p.report.component_count << ',' << p.report.largest_size << ','
            << shortest(p.report.largest_fraction) << '\n';
}

}  // namespace mmsv
