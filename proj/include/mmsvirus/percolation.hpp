#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mmsvirus/callgraph.hpp"

namespace mmsv {

/// Disjoint-set forest with union by size and path halving.
class UnionFind {
public:
    explicit UnionFind(std::size_t n);

    NodeId find(NodeId x) noexcept;
    /// Returns true when x and y were in different sets.
    bool unite(NodeId x, NodeId y) noexcept;
    std::size_t set_size(NodeId x) noexcept { return size_[find(x)]; }
    std::size_t set_count() const noexcept { return sets_; }
    std::size_t largest() const noexcept { return largest_; }

private:
    std::vector<NodeId> parent_;
    std::vector<std::size_t> size_;
    std::size_t sets_;
    std::size_t largest_ = 0;
};

struct ComponentReport {
    std::size_t component_count = 0;
    std::size_t largest_size = 0;
    double largest_fraction = 0.0;     // largest_size / node count (0 for empty graph)
    std::vector<bool> member_of_largest;
    /// Dense component id per node, numbered in order of smallest member.
    std::vector<NodeId> component_id;
    std::vector<std::size_t> component_sizes;

    friend bool operator==(const ComponentReport&, const ComponentReport&) = default;
};

/// Induced subgraph of the handsets running target_os.
CallGraph susceptible_subgraph(const CallGraph& graph, OsLabel target_os,
                               std::vector<NodeId>* original_ids = nullptr);

/// Connected components via union-find.
ComponentReport components(const CallGraph& graph);

/// Connected components via breadth-first search. Independent of the
/// union-find path; the two must agree on every graph.
ComponentReport components_bfs(const CallGraph& graph);

/// Adds extra_links uniformly random links between distinct, not yet
/// adjacent susceptible handsets and reports components of the result.
/// The link sequence for a seed is prefix-stable: k links are always the
/// first k of any longer draw.
ComponentReport scan_augmented_components(const CallGraph& graph, OsLabel target_os,
                                          std::size_t extra_links, Seed seed);

/// Largest-component fraction after each link count in link_counts, using
/// a single prefix-stable link sequence.
std::vector<double> scan_augmentation_curve(const CallGraph& graph, OsLabel target_os,
                                            std::span<const std::size_t> link_counts, Seed seed);

struct GiantPoint {
    double m = 0.0;
    ComponentReport report;
};

/// For each share m, labels OS 0 with probability m (same seed for every m,
/// so susceptible sets are nested) and reports components of OS 0.
std::vector<GiantPoint> giant_fraction_curve(const CallGraph& graph, std::span<const double> shares_sweep,
                                             Seed seed);

/// CSV `m,component_count,largest_size,largest_fraction`.
void write_component_csv(std::ostream& out, std::span<const GiantPoint> points);

}  // namespace mmsv
