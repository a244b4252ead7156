#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mmsvirus/random.hpp"

namespace mmsv {

using NodeId = std::uint32_t;
using OsLabel = std::uint8_t;
using Edge = std::pair<NodeId, NodeId>;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Undirected call graph: each handset's address book plus the OS it runs.
///
/// Adjacency is stored in CSR form with every list sorted ascending. The
/// constructor normalizes the edge list (drops self-loops and duplicates)
/// so the symmetry and no-multi-edge invariants always hold. Instances are
/// immutable and may be shared between concurrent simulations.
class CallGraph {
public:
    CallGraph() = default;

    /// Builds a graph on n nodes. os_labels may be empty (all OS 0).
    CallGraph(std::size_t n, std::span<const Edge> edges, std::vector<OsLabel> os_labels = {},
              unsigned os_classes = 1);

    std::size_t size() const noexcept { return os_.size(); }
    std::size_t edge_count() const noexcept { return targets_.size() / 2; }
    unsigned os_classes() const noexcept { return os_classes_; }

    std::span<const NodeId> contacts(NodeId u) const noexcept {
        return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
    }
    std::size_t degree(NodeId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }
    OsLabel os(NodeId u) const noexcept { return os_[u]; }
    const std::vector<OsLabel>& os_labels() const noexcept { return os_; }

    /// Undirected edges with u < v, in lexicographic order.
    std::vector<Edge> edges() const;

    /// Same adjacency, new labels.
    CallGraph relabeled(std::vector<OsLabel> os_labels, unsigned os_classes) const;

    friend bool operator==(const CallGraph&, const CallGraph&) = default;

private:
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> targets_;
    std::vector<OsLabel> os_;
    unsigned os_classes_ = 1;
};

struct FixedDegree {
    std::size_t k = 2;
};

/// P(k) proportional to k^-gamma * exp(-k/kappa) for k_min <= k <= k_max.
/// k_max = 0 means n - 1 (at least k_min).
struct PowerLawCutoff {
    double gamma = 2.5;
    double kappa = 20.0;
    std::size_t k_min = 3;
    std::size_t k_max = 0;
};

/// An exact degree sequence; its length must equal the requested n.
struct EmpiricalDegrees {
    std::vector<std::size_t> degrees;
};

using DegreeModel = std::variant<FixedDegree, PowerLawCutoff, EmpiricalDegrees>;

void validate_model(const DegreeModel& model);

/// Normalized truncated power-law pmf over [k_min, k_max].
std::vector<double> power_law_pmf(const PowerLawCutoff& model, std::size_t k_max);

/// Configuration-model graph. Self-loops and multi-edges produced by the
/// stub pairing are discarded, so realized degrees may fall short of the
/// drawn sequence. An odd stub total triggers re-drawing one node's degree,
/// up to max_parity_retries times.
CallGraph generate_graph(std::size_t n, const DegreeModel& model, Seed seed,
                         unsigned max_parity_retries = 1000);

/// Independent categorical OS draw per node.
CallGraph assign_os(const CallGraph& graph, std::span<const double> shares, Seed seed);

/// Exact-quota variant: round(share * n) nodes per OS (largest-remainder),
/// placed by a seeded random permutation.
CallGraph assign_os_quota(const CallGraph& graph, std::span<const double> shares, Seed seed);

/// Hop distances from root (-1 when unreachable or beyond max_hops).
std::vector<std::int64_t> bfs_distances(const CallGraph& graph, NodeId root,
                                        std::size_t max_hops = SIZE_MAX);

/// Induced subgraph on the kept nodes; node ids are compacted in ascending
/// original-id order. original_ids (if given) receives the mapping.
CallGraph induced_subgraph(const CallGraph& graph, std::span<const NodeId> keep,
                           std::vector<NodeId>* original_ids = nullptr);

CallGraph neighborhood_subgraph(const CallGraph& graph, NodeId root, std::size_t radius,
                                std::vector<NodeId>* original_ids = nullptr);

// Edge-list text format:
//   callgraph v1 n=<N> os_classes=<C>
//   node <id> os=<label>      (one per node, ascending id)
//   edge <u> <v>              (one per undirected edge, u < v, sorted)
void write_graph(std::ostream& out, const CallGraph& graph);
void write_graph(const std::filesystem::path& path, const CallGraph& graph);
CallGraph read_graph(std::istream& in);
CallGraph read_graph(const std::filesystem::path& path);

}  // namespace mmsv
