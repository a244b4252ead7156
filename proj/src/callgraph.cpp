#include "mmsvirus/callgraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace mmsv {

CallGraph::CallGraph(std::size_t n, std::span<const Edge> edges, std::vector<OsLabel> os_labels,
                     unsigned os_classes)
    : os_(std::move(os_labels)), os_classes_(os_classes) {
    if (os_classes_ == 0 || os_classes_ > 256) throw GraphError("os_classes must be in [1, 256]");
    if (n > UINT32_MAX) throw GraphError("node count exceeds 32-bit ids");
    if (os_.empty()) os_.assign(n, 0);
    if (os_.size() != n) throw GraphError("os label count does not match node count");
    for (OsLabel label : os_)
        if (label >= os_classes_) throw GraphError("os label out of range");

    std::vector<Edge> normalized;
    normalized.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) throw GraphError("edge endpoint out of range");
        if (u == v) continue;
        normalized.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(normalized.begin(), normalized.end());
    normalized.erase(std::unique(normalized.begin(), normalized.end()), normalized.end());

    offsets_.assign(n + 1, 0);
    for (auto [u, v] : normalized) {
        ++offsets_[u + 1];
        ++offsets_[v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    targets_.resize(offsets_[n]);
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    // Lexicographic edge order fills every list in ascending order.
    for (auto [u, v] : normalized) {
        targets_[cursor[u]++] = v;
        targets_[cursor[v]++] = u;
    }
}

std::vector<Edge> CallGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < size(); ++u)
        for (NodeId v : contacts(u))
            if (u < v) out.emplace_back(u, v);
    return out;
}

CallGraph CallGraph::relabeled(std::vector<OsLabel> os_labels, unsigned os_classes) const {
    if (os_labels.size() != size()) throw GraphError("os label count does not match node count");
    for (OsLabel label : os_labels)
        if (label >= os_classes) throw GraphError("os label out of range");
    CallGraph out = *this;
    out.os_ = std::move(os_labels);
    out.os_classes_ = os_classes;
    return out;
}

// --- degree models ---------------------------------------------------------

void validate_model(const DegreeModel& model) {
    if (const auto* pl = std::get_if<PowerLawCutoff>(&model)) {
        if (!(pl->gamma > 1.0)) throw GraphError("power-law gamma must exceed 1");
        if (!(pl->kappa >= 1.0)) throw GraphError("power-law kappa must be >= 1");
        if (pl->k_min < 1) throw GraphError("power-law k_min must be >= 1");
        if (pl->k_max != 0 && pl->k_max < pl->k_min) throw GraphError("power-law k_max < k_min");
    } else if (const auto* emp = std::get_if<EmpiricalDegrees>(&model)) {
        const auto total = std::accumulate(emp->degrees.begin(), emp->degrees.end(), std::size_t{0});
        if (total % 2 != 0) throw GraphError("empirical degree sequence has odd sum");
    }
}

std::vector<double> power_law_pmf(const PowerLawCutoff& model, std::size_t k_max) {
    std::vector<double> pmf(k_max + 1, 0.0);
    double total = 0.0;
    for (std::size_t k = model.k_min; k <= k_max; ++k) {
        const double kd = static_cast<double>(k);
        pmf[k] = std::pow(kd, -model.gamma) * std::exp(-kd / model.kappa);
        total += pmf[k];
    }
    if (!(total > 0.0)) throw GraphError("power-law distribution has no mass");
    for (double& w : pmf) w /= total;
    return pmf;
}

namespace {

class DegreeSampler {
public:
    DegreeSampler(const DegreeModel& model, std::size_t n) : model_(model) {
        if (const auto* pl = std::get_if<PowerLawCutoff>(&model)) {
            std::size_t k_max = pl->k_max;
            if (k_max == 0) k_max = std::max(pl->k_min, n > 0 ? n - 1 : 0);
            const auto pmf = power_law_pmf(*pl, k_max);
            cdf_.resize(pmf.size());
            std::partial_sum(pmf.begin(), pmf.end(), cdf_.begin());
            cdf_.back() = 1.0;
        }
    }

    std::size_t draw(std::size_t node, Rng& rng) const {
        return std::visit(
            [&](const auto& m) -> std::size_t {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, FixedDegree>) {
                    return m.k;
                } else if constexpr (std::is_same_v<M, PowerLawCutoff>) {
                    const double u = rng.uniform();
                    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
                    if (it == cdf_.end()) --it;
                    return static_cast<std::size_t>(it - cdf_.begin());
                } else {
                    return m.degrees[node];
                }
            },
            model_);
    }

private:
    const DegreeModel& model_;
    std::vector<double> cdf_;
};

}  // namespace

CallGraph generate_graph(std::size_t n, const DegreeModel& model, Seed seed,
                         unsigned max_parity_retries) {
    validate_model(model);
    if (const auto* emp = std::get_if<EmpiricalDegrees>(&model); emp && emp->degrees.size() != n)
        throw GraphError("empirical degree sequence length does not match n");
    if (n == 0) return CallGraph{};

    Rng rng(seed);
    DegreeSampler sampler(model, n);
    std::vector<std::size_t> degree(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        degree[i] = sampler.draw(i, rng);
        total += degree[i];
    }
    for (unsigned attempt = 0; total % 2 != 0; ++attempt) {
        if (attempt >= max_parity_retries)
            throw GraphError("could not draw a degree sequence with even sum after " +
                             std::to_string(max_parity_retries) + " retries");
        const auto i = static_cast<std::size_t>(rng.below(n));
        total -= degree[i];
        degree[i] = sampler.draw(i, rng);
        total += degree[i];
    }

    std::vector<NodeId> stubs;
    stubs.reserve(total);
    for (std::size_t i = 0; i < n; ++i) stubs.insert(stubs.end(), degree[i], static_cast<NodeId>(i));
    rng.shuffle(stubs.begin(), stubs.end());

    std::vector<Edge> edges;
    edges.reserve(total / 2);
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) edges.emplace_back(stubs[i], stubs[i + 1]);
    return CallGraph(n, edges);
}

// --- OS assignment -------------------------------------------------------

namespace {

void check_shares(std::span<const double> shares) {
    if (shares.empty()) throw GraphError("market shares must not be empty");
    if (shares.size() > 256) throw GraphError("at most 256 OS classes supported");
    double sum = 0.0;
    for (double s : shares) {
        if (!(s >= 0.0)) throw GraphError("market shares must be non-negative");
        sum += s;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw GraphError("market shares must sum to 1");
}

}  // namespace

CallGraph assign_os(const CallGraph& graph, std::span<const double> shares, Seed seed) {
    check_shares(shares);
    std::vector<double> cumulative(shares.size());
    std::partial_sum(shares.begin(), shares.end(), cumulative.begin());
    // Last class with positive share absorbs rounding slack.
    auto last = shares.size();
    while (last > 0 && shares[last - 1] == 0.0) --last;
    Rng rng(seed);
    std::vector<OsLabel> labels(graph.size());
    for (auto& label : labels) {
        const double u = rng.uniform();
        std::size_t k = 0;
        while (k + 1 < last && !(u < cumulative[k])) ++k;
        while (shares[k] == 0.0) ++k;
        label = static_cast<OsLabel>(k);
    }
    return graph.relabeled(std::move(labels), static_cast<unsigned>(shares.size()));
}

CallGraph assign_os_quota(const CallGraph& graph, std::span<const double> shares, Seed seed) {
    check_shares(shares);
    const std::size_t n = graph.size();
    std::vector<std::size_t> quota(shares.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < shares.size(); ++k) {
        const double exact = shares[k] * static_cast<double>(n);
        quota[k] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[k];
        remainders.emplace_back(-(exact - std::floor(exact)), k);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++quota[remainders[i % shares.size()].second];

    std::vector<OsLabel> labels;
    labels.reserve(n);
    for (std::size_t k = 0; k < quota.size(); ++k) labels.insert(labels.end(), quota[k], static_cast<OsLabel>(k));
    Rng rng(seed);
    rng.shuffle(labels.begin(), labels.end());
    return graph.relabeled(std::move(labels), static_cast<unsigned>(shares.size()));
}

// --- traversal ------------------------------------------------------------

std::vector<std::int64_t> bfs_distances(const CallGraph& graph, NodeId root, std::size_t max_hops) {
    if (root >= graph.size()) throw GraphError("root node out of range");
    std::vector<std::int64_t> dist(graph.size(), -1);
    std::deque<NodeId> queue{root};
    dist[root] = 0;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        if (static_cast<std::size_t>(dist[u]) >= max_hops) continue;
        for (NodeId v : graph.contacts(u)) {
            if (dist[v] >= 0) continue;
            dist[v] = dist[u] + 1;
            queue.push_back(v);
        }
    }
    return dist;
}

CallGraph induced_subgraph(const CallGraph& graph, std::span<const NodeId> keep,
                           std::vector<NodeId>* original_ids) {
    std::vector<NodeId> ids(keep.begin(), keep.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    constexpr NodeId kAbsent = UINT32_MAX;
    std::vector<NodeId> remap(graph.size(), kAbsent);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] >= graph.size()) throw GraphError("subgraph node out of range");
        remap[ids[i]] = static_cast<NodeId>(i);
    }
    std::vector<Edge> edges;
    std::vector<OsLabel> labels;
    labels.reserve(ids.size());
    for (NodeId u : ids) {
        labels.push_back(graph.os(u));
        for (NodeId v : graph.contacts(u))
            if (u < v && remap[v] != kAbsent) edges.emplace_back(remap[u], remap[v]);
    }
    if (original_ids) *original_ids = ids;
    return CallGraph(ids.size(), edges, std::move(labels), graph.os_classes());
}

CallGraph neighborhood_subgraph(const CallGraph& graph, NodeId root, std::size_t radius,
                                std::vector<NodeId>* original_ids) {
    const auto dist = bfs_distances(graph, root, radius);
    std::vector<NodeId> keep;
    for (NodeId u = 0; u < graph.size(); ++u)
        if (dist[u] >= 0) keep.push_back(u);
    return induced_subgraph(graph, keep, original_ids);
}

// --- edge-list I/O ---------------------------------------------------------

void write_graph(std::ostream& out, const CallGraph& graph) {
    out << "callgraph v1 n=" << graph.size() << " os_classes=" << graph.os_classes() << '\n';
    for (NodeId u = 0; u < graph.size(); ++u) out << "node " << u << " os=" << unsigned{graph.os(u)} << '\n';
    for (auto [u, v] : graph.edges()) out << "edge " << u << ' ' << v << '\n';
}

void write_graph(const std::filesystem::path& path, const CallGraph& graph) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw GraphError("cannot open " + path.string() + " for writing");
    write_graph(out, graph);
    if (!out) throw GraphError("write failed: " + path.string());
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    throw GraphError("line " + std::to_string(line_no) + ": " + what);
}

std::uint64_t parse_uint(std::string_view text, std::size_t line_no) {
    if (text.empty()) parse_fail(line_no, "expected an unsigned integer");
    std::uint64_t value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') parse_fail(line_no, "expected an unsigned integer, got '" + std::string(text) + "'");
        if (value > (UINT64_MAX - 9) / 10) parse_fail(line_no, "integer overflow");
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return value;
}

std::uint64_t parse_keyed(const std::string& token, std::string_view key, std::size_t line_no) {
    if (token.rfind(key, 0) != 0) parse_fail(line_no, "expected '" + std::string(key) + "...'");
    return parse_uint(std::string_view(token).substr(key.size()), line_no);
}

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    for (std::string t; ss >> t;) tokens.push_back(std::move(t));
    return tokens;
}

}  // namespace

CallGraph read_graph(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) parse_fail(line_no, "missing header");
    if (!line.empty() && line.back() == '\r') parse_fail(line_no, "CRLF line endings not accepted");
    auto header = split_tokens(line);
    if (header.size() != 4 || header[0] != "callgraph" || header[1] != "v1")
        parse_fail(line_no, "bad header, expected 'callgraph v1 n=<N> os_classes=<C>'");
    const auto n = parse_keyed(header[2], "n=", line_no);
    const auto classes = parse_keyed(header[3], "os_classes=", line_no);
    if (classes == 0 || classes > 256) parse_fail(line_no, "os_classes must be in [1, 256]");
    if (n > UINT32_MAX) parse_fail(line_no, "node count exceeds 32-bit ids");

    std::vector<OsLabel> labels(n, 0);
    std::vector<bool> seen(n, false);
    std::size_t nodes_seen = 0;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') parse_fail(line_no, "CRLF line endings not accepted");
        if (line.empty()) continue;
        auto tok = split_tokens(line);
        if (tok.empty()) parse_fail(line_no, "blank line with whitespace");
        if (tok[0] == "node") {
            if (tok.size() != 3) parse_fail(line_no, "expected 'node <id> os=<label>'");
            const auto id = parse_uint(tok[1], line_no);
            const auto os = parse_keyed(tok[2], "os=", line_no);
            if (id >= n) parse_fail(line_no, "node id out of range");
            if (os >= classes) parse_fail(line_no, "os label out of range");
            if (seen[id]) parse_fail(line_no, "duplicate node " + std::to_string(id));
            seen[id] = true;
            ++nodes_seen;
            labels[id] = static_cast<OsLabel>(os);
        } else if (tok[0] == "edge") {
            if (tok.size() != 3) parse_fail(line_no, "expected 'edge <u> <v>'");
            const auto u = parse_uint(tok[1], line_no);
            const auto v = parse_uint(tok[2], line_no);
            if (u >= n || v >= n) parse_fail(line_no, "edge endpoint out of range");
            if (!(u < v)) parse_fail(line_no, "edge endpoints must satisfy u < v");
            edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
        } else {
            parse_fail(line_no, "unknown record '" + tok[0] + "'");
        }
    }
    if (nodes_seen != n)
        throw GraphError("expected " + std::to_string(n) + " node records, found " + std::to_string(nodes_seen));
    return CallGraph(n, edges, std::move(labels), static_cast<unsigned>(classes));
}

CallGraph read_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GraphError("cannot open " + path.string());
    return read_graph(in);
}

}  // namespace mmsv
