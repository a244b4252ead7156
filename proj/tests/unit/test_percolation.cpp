#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "mmsvirus/percolation.hpp"

using namespace mmsv;

namespace {

// Boolean transitive closure; the brute-force reference for small graphs.
std::vector<std::vector<bool>> closure(const CallGraph& g) {
    const auto n = g.size();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) r[i][i] = true;
    for (auto [u, v] : g.edges()) r[u][v] = r[v][u] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (r[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (r[k][j]) r[i][j] = true;
    return r;
}

void check_against_closure(const CallGraph& g) {
    const auto r = closure(g);
    const auto uf = components(g);
    const auto bfs = components_bfs(g);
    REQUIRE(uf == bfs);
    std::size_t largest = 0;
    std::set<std::vector<bool>> classes;
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t size = 0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            size += r[i][j];
            CHECK((uf.component_id[i] == uf.component_id[j]) == r[i][j]);
        }
        CHECK(uf.component_sizes[uf.component_id[i]] == size);
        largest = std::max(largest, size);
        classes.insert(r[i]);
    }
    CHECK(uf.component_count == classes.size());
    CHECK(uf.largest_size == largest);
}

CallGraph from_mask(std::size_t n, std::uint64_t mask) {
    std::vector<Edge> edges;
    std::size_t bit = 0;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j, ++bit)
            if (mask >> bit & 1) edges.emplace_back(i, j);
    return CallGraph(n, edges);
}

}  // namespace

TEST_CASE("union-find basics") {
    UnionFind uf(5);
    CHECK(uf.set_count() == 5);
    CHECK(uf.largest() == 1);
    CHECK(uf.unite(0, 1));
    CHECK_FALSE(uf.unite(1, 0));
    CHECK(uf.unite(3, 4));
    CHECK(uf.unite(4, 1));
    CHECK(uf.set_count() == 2);
    CHECK(uf.largest() == 4);
    CHECK(uf.find(0) == uf.find(3));
    CHECK(uf.set_size(2) == 1);
}

TEST_CASE("components of trivial graphs") {
    auto empty = components(CallGraph{});
    CHECK(empty.component_count == 0);
    CHECK(empty.largest_size == 0);
    CHECK(empty.largest_fraction == 0.0);

    std::vector<Edge> tri{{0, 1}, {1, 2}, {0, 2}};
    auto r = components(CallGraph(4, tri));
    CHECK(r.component_count == 2);
    CHECK(r.largest_size == 3);
    CHECK(r.largest_fraction == doctest::Approx(0.75));
    CHECK(r.member_of_largest == std::vector<bool>{true, true, true, false});
    CHECK(r.component_id == std::vector<NodeId>{0, 0, 0, 1});
}

TEST_CASE("components are exact on every graph with up to 5 nodes") {
    for (std::size_t n = 0; n <= 5; ++n) {
        const std::uint64_t pairs = n * (n - (n > 0)) / 2;
        for (std::uint64_t mask = 0; mask < (1ULL << pairs); ++mask) check_against_closure(from_mask(n, mask));
    }
}

TEST_CASE("components are exact on random graphs with 6 to 12 nodes") {
    Rng rng(2024);
    for (std::size_t n = 6; n <= 12; ++n) {
        const std::size_t pairs = n * (n - 1) / 2;
        for (int trial = 0; trial < 300; ++trial) {
            const double density = rng.uniform() * 0.4;
            std::uint64_t mask = 0;
            for (std::size_t b = 0; b < pairs; ++b)
                if (rng.bernoulli(density)) mask |= 1ULL << b;
            check_against_closure(from_mask(n, mask));
        }
    }
}

TEST_CASE("union-find and BFS agree on generated graphs") {
    for (Seed seed = 0; seed < 20; ++seed) {
        auto g = generate_graph(1000, PowerLawCutoff{2.8, 10, 1, 0}, seed);
        auto uf = components(g);
        CHECK(uf == components_bfs(g));
        std::size_t total = 0;
        for (auto s : uf.component_sizes) total += s;
        CHECK(total == g.size());
    }
}

TEST_CASE("susceptible subgraph") {
    auto g = generate_graph(2000, PowerLawCutoff{}, 3);
    SUBCASE("all nodes share the target os") {
        CHECK(susceptible_subgraph(g, 0) == g);
    }
    SUBCASE("no node has the target os") {
        std::vector<double> shares{0.0, 1.0};
        auto sub = susceptible_subgraph(assign_os(g, shares, 1), 0);
        CHECK(sub.size() == 0);
    }
    SUBCASE("two-colour neighborhood keeps exactly the red nodes") {
        std::vector<double> shares{0.25, 0.75};
        auto colored = assign_os(g, shares, 5);
        auto hood = neighborhood_subgraph(colored, 0, 4);
        std::size_t red = 0;
        for (OsLabel label : hood.os_labels()) red += label == 0;
        std::vector<NodeId> ids;
        auto sub = susceptible_subgraph(hood, 0, &ids);
        CHECK(sub.size() == red);
        for (auto [u, v] : sub.edges()) {
            auto book = hood.contacts(ids[u]);
            CHECK(std::find(book.begin(), book.end(), ids[v]) != book.end());
        }
    }
}

TEST_CASE("scan augmentation") {
    std::vector<Edge> two{{0, 1}, {2, 3}};
    CallGraph pairs(4, two);

    SUBCASE("zero links is a no-op") {
        auto g = assign_os(generate_graph(3000, PowerLawCutoff{}, 8), std::vector<double>{0.25, 0.75}, 2);
        CHECK(scan_augmented_components(g, 0, 0, 1) == components(susceptible_subgraph(g, 0)));
    }
    SUBCASE("enough links join two disjoint edges") {
        // the only non-adjacent pairs all bridge the two edges
        auto r = scan_augmented_components(pairs, 0, 1, 3);
        CHECK(r.largest_size == 4);
        CHECK(r.component_count == 1);
        CHECK(scan_augmented_components(pairs, 0, 4, 3).largest_size == 4);
        CHECK_THROWS_AS(scan_augmented_components(pairs, 0, 5, 3), std::invalid_argument);
    }
    SUBCASE("too few susceptible nodes") {
        CallGraph single(1, {});
        CHECK_THROWS_AS(scan_augmented_components(single, 0, 1, 1), std::invalid_argument);
        CHECK_NOTHROW(scan_augmented_components(single, 0, 0, 1));
    }
}

TEST_CASE("augmentation never shrinks the largest component") {
    std::vector<double> shares{0.25, 0.75};
    for (Seed seed = 1; seed <= 5; ++seed) {
        auto g = assign_os(generate_graph(5000, PowerLawCutoff{}, seed), shares, seed + 100);
        std::vector<std::size_t> counts{0, 10, 50, 100, 200, 400, 800};
        auto curve = scan_augmentation_curve(g, 0, counts, seed);
        REQUIRE(curve.size() == counts.size());
        for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] >= curve[i - 1]);
        // the incremental curve agrees with independent full recomputation
        for (std::size_t i = 0; i < counts.size(); ++i)
            CHECK(curve[i] == scan_augmented_components(g, 0, counts[i], seed).largest_fraction);
    }
}

TEST_CASE("giant fraction curve") {
    auto g = generate_graph(20000, PowerLawCutoff{}, 20100101);
    std::vector<double> ms{0.01, 0.03, 0.1, 0.2, 0.3, 0.5, 1.0};
    auto curve = giant_fraction_curve(g, ms, 5);
    REQUIRE(curve.size() == ms.size());
    // nested susceptible sets make the curve monotone for one seed
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].report.largest_size >= curve[i - 1].report.largest_size);
    // m = 1 gives the full graph's largest component
    CHECK(curve.back().report.largest_size == components(g).largest_size);
    // phase transition: small at low m, sizeable at high m
    CHECK(curve[1].report.largest_fraction < 0.05);
    CHECK(curve[4].report.largest_fraction > 0.3);

    std::vector<double> bad{0.0};
    CHECK_THROWS(giant_fraction_curve(g, bad, 1));
    std::vector<double> too_big{1.5};
    CHECK_THROWS(giant_fraction_curve(g, too_big, 1));
}

TEST_CASE("giant fraction on a connected graph at m = 1") {
    auto g = testutil::path_graph(50);
    std::vector<double> ms{1.0};
    CHECK(giant_fraction_curve(g, ms, 1).front().report.largest_fraction == 1.0);
}

TEST_CASE("giant fraction never exceeds the susceptible share") {
    auto g = generate_graph(5000, PowerLawCutoff{}, 4);
    std::vector<double> ms{0.05, 0.2, 0.4};
    for (const auto& pt : giant_fraction_curve(g, ms, 9)) {
        // largest_fraction is relative to the susceptible count
        const auto susceptible = pt.report.member_of_largest.size();
        CHECK(pt.report.largest_size <= susceptible);
        CHECK(pt.report.largest_fraction * susceptible == doctest::Approx(pt.report.largest_size));
        CHECK(susceptible < g.size());
    }
}

TEST_CASE("component csv") {
    std::vector<GiantPoint> pts(1);
    pts[0].m = 0.25;
    pts[0].report.component_count = 3;
    pts[0].report.largest_size = 4;
    pts[0].report.largest_fraction = 0.5;
    std::ostringstream out;
    write_component_csv(out, pts);
    CHECK(out.str() == "m,component_count,largest_size,largest_fraction\n0.25,3,4,0.5\n");
}
