#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "helpers.hpp"
#include "mmsvirus/epidemic.hpp"
#include "mmsvirus/percolation.hpp"

using namespace mmsv;

namespace {

// Two disjoint 10-cliques; nodes 0..9 and 10..19.
CallGraph two_cliques() {
    std::vector<Edge> edges;
    for (NodeId base : {0u, 10u})
        for (NodeId i = 0; i < 10; ++i)
            for (NodeId j = i + 1; j < 10; ++j) edges.emplace_back(base + i, base + j);
    return CallGraph(20, edges);
}

// Fourth-order Runge-Kutta for dI/dt = beta * I * (N - I) / N.
std::vector<double> rk4_si(double n, double beta, double i0, std::size_t ticks, int substeps) {
    auto f = [&](double i) { return beta * i * (n - i) / n; };
    std::vector<double> out{i0};
    double i = i0;
    const double h = 1.0 / substeps;
    for (std::size_t t = 0; t < ticks; ++t) {
        for (int k = 0; k < substeps; ++k) {
            const double k1 = f(i), k2 = f(i + h / 2 * k1), k3 = f(i + h / 2 * k2), k4 = f(i + h * k3);
            i += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        out.push_back(i);
    }
    return out;
}

void check_budget(const EpidemicTrace& trace, std::uint64_t s) {
    std::uint64_t sum = 0;
    for (auto v : trace.lifetime_sends) {
        CHECK(v <= s);
        sum += v;
    }
    CHECK(sum == trace.total_sends);
    CHECK(std::accumulate(trace.viral_sends.begin(), trace.viral_sends.end(), std::uint64_t{0}) == trace.total_sends);
}

}  // namespace

TEST_CASE("params validation") {
    SimParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.beta() == 1.0);
    for (auto mutate : std::vector<void (*)(SimParams&)>{
             [](SimParams& q) { q.rho = 1.5; }, [](SimParams& q) { q.rho = -0.1; },
             [](SimParams& q) { q.p = 2; }, [](SimParams& q) { q.m = 0; },
             [](SimParams& q) { q.m = 1.1; }, [](SimParams& q) { q.tau_minutes = 0; }}) {
        SimParams q;
        mutate(q);
        CHECK_THROWS_AS(q.validate(), SimulationError);
    }
}

TEST_CASE("select_target strategy extremes") {
    auto g = generate_graph(500, PowerLawCutoff{}, 1);
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const auto attacker = static_cast<NodeId>(rng.below(g.size()));
        auto topo = select_target(attacker, g, 0.0, 0.5, rng);
        CHECK(topo.kind == AttackKind::Topological);
        REQUIRE(topo.target);
        auto book = g.contacts(attacker);
        CHECK(std::binary_search(book.begin(), book.end(), *topo.target));

        auto scan = select_target(attacker, g, 1.0, 0.0, rng);
        CHECK(scan.kind == AttackKind::Scan);
        CHECK_FALSE(scan.target);
    }
    CallGraph isolated(1, {});
    CHECK_FALSE(select_target(0, isolated, 0.0, 1.0, rng).target);
}

TEST_CASE("select_target frequencies are within three sigma") {
    auto g = generate_graph(1000, PowerLawCutoff{}, 2);
    Rng rng(17);
    const int draws = 100000;
    int scans = 0, hits = 0;
    for (int i = 0; i < draws; ++i) {
        auto a = select_target(5, g, 0.5, 0.06, rng);
        if (a.kind == AttackKind::Scan) {
            ++scans;
            hits += a.target.has_value();
        }
    }
    CHECK(std::abs(scans / double(draws) - 0.5) <= 0.005);
    CHECK(std::abs(hits / double(scans) - 0.06) <= 0.003);
}

TEST_CASE("scan targets are uniform over all handsets") {
    auto g = testutil::path_graph(4, {0, 1, 1, 1}, 2);
    Rng rng(8);
    std::array<int, 4> counts{};
    const int draws = 40000;
    for (int i = 0; i < draws; ++i) ++counts[*select_target(0, g, 1.0, 1.0, rng).target];
    // 3 sigma of a binomial(40000, 1/4)
    for (int c : counts) CHECK(std::abs(c - draws / 4.0) <= 3 * std::sqrt(draws * 0.25 * 0.75));
}

TEST_CASE("outbreak infect rules") {
    auto g = testutil::path_graph(3, {0, 1, 0}, 2);
    SimParams p;
    p.s = 7;
    Outbreak ob(g, p);
    CHECK(ob.susceptible_base() == 2);
    CHECK(ob.infect(0, 0));
    CHECK(ob.handset(0).budget_remaining == 7);
    CHECK(ob.handset(0).infected_at == Tick{0});
    CHECK_FALSE(ob.infect(0, 3));
    CHECK_FALSE(ob.infect(1, 0));
    CHECK(ob.handset(1).compartment == Compartment::Susceptible);
}

TEST_CASE("step without infected handsets sends nothing") {
    auto g = testutil::path_graph(3);
    SimParams p;
    Outbreak ob(g, p);
    Rng rng(1);
    CHECK(ob.step(0, rng) == 0);
    CHECK(ob.infected_count() == 0);
}

TEST_CASE("three-node chain timing") {
    // a-b-c: b's book is {a, c}, so c follows one tick after b only when
    // b's first draw picks c.
    auto g = testutil::path_graph(3);
    SimParams p;
    p.s = 1000;
    p.rho = 0.0;
    const int runs = 4000;
    int c_at_two = 0;
    double c_mean = 0.0;
    for (int r = 0; r < runs; ++r) {
        p.seed = static_cast<Seed>(r);
        p.max_steps = 200;
        Outbreak ob(g, p);
        Rng rng(derive_seed(p.seed, 1));
        ob.infect(0, 0);
        Tick t = 0;
        while (ob.handset(2).compartment == Compartment::Susceptible) ob.step(t++, rng);
        CHECK(ob.handset(1).infected_at == Tick{1});
        const auto at = *ob.handset(2).infected_at;
        c_at_two += at == 2;
        c_mean += static_cast<double>(at);
        // a's book holds only b, so a never reaches c
        CHECK(ob.handset(0).sends >= 1);
    }
    c_mean /= runs;
    // c activates at 2 + Geometric(1/2) failures: P(2) = 1/2, mean 3, variance 2
    CHECK(std::abs(c_at_two / double(runs) - 0.5) <= 3 * std::sqrt(0.25 / runs));
    CHECK(std::abs(c_mean - 3.0) <= 3 * std::sqrt(2.0 / runs));
}

TEST_CASE("newly infected handsets act from the next tick") {
    auto g = testutil::path_graph(2);
    SimParams p;
    p.s = 5;
    Outbreak ob(g, p);
    Rng rng(1);
    ob.infect(0, 0);
    CHECK(ob.step(0, rng) == 1);
    CHECK(ob.handset(1).infected_at == Tick{1});
    CHECK(ob.infected_by(0) == 1);
    CHECK(ob.infected_by(1) == 2);
    CHECK(ob.step(1, rng) == 2);
}

TEST_CASE("isolated seed drains its budget on misses") {
    CallGraph g(2, {});
    SimParams p;
    p.s = 12;
    p.rho = 0.0;
    auto trace = run_naive(g, p, NodeId{0});
    CHECK(trace.final_infected == 1);
    CHECK(trace.total_sends == 12);
    CHECK(trace.lifetime_sends == std::vector<std::uint64_t>{12});
    CHECK(trace.infected.size() == 13);
    for (auto v : trace.infected) CHECK(v == 1);
    CHECK(trace.viral_sends.back() == 0);
}

TEST_CASE("zero budget leaves only the seed") {
    auto g = generate_graph(2000, PowerLawCutoff{}, 4);
    SimParams p;
    p.s = 0;
    auto trace = run_naive(g, p);
    CHECK(trace.final_infected == 1);
    CHECK(trace.final_infected_fraction == doctest::Approx(1.0 / 2000));
    CHECK(trace.total_sends == 0);
}

TEST_CASE("seed selection errors") {
    std::vector<double> shares{0.0, 1.0};
    auto g = assign_os(generate_graph(100, FixedDegree{2}, 1), shares, 1);
    SimParams p;
    CHECK_THROWS_AS(run_naive(g, p), SimulationError);
    auto mixed = testutil::path_graph(3, {0, 1, 0}, 2);
    CHECK_THROWS_AS(run_naive(mixed, p, NodeId{1}), SimulationError);
    CHECK_THROWS_AS(run_naive(mixed, p, NodeId{9}), SimulationError);
    Rng rng(2);
    for (int i = 0; i < 50; ++i) CHECK(mixed.os(draw_seed_node(mixed, 0, rng)) == 0);
}

TEST_CASE("unbounded topological spread fills exactly the seed component") {
    std::vector<double> shares{0.4, 0.6};
    for (Seed seed = 0; seed < 20; ++seed) {
        auto g = assign_os(generate_graph(400, PowerLawCutoff{2.5, 20, 1, 0}, seed), shares, seed + 7);
        SimParams p;
        p.rho = 0.0;
        p.s = kUnlimitedBudget;
        p.max_steps = 5000;
        p.seed = seed;
        auto trace = run_naive(g, p);
        auto comp = testutil::os_component(g, trace.seed_node, 0);
        std::set<std::size_t> infected(trace.infected_nodes.begin(), trace.infected_nodes.end());
        CHECK(infected == comp);
        for (auto v : trace.infected) CHECK(v <= comp.size());
    }
}

TEST_CASE("topological spread stays inside the component at every tick") {
    std::vector<double> shares{0.3, 0.7};
    auto g = assign_os(generate_graph(3000, PowerLawCutoff{}, 5), shares, 6);
    SimParams p;
    p.rho = 0.0;
    p.s = 40;
    for (Seed seed = 0; seed < 10; ++seed) {
        p.seed = seed;
        Outbreak ob(g, p);
        Rng seed_rng(derive_seed(seed, 0));
        const auto root = draw_seed_node(g, 0, seed_rng);
        const auto comp = testutil::os_component(g, root, 0);
        ob.infect(root, 0);
        Rng rng(derive_seed(seed, 1));
        for (Tick t = 0; !ob.attackers().empty(); ++t) {
            ob.step(t, rng);
            for (auto u : ob.infection_order()) REQUIRE(comp.count(u) == 1);
        }
    }
}

TEST_CASE("scanning lets the virus escape the seed component") {
    auto g = two_cliques();
    SimParams p;
    p.rho = 0.5;
    p.p = 0.5;
    p.s = 20;
    int escaped = 0;
    for (Seed seed = 0; seed < 200; ++seed) {
        p.seed = seed;
        auto trace = run_naive(g, p, NodeId{0});
        escaped += std::any_of(trace.infected_nodes.begin(), trace.infected_nodes.end(),
                               [](NodeId u) { return u >= 10; });
    }
    CHECK(escaped > 0);

    p.rho = 0.0;
    for (Seed seed = 0; seed < 200; ++seed) {
        p.seed = seed;
        auto trace = run_naive(g, p, NodeId{0});
        for (auto u : trace.infected_nodes) CHECK(u < 10);
    }
}

TEST_CASE("budget conservation over randomized parameters") {
    Rng meta(20240601);
    for (int c = 0; c < 1000; ++c) {
        const auto n = static_cast<std::size_t>(20 + meta.below(200));
        const double m = 0.1 + 0.9 * meta.uniform();
        std::vector<double> shares{m, 1.0 - m};
        auto g = assign_os(generate_graph(n, PowerLawCutoff{2.5, 10, 1, 0}, meta.next()), shares, meta.next());
        if (std::find(g.os_labels().begin(), g.os_labels().end(), OsLabel{0}) == g.os_labels().end()) continue;
        SimParams p;
        p.m = m;
        p.s = meta.below(60);
        p.rho = meta.uniform();
        p.p = meta.uniform();
        p.seed = meta.next();
        p.max_steps = 1 + meta.below(300);
        p.topological_no_repeat = meta.bernoulli(0.3);
        auto trace = run_naive(g, p);
        check_budget(trace, p.s);
        for (std::size_t t = 1; t < trace.infected.size(); ++t) CHECK(trace.infected[t] >= trace.infected[t - 1]);
        CHECK(trace.final_infected_fraction >= 0.0);
        CHECK(trace.final_infected_fraction <= 1.0);
        // a run that ended early spent every unit of budget
        if (trace.infected.size() < p.max_steps)
            for (auto v : trace.lifetime_sends) CHECK(v == p.s);
    }
}

TEST_CASE("runs are deterministic") {
    auto g = assign_os(generate_graph(5000, PowerLawCutoff{}, 3), std::vector<double>{0.3, 0.7}, 4);
    SimParams p;
    p.rho = 0.4;
    p.seed = 99;
    auto a = run_naive(g, p);
    auto b = run_naive(g, p);
    CHECK(a.infected == b.infected);
    CHECK(a.viral_sends == b.viral_sends);
    CHECK(a.infected_nodes == b.infected_nodes);
    p.seed = 100;
    CHECK(run_naive(g, p).infected_nodes != a.infected_nodes);
}

TEST_CASE("no-repeat mode tries every contact once") {
    // star: hub 0 with 30 leaves
    std::vector<Edge> edges;
    for (NodeId i = 1; i <= 30; ++i) edges.emplace_back(0, i);
    CallGraph star(31, edges);
    SimParams p;
    p.rho = 0.0;
    p.s = 30;
    p.topological_no_repeat = true;
    auto trace = run_naive(star, p, NodeId{0});
    CHECK(trace.final_infected == 31);
    // the hub reaches a new leaf each tick
    CHECK(trace.infected[30] == 31);
}

TEST_CASE("no-repeat mode with scans still initializes the contact pool") {
    std::vector<Edge> edges;
    for (NodeId i = 1; i <= 10; ++i) edges.emplace_back(0, i);
    CallGraph star(11, edges);
    SimParams p;
    p.rho = 0.5;
    p.p = 0.0;
    p.s = 200;
    p.topological_no_repeat = true;
    auto trace = run_naive(star, p, NodeId{0});
    CHECK(trace.final_infected == 11);
}

TEST_CASE("analytic SI curve") {
    SUBCASE("no susceptibles") {
        for (double v : analytic_si_curve(50, 1.0, 50, 10)) CHECK(v == 50.0);
    }
    SUBCASE("zero rate") {
        for (double v : analytic_si_curve(50, 0.0, 3, 10)) CHECK(v == 3.0);
    }
    SUBCASE("matches numerical integration") {
        const auto curve = analytic_si_curve(1000, 0.1, 1, 200);
        const auto rk = rk4_si(1000, 0.1, 1, 200, 100);
        REQUIRE(curve.size() == 201);
        for (std::size_t t = 0; t <= 200; ++t) CHECK(std::abs(curve[t] - rk[t]) / rk[t] <= 1e-6);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(analytic_si_curve(0, 1, 1, 5), SimulationError);
        CHECK_THROWS_AS(analytic_si_curve(10, 1, 0, 5), SimulationError);
        CHECK_THROWS_AS(analytic_si_curve(10, 1, 11, 5), SimulationError);
    }
}

TEST_CASE("trace and summary csv") {
    EpidemicTrace t;
    t.infected = {1, 2, 4};
    t.viral_sends = {1, 2, 0};
    std::ostringstream out;
    write_trace_csv(out, t);
    CHECK(out.str() == "tick,infected,viral_sends\n0,1,1\n1,2,2\n2,4,0\n");

    RunSummary r;
    r.run_id = 3;
    r.params.m = 0.03;
    r.params.s = 100;
    r.params.p = 0.06;
    r.params.rho = 0.7;
    r.final_fraction = 0.125;
    std::ostringstream sum;
    write_summary_csv(sum, std::span<const RunSummary>(&r, 1));
    CHECK(sum.str() == "run_id,m,s,p,rho,final_fraction\n3,0.03,100,0.06,0.7,0.125\n");
}
