#include "mmsvirus/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mmsvirus/format.hpp"

namespace mmsv {

void SimParams::validate() const {
    if (!(rho >= 0.0 && rho <= 1.0)) throw SimulationError("rho must lie in [0, 1]");
    if (!(p >= 0.0 && p <= 1.0)) throw SimulationError("p must lie in [0, 1]");
    if (!(m > 0.0 && m <= 1.0)) throw SimulationError("m must lie in (0, 1]");
    if (!(tau_minutes > 0.0)) throw SimulationError("tau must be positive");
    if (!(mu >= 0.0) || !(mean_contacts >= 0.0)) throw SimulationError("mu and mean_contacts must be non-negative");
}

Attack select_target(NodeId attacker, const CallGraph& graph, double rho, double p, Rng& rng) {
    if (rng.bernoulli(rho)) {
        if (!rng.bernoulli(p)) return {AttackKind::Scan, std::nullopt};
        return {AttackKind::Scan, static_cast<NodeId>(rng.below(graph.size()))};
    }
    const auto book = graph.contacts(attacker);
    if (book.empty()) return {AttackKind::Topological, std::nullopt};
    return {AttackKind::Topological, book[rng.below(book.size())]};
}

Outbreak::Outbreak(const CallGraph& graph, const SimParams& params)
    : graph_(graph), params_(params), handsets_(graph.size()) {
    for (NodeId u = 0; u < graph.size(); ++u)
        if (graph.os(u) == params.target_os) ++susceptible_base_;
}

bool Outbreak::infect(NodeId node, Tick effective) {
    auto& h = handsets_[node];
    if (h.compartment == Compartment::Infected || graph_.os(node) != params_.target_os) return false;
    h.compartment = Compartment::Infected;
    h.budget_remaining = params_.s;
    h.infected_at = effective;
    infection_order_.push_back(node);
    if (h.budget_remaining > 0) attackers_.push_back(node);
    return true;
}

std::optional<NodeId> Outbreak::pick_without_repeat(NodeId attacker, Rng& rng) {
    if (untried_.empty()) {
        untried_.resize(graph_.size());
        pool_ready_.assign(graph_.size(), false);
    }
    auto& pool = untried_[attacker];
    if (!pool_ready_[attacker]) {
        const auto book = graph_.contacts(attacker);
        pool.assign(book.begin(), book.end());
        pool_ready_[attacker] = true;
    }
    if (pool.empty()) return std::nullopt;
    const auto i = rng.below(pool.size());
    const NodeId target = pool[i];
    pool[i] = pool.back();
    pool.pop_back();
    return target;
}

bool Outbreak::attack(NodeId attacker, Tick tick, Rng& rng) {
    auto& h = handsets_[attacker];
    if (h.budget_remaining == 0) return false;
    std::optional<NodeId> target;
    if (params_.topological_no_repeat && !rng.bernoulli(params_.rho)) {
        target = pick_without_repeat(attacker, rng);
    } else if (params_.topological_no_repeat) {
        if (rng.bernoulli(params_.p)) target = static_cast<NodeId>(rng.below(graph_.size()));
    } else {
        target = select_target(attacker, graph_, params_.rho, params_.p, rng).target;
    }
    --h.budget_remaining;
    ++h.sends;
    return target && infect(*target, tick + 1);
}

std::uint64_t Outbreak::step(Tick tick, Rng& rng) {
    const std::size_t active = attackers_.size();
    for (std::size_t i = 0; i < active; ++i) attack(attackers_[i], tick, rng);
    prune_attackers();
    return active;
}

void Outbreak::prune_attackers() {
    std::erase_if(attackers_, [&](NodeId u) { return handsets_[u].budget_remaining == 0; });
}

std::size_t Outbreak::infected_by(Tick tick) const noexcept {
    // infection_order_ is sorted by activation tick
    auto it = std::partition_point(infection_order_.begin(), infection_order_.end(),
                                   [&](NodeId u) { return *handsets_[u].infected_at <= tick; });
    return static_cast<std::size_t>(it - infection_order_.begin());
}

NodeId draw_seed_node(const CallGraph& graph, OsLabel target_os, Rng& rng) {
    const auto& labels = graph.os_labels();
    if (std::find(labels.begin(), labels.end(), target_os) == labels.end())
        throw SimulationError("no handset runs the target OS");
    for (;;) {
        const auto u = static_cast<NodeId>(rng.below(graph.size()));
        if (graph.os(u) == target_os) return u;
    }
}

namespace {

void finish_trace(EpidemicTrace& trace, const Outbreak& outbreak) {
    trace.susceptible_base = outbreak.susceptible_base();
    trace.final_infected = outbreak.infected_count();
    trace.final_infected_fraction =
        static_cast<double>(trace.final_infected) / static_cast<double>(trace.susceptible_base);
    trace.infected_nodes = outbreak.infection_order();
    trace.lifetime_sends.reserve(trace.infected_nodes.size());
    for (NodeId u : trace.infected_nodes) {
        trace.lifetime_sends.push_back(outbreak.handset(u).sends);
        trace.total_sends += outbreak.handset(u).sends;
    }
}

}  // namespace

EpidemicTrace run_naive(const CallGraph& graph, const SimParams& params, std::optional<NodeId> seed_node) {
    params.validate();
    Rng seed_rng(derive_seed(params.seed, 0));
    Rng rng(derive_seed(params.seed, 1));
    const NodeId seed = seed_node ? *seed_node : draw_seed_node(graph, params.target_os, seed_rng);
    if (seed >= graph.size() || graph.os(seed) != params.target_os)
        throw SimulationError("seed handset does not run the target OS");

    Outbreak outbreak(graph, params);
    outbreak.infect(seed, 0);
    EpidemicTrace trace;
    trace.seed_node = seed;
    for (Tick t = 0; t < params.max_steps; ++t) {
        trace.infected.push_back(outbreak.infected_by(t));
        if (outbreak.attackers().empty()) {
            trace.viral_sends.push_back(0);
            break;
        }
        trace.viral_sends.push_back(outbreak.step(t, rng));
    }
    finish_trace(trace, outbreak);
    return trace;
}

std::vector<double> analytic_si_curve(double population, double beta, double initial_infected, std::size_t ticks) {
    if (!(population > 0.0)) throw SimulationError("population must be positive");
    if (!(initial_infected > 0.0 && initial_infected <= population))
        throw SimulationError("initial infected must lie in (0, N]");
    std::vector<double> curve(ticks + 1);
    const double susceptible0 = population - initial_infected;
    for (std::size_t t = 0; t <= ticks; ++t) {
        // I(t) = N I0 / (I0 + S0 e^{-beta t})
        const double decay = std::exp(-beta * static_cast<double>(t));
        curve[t] = population * initial_infected / (initial_infected + susceptible0 * decay);
    }
    return curve;
}

void write_trace_csv(std::ostream& out, const EpidemicTrace& trace) {
    out << "tick,infected,viral_sends\n";
    for (std::size_t t = 0; t < trace.infected.size(); ++t)
        out << t << ',' << trace.infected[t] << ',' << trace.viral_sends[t] << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const RunSummary> runs) {
    out << "run_id,m,s,p,rho,final_fraction\n";
    for (const auto& r : runs)
        out << r.run_id << ',' << shortest(r.params.m) << ',' << r.params.s << ',' << shortest(r.params.p) << ','
            << shortest(r.params.rho) << ',' << shortest(r.final_fraction) << '\n';
}

}  // namespace mmsv
