#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mmsvirus/callgraph.hpp"
#include "mmsvirus/random.hpp"

namespace mmsv {

using Tick = std::uint64_t;

/// Budget value that never runs out within any feasible horizon.
inline constexpr std::uint64_t kUnlimitedBudget = UINT64_MAX;

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Epidemic knobs shared by the naive and temporal engines.
struct SimParams {
    double m = 0.30;            // market share of the susceptible OS
    std::uint64_t s = 100;      // lifetime viral sends per infected handset
    double p = 0.06;            // probability a scan reaches an active number
    double rho = 0.0;           // probability a send is a scan
    double tau_minutes = 2.0;   // delivery + install delay; one tick
    Tick max_steps = 1'000'000;
    Seed seed = 1;
    OsLabel target_os = 0;
    // Infection rate and mean contacts of the SI model; beta = mu * k.
    double mu = 1.0;
    double mean_contacts = 1.0;
    // Draw address-book targets without replacement (off: with replacement).
    bool topological_no_repeat = false;

    double beta() const noexcept { return mu * mean_contacts; }
    void validate() const;
};

enum class Compartment : std::uint8_t { Susceptible, Infected };

struct HandsetState {
    Compartment compartment = Compartment::Susceptible;
    std::uint64_t budget_remaining = 0;
    std::optional<Tick> infected_at;  // tick the infection becomes active
    std::uint64_t sends = 0;          // lifetime viral sends
};

enum class AttackKind : std::uint8_t { Topological, Scan };

struct Attack {
    AttackKind kind = AttackKind::Topological;
    std::optional<NodeId> target;  // empty on a miss
};

/// One viral send from attacker: a scan with probability rho (reaching a
/// uniformly random handset with probability p), otherwise a uniform draw
/// from the attacker's address book. Empty books and failed scans miss.
Attack select_target(NodeId attacker, const CallGraph& graph, double rho, double p, Rng& rng);

/// Per-run mutable state of every handset plus the active-attacker list.
class Outbreak {
public:
    Outbreak(const CallGraph& graph, const SimParams& params);

    /// Marks node infected, active from tick `effective`. Returns false if
    /// the node is already infected or does not run the target OS.
    bool infect(NodeId node, Tick effective);

    /// One viral send by attacker (consumes one unit of budget) and its
    /// effect: a hit on a susceptible target-OS handset infects it from
    /// tick + 1. Returns true when the send infected someone.
    bool attack(NodeId attacker, Tick tick, Rng& rng);

    /// Every handset active at tick (infected_at <= tick) with budget
    /// left sends once. Returns the number of sends.
    std::uint64_t step(Tick tick, Rng& rng);

    std::span<const HandsetState> handsets() const noexcept { return handsets_; }
    const HandsetState& handset(NodeId u) const noexcept { return handsets_[u]; }
    std::size_t infected_count() const noexcept { return infection_order_.size(); }
    /// Infected handsets whose infection is active by tick.
    std::size_t infected_by(Tick tick) const noexcept;
    std::size_t susceptible_base() const noexcept { return susceptible_base_; }
    const std::vector<NodeId>& infection_order() const noexcept { return infection_order_; }
    /// Active attackers with budget left, in infection order.
    const std::vector<NodeId>& attackers() const noexcept { return attackers_; }
    /// Drops attackers whose budget is exhausted.
    void prune_attackers();

private:
    std::optional<NodeId> pick_without_repeat(NodeId attacker, Rng& rng);

    const CallGraph& graph_;
    const SimParams& params_;
    std::vector<HandsetState> handsets_;
    std::vector<NodeId> infection_order_;
    std::vector<NodeId> attackers_;
    std::size_t susceptible_base_ = 0;
    // Remaining untried contacts per handset (no-repeat mode only).
    std::vector<std::vector<NodeId>> untried_;
    std::vector<bool> pool_ready_;
};

struct EpidemicTrace {
    std::vector<std::uint64_t> infected;     // infected and active at tick t
    std::vector<std::uint64_t> viral_sends;  // sends during tick t
    NodeId seed_node = 0;
    std::size_t susceptible_base = 0;        // N
    std::uint64_t final_infected = 0;        // includes infections pending at the horizon
    double final_infected_fraction = 0.0;    // final_infected / N
    std::vector<NodeId> infected_nodes;      // infection order
    std::vector<std::uint64_t> lifetime_sends;  // parallel to infected_nodes
    std::uint64_t total_sends = 0;
};

/// Uniformly random target-OS handset (rejection over all nodes).
NodeId draw_seed_node(const CallGraph& graph, OsLabel target_os, Rng& rng);

/// Worst-case spread: every active handset sends once per tick until the
/// horizon or until no infected handset has budget left.
EpidemicTrace run_naive(const CallGraph& graph, const SimParams& params,
                        std::optional<NodeId> seed_node = std::nullopt);

/// Closed-form solution of dI/dt = beta * S * I / N at ticks 0..ticks.
std::vector<double> analytic_si_curve(double population, double beta, double initial_infected, std::size_t ticks);

/// CSV `tick,infected,viral_sends`.
void write_trace_csv(std::ostream& out, const EpidemicTrace& trace);

struct RunSummary {
    std::size_t run_id = 0;
    SimParams params;
    double final_fraction = 0.0;
};

/// CSV `run_id,m,s,p,rho,final_fraction`.
void write_summary_csv(std::ostream& out, std::span<const RunSummary> runs);

}  // namespace mmsv
