#include "mmsvirus/temporal.hpp"

#include <cmath>
#include <ostream>

namespace mmsv {

void TemporalParams::validate() const {
    base.validate();
    if (!(period_days > 0.0)) throw SimulationError("attack period T must be positive");
    if (!(horizon_days >= 0.0)) throw SimulationError("horizon must be non-negative");
    if (day_start_bin > day_end_bin || day_end_bin > kBinsPerDay)
        throw SimulationError("daytime window must lie within one day");
}

namespace {

double raw_attack_probability(double period_days, double bin_fraction, std::size_t steps_per_bin) {
    if (!(period_days > 0.0)) throw SimulationError("attack period T must be positive");
    if (!(bin_fraction >= 0.0 && bin_fraction <= 1.0)) throw SimulationError("bin fraction must lie in [0, 1]");
    if (steps_per_bin == 0) throw SimulationError("steps_per_bin must be positive");
    return (static_cast<double>(kDaysPerWeek) / period_days) * bin_fraction / static_cast<double>(steps_per_bin);
}

}  // namespace

double per_step_attack_probability(double period_days, double bin_fraction, std::size_t steps_per_bin) {
    return std::min(1.0, raw_attack_probability(period_days, bin_fraction, steps_per_bin));
}

bool attack_probability_clamped(double period_days, double bin_fraction, std::size_t steps_per_bin) {
    return raw_attack_probability(period_days, bin_fraction, steps_per_bin) > 1.0;
}

TemporalTrace run_temporal(const CallGraph& graph, const TemporalParams& params, const VolumeProfile& profile,
                           std::optional<NodeId> seed_node, const ThresholdProfile* thresholds) {
    params.validate();
    Rng seed_rng(derive_seed(params.base.seed, 0));
    const NodeId seed = seed_node ? *seed_node : draw_seed_node(graph, params.base.target_os, seed_rng);
    const NodeId seeds[] = {seed};
    return run_temporal(graph, params, profile, seeds, thresholds);
}

TemporalTrace run_temporal(const CallGraph& graph, const TemporalParams& params, const VolumeProfile& profile,
                           std::span<const NodeId> seed_nodes, const ThresholdProfile* thresholds) {
    params.validate();
    profile.validate();
    if (seed_nodes.empty()) throw SimulationError("at least one seed handset is required");
    const std::size_t steps_per_bin = profile.steps_per_bin;
    const double bin_minutes = params.base.tau_minutes * static_cast<double>(steps_per_bin);
    if (std::abs(bin_minutes - 120.0) > 1e-9)
        throw SimulationError("tau * steps_per_bin must equal two hours");
    if (params.halt_on_detect && !thresholds) throw SimulationError("halt_on_detect requires thresholds");

    const double bins_per_day = static_cast<double>(kBinsPerDay);
    const auto total_bins = static_cast<std::size_t>(std::ceil(params.horizon_days * bins_per_day - 1e-9));
    const std::size_t max_ticks = params.base.max_steps;

    std::array<double, kBinsPerWeek> probability{};
    TemporalTrace trace;
    trace.week_offset_bins = params.week_offset_bins;
    for (std::size_t b = 0; b < kBinsPerWeek; ++b) {
        const std::size_t in_day = b % kBinsPerDay;
        const bool gated = params.daytime_only && (in_day < params.day_start_bin || in_day >= params.day_end_bin);
        probability[b] = gated ? 0.0 : per_step_attack_probability(params.period_days, profile.bins[b], steps_per_bin);
        if (!gated && attack_probability_clamped(params.period_days, profile.bins[b], steps_per_bin))
            ++trace.clamped_bins;
    }

    Outbreak outbreak(graph, params.base);
    for (NodeId s : seed_nodes) {
        if (s >= graph.size() || graph.os(s) != params.base.target_os)
            throw SimulationError("seed handset does not run the target OS");
        outbreak.infect(s, 0);
    }
    trace.seed_node = seed_nodes.front();

    Rng rng(derive_seed(params.base.seed, 1));
    // Attack ticks within the current bin, by offset. Geometric gaps are
    // exact for per-step Bernoulli trials at a constant probability.
    std::vector<std::vector<NodeId>> due(steps_per_bin);
    double q = 0.0;
    auto schedule = [&](NodeId u, std::size_t from) {
        const std::uint64_t gap = rng.geometric(q);
        if (gap < steps_per_bin - from) due[from + gap].push_back(u);
    };

    for (std::size_t g = 0; g < total_bins; ++g) {
        const std::size_t bin_start = g * steps_per_bin;
        if (bin_start >= max_ticks) break;
        q = probability[(g + params.week_offset_bins) % kBinsPerWeek];
        for (auto& slot : due) slot.clear();
        if (q > 0.0)
            for (NodeId u : outbreak.attackers()) schedule(u, 0);

        std::uint64_t sends = 0;
        const std::size_t steps = std::min(steps_per_bin, max_ticks - bin_start);
        for (std::size_t off = 0; off < steps; ++off) {
            const Tick tick = bin_start + off;
            // schedule() only appends to later offsets, so `due[off]` is stable here
            for (std::size_t i = 0; i < due[off].size(); ++i) {
                const NodeId u = due[off][i];
                ++sends;
                const bool infected = outbreak.attack(u, tick, rng);
                if (outbreak.handset(u).budget_remaining > 0 && off + 1 < steps_per_bin) schedule(u, off + 1);
                if (infected && off + 1 < steps_per_bin) schedule(outbreak.infection_order().back(), off + 1);
            }
        }
        outbreak.prune_attackers();
        trace.infected.push_back(outbreak.infected_count());
        trace.viral_volume.push_back(sends);

        const std::size_t week_bin = (g + params.week_offset_bins) % kBinsPerWeek;
        if (thresholds && !trace.first_detection_bin && static_cast<double>(sends) > thresholds->delta_v[week_bin]) {
            trace.first_detection_bin = g;
            if (params.halt_on_detect) {
                trace.halted = true;
                break;
            }
        }
        if (outbreak.attackers().empty()) break;
    }

    trace.susceptible_base = outbreak.susceptible_base();
    trace.final_infected = outbreak.infected_count();
    trace.final_infected_fraction =
        static_cast<double>(trace.final_infected) / static_cast<double>(trace.susceptible_base);
    trace.infected_nodes = outbreak.infection_order();
    for (NodeId u : trace.infected_nodes) {
        trace.lifetime_sends.push_back(outbreak.handset(u).sends);
        trace.total_sends += outbreak.handset(u).sends;
    }
    return trace;
}

void write_temporal_trace_csv(std::ostream& out, const TemporalTrace& trace, std::size_t steps_per_bin) {
    out << "tick,infected,viral_sends,bin_global_index,viral_volume\n";
    for (std::size_t g = 0; g < trace.infected.size(); ++g)
        out << g * steps_per_bin << ',' << trace.infected[g] << ',' << trace.viral_volume[g] << ',' << g << ','
            << trace.viral_volume[g] << '\n';
}

}  // namespace mmsv
