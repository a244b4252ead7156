#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mmsvirus/callgraph.hpp"
#include "mmsvirus/detection.hpp"
#include "mmsvirus/epidemic.hpp"
#include "mmsvirus/volume_profile.hpp"

namespace mmsv {

inline constexpr double kHoursPerDay = 24.0;

struct TemporalParams {
    SimParams base;
    double period_days = 1.0;   // average time between viral sends (T)
    double horizon_days = 365.0;
    std::size_t week_offset_bins = 0;  // week bin of simulation start
    bool daytime_only = false;         // zero attack probability outside [day_start_bin, day_end_bin)
    std::size_t day_start_bin = 4;
    std::size_t day_end_bin = 11;
    bool halt_on_detect = false;       // stop at the first detection (needs thresholds)

    void validate() const;
};

/// (7 / T) * bin_fraction / steps_per_bin: an infected handset sends 7/T
/// messages a week on average, distributed over the week like organic
/// traffic. Values above 1 are clamped to 1.
double per_step_attack_probability(double period_days, double bin_fraction, std::size_t steps_per_bin = kStepsPerBin);

/// True when the unclamped formula exceeds 1.
bool attack_probability_clamped(double period_days, double bin_fraction, std::size_t steps_per_bin = kStepsPerBin);

struct TemporalTrace {
    std::vector<std::uint64_t> infected;      // total infected at the end of each global bin
    std::vector<std::uint64_t> viral_volume;  // viral sends during each global bin
    NodeId seed_node = 0;
    std::size_t susceptible_base = 0;
    std::uint64_t final_infected = 0;
    double final_infected_fraction = 0.0;
    std::vector<NodeId> infected_nodes;
    std::vector<std::uint64_t> lifetime_sends;
    std::uint64_t total_sends = 0;
    std::optional<std::size_t> first_detection_bin;  // only with thresholds
    bool halted = false;
    std::size_t clamped_bins = 0;  // week bins whose probability was clamped
    std::size_t week_offset_bins = 0;
};

/// Stealth spread following the weekly volume profile. Each two-minute
/// step inside week bin b, every active handset with budget left sends
/// with probability per_step_attack_probability(T, bins[b]); targets and
/// infection are as in the naive model. Detection against thresholds is
/// evaluated bin by bin when thresholds are given.
TemporalTrace run_temporal(const CallGraph& graph, const TemporalParams& params, const VolumeProfile& profile,
                           std::optional<NodeId> seed_node = std::nullopt,
                           const ThresholdProfile* thresholds = nullptr);

/// Same, with several handsets infected at tick 0.
TemporalTrace run_temporal(const CallGraph& graph, const TemporalParams& params, const VolumeProfile& profile,
                           std::span<const NodeId> seed_nodes, const ThresholdProfile* thresholds = nullptr);

/// One row per global bin: `tick,infected,viral_sends,bin_global_index,viral_volume`.
/// tick is the bin's first tick; infected is the count at bin end;
/// viral_sends and viral_volume both give the sends within the bin.
void write_temporal_trace_csv(std::ostream& out, const TemporalTrace& trace,
                              std::size_t steps_per_bin = kStepsPerBin);

}  // namespace mmsv
