#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mmsvirus/callgraph.hpp"
#include "mmsvirus/detection.hpp"
#include "mmsvirus/epidemic.hpp"
#include "mmsvirus/percolation.hpp"
#include "mmsvirus/temporal.hpp"
#include "mmsvirus/volume_profile.hpp"

namespace mmsv {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Engine { Naive, Temporal };
enum class Axis { Rho, S, P, M, PeriodDays };

std::string_view axis_name(Axis axis);
Axis parse_axis(std::string_view name);

/// Desk-scale stand-in for the operator call graph.
struct GraphSpec {
    std::size_t n = 50'000;
    DegreeModel model = PowerLawCutoff{};
    Seed seed = 20100101;
};

/// Weekly volume pattern and the synthetic history behind the thresholds.
struct ProfileSpec {
    ProfileShape shape = DiurnalWeeklyShape{};
    Seed shape_seed = 0;
    double weekly_total = 0.0;  // 0: scaled_weekly_total(graph n)
    double noise_sigma = 0.15;
    double week_sigma = 0.0;
    std::size_t history_weeks = 12;
    Seed history_seed = 84;
};

struct Scenario {
    std::string label;
    std::string description;
    Engine engine = Engine::Naive;
    GraphSpec graph;
    TemporalParams params;  // naive runs use params.base only
    ProfileSpec profile;
    std::size_t replicates = 10;
    Seed master_seed = 1;
    std::vector<Seed> replicate_seeds;  // empty: derived from master_seed
    std::optional<Axis> sweep_axis;
    std::vector<double> sweep_values;
    std::optional<Axis> series_axis;
    std::vector<double> series_values;
    bool report_giant = false;  // G_m for every distinct m
    std::size_t threads = 0;    // 0: hardware concurrency

    void validate() const;
    Seed replicate_seed(std::size_t replicate) const;
};

/// Outcome of one replicate at one sweep point. Per-tick (naive) or
/// per-bin (temporal) series are kept for trace emission.
struct RunRecord {
    std::size_t run_id = 0;
    std::size_t replicate = 0;
    Seed seed = 0;
    NodeId seed_node = 0;
    std::size_t susceptible_base = 0;
    std::uint64_t final_infected = 0;
    double final_fraction = 0.0;
    std::uint64_t total_sends = 0;
    std::uint64_t max_lifetime_sends = 0;
    std::optional<std::size_t> first_detection_bin;
    std::vector<std::uint64_t> infected;
    std::vector<std::uint64_t> sends;
};

struct SweepPoint {
    std::optional<double> series_value;
    std::optional<double> axis_value;
    TemporalParams params;
    double avg = 0.0;
    double min = 0.0;
    double max = 0.0;
    double detection_rate = 0.0;
    std::vector<RunRecord> runs;
};

struct SweepResult {
    Scenario scenario;
    std::vector<SweepPoint> points;
    std::vector<GiantPoint> giant;               // when report_giant
    std::optional<VolumeProfile> profile;        // temporal only
    std::optional<ThresholdProfile> thresholds;  // temporal only
};

/// Applies an axis value to a parameter set.
void set_axis(TemporalParams& params, Axis axis, double value);

/// Runs every (series, sweep) point for all replicates. Deterministic for
/// a given scenario regardless of thread count.
SweepResult run_scenario(const Scenario& scenario);

/// Same, reusing an already generated (unlabeled) call graph.
SweepResult run_scenario(const Scenario& scenario, const CallGraph& graph);

CallGraph build_graph(const GraphSpec& spec);

std::vector<Scenario> builtin_scenarios();
const Scenario& builtin_scenario(std::string_view label);

/// Rho grid used when a sweep axis is rho and no values are given.
std::vector<double> default_rho_grid();

// Scenario config files are JSON: {"scenarios": [ {...}, ... ]}. The run
// manifest embeds the same structure, so any output directory can be
// regenerated from its manifest.
std::string scenarios_to_json(const std::vector<Scenario>& scenarios);
std::vector<Scenario> scenarios_from_json(const std::string& text);
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);

/// Writes summary.csv, sweep CSVs, traces/, percolation/profile/threshold
/// and detection CSVs as applicable, plus manifest.json. Returns the paths
/// written, manifest last.
std::vector<std::filesystem::path> emit(const std::vector<SweepResult>& results, const std::filesystem::path& out_dir,
                                        bool write_traces = true);

/// Default output directory: $MMSVIRUS_OUT or ./mmsvirus-out.
std::filesystem::path default_output_dir();

}  // namespace mmsv
