// mmsvirus: command-line front end for the call-graph, epidemic and
// detection library.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmsvirus/callgraph.hpp"
#include "mmsvirus/detection.hpp"
#include "mmsvirus/epidemic.hpp"
#include "mmsvirus/experiments.hpp"
#include "mmsvirus/format.hpp"
#include "mmsvirus/percolation.hpp"
#include "mmsvirus/temporal.hpp"

namespace {

using namespace mmsv;

struct GraphOptions {
    std::string path;
    std::size_t n = 50'000;
    std::string model = "power-law";
    double gamma = PowerLawCutoff{}.gamma;
    double kappa = PowerLawCutoff{}.kappa;
    std::size_t k_min = PowerLawCutoff{}.k_min;
    std::size_t k = 2;
    std::uint64_t seed = GraphSpec{}.seed;

    void add(CLI::App* app) {
        app->add_option("--graph", path, "Read the call graph from an edge-list file");
        app->add_option("--n", n, "Handsets in a generated graph");
        app->add_option("--model", model, "Degree model: power-law | fixed")
            ->check(CLI::IsMember({"power-law", "fixed"}));
        app->add_option("--gamma", gamma, "Power-law exponent");
        app->add_option("--kappa", kappa, "Exponential cutoff");
        app->add_option("--k-min", k_min, "Minimum degree");
        app->add_option("--k", k, "Degree for the fixed model");
        app->add_option("--graph-seed", seed, "Seed for graph generation");
    }

    DegreeModel degree_model() const {
        if (model == "fixed") return FixedDegree{k};
        return PowerLawCutoff{gamma, kappa, k_min, 0};
    }

    CallGraph load() const {
        if (!path.empty()) return read_graph(std::filesystem::path(path));
        return generate_graph(n, degree_model(), seed);
    }
};

// Labels OS 0 with share m unless the graph came from a file and m is unset.
CallGraph label(const CallGraph& g, std::optional<double> m, std::uint64_t os_seed) {
    if (!m) return g;
    const double shares[] = {*m, 1.0 - *m};
    return assign_os(g, shares, os_seed);
}

struct Output {
    std::string path;
    std::ofstream file;

    std::ostream& stream() {
        if (path.empty() || path == "-") return std::cout;
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + path);
        return file;
    }
};

struct ProfileOptions {
    std::string path;
    std::string shape = "diurnal";
    double day_night_ratio = DiurnalWeeklyShape{}.day_night_ratio;
    double peak_boost = DiurnalWeeklyShape{}.peak_boost;

    void add(CLI::App* app) {
        app->add_option("--profile", path, "Volume profile CSV (day,bin_index,fraction)");
        app->add_option("--profile-shape", shape, "Synthetic profile: uniform | diurnal")
            ->check(CLI::IsMember({"uniform", "diurnal"}));
        app->add_option("--day-night-ratio", day_night_ratio, "Daytime/nighttime bin volume ratio");
        app->add_option("--peak-boost", peak_boost, "Volume multiplier on Sun/Mon/Tue");
    }

    VolumeProfile load() const {
        if (!path.empty()) {
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot open " + path);
            return read_profile_csv(in);
        }
        if (shape == "uniform") return make_synthetic_profile(UniformShape{});
        DiurnalWeeklyShape d;
        d.day_night_ratio = day_night_ratio;
        d.peak_boost = peak_boost;
        return make_synthetic_profile(d);
    }
};

struct HistoryOptions {
    double weekly_total = 0.0;
    double noise = ProfileSpec{}.noise_sigma;
    double week_noise = ProfileSpec{}.week_sigma;
    std::size_t weeks = ProfileSpec{}.history_weeks;
    std::uint64_t seed = ProfileSpec{}.history_seed;

    void add(CLI::App* app) {
        app->add_option("--weekly-total", weekly_total, "Organic MMS per week (default scaled to n)");
        app->add_option("--noise", noise, "Per-bin multiplicative noise sigma");
        app->add_option("--week-noise", week_noise, "Shared per-week multiplicative noise sigma");
        app->add_option("--history-weeks", weeks, "Weeks of synthetic history");
        app->add_option("--history-seed", seed, "Seed for the synthetic history");
    }

    ThresholdProfile thresholds(const VolumeProfile& profile, std::size_t n) const {
        const double total = weekly_total > 0.0 ? weekly_total : scaled_weekly_total(n);
        return compute_threshold(synthesize_history(profile, total, noise, weeks, seed, week_noise));
    }
};

std::vector<std::size_t> parse_bins(std::istream& in, std::vector<std::uint64_t>& volume) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    }
    const auto col = std::find(cols.begin(), cols.end(), "viral_volume");
    if (col == cols.end()) throw std::runtime_error("trace has no viral_volume column");
    const auto index = static_cast<std::size_t>(col - cols.begin());
    std::vector<std::size_t> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (std::size_t i = 0; i <= index; ++i) std::getline(ss, cell, ',');
        volume.push_back(std::stoull(cell));
        rows.push_back(volume.size() - 1);
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MMS virus spreading on OS-fragmented call graphs"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a synthetic OS-labeled call graph");
    GraphOptions gen_graph;
    gen_graph.add(gen);
    std::optional<double> gen_m;
    std::vector<double> gen_shares;
    bool gen_quota = false;
    std::uint64_t gen_os_seed = 1;
    std::optional<std::uint32_t> gen_root;
    std::size_t gen_radius = 4;
    Output gen_out;
    gen->add_option("--m", gen_m, "Share of OS 0 (two OS classes)");
    gen->add_option("--shares", gen_shares, "Market shares of every OS class");
    gen->add_flag("--quota", gen_quota, "Exact-quota OS assignment instead of per-node draws");
    gen->add_option("--os-seed", gen_os_seed, "Seed for OS assignment");
    gen->add_option("--root", gen_root, "Emit only the neighborhood of this node");
    gen->add_option("--radius", gen_radius, "Neighborhood radius in hops");
    gen->add_option("--out", gen_out.path, "Output file (default stdout)");

    // percolate
    auto* perc = app.add_subcommand("percolate", "Susceptible-subgraph components and scan augmentation");
    GraphOptions perc_graph;
    perc_graph.add(perc);
    std::vector<double> perc_m;
    std::vector<std::size_t> perc_links;
    std::uint64_t perc_seed = 1;
    unsigned perc_os = 0;
    Output perc_out;
    perc->add_option("--m", perc_m, "Market shares to sweep (G_m curve)");
    perc->add_option("--extra-links", perc_links, "Scan-link counts (augmentation curve on the graph's labels)");
    perc->add_option("--target-os", perc_os, "Susceptible OS label");
    perc->add_option("--seed", perc_seed, "Seed for OS assignment / scan links");
    perc->add_option("--out", perc_out.path, "Output CSV (default stdout)");

    // shared epidemic options
    SimParams sim;
    std::optional<double> opt_m;
    std::optional<double> opt_s;
    std::uint64_t os_seed = 1;
    std::optional<std::uint32_t> seed_node;
    auto add_sim = [&](CLI::App* sc) {
        sc->add_option("--m", opt_m, "Market share of the susceptible OS (relabels the graph)");
        sc->add_option("--s", opt_s, "Maximum attack number (inf = unlimited)");
        sc->add_option("--p", sim.p, "Effective scanning probability");
        sc->add_option("--rho", sim.rho, "Random-attack probability");
        sc->add_option("--seed", sim.seed, "Run seed");
        sc->add_option("--os-seed", os_seed, "Seed for OS assignment");
        sc->add_option("--seed-node", seed_node, "Initially infected handset (default random)");
        sc->add_option("--max-steps", sim.max_steps, "Horizon in two-minute ticks");
        sc->add_flag("--no-repeat", sim.topological_no_repeat, "Address-book draws without replacement");
    };
    auto apply_sim = [&] {
        if (opt_m) sim.m = *opt_m;
        if (opt_s) {
            TemporalParams tp;
            tp.base = sim;
            set_axis(tp, Axis::S, *opt_s);
            sim = tp.base;
        }
    };

    auto* naive = app.add_subcommand("run-naive", "Worst-case spread, one send per infected handset per tick");
    GraphOptions naive_graph;
    naive_graph.add(naive);
    add_sim(naive);
    Output naive_out;
    naive->add_option("--out", naive_out.path, "Trace CSV (default stdout)");

    auto* temporal = app.add_subcommand("run-temporal", "Stealth spread following the weekly MMS volume pattern");
    GraphOptions temporal_graph;
    temporal_graph.add(temporal);
    add_sim(temporal);
    TemporalParams tparams;
    ProfileOptions temporal_profile;
    HistoryOptions temporal_history;
    Output temporal_out;
    temporal->add_option("--T-days", tparams.period_days, "Average attack period in days");
    temporal->add_option("--horizon-days", tparams.horizon_days, "Simulated days");
    temporal->add_option("--week-offset", tparams.week_offset_bins, "Week bin at simulation start");
    temporal->add_flag("--daytime-only", tparams.daytime_only, "No attacks outside 08:00-22:00");
    temporal->add_flag("--halt-on-detect", tparams.halt_on_detect, "Stop at the first detection");
    temporal_profile.add(temporal);
    temporal_history.add(temporal);
    temporal->add_option("--out", temporal_out.path, "Per-bin trace CSV (default stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Replicated parameter sweep");
    Scenario sweep_sc;
    sweep_sc.label = "sweep";
    std::string sweep_engine = "naive";
    std::string sweep_axis = "rho";
    std::vector<double> sweep_values;
    std::string sweep_out;
    bool sweep_no_traces = false;
    GraphOptions sweep_graph;
    sweep_graph.add(sweep);
    add_sim(sweep);
    sweep->add_option("--engine", sweep_engine, "naive | temporal")->check(CLI::IsMember({"naive", "temporal"}));
    sweep->add_option("--axis", sweep_axis, "rho | s | p | m | T_days");
    sweep->add_option("--values", sweep_values, "Axis values (default rho grid of 21 points)");
    sweep->add_option("--replicates", sweep_sc.replicates, "Runs per point");
    sweep->add_option("--T-days", sweep_sc.params.period_days, "Average attack period (temporal)");
    sweep->add_option("--horizon-days", sweep_sc.params.horizon_days, "Simulated days (temporal)");
    sweep->add_option("--threads", sweep_sc.threads, "Worker threads (0 = all cores)");
    sweep->add_option("--out", sweep_out, "Output directory");
    sweep->add_flag("--no-traces", sweep_no_traces, "Skip per-run trace files");

    // detect
    auto* det = app.add_subcommand("detect", "Compare a temporal trace with the operator threshold");
    std::string det_trace;
    std::string det_thresholds;
    std::size_t det_n = 50'000;
    std::size_t det_offset = 0;
    ProfileOptions det_profile;
    HistoryOptions det_history;
    Output det_out;
    std::string det_thresholds_out;
    det->add_option("--trace", det_trace, "Temporal trace CSV with a viral_volume column")->required();
    det->add_option("--thresholds", det_thresholds, "Threshold CSV (bin_index,delta_v); default synthesized");
    det->add_option("--n", det_n, "Handsets, for scaling the synthetic weekly volume");
    det->add_option("--week-offset", det_offset, "Week bin of the trace's first bin");
    det_profile.add(det);
    det_history.add(det);
    det->add_option("--thresholds-out", det_thresholds_out, "Also write the thresholds used");
    det->add_option("--out", det_out.path, "Detection report CSV (default stdout)");

    // scenario
    auto* scen = app.add_subcommand("scenario", "Run built-in or configured scenarios");
    std::vector<std::string> scen_names;
    std::string scen_config;
    std::string scen_out;
    bool scen_list = false;
    bool scen_no_traces = false;
    std::optional<std::size_t> scen_replicates;
    std::optional<std::size_t> scen_n;
    std::size_t scen_threads = 0;
    scen->add_option("name", scen_names, "Scenario label(s)");
    scen->add_option("--config", scen_config, "JSON scenario file or a run manifest");
    scen->add_flag("--list", scen_list, "List built-in scenarios");
    scen->add_option("--out", scen_out, "Output directory (default $MMSVIRUS_OUT or ./mmsvirus-out)");
    scen->add_option("--replicates", scen_replicates, "Override replicate count");
    scen->add_option("--n", scen_n, "Override graph size");
    scen->add_option("--threads", scen_threads, "Worker threads (0 = all cores)");
    scen->add_flag("--no-traces", scen_no_traces, "Skip per-run trace files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            CallGraph g = gen_graph.load();
            if (gen_m) gen_shares = {*gen_m, 1.0 - *gen_m};
            if (!gen_shares.empty())
                g = gen_quota ? assign_os_quota(g, gen_shares, gen_os_seed) : assign_os(g, gen_shares, gen_os_seed);
            if (gen_root) g = neighborhood_subgraph(g, *gen_root, gen_radius);
            write_graph(gen_out.stream(), g);
        } else if (*perc) {
            const CallGraph g = perc_graph.load();
            auto& out = perc_out.stream();
            if (!perc_links.empty()) {
                const auto curve = scan_augmentation_curve(g, static_cast<OsLabel>(perc_os), perc_links, perc_seed);
                out << "extra_links,largest_fraction\n";
                for (std::size_t i = 0; i < curve.size(); ++i) out << perc_links[i] << ',' << shortest(curve[i]) << '\n';
            } else {
                if (perc_m.empty()) perc_m = {0.03, 0.1, 0.2, 0.25, 0.3, 0.5, 1.0};
                write_component_csv(out, giant_fraction_curve(g, perc_m, perc_seed));
            }
        } else if (*naive) {
            apply_sim();
            const CallGraph g = label(naive_graph.load(), opt_m, os_seed);
            const auto trace = run_naive(g, sim, seed_node ? std::optional<NodeId>(*seed_node) : std::nullopt);
            write_trace_csv(naive_out.stream(), trace);
            std::cerr << "seed_node=" << trace.seed_node << " infected=" << trace.final_infected << '/'
                      << trace.susceptible_base << " fraction=" << shortest(trace.final_infected_fraction)
                      << " sends=" << trace.total_sends << '\n';
        } else if (*temporal) {
            apply_sim();
            tparams.base = sim;
            const CallGraph g = label(temporal_graph.load(), opt_m, os_seed);
            const auto profile = temporal_profile.load();
            const auto thresholds = temporal_history.thresholds(profile, g.size());
            const auto trace = run_temporal(g, tparams, profile,
                                            seed_node ? std::optional<NodeId>(*seed_node) : std::nullopt, &thresholds);
            if (trace.clamped_bins > 0)
                std::cerr << "warning: attack probability clamped to 1 in " << trace.clamped_bins << " week bins\n";
            write_temporal_trace_csv(temporal_out.stream(), trace, profile.steps_per_bin);
            std::cerr << "seed_node=" << trace.seed_node << " infected=" << trace.final_infected << '/'
                      << trace.susceptible_base << " fraction=" << shortest(trace.final_infected_fraction)
                      << " sends=" << trace.total_sends << " detected="
                      << (trace.first_detection_bin ? "bin " + std::to_string(*trace.first_detection_bin) : "no")
                      << '\n';
        } else if (*sweep) {
            apply_sim();
            sweep_sc.engine = sweep_engine == "naive" ? Engine::Naive : Engine::Temporal;
            sweep_sc.params.base = sim;
            sweep_sc.sweep_axis = parse_axis(sweep_axis);
            sweep_sc.sweep_values = sweep_values.empty() ? default_rho_grid() : sweep_values;
            sweep_sc.master_seed = sim.seed;
            sweep_sc.graph = {sweep_graph.n, sweep_graph.degree_model(), sweep_graph.seed};
            if (!sweep_graph.path.empty())
                throw std::runtime_error("sweep generates its graph; use a scenario config for other graphs");
            const auto result = run_scenario(sweep_sc);
            const auto out_dir = sweep_out.empty() ? default_output_dir() : std::filesystem::path(sweep_out);
            emit({result}, out_dir, !sweep_no_traces);
            for (const auto& pt : result.points)
                std::cout << sweep_axis << '=' << shortest(*pt.axis_value) << " avg=" << shortest(pt.avg)
                          << " min=" << shortest(pt.min) << " max=" << shortest(pt.max) << '\n';
        } else if (*det) {
            std::ifstream in(det_trace);
            if (!in) throw std::runtime_error("cannot open " + det_trace);
            std::vector<std::uint64_t> volume;
            parse_bins(in, volume);
            ThresholdProfile thresholds;
            if (!det_thresholds.empty()) {
                std::ifstream tin(det_thresholds);
                if (!tin) throw std::runtime_error("cannot open " + det_thresholds);
                thresholds = read_threshold_csv(tin);
            } else {
                thresholds = det_history.thresholds(det_profile.load(), det_n);
            }
            if (!det_thresholds_out.empty()) {
                std::ofstream tout(det_thresholds_out);
                write_threshold_csv(tout, thresholds);
            }
            write_detection_csv(det_out.stream(), DetectionReport{detect(volume, thresholds, det_offset)});
        } else if (*scen) {
            if (scen_list) {
                for (const auto& sc : builtin_scenarios()) std::cout << sc.label << "  " << sc.description << '\n';
                return 0;
            }
            std::vector<Scenario> scenarios;
            bool traces = !scen_no_traces;
            if (!scen_config.empty()) {
                scenarios = load_scenarios(scen_config);
                std::ifstream in(scen_config);
                std::stringstream ss;
                ss << in.rdbuf();
                const auto root = nlohmann::json::parse(ss.str());
                if (root.contains("write_traces") && !scen_no_traces) traces = root["write_traces"].get<bool>();
                if (!scen_names.empty())
                    std::erase_if(scenarios, [&](const Scenario& s) {
                        return std::find(scen_names.begin(), scen_names.end(), s.label) == scen_names.end();
                    });
            } else {
                if (scen_names.empty()) throw std::runtime_error("name a scenario, or use --list / --config");
                for (const auto& name : scen_names) scenarios.push_back(builtin_scenario(name));
            }
            if (scenarios.empty()) throw std::runtime_error("no scenarios selected");
            std::vector<SweepResult> results;
            for (auto& sc : scenarios) {
                if (scen_replicates) {
                    sc.replicates = *scen_replicates;
                    sc.replicate_seeds.clear();
                }
                if (scen_n) sc.graph.n = *scen_n;
                sc.threads = scen_threads;
                std::cerr << "running " << sc.label << '\n';
                results.push_back(run_scenario(sc));
                for (const auto& pt : results.back().points) {
                    if (pt.series_value) std::cout << axis_name(*sc.series_axis) << '=' << shortest(*pt.series_value) << ' ';
                    if (pt.axis_value) std::cout << axis_name(*sc.sweep_axis) << '=' << shortest(*pt.axis_value) << ' ';
                    std::cout << "avg=" << shortest(pt.avg) << " min=" << shortest(pt.min) << " max=" << shortest(pt.max);
                    if (sc.engine == Engine::Temporal) std::cout << " detected=" << shortest(pt.detection_rate);
                    std::cout << '\n';
                }
                for (const auto& gp : results.back().giant)
                    std::cout << "G_m(m=" << shortest(gp.m) << ")=" << shortest(gp.report.largest_fraction) << '\n';
            }
            const auto out_dir = scen_out.empty() ? default_output_dir() : std::filesystem::path(scen_out);
            const auto files = emit(results, out_dir, traces);
            std::cerr << "wrote " << files.size() << " files under " << out_dir.string() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
