#include "mmsvirus/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mmsvirus/format.hpp"
#include "mmsvirus/percolation.hpp"

namespace mmsv {

using nlohmann::json;

namespace {
constexpr std::uint64_t kOsStream = 0x05;
}

std::string_view axis_name(Axis axis) {
    switch (axis) {
        case Axis::Rho: return "rho";
        case Axis::S: return "s";
        case Axis::P: return "p";
        case Axis::M: return "m";
        case Axis::PeriodDays: return "T_days";
    }
    return "?";
}

Axis parse_axis(std::string_view name) {
    for (Axis a : {Axis::Rho, Axis::S, Axis::P, Axis::M, Axis::PeriodDays})
        if (axis_name(a) == name) return a;
    throw ScenarioError("unknown sweep axis '" + std::string(name) + "'");
}

void set_axis(TemporalParams& params, Axis axis, double value) {
    switch (axis) {
        case Axis::Rho: params.base.rho = value; break;
        case Axis::P: params.base.p = value; break;
        case Axis::M: params.base.m = value; break;
        case Axis::PeriodDays: params.period_days = value; break;
        case Axis::S:
            if (std::isinf(value) || value >= 1.8e19) {
                params.base.s = kUnlimitedBudget;
            } else {
                if (!(value >= 0.0) || value != std::floor(value)) throw ScenarioError("s must be a whole number");
                params.base.s = static_cast<std::uint64_t>(value);
            }
            break;
    }
}

void Scenario::validate() const {
    if (replicates < 1) throw ScenarioError(label + ": replicates must be >= 1");
    if (!replicate_seeds.empty() && replicate_seeds.size() != replicates)
        throw ScenarioError(label + ": replicate_seeds must list one seed per replicate");
    if (sweep_axis && sweep_values.empty()) throw ScenarioError(label + ": sweep axis has no values");
    if (series_axis && series_values.empty()) throw ScenarioError(label + ": series axis has no values");
    if (graph.n == 0) throw ScenarioError(label + ": graph must have at least one node");
    try {
        validate_model(graph.model);
        params.validate();
    } catch (const std::exception& e) {
        throw ScenarioError(label + ": " + e.what());
    }
}

Seed Scenario::replicate_seed(std::size_t replicate) const {
    if (!replicate_seeds.empty()) return replicate_seeds.at(replicate);
    return derive_seed(master_seed, replicate);
}

CallGraph build_graph(const GraphSpec& spec) { return generate_graph(spec.n, spec.model, spec.seed); }

std::vector<double> default_rho_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    return grid;
}

// --- running ---------------------------------------------------------------

namespace {

struct PointSpec {
    std::optional<double> series_value;
    std::optional<double> axis_value;
    TemporalParams params;
};

std::vector<PointSpec> expand_points(const Scenario& sc) {
    const std::vector<std::optional<double>> series =
        sc.series_axis ? std::vector<std::optional<double>>(sc.series_values.begin(), sc.series_values.end())
                       : std::vector<std::optional<double>>{std::nullopt};
    const std::vector<std::optional<double>> sweep =
        sc.sweep_axis ? std::vector<std::optional<double>>(sc.sweep_values.begin(), sc.sweep_values.end())
                      : std::vector<std::optional<double>>{std::nullopt};
    std::vector<PointSpec> out;
    for (const auto& sv : series) {
        for (const auto& av : sweep) {
            PointSpec p{sv, av, sc.params};
            if (sv) set_axis(p.params, *sc.series_axis, *sv);
            if (av) set_axis(p.params, *sc.sweep_axis, *av);
            p.params.validate();
            out.push_back(std::move(p));
        }
    }
    return out;
}

template <class Trace>
std::uint64_t max_sends(const Trace& trace) {
    return trace.lifetime_sends.empty() ? 0 : *std::max_element(trace.lifetime_sends.begin(), trace.lifetime_sends.end());
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

SweepResult run_scenario(const Scenario& scenario) {
    scenario.validate();
    CallGraph graph;
    try {
        graph = build_graph(scenario.graph);
    } catch (const std::exception& e) {
        throw ScenarioError(scenario.label + ": " + e.what());
    }
    return run_scenario(scenario, graph);
}

SweepResult run_scenario(const Scenario& scenario, const CallGraph& graph) {
    scenario.validate();
    SweepResult result;
    result.scenario = scenario;
    try {
        const auto specs = expand_points(scenario);
        const Seed os_seed = derive_seed(scenario.master_seed, kOsStream);

        // One labeling per distinct m; the shared seed nests the susceptible sets.
        std::map<double, CallGraph> labeled;
        std::vector<double> distinct_m;
        for (const auto& spec : specs) {
            const double m = spec.params.base.m;
            if (labeled.contains(m)) continue;
            const double shares[] = {m, 1.0 - m};
            labeled.emplace(m, assign_os(graph, shares, os_seed));
            distinct_m.push_back(m);
        }
        if (scenario.report_giant) result.giant = giant_fraction_curve(graph, distinct_m, os_seed);

        if (scenario.engine == Engine::Temporal) {
            const auto& ps = scenario.profile;
            result.profile = make_synthetic_profile(ps.shape, ps.shape_seed);
            const double weekly = ps.weekly_total > 0.0 ? ps.weekly_total : scaled_weekly_total(graph.size());
            result.thresholds = compute_threshold(
                synthesize_history(*result.profile, weekly, ps.noise_sigma, ps.history_weeks, ps.history_seed, ps.week_sigma));
        }

        const std::size_t reps = scenario.replicates;
        result.points.resize(specs.size());
        for (std::size_t i = 0; i < specs.size(); ++i) {
            auto& pt = result.points[i];
            pt.series_value = specs[i].series_value;
            pt.axis_value = specs[i].axis_value;
            pt.params = specs[i].params;
            pt.runs.resize(reps);
        }

        parallel_for(specs.size() * reps, scenario.threads, [&](std::size_t task) {
            const std::size_t point = task / reps;
            const std::size_t rep = task % reps;
            TemporalParams params = specs[point].params;
            params.base.seed = scenario.replicate_seed(rep);
            const CallGraph& g = labeled.at(params.base.m);
            RunRecord rec;
            rec.run_id = task;
            rec.replicate = rep;
            rec.seed = params.base.seed;
            if (scenario.engine == Engine::Naive) {
                auto trace = run_naive(g, params.base);
                rec.seed_node = trace.seed_node;
                rec.susceptible_base = trace.susceptible_base;
                rec.final_infected = trace.final_infected;
                rec.final_fraction = trace.final_infected_fraction;
                rec.total_sends = trace.total_sends;
                rec.max_lifetime_sends = max_sends(trace);
                rec.infected = std::move(trace.infected);
                rec.sends = std::move(trace.viral_sends);
            } else {
                auto trace = run_temporal(g, params, *result.profile, std::nullopt, &*result.thresholds);
                rec.seed_node = trace.seed_node;
                rec.susceptible_base = trace.susceptible_base;
                rec.final_infected = trace.final_infected;
                rec.final_fraction = trace.final_infected_fraction;
                rec.total_sends = trace.total_sends;
                rec.max_lifetime_sends = max_sends(trace);
                rec.first_detection_bin = trace.first_detection_bin;
                rec.infected = std::move(trace.infected);
                rec.sends = std::move(trace.viral_volume);
            }
            result.points[point].runs[rep] = std::move(rec);
        });

        // Sequential reduction in replicate order.
        for (auto& pt : result.points) {
            double sum = 0.0;
            std::size_t detected = 0;
            pt.min = pt.runs.front().final_fraction;
            pt.max = pt.runs.front().final_fraction;
            for (const auto& r : pt.runs) {
                sum += r.final_fraction;
                pt.min = std::min(pt.min, r.final_fraction);
                pt.max = std::max(pt.max, r.final_fraction);
                if (r.first_detection_bin) ++detected;
            }
            pt.avg = sum / static_cast<double>(pt.runs.size());
            pt.detection_rate = static_cast<double>(detected) / static_cast<double>(pt.runs.size());
        }
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(scenario.label + ": " + e.what());
    }
    return result;
}

// --- builtin scenarios -------------------------------------------------------

std::vector<Scenario> builtin_scenarios() {
    std::vector<Scenario> out;

    Scenario naive003;
    naive003.label = "fig4-naive-m003";
    naive003.description = "naive spread, m=0.03, rho sweep for s in {100, 500, 1000}";
    naive003.engine = Engine::Naive;
    naive003.params.base.m = 0.03;
    naive003.params.base.p = 0.06;
    naive003.sweep_axis = Axis::Rho;
    naive003.sweep_values = default_rho_grid();
    naive003.series_axis = Axis::S;
    naive003.series_values = {100, 500, 1000};
    out.push_back(naive003);

    Scenario naive030 = naive003;
    naive030.label = "fig4-naive-m030";
    naive030.description = "naive spread, m=0.30, rho sweep for s in {10, 50, 100}";
    naive030.params.base.m = 0.30;
    naive030.series_values = {10, 50, 100};
    naive030.master_seed = 2;
    out.push_back(naive030);

    Scenario gm;
    gm.label = "fig5-gm-bound";
    gm.description = "temporal spread, m=0.03, rho=0: final I/N against G_m over one year for several T";
    gm.engine = Engine::Temporal;
    gm.params.base.m = 0.03;
    gm.params.base.s = 1000;
    gm.params.base.rho = 0.0;
    gm.params.base.p = 0.25;
    gm.params.period_days = 1.0 / 12.0;
    gm.params.horizon_days = 365.0;
    gm.sweep_axis = Axis::PeriodDays;
    gm.sweep_values = {1.0 / 12.0, 0.5, 1.0, 2.5, 7.0};
    gm.report_giant = true;
    gm.master_seed = 3;
    out.push_back(gm);

    Scenario stealth;
    stealth.label = "fig6-stealth-m030";
    stealth.description = "temporal spread, m=0.30, s=50, rho=0.1, p=0.25, T=2.5 days";
    stealth.engine = Engine::Temporal;
    stealth.params.base.m = 0.30;
    stealth.params.base.s = 50;
    stealth.params.base.rho = 0.1;
    stealth.params.base.p = 0.25;
    stealth.params.period_days = 2.5;
    stealth.params.horizon_days = 365.0;
    stealth.report_giant = true;
    stealth.master_seed = 4;
    out.push_back(stealth);

    Scenario loud = stealth;
    loud.label = "fig6-detected-m003";
    loud.description = "temporal spread, m=0.03, s=1000, rho=0.3, p=0.25, T=2 hours";
    loud.params.base.m = 0.03;
    loud.params.base.s = 1000;
    loud.params.base.rho = 0.3;
    loud.params.period_days = 2.0 / kHoursPerDay;
    loud.master_seed = 5;
    out.push_back(loud);

    return out;
}

const Scenario& builtin_scenario(std::string_view label) {
    static const std::vector<Scenario> all = builtin_scenarios();
    for (const auto& sc : all)
        if (sc.label == label) return sc;
    throw ScenarioError("unknown scenario '" + std::string(label) + "'");
}

// --- JSON -------------------------------------------------------------------

namespace {

json budget_to_json(std::uint64_t s) { return s == kUnlimitedBudget ? json("unlimited") : json(s); }

std::uint64_t budget_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() != "unlimited") throw ScenarioError("s must be a count or \"unlimited\"");
        return kUnlimitedBudget;
    }
    return j.get<std::uint64_t>();
}

json model_to_json(const DegreeModel& model) {
    return std::visit(
        [](const auto& m) -> json {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, FixedDegree>) {
                return {{"kind", "fixed-k"}, {"k", m.k}};
            } else if constexpr (std::is_same_v<M, PowerLawCutoff>) {
                return {{"kind", "power-law-cutoff"}, {"gamma", m.gamma}, {"kappa", m.kappa},
                        {"k_min", m.k_min}, {"k_max", m.k_max}};
            } else {
                return {{"kind", "empirical"}, {"degrees", m.degrees}};
            }
        },
        model);
}

DegreeModel model_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "fixed-k") return FixedDegree{j.at("k").get<std::size_t>()};
    if (kind == "empirical") return EmpiricalDegrees{j.at("degrees").get<std::vector<std::size_t>>()};
    if (kind == "power-law-cutoff") {
        PowerLawCutoff pl;
        pl.gamma = j.value("gamma", pl.gamma);
        pl.kappa = j.value("kappa", pl.kappa);
        pl.k_min = j.value("k_min", pl.k_min);
        pl.k_max = j.value("k_max", pl.k_max);
        return pl;
    }
    throw ScenarioError("unknown degree model '" + kind + "'");
}

json shape_to_json(const ProfileShape& shape) {
    if (std::holds_alternative<UniformShape>(shape)) return {{"kind", "uniform"}};
    const auto& d = std::get<DiurnalWeeklyShape>(shape);
    json days = json::array();
    for (Weekday w : d.peak_days) days.push_back(weekday_name(static_cast<std::size_t>(w)));
    return {{"kind", "diurnal-weekly"}, {"peak_days", days},         {"day_night_ratio", d.day_night_ratio},
            {"peak_boost", d.peak_boost}, {"day_start_bin", d.day_start_bin}, {"day_end_bin", d.day_end_bin},
            {"jitter", d.jitter}};
}

ProfileShape shape_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "uniform") return UniformShape{};
    if (kind != "diurnal-weekly") throw ScenarioError("unknown profile shape '" + kind + "'");
    DiurnalWeeklyShape d;
    if (j.contains("peak_days")) {
        d.peak_days.clear();
        for (const auto& name : j.at("peak_days")) d.peak_days.push_back(parse_weekday(name.get<std::string>()));
    }
    d.day_night_ratio = j.value("day_night_ratio", d.day_night_ratio);
    d.peak_boost = j.value("peak_boost", d.peak_boost);
    d.day_start_bin = j.value("day_start_bin", d.day_start_bin);
    d.day_end_bin = j.value("day_end_bin", d.day_end_bin);
    d.jitter = j.value("jitter", d.jitter);
    return d;
}

json scenario_to_json(const Scenario& sc) {
    const auto& b = sc.params.base;
    json j;
    j["label"] = sc.label;
    j["description"] = sc.description;
    j["engine"] = sc.engine == Engine::Naive ? "naive" : "temporal";
    j["graph"] = {{"n", sc.graph.n}, {"model", model_to_json(sc.graph.model)}, {"seed", sc.graph.seed}};
    j["params"] = {{"m", b.m},
                   {"s", budget_to_json(b.s)},
                   {"p", b.p},
                   {"rho", b.rho},
                   {"tau_minutes", b.tau_minutes},
                   {"max_steps", b.max_steps},
                   {"target_os", b.target_os},
                   {"mu", b.mu},
                   {"mean_contacts", b.mean_contacts},
                   {"topological_no_repeat", b.topological_no_repeat},
                   {"T_days", sc.params.period_days},
                   {"horizon_days", sc.params.horizon_days},
                   {"week_offset_bins", sc.params.week_offset_bins},
                   {"daytime_only", sc.params.daytime_only},
                   {"day_start_bin", sc.params.day_start_bin},
                   {"day_end_bin", sc.params.day_end_bin},
                   {"halt_on_detect", sc.params.halt_on_detect}};
    j["profile"] = {{"shape", shape_to_json(sc.profile.shape)},
                    {"shape_seed", sc.profile.shape_seed},
                    {"weekly_total", sc.profile.weekly_total},
                    {"noise_sigma", sc.profile.noise_sigma},
                    {"week_sigma", sc.profile.week_sigma},
                    {"history_weeks", sc.profile.history_weeks},
                    {"history_seed", sc.profile.history_seed}};
    j["replicates"] = sc.replicates;
    j["master_seed"] = sc.master_seed;
    j["replicate_seeds"] = sc.replicate_seeds;
    if (sc.sweep_axis) j["sweep"] = {{"axis", axis_name(*sc.sweep_axis)}, {"values", sc.sweep_values}};
    if (sc.series_axis) j["series"] = {{"axis", axis_name(*sc.series_axis)}, {"values", sc.series_values}};
    j["report_giant"] = sc.report_giant;
    return j;
}

template <class T>
void read_opt(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    if (j.contains("extends")) sc = builtin_scenario(j.at("extends").get<std::string>());
    read_opt(j, "label", sc.label);
    read_opt(j, "description", sc.description);
    if (sc.label.empty()) throw ScenarioError("scenario needs a label");
    if (j.contains("engine")) {
        const auto e = j.at("engine").get<std::string>();
        if (e == "naive") sc.engine = Engine::Naive;
        else if (e == "temporal") sc.engine = Engine::Temporal;
        else throw ScenarioError("unknown engine '" + e + "'");
    }
    if (j.contains("graph")) {
        const auto& g = j.at("graph");
        read_opt(g, "n", sc.graph.n);
        read_opt(g, "seed", sc.graph.seed);
        if (g.contains("model")) sc.graph.model = model_from_json(g.at("model"));
    }
    if (j.contains("params")) {
        const auto& p = j.at("params");
        auto& b = sc.params.base;
        read_opt(p, "m", b.m);
        if (p.contains("s")) b.s = budget_from_json(p.at("s"));
        read_opt(p, "p", b.p);
        read_opt(p, "rho", b.rho);
        read_opt(p, "tau_minutes", b.tau_minutes);
        read_opt(p, "max_steps", b.max_steps);
        read_opt(p, "target_os", b.target_os);
        read_opt(p, "mu", b.mu);
        read_opt(p, "mean_contacts", b.mean_contacts);
        read_opt(p, "topological_no_repeat", b.topological_no_repeat);
        read_opt(p, "T_days", sc.params.period_days);
        read_opt(p, "horizon_days", sc.params.horizon_days);
        read_opt(p, "week_offset_bins", sc.params.week_offset_bins);
        read_opt(p, "daytime_only", sc.params.daytime_only);
        read_opt(p, "day_start_bin", sc.params.day_start_bin);
        read_opt(p, "day_end_bin", sc.params.day_end_bin);
        read_opt(p, "halt_on_detect", sc.params.halt_on_detect);
    }
    if (j.contains("profile")) {
        const auto& p = j.at("profile");
        if (p.contains("shape")) sc.profile.shape = shape_from_json(p.at("shape"));
        read_opt(p, "shape_seed", sc.profile.shape_seed);
        read_opt(p, "weekly_total", sc.profile.weekly_total);
        read_opt(p, "noise_sigma", sc.profile.noise_sigma);
        read_opt(p, "week_sigma", sc.profile.week_sigma);
        read_opt(p, "history_weeks", sc.profile.history_weeks);
        read_opt(p, "history_seed", sc.profile.history_seed);
    }
    read_opt(j, "replicates", sc.replicates);
    read_opt(j, "master_seed", sc.master_seed);
    read_opt(j, "replicate_seeds", sc.replicate_seeds);
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        if (s.is_null()) {
            sc.sweep_axis.reset();
            sc.sweep_values.clear();
        } else {
            sc.sweep_axis = parse_axis(s.at("axis").get<std::string>());
            sc.sweep_values = s.contains("values") ? s.at("values").get<std::vector<double>>()
                              : *sc.sweep_axis == Axis::Rho ? default_rho_grid()
                                                            : std::vector<double>{};
        }
    }
    if (j.contains("series")) {
        const auto& s = j.at("series");
        if (s.is_null()) {
            sc.series_axis.reset();
            sc.series_values.clear();
        } else {
            sc.series_axis = parse_axis(s.at("axis").get<std::string>());
            sc.series_values = s.at("values").get<std::vector<double>>();
        }
    }
    read_opt(j, "report_giant", sc.report_giant);
    read_opt(j, "threads", sc.threads);
    sc.validate();
    return sc;
}

}  // namespace

std::string scenarios_to_json(const std::vector<Scenario>& scenarios) {
    json arr = json::array();
    for (const auto& sc : scenarios) arr.push_back(scenario_to_json(sc));
    return json{{"scenarios", arr}}.dump(2) + "\n";
}

std::vector<Scenario> scenarios_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("config parse error: ") + e.what());
    }
    std::vector<Scenario> out;
    try {
        for (const auto& j : root.at("scenarios")) out.push_back(scenario_from_json(j));
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("config error: ") + e.what());
    }
    return out;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return scenarios_from_json(ss.str());
}

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("MMSVIRUS_OUT"); env && *env) return env;
    return "mmsvirus-out";
}

// --- emission ---------------------------------------------------------------

namespace {

class FileSet {
public:
    explicit FileSet(std::filesystem::path root) : root_(std::move(root)) {}

    std::ofstream open(const std::filesystem::path& rel) {
        const auto path = root_ / rel;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ScenarioError("cannot write " + path.string());
        written_.push_back(path);
        relative_.push_back(rel.generic_string());
        return out;
    }

    std::vector<std::filesystem::path> written_;
    std::vector<std::string> relative_;

private:
    std::filesystem::path root_;
};

std::string value_tag(double v) {
    auto text = shortest(v);
    std::replace(text.begin(), text.end(), '.', 'p');
    return text;
}

void emit_one(const SweepResult& res, FileSet& files) {
    const auto& sc = res.scenario;
    const std::filesystem::path dir = sc.label;
    const bool temporal = sc.engine == Engine::Temporal;

    {
        std::vector<RunSummary> rows;
        for (const auto& pt : res.points)
            for (const auto& r : pt.runs) rows.push_back({r.run_id, pt.params.base, r.final_fraction});
        auto out = files.open(dir / "summary.csv");
        write_summary_csv(out, rows);
    }

    // One sweep table per series value.
    std::map<std::optional<double>, std::vector<const SweepPoint*>> by_series;
    std::vector<std::optional<double>> series_order;
    for (const auto& pt : res.points) {
        if (!by_series.contains(pt.series_value)) series_order.push_back(pt.series_value);
        by_series[pt.series_value].push_back(&pt);
    }
    for (const auto& sv : series_order) {
        std::string name = "sweep.csv";
        if (sv) name = "sweep_" + std::string(axis_name(*sc.series_axis)) + "_" + value_tag(*sv) + ".csv";
        auto out = files.open(dir / name);
        if (sc.sweep_axis) out << axis_name(*sc.sweep_axis) << ',';
        out << "avg,min,max" << (temporal ? ",detection_rate" : "") << '\n';
        for (const SweepPoint* pt : by_series[sv]) {
            if (pt->axis_value) out << shortest(*pt->axis_value) << ',';
            out << shortest(pt->avg) << ',' << shortest(pt->min) << ',' << shortest(pt->max);
            if (temporal) out << ',' << shortest(pt->detection_rate);
            out << '\n';
        }
    }

    if (!res.giant.empty()) {
        auto out = files.open(dir / "percolation.csv");
        write_component_csv(out, res.giant);
    }
    if (res.profile) {
        auto out = files.open(dir / "profile.csv");
        write_profile_csv(out, *res.profile);
    }
    if (res.thresholds) {
        auto out = files.open(dir / "thresholds.csv");
        write_threshold_csv(out, *res.thresholds);
    }
    if (temporal) {
        auto out = files.open(dir / "detection.csv");
        out << "run_id,detected,first_bin,first_day\n";
        for (const auto& pt : res.points)
            for (const auto& r : pt.runs) {
                out << r.run_id << ',';
                if (r.first_detection_bin)
                    out << "true," << *r.first_detection_bin << ',' << *r.first_detection_bin / kBinsPerDay << '\n';
                else
                    out << "false,,\n";
            }
    }
}

void emit_traces(const SweepResult& res, FileSet& files) {
    const bool temporal = res.scenario.engine == Engine::Temporal;
    const std::size_t steps = res.profile ? res.profile->steps_per_bin : kStepsPerBin;
    for (const auto& pt : res.points)
        for (const auto& r : pt.runs) {
            auto out = files.open(std::filesystem::path(res.scenario.label) / "traces" /
                                  ("run_" + std::to_string(r.run_id) + ".csv"));
            if (temporal) {
                out << "tick,infected,viral_sends,bin_global_index,viral_volume\n";
                for (std::size_t g = 0; g < r.infected.size(); ++g)
                    out << g * steps << ',' << r.infected[g] << ',' << r.sends[g] << ',' << g << ',' << r.sends[g]
                        << '\n';
            } else {
                out << "tick,infected,viral_sends\n";
                for (std::size_t t = 0; t < r.infected.size(); ++t)
                    out << t << ',' << r.infected[t] << ',' << r.sends[t] << '\n';
            }
        }
}

}  // namespace

std::vector<std::filesystem::path> emit(const std::vector<SweepResult>& results, const std::filesystem::path& out_dir,
                                        bool write_traces) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw ScenarioError("cannot create output directory " + out_dir.string());
    FileSet files(out_dir);
    std::vector<Scenario> scenarios;
    for (const auto& res : results) {
        emit_one(res, files);
        if (write_traces) emit_traces(res, files);
        scenarios.push_back(res.scenario);
    }

    json manifest = json::parse(scenarios_to_json(scenarios));
    manifest["generator"] = "mmsvirus";
    manifest["write_traces"] = write_traces;
    manifest["files"] = files.relative_;
    manifest["notes"] = {
        {"scale", "desk scale; reference user base 6e6 handsets, 4.7e6 MMS per week scaled by n / 6e6"},
        {"comparisons", "reference-figure comparisons at desk scale are directional/ordinal, never numeric-exact"},
        {"rerun", "mmsvirus scenario --config manifest.json --out <dir>"}};
    auto out = files.open("manifest.json");
    out << manifest.dump(2) << '\n';
    out.close();
    return files.written_;
}

}  // namespace mmsv
