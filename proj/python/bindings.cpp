#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mmsvirus/experiments.hpp"

namespace py = pybind11;
using namespace mmsv;

namespace {

SimParams sim_params(double m, py::object s, double p, double rho, Tick max_steps, Seed seed, bool no_repeat) {
    SimParams sp;
    sp.m = m;
    sp.s = s.is_none() ? kUnlimitedBudget : s.cast<std::uint64_t>();
    sp.p = p;
    sp.rho = rho;
    sp.max_steps = max_steps;
    sp.seed = seed;
    sp.topological_no_repeat = no_repeat;
    return sp;
}

VolumeProfile profile_named(const std::string& shape, Seed seed) {
    if (shape == "diurnal") return make_synthetic_profile(DiurnalWeeklyShape{}, seed);
    if (shape == "uniform") return make_synthetic_profile(UniformShape{}, seed);
    throw std::invalid_argument("unknown profile shape '" + shape + "' (diurnal, uniform)");
}

py::dict component_dict(const ComponentReport& r) {
    py::dict d;
    d["component_count"] = r.component_count;
    d["largest_size"] = r.largest_size;
    d["largest_fraction"] = r.largest_fraction;
    d["component_id"] = r.component_id;
    return d;
}

template <class Trace>
py::dict trace_dict(const Trace& t) {
    py::dict d;
    d["seed_node"] = t.seed_node;
    d["susceptible_base"] = t.susceptible_base;
    d["final_infected"] = t.final_infected;
    d["final_fraction"] = t.final_infected_fraction;
    d["total_sends"] = t.total_sends;
    d["infected_nodes"] = t.infected_nodes;
    d["lifetime_sends"] = t.lifetime_sends;
    return d;
}

py::list sweep_summary(const SweepResult& r) {
    py::list out;
    for (const auto& pt : r.points) {
        py::dict d;
        d["series"] = pt.series_value;
        d["axis"] = pt.axis_value;
        d["avg"] = pt.avg;
        d["min"] = pt.min;
        d["max"] = pt.max;
        d["detection_rate"] = pt.detection_rate;
        std::vector<double> finals;
        for (const auto& run : pt.runs) finals.push_back(run.final_fraction);
        d["final_fractions"] = finals;
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "MMS virus spread on synthetic call graphs";

    py::register_exception<GraphError>(m, "GraphError", PyExc_ValueError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_ValueError);
    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_RuntimeError);

    py::class_<CallGraph>(m, "CallGraph")
        .def(py::init([](std::size_t n, const std::vector<Edge>& edges, std::vector<OsLabel> labels, unsigned classes) {
                 return CallGraph(n, edges, std::move(labels), classes);
             }),
             py::arg("n"), py::arg("edges"), py::arg("os_labels") = std::vector<OsLabel>{}, py::arg("os_classes") = 1)
        .def("__len__", &CallGraph::size)
        .def_property_readonly("edge_count", &CallGraph::edge_count)
        .def_property_readonly("os_classes", &CallGraph::os_classes)
        .def_property_readonly("os_labels", &CallGraph::os_labels)
        .def("edges", &CallGraph::edges)
        .def("degree", &CallGraph::degree)
        .def("contacts", [](const CallGraph& g, NodeId u) {
            if (u >= g.size()) throw py::index_error("node out of range");
            auto c = g.contacts(u);
            return std::vector<NodeId>(c.begin(), c.end());
        })
        .def("__eq__", [](const CallGraph& a, const CallGraph& b) { return a == b; });

    m.def(
        "generate_graph",
        [](std::size_t n, Seed seed, double gamma, double kappa, std::size_t k_min, std::size_t k_max,
           std::optional<std::size_t> fixed_k) {
            if (fixed_k) return generate_graph(n, FixedDegree{*fixed_k}, seed);
            return generate_graph(n, PowerLawCutoff{gamma, kappa, k_min, k_max}, seed);
        },
        py::arg("n"), py::arg("seed") = 20100101, py::arg("gamma") = 2.5, py::arg("kappa") = 20.0,
        py::arg("k_min") = 3, py::arg("k_max") = 0, py::arg("fixed_k") = py::none(),
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "assign_os",
        [](const CallGraph& g, std::vector<double> shares, Seed seed, bool quota) {
            return quota ? assign_os_quota(g, shares, seed) : assign_os(g, shares, seed);
        },
        py::arg("graph"), py::arg("shares"), py::arg("seed"), py::arg("quota") = false);
    m.def("neighborhood", [](const CallGraph& g, NodeId root, std::size_t radius) {
        return neighborhood_subgraph(g, root, radius);
    }, py::arg("graph"), py::arg("root"), py::arg("radius"));
    m.def("read_graph", py::overload_cast<const std::filesystem::path&>(&read_graph), py::arg("path"));
    m.def("write_graph", py::overload_cast<const std::filesystem::path&, const CallGraph&>(&write_graph),
          py::arg("path"), py::arg("graph"));

    m.def("components", [](const CallGraph& g) { return component_dict(components(g)); }, py::arg("graph"));
    m.def(
        "susceptible_components",
        [](const CallGraph& g, OsLabel os) { return component_dict(components(susceptible_subgraph(g, os))); },
        py::arg("graph"), py::arg("target_os") = 0);
    m.def(
        "giant_fraction_curve",
        [](const CallGraph& g, std::vector<double> shares, Seed seed) {
            std::vector<double> out;
            for (const auto& pt : giant_fraction_curve(g, shares, seed)) out.push_back(pt.report.largest_fraction);
            return out;
        },
        py::arg("graph"), py::arg("shares"), py::arg("seed") = 1);
    m.def(
        "scan_augmentation_curve",
        [](const CallGraph& g, std::vector<std::size_t> counts, Seed seed, OsLabel os) {
            return scan_augmentation_curve(g, os, counts, seed);
        },
        py::arg("graph"), py::arg("link_counts"), py::arg("seed") = 1, py::arg("target_os") = 0);

    m.def(
        "run_naive",
        [](const CallGraph& g, double market_share, py::object s, double p, double rho, Tick max_steps, Seed seed,
           bool no_repeat, std::optional<NodeId> seed_node) {
            const auto sp = sim_params(market_share, s, p, rho, max_steps, seed, no_repeat);
            EpidemicTrace t;
            {
                py::gil_scoped_release release;
                t = run_naive(g, sp, seed_node);
            }
            auto d = trace_dict(t);
            d["infected"] = t.infected;
            d["sends"] = t.viral_sends;
            return d;
        },
        py::arg("graph"), py::arg("m") = 0.3, py::arg("s") = 100, py::arg("p") = 0.06, py::arg("rho") = 0.0,
        py::arg("max_steps") = 1'000'000, py::arg("seed") = 1, py::arg("no_repeat") = false,
        py::arg("seed_node") = py::none());

    m.def(
        "run_temporal",
        [](const CallGraph& g, double market_share, py::object s, double p, double rho, double period_days,
           double horizon_days, Seed seed, const std::string& profile, bool detection, double noise_sigma,
           std::size_t history_weeks, Seed history_seed, bool halt_on_detect) {
            TemporalParams tp;
            tp.base = sim_params(market_share, s, p, rho, SimParams{}.max_steps, seed, false);
            tp.period_days = period_days;
            tp.horizon_days = horizon_days;
            tp.halt_on_detect = halt_on_detect;
            const auto vp = profile_named(profile, 0);
            std::optional<ThresholdProfile> thresholds;
            if (detection || halt_on_detect)
                thresholds = compute_threshold(
                    synthesize_history(vp, scaled_weekly_total(g.size()), noise_sigma, history_weeks, history_seed));
            TemporalTrace t;
            {
                py::gil_scoped_release release;
                t = run_temporal(g, tp, vp, std::nullopt, thresholds ? &*thresholds : nullptr);
            }
            auto d = trace_dict(t);
            d["infected"] = t.infected;
            d["viral_volume"] = t.viral_volume;
            d["first_detection_bin"] = t.first_detection_bin;
            d["halted"] = t.halted;
            return d;
        },
        py::arg("graph"), py::arg("m") = 0.3, py::arg("s") = 100, py::arg("p") = 0.06, py::arg("rho") = 0.0,
        py::arg("period_days") = 1.0, py::arg("horizon_days") = 365.0, py::arg("seed") = 1,
        py::arg("profile") = "diurnal", py::arg("detection") = false, py::arg("noise_sigma") = 0.15,
        py::arg("history_weeks") = 12, py::arg("history_seed") = 84, py::arg("halt_on_detect") = false);

    m.def("per_step_attack_probability", [](double t, double f) { return per_step_attack_probability(t, f); },
          py::arg("period_days"), py::arg("bin_fraction"));
    m.def("analytic_si_curve", &analytic_si_curve, py::arg("population"), py::arg("beta"),
          py::arg("initial_infected"), py::arg("ticks"));
    m.def(
        "volume_profile", [](const std::string& shape, Seed seed) { return profile_named(shape, seed).bins; },
        py::arg("shape") = "diurnal", py::arg("seed") = 0);
    m.def(
        "delta_v",
        [](const std::string& shape, double weekly_total, double noise_sigma, std::size_t weeks, Seed seed) {
            return compute_threshold(synthesize_history(profile_named(shape, 0), weekly_total, noise_sigma, weeks, seed))
                .delta_v;
        },
        py::arg("shape") = "diurnal", py::arg("weekly_total") = scaled_weekly_total(50'000),
        py::arg("noise_sigma") = 0.15, py::arg("weeks") = 12, py::arg("seed") = 84);

    m.def("builtin_scenarios", [] {
        std::vector<std::string> labels;
        for (const auto& sc : builtin_scenarios()) labels.push_back(sc.label);
        return labels;
    });
    m.def(
        "builtin_scenario_json",
        [](const std::string& label) { return scenarios_to_json({builtin_scenario(label)}); }, py::arg("label"));
    m.def(
        "run_scenarios",
        [](const std::string& config_json, std::optional<std::filesystem::path> out_dir, bool traces) {
            const auto scenarios = scenarios_from_json(config_json);
            std::vector<SweepResult> results;
            {
                py::gil_scoped_release release;
                for (const auto& sc : scenarios) results.push_back(run_scenario(sc));
                if (out_dir) emit(results, *out_dir, traces);
            }
            py::dict out;
            for (const auto& r : results) out[py::str(r.scenario.label)] = sweep_summary(r);
            return out;
        },
        py::arg("config_json"), py::arg("out_dir") = py::none(), py::arg("traces") = false);
}
