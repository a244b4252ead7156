#include "mmsvirus/detection.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mmsvirus/format.hpp"

namespace mmsv {

ThresholdProfile compute_threshold(const VolumeHistory& history) {
    if (history.weeks.empty()) throw std::invalid_argument("volume history is empty");
    ThresholdProfile t;
    t.derived_from_weeks = history.weeks.size();
    const double weeks = static_cast<double>(history.weeks.size());
    for (std::size_t b = 0; b < kBinsPerWeek; ++b) {
        std::uint64_t peak = 0;
        double sum = 0.0;
        for (const auto& week : history.weeks) {
            peak = std::max(peak, week[b]);
            sum += static_cast<double>(week[b]);
        }
        t.max_volume[b] = static_cast<double>(peak);
        t.mean_volume[b] = sum / weeks;
        t.delta_v[b] = std::max(0.0, t.max_volume[b] - t.mean_volume[b]);
    }
    return t;
}

VolumeHistory synthesize_history(const VolumeProfile& profile, double weekly_total, double noise_sigma,
                                 std::size_t weeks, Seed seed, double week_sigma) {
    profile.validate();
    if (!(weekly_total > 0.0)) throw std::invalid_argument("weekly_total must be positive");
    if (!(noise_sigma >= 0.0) || !(week_sigma >= 0.0)) throw std::invalid_argument("noise spreads must be non-negative");
    // log-normal with E[X] = 1, sd[X] = sigma
    auto unit_lognormal = [](double sigma, Rng& rng) {
        if (sigma == 0.0) return 1.0;
        const double log_var = std::log1p(sigma * sigma);
        return std::exp(-0.5 * log_var + std::sqrt(log_var) * rng.normal());
    };
    Rng rng(seed);
    Rng week_rng(derive_seed(seed, 1));
    VolumeHistory history;
    history.weeks.resize(weeks);
    for (auto& week : history.weeks) {
        const double shared = unit_lognormal(week_sigma, week_rng);
        for (std::size_t b = 0; b < kBinsPerWeek; ++b) {
            const double factor = shared * unit_lognormal(noise_sigma, rng);
            week[b] = static_cast<std::uint64_t>(std::llround(weekly_total * profile.bins[b] * factor));
        }
    }
    return history;
}

std::optional<std::size_t> detect(std::span<const std::uint64_t> viral_per_bin, const ThresholdProfile& thresholds,
                                  std::size_t week_offset) {
    for (std::size_t g = 0; g < viral_per_bin.size(); ++g)
        if (static_cast<double>(viral_per_bin[g]) > thresholds.delta_v[(g + week_offset) % kBinsPerWeek]) return g;
    return std::nullopt;
}

std::optional<std::size_t> detect_total_volume(std::span<const std::uint64_t> viral_per_bin,
                                               std::span<const std::uint64_t> background,
                                               const ThresholdProfile& thresholds, std::size_t week_offset) {
    if (background.size() < viral_per_bin.size())
        throw std::invalid_argument("background series shorter than viral series");
    for (std::size_t g = 0; g < viral_per_bin.size(); ++g) {
        const double total = static_cast<double>(viral_per_bin[g]) + static_cast<double>(background[g]);
        if (total > thresholds.max_volume[(g + week_offset) % kBinsPerWeek]) return g;
    }
    return std::nullopt;
}

void write_threshold_csv(std::ostream& out, const ThresholdProfile& thresholds) {
    out << "bin_index,delta_v\n";
    for (std::size_t b = 0; b < kBinsPerWeek; ++b) out << b << ',' << shortest(thresholds.delta_v[b]) << '\n';
}

ThresholdProfile read_threshold_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "bin_index,delta_v")
        throw std::invalid_argument("threshold csv: expected header 'bin_index,delta_v'");
    ThresholdProfile t;
    std::array<bool, kBinsPerWeek> seen{};
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument("expected 2 fields");
            const auto b = std::stoul(line.substr(0, comma));
            if (b >= kBinsPerWeek || seen[b]) throw std::invalid_argument("bad bin index");
            t.delta_v[b] = std::stod(line.substr(comma + 1));
            if (!(t.delta_v[b] >= 0.0)) throw std::invalid_argument("delta_v must be non-negative");
            seen[b] = true;
        } catch (const std::exception& e) {
            throw std::invalid_argument("threshold csv line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    for (bool s : seen)
        if (!s) throw std::invalid_argument("threshold csv must contain all 84 bins");
    return t;
}

void write_detection_csv(std::ostream& out, const DetectionReport& report) {
    out << "detected,first_bin,first_day\n";
    if (report.detected())
        out << "true," << *report.first_bin << ',' << *report.first_day() << '\n';
    else
        out << "false,,\n";
}

}  // namespace mmsv
