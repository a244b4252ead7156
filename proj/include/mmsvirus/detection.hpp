#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mmsvirus/volume_profile.hpp"

namespace mmsv {

using WeekVolumes = std::array<std::uint64_t, kBinsPerWeek>;

/// Historical MMS counts, one 84-bin array per observed week.
struct VolumeHistory {
    std::vector<WeekVolumes> weeks;
};

/// Per-bin anomaly threshold: delta_v = max - mean over the history.
struct ThresholdProfile {
    std::array<double, kBinsPerWeek> delta_v{};
    std::array<double, kBinsPerWeek> max_volume{};
    std::array<double, kBinsPerWeek> mean_volume{};
    std::size_t derived_from_weeks = 0;
};

ThresholdProfile compute_threshold(const VolumeHistory& history);

/// Week w, bin b: round(weekly_total * bins[b] * X) with X log-normal,
/// mean 1 and standard deviation noise_sigma, independent per bin. A
/// positive week_sigma multiplies every bin of week w by one more shared
/// unit-mean log-normal factor (whole-week swings such as holidays).
VolumeHistory synthesize_history(const VolumeProfile& profile, double weekly_total, double noise_sigma,
                                 std::size_t weeks, Seed seed, double week_sigma = 0.0);

/// Operator-scale weekly volume (4.7M messages over 6M users) scaled to n.
inline constexpr double kReferenceWeeklyVolume = 4.7e6;
inline constexpr double kReferenceUserBase = 6.0e6;
inline double scaled_weekly_total(std::size_t users) {
    return kReferenceWeeklyVolume * static_cast<double>(users) / kReferenceUserBase;
}

/// Earliest global bin whose viral volume exceeds delta_v at its week
/// position ((g + week_offset) mod 84).
std::optional<std::size_t> detect(std::span<const std::uint64_t> viral_per_bin, const ThresholdProfile& thresholds,
                                  std::size_t week_offset = 0);

/// Alternative rule: background + viral volume above the historical max.
/// background[g] is the organic volume of global bin g.
std::optional<std::size_t> detect_total_volume(std::span<const std::uint64_t> viral_per_bin,
                                               std::span<const std::uint64_t> background,
                                               const ThresholdProfile& thresholds, std::size_t week_offset = 0);

struct DetectionReport {
    std::optional<std::size_t> first_bin;
    bool detected() const noexcept { return first_bin.has_value(); }
    /// Global day index of the first detection.
    std::optional<std::size_t> first_day() const {
        if (!first_bin) return std::nullopt;
        return *first_bin / kBinsPerDay;
    }
};

/// CSV `bin_index,delta_v`.
void write_threshold_csv(std::ostream& out, const ThresholdProfile& thresholds);
ThresholdProfile read_threshold_csv(std::istream& in);

/// CSV `detected,first_bin,first_day`; bin and day empty when undetected.
void write_detection_csv(std::ostream& out, const DetectionReport& report);

}  // namespace mmsv
