#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <variant>
#include <vector>

#include "mmsvirus/random.hpp"

namespace mmsv {

inline constexpr std::size_t kBinsPerDay = 12;  // two-hour bins
inline constexpr std::size_t kDaysPerWeek = 7;
inline constexpr std::size_t kBinsPerWeek = kBinsPerDay * kDaysPerWeek;
inline constexpr std::size_t kStepsPerBin = 60;  // two-minute steps

/// Week bin 0 is Monday 00:00-02:00.
enum class Weekday : std::uint8_t { Mon, Tue, Wed, Thu, Fri, Sat, Sun };

std::string_view weekday_name(std::size_t day);
Weekday parse_weekday(std::string_view name);

/// Share of weekly MMS volume falling into each two-hour bin.
struct VolumeProfile {
    std::array<double, kBinsPerWeek> bins{};
    std::size_t steps_per_bin = kStepsPerBin;

    /// Throws unless every bin is >= 0 and the bins sum to 1 within 1e-9.
    void validate() const;
    double day_total(std::size_t day) const;
};

struct UniformShape {};

/// Flat within each half of the day: daytime bins weigh day_night_ratio
/// times a night bin, and the whole of each peak day is scaled by
/// peak_boost. jitter > 0 multiplies each bin by a seeded factor in
/// [1 - jitter, 1 + jitter] before normalizing.
struct DiurnalWeeklyShape {
    std::vector<Weekday> peak_days{Weekday::Sun, Weekday::Mon, Weekday::Tue};
    double day_night_ratio = 4.0;
    double peak_boost = 1.3;
    std::size_t day_start_bin = 4;  // 08:00
    std::size_t day_end_bin = 11;   // 22:00, exclusive
    double jitter = 0.0;
};

using ProfileShape = std::variant<UniformShape, DiurnalWeeklyShape>;

VolumeProfile make_synthetic_profile(const ProfileShape& shape, Seed seed = 0);

/// CSV with 84 rows `day,bin_index,fraction` (bin_index is the week bin).
void write_profile_csv(std::ostream& out, const VolumeProfile& profile);
VolumeProfile read_profile_csv(std::istream& in);

}  // namespace mmsv
