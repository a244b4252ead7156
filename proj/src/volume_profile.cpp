#include "mmsvirus/volume_profile.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mmsvirus/format.hpp"

namespace mmsv {

namespace {
constexpr std::array<std::string_view, kDaysPerWeek> kDayNames{"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
}

std::string_view weekday_name(std::size_t day) { return kDayNames.at(day % kDaysPerWeek); }

Weekday parse_weekday(std::string_view name) {
    for (std::size_t d = 0; d < kDaysPerWeek; ++d)
        if (kDayNames[d] == name) return static_cast<Weekday>(d);
    throw std::invalid_argument("unknown weekday '" + std::string(name) + "'");
}

void VolumeProfile::validate() const {
    double sum = 0.0;
    for (double f : bins) {
        if (!(f >= 0.0)) throw std::invalid_argument("volume profile bins must be non-negative");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("volume profile must sum to 1");
    if (steps_per_bin == 0) throw std::invalid_argument("steps_per_bin must be positive");
}

double VolumeProfile::day_total(std::size_t day) const {
    const auto first = bins.begin() + static_cast<std::ptrdiff_t>(day * kBinsPerDay);
    return std::accumulate(first, first + kBinsPerDay, 0.0);
}

VolumeProfile make_synthetic_profile(const ProfileShape& shape, Seed seed) {
    VolumeProfile profile;
    if (std::holds_alternative<UniformShape>(shape)) {
        profile.bins.fill(1.0 / static_cast<double>(kBinsPerWeek));
        return profile;
    }
    const auto& d = std::get<DiurnalWeeklyShape>(shape);
    if (!(d.day_night_ratio >= 0.0) || !(d.peak_boost >= 0.0) || !(d.jitter >= 0.0 && d.jitter < 1.0))
        throw std::invalid_argument("diurnal shape parameters out of range");
    if (d.day_start_bin > d.day_end_bin || d.day_end_bin > kBinsPerDay)
        throw std::invalid_argument("daytime window must lie within one day");

    std::array<double, kBinsPerWeek> weight{};
    Rng rng(seed);
    for (std::size_t day = 0; day < kDaysPerWeek; ++day) {
        double day_weight = 1.0;
        for (Weekday peak : d.peak_days)
            if (static_cast<std::size_t>(peak) == day) day_weight = d.peak_boost;
        for (std::size_t b = 0; b < kBinsPerDay; ++b) {
            const bool daytime = b >= d.day_start_bin && b < d.day_end_bin;
            double w = day_weight * (daytime ? d.day_night_ratio : 1.0);
            if (d.jitter > 0.0) w *= 1.0 + d.jitter * (2.0 * rng.uniform() - 1.0);
            weight[day * kBinsPerDay + b] = w;
        }
    }
    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("profile shape has no mass");
    for (std::size_t i = 0; i < kBinsPerWeek; ++i) profile.bins[i] = weight[i] / total;
    return profile;
}

void write_profile_csv(std::ostream& out, const VolumeProfile& profile) {
    out << "day,bin_index,fraction\n";
    for (std::size_t i = 0; i < kBinsPerWeek; ++i)
        out << weekday_name(i / kBinsPerDay) << ',' << i << ',' << shortest(profile.bins[i]) << '\n';
}

VolumeProfile read_profile_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "day,bin_index,fraction")
        throw std::invalid_argument("profile csv: expected header 'day,bin_index,fraction'");
    VolumeProfile profile;
    std::array<bool, kBinsPerWeek> seen{};
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string day, index, fraction;
        if (!std::getline(ss, day, ',') || !std::getline(ss, index, ',') || !std::getline(ss, fraction))
            throw std::invalid_argument("profile csv line " + std::to_string(line_no) + ": expected 3 fields");
        try {
            const auto i = std::stoul(index);
            if (i >= kBinsPerWeek || seen[i]) throw std::invalid_argument("bad bin index");
            if (parse_weekday(day) != static_cast<Weekday>(i / kBinsPerDay))
                throw std::invalid_argument("day does not match bin index");
            profile.bins[i] = std::stod(fraction);
            seen[i] = true;
        } catch (const std::exception& e) {
            throw std::invalid_argument("profile csv line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    for (bool s : seen)
        if (!s) throw std::invalid_argument("profile csv must contain all 84 bins");
    profile.validate();
    return profile;
}

}  // namespace mmsv
