#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace eyeaffect {

/// Window statistics over a real-valued series.
enum class Stat {
    min, max, mean, median, q1, q3, skewness, kurtosis, sd, iqr12, iqr23, iqr13, slope, intercept, rms, zcr,
};
inline constexpr std::size_t kStatCount = 16;

/// Short name used in feature catalogs, e.g. "iqr12".
std::string_view stat_name(Stat s);

struct DescriptiveStats {
    std::array<double, kStatCount> values{};
    double operator[](Stat s) const { return values[static_cast<std::size_t>(s)]; }
};

/// All statistics of `values` (non-empty; ArgumentError otherwise).
///  - quartiles: linear interpolation between order statistics
///  - moments: population (divide by n); skewness m3/m2^1.5, kurtosis m4/m2^2
///  - slope/intercept: least squares against t_i = i / 25 s
///  - zcr: sign changes of the mean-removed series over (n - 1)
///  - variance below 1e-12 zeroes skewness, kurtosis and zcr; n < 3 zeroes
///    skewness, n < 4 zeroes kurtosis
DescriptiveStats descriptive_stats(std::span<const double> values);

/// Selected statistics, in `subset` order.
std::vector<double> descriptive_stats(std::span<const double> values, std::span<const Stat> subset);

/// Linear-interpolation quantile of already sorted data, p in [0, 1].
double sorted_quantile(std::span<const double> sorted, double p);

/// Run statistics over a boolean window.
enum class EventStat { ratio, dur_min, dur_median, dur_mean, dur_max, dur_total };
inline constexpr std::size_t kEventStatCount = 6;

std::string_view event_stat_name(EventStat s);

struct EventStats {
    std::array<double, kEventStatCount> values{};
    double operator[](EventStat s) const { return values[static_cast<std::size_t>(s)]; }
};

/// ratio = true-count / length; durations are contiguous true runs in
/// seconds (runs touching the window edge count their in-window length).
/// No runs: every duration statistic is 0.
EventStats event_stats(std::span<const unsigned char> flags);
std::vector<double> event_stats(std::span<const unsigned char> flags, std::span<const EventStat> subset);

}  // namespace eyeaffect
