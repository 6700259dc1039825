#include "eyeaffect/stats.hpp"

#include "eyeaffect/common.hpp"
#include "eyeaffect/error.hpp"

#include <algorithm>
#include <cmath>

namespace eyeaffect {

namespace {

constexpr double kFlatVariance = 1e-12;

}  // namespace

std::string_view stat_name(Stat s) {
    switch (s) {
        case Stat::min: return "min";
        case Stat::max: return "max";
        case Stat::mean: return "mean";
        case Stat::median: return "median";
        case Stat::q1: return "q1";
        case Stat::q3: return "q3";
        case Stat::skewness: return "skew";
        case Stat::kurtosis: return "kurt";
        case Stat::sd: return "sd";
        case Stat::iqr12: return "iqr12";
        case Stat::iqr23: return "iqr23";
        case Stat::iqr13: return "iqr13";
        case Stat::slope: return "slope";
        case Stat::intercept: return "intercept";
        case Stat::rms: return "rms";
        case Stat::zcr: return "zcr";
    }
    return "?";
}

std::string_view event_stat_name(EventStat s) {
    switch (s) {
        case EventStat::ratio: return "ratio";
        case EventStat::dur_min: return "dur_min";
        case EventStat::dur_median: return "dur_median";
        case EventStat::dur_mean: return "dur_mean";
        case EventStat::dur_max: return "dur_max";
        case EventStat::dur_total: return "dur_total";
    }
    return "?";
}

double sorted_quantile(std::span<const double> sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DescriptiveStats descriptive_stats(std::span<const double> values) {
    if (values.empty()) {
        throw ArgumentError("descriptive_stats of an empty window");
    }
    const std::size_t n = values.size();
    const double dn = static_cast<double>(n);

    thread_local std::vector<double> sorted;
    sorted.assign(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : values) {
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / dn;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= dn;
    m3 /= dn;
    m4 /= dn;

    DescriptiveStats out;
    auto set = [&](Stat s, double v) { out.values[static_cast<std::size_t>(s)] = v; };
    const double q1 = sorted_quantile(sorted, 0.25);
    const double q2 = sorted_quantile(sorted, 0.5);
    const double q3 = sorted_quantile(sorted, 0.75);
    set(Stat::min, sorted.front());
    set(Stat::max, sorted.back());
    set(Stat::mean, mean);
    set(Stat::median, q2);
    set(Stat::q1, q1);
    set(Stat::q3, q3);
    set(Stat::sd, std::sqrt(m2));
    set(Stat::iqr12, q2 - q1);
    set(Stat::iqr23, q3 - q2);
    set(Stat::iqr13, q3 - q1);
    set(Stat::rms, std::sqrt(sum_sq / dn));

    const bool flat = m2 < kFlatVariance;
    set(Stat::skewness, flat || n < 3 ? 0.0 : m3 / std::pow(m2, 1.5));
    set(Stat::kurtosis, flat || n < 4 ? 0.0 : m4 / (m2 * m2));

    std::size_t crossings = 0;
    if (!flat) {
        for (std::size_t i = 1; i < n; ++i) {
            if ((values[i - 1] - mean >= 0.0) != (values[i] - mean >= 0.0)) {
                ++crossings;
            }
        }
    }
    set(Stat::zcr, n > 1 ? static_cast<double>(crossings) / static_cast<double>(n - 1) : 0.0);

    // Regression on t_i = i / fps.
    double slope = 0.0;
    double intercept = mean;
    if (n > 1) {
        const double t_mean = (dn - 1.0) / 2.0 / kFrameRate;
        double s_tt = 0.0;
        double s_tv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dt = static_cast<double>(i) / kFrameRate - t_mean;
            s_tt += dt * dt;
            s_tv += dt * (values[i] - mean);
        }
        slope = s_tv / s_tt;
        intercept = mean - slope * t_mean;
    }
    set(Stat::slope, slope);
    set(Stat::intercept, intercept);
    return out;
}

std::vector<double> descriptive_stats(std::span<const double> values, std::span<const Stat> subset) {
    const DescriptiveStats all = descriptive_stats(values);
    std::vector<double> out;
    out.reserve(subset.size());
    for (Stat s : subset) {
        out.push_back(all[s]);
    }
    return out;
}

EventStats event_stats(std::span<const unsigned char> flags) {
    EventStats out;
    if (flags.empty()) {
        return out;
    }
    thread_local std::vector<double> runs;
    runs.clear();
    std::size_t count = 0;
    std::size_t run = 0;
    for (unsigned char f : flags) {
        if (f) {
            ++count;
            ++run;
        } else if (run > 0) {
            runs.push_back(frames_to_seconds(static_cast<std::int64_t>(run)));
            run = 0;
        }
    }
    if (run > 0) {
        runs.push_back(frames_to_seconds(static_cast<std::int64_t>(run)));
    }
    auto set = [&](EventStat s, double v) { out.values[static_cast<std::size_t>(s)] = v; };
    set(EventStat::ratio, static_cast<double>(count) / static_cast<double>(flags.size()));
    if (runs.empty()) {
        return out;
    }
    std::sort(runs.begin(), runs.end());
    double total = 0.0;
    for (double r : runs) {
        total += r;
    }
    const std::size_t m = runs.size();
    set(EventStat::dur_min, runs.front());
    set(EventStat::dur_max, runs.back());
    set(EventStat::dur_median, m % 2 == 1 ? runs[m / 2] : 0.5 * (runs[m / 2 - 1] + runs[m / 2]));
    set(EventStat::dur_mean, total / static_cast<double>(m));
    set(EventStat::dur_total, total);
    return out;
}

std::vector<double> event_stats(std::span<const unsigned char> flags, std::span<const EventStat> subset) {
    const EventStats all = event_stats(flags);
    std::vector<double> out;
    out.reserve(subset.size());
    for (EventStat s : subset) {
        out.push_back(all[s]);
    }
    return out;
}

}  // namespace eyeaffect
