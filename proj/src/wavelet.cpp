#include "eyeaffect/wavelet.hpp"

#include "eyeaffect/csv.hpp"
#include "eyeaffect/error.hpp"
#include "eyeaffect/stats.hpp"

#include <ostream>

namespace eyeaffect {

// Daubechies (1988) table for N = 10 vanishing moments, normalised to unit
// energy (sum = sqrt(2)).
const std::array<double, 20> kDb10Lowpass = {
    0.026670057900555554,    0.1881768000776915,     0.5272011889317256,     0.6884590394536035,
    0.2811723436605775,      -0.24984642432731538,   -0.19594627437737705,   0.12736934033579325,
    0.09305736460357235,     -0.07139414716639708,   -0.029457536821875813,  0.033212674059341,
    0.0036065535669561697,   -0.010733175483330575,  0.001395351747052901,   0.001992405295185056,
    -0.0006858566949597116,  -0.00011646685512928545, 9.358867032006959e-05, -1.3264202894521244e-05,
};

namespace {

constexpr std::size_t kTaps = kDb10Lowpass.size();

// Phase of the periodized filter bank; matches the common reference
// implementation, which centres the 20-tap filters on 2k.
std::size_t first_tap(std::size_t k, std::size_t n) {
    const auto shift = static_cast<long long>(kTaps / 2 - 1);
    const auto nn = static_cast<long long>(n);
    return static_cast<std::size_t>(((static_cast<long long>(2 * k) - shift) % nn + nn) % nn);
}

struct FilterPair {
    std::array<double, kTaps> low;
    std::array<double, kTaps> high;
};

const FilterPair& analysis_filters() {
    static const FilterPair filters = [] {
        FilterPair f{};
        for (std::size_t j = 0; j < kTaps; ++j) {
            f.low[j] = kDb10Lowpass[j];
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            f.high[j] = sign * kDb10Lowpass[kTaps - 1 - j];
        }
        return f;
    }();
    return filters;
}

constexpr std::array<Stat, 13> kDetailStats = {
    Stat::min, Stat::max, Stat::median, Stat::q1, Stat::q3, Stat::skewness, Stat::kurtosis,
    Stat::sd,  Stat::iqr12, Stat::iqr23, Stat::iqr13, Stat::rms, Stat::zcr,
};

std::vector<Stat> stats_for(bool detail, bool deepest) {
    std::vector<Stat> out;
    for (Stat s : kDetailStats) {
        if (!detail && s == Stat::zcr) {
            continue;
        }
        if (deepest && s == Stat::kurtosis) {
            continue;
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace

int max_wavelet_levels(std::size_t length) {
    int levels = 0;
    while ((std::size_t{2} << levels) <= length) {
        ++levels;
    }
    return levels;
}

std::pair<std::vector<double>, std::vector<double>> dwt_step(std::span<const double> signal) {
    if (signal.size() < 2) {
        throw ArgumentError("dwt_step needs at least 2 samples");
    }
    thread_local std::vector<double> padded;
    padded.assign(signal.begin(), signal.end());
    if (padded.size() % 2 == 1) {
        padded.push_back(padded.back());
    }
    const std::size_t n = padded.size();
    const std::size_t half = n / 2;
    const auto& f = analysis_filters();
    std::vector<double> approx(half, 0.0);
    std::vector<double> detail(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        std::size_t idx = first_tap(k, n);
        for (std::size_t j = 0; j < kTaps; ++j) {
            const double x = padded[idx];
            a += f.low[j] * x;
            d += f.high[j] * x;
            if (++idx == n) {
                idx = 0;
            }
        }
        approx[k] = a;
        detail[k] = d;
    }
    return {std::move(approx), std::move(detail)};
}

WaveletDecomposition dwt_db10(std::span<const double> signal, int levels) {
    if (signal.size() < 2) {
        throw ArgumentError("dwt_db10 needs at least 2 samples");
    }
    if (levels < 1 || levels > max_wavelet_levels(signal.size())) {
        throw ArgumentError("cannot decompose " + std::to_string(signal.size()) + " samples into " +
                            std::to_string(levels) + " levels (max " +
                            std::to_string(max_wavelet_levels(signal.size())) + ")");
    }
    WaveletDecomposition out;
    out.detail.reserve(static_cast<std::size_t>(levels));
    out.approximation.reserve(static_cast<std::size_t>(levels));
    std::span<const double> current = signal;
    for (int level = 0; level < levels; ++level) {
        auto [a, d] = dwt_step(current);
        out.detail.push_back(std::move(d));
        out.approximation.push_back(std::move(a));
        current = out.approximation.back();
    }
    return out;
}

std::vector<double> idwt_db10(std::span<const double> approximation, std::span<const double> detail) {
    if (approximation.size() != detail.size()) {
        throw ArgumentError("idwt_db10: approximation has " + std::to_string(approximation.size()) +
                            " coefficients, detail has " + std::to_string(detail.size()));
    }
    const std::size_t half = approximation.size();
    const std::size_t n = 2 * half;
    std::vector<double> out(n, 0.0);
    if (n == 0) {
        return out;
    }
    const auto& f = analysis_filters();
    for (std::size_t k = 0; k < half; ++k) {
        std::size_t idx = first_tap(k, n);
        for (std::size_t j = 0; j < kTaps; ++j) {
            out[idx] += f.low[j] * approximation[k] + f.high[j] * detail[k];
            if (++idx == n) {
                idx = 0;
            }
        }
    }
    return out;
}

std::vector<std::string> wavelet_feature_names(int levels) {
    std::vector<std::string> names;
    for (int pass = 0; pass < 2; ++pass) {
        const bool detail = pass == 0;
        for (int level = 1; level <= levels; ++level) {
            const std::string prefix = std::string("pupil.wavelet.") + (detail ? "detail" : "approx") + ".l" +
                                       std::to_string(level) + ".";
            for (Stat s : stats_for(detail, level == levels)) {
                names.push_back(prefix + std::string(stat_name(s)));
            }
        }
    }
    return names;
}

std::vector<double> wavelet_feature_block(const WaveletDecomposition& d) {
    constexpr int kLevels = 7;
    if (d.levels() != kLevels || static_cast<int>(d.approximation.size()) != kLevels) {
        throw DataError("wavelet feature block needs a 7-level decomposition, got " + std::to_string(d.levels()));
    }
    std::vector<double> out;
    out.reserve(kWaveletFeatureCount);
    for (int pass = 0; pass < 2; ++pass) {
        const bool detail = pass == 0;
        const auto& vectors = detail ? d.detail : d.approximation;
        for (int level = 1; level <= kLevels; ++level) {
            const DescriptiveStats all = descriptive_stats(vectors[static_cast<std::size_t>(level - 1)]);
            for (Stat s : stats_for(detail, level == kLevels)) {
                out.push_back(all[s]);
            }
        }
    }
    return out;
}

void write_coefficient_dump(std::ostream& out, const WaveletDecomposition& d) {
    out << "level,type,index,value\n";
    for (int pass = 0; pass < 2; ++pass) {
        const auto& vectors = pass == 0 ? d.detail : d.approximation;
        for (std::size_t level = 0; level < vectors.size(); ++level) {
            for (std::size_t i = 0; i < vectors[level].size(); ++i) {
                out << level + 1 << ',' << (pass == 0 ? "detail" : "approx") << ',' << i << ','
                    << csv::format_double(vectors[level][i]) << '\n';
            }
        }
    }
}

}  // namespace eyeaffect
