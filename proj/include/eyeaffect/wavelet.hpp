#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace eyeaffect {

/// Daubechies-10 (20 taps) orthonormal reconstruction low-pass filter.
extern const std::array<double, 20> kDb10Lowpass;

/// Multilevel DWT output; index 0 holds level 1.
struct WaveletDecomposition {
    std::vector<std::vector<double>> detail;
    std::vector<std::vector<double>> approximation;

    int levels() const { return static_cast<int>(detail.size()); }
};

/// Maximum decomposition depth for a signal of `length` samples: floor(log2 n).
int max_wavelet_levels(std::size_t length);

/// One periodized analysis step. Odd-length input is first extended by
/// repeating its last sample. Returns {approximation, detail}, each of
/// length ceil(n / 2).
std::pair<std::vector<double>, std::vector<double>> dwt_step(std::span<const double> signal);

/// Multilevel db10 DWT; each level re-decomposes the previous approximation.
/// For 200 samples the level lengths are 100, 50, 25, 13, 7, 4, 2.
/// Throws ArgumentError when `levels` exceeds max_wavelet_levels.
WaveletDecomposition dwt_db10(std::span<const double> signal, int levels = 7);

/// Inverse of one periodized step; `approximation` and `detail` must have the
/// same length. Output length is twice that.
std::vector<double> idwt_db10(std::span<const double> approximation, std::span<const double> detail);

/// Number of values produced by wavelet_feature_block for a 7-level input.
inline constexpr int kWaveletFeatureCount = 173;

/// Catalog names of the wavelet block for `levels` levels, in output order,
/// e.g. "pupil.wavelet.detail.l3.rms".
std::vector<std::string> wavelet_feature_names(int levels = 7);

/// Statistics of every coefficient vector. Details get 13 statistics, the
/// deepest detail level drops kurtosis; approximations drop zcr and the
/// deepest approximation also drops kurtosis. Throws DataError unless the
/// decomposition has exactly 7 levels.
std::vector<double> wavelet_feature_block(const WaveletDecomposition& decomposition);

/// Writes `level,type,index,value` rows.
void write_coefficient_dump(std::ostream& out, const WaveletDecomposition& decomposition);

}  // namespace eyeaffect
