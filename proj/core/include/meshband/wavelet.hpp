#pragma once

#include "meshband/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace meshband {

enum class WaveletKind { haar, daubechies4, battle_lemarie_cubic };

/// Orthonormal two-channel filter pair. The highpass is the quadrature
/// mirror of the lowpass: hi[k] = (-1)^k lo[M-1-k].
struct WaveletFamily {
    std::string name;
    std::vector<double> lowpass;
    std::vector<double> highpass;

    static WaveletFamily make(WaveletKind kind);
    static WaveletFamily from_name(std::string_view name);  // throws std::invalid_argument
};

/// Index j into the ordered subband set {A_0, A_1, ..., A_L, D_1, ..., D_L}.
/// j = 0 is the original signal, 1 <= j <= L selects A_j, j > L selects D_{j-L}.
struct SubbandIndex {
    int j = 0;
    int levels = 0;

    SubbandIndex() = default;
    SubbandIndex(int j_, int levels_);  // throws if j outside [0, 2L]

    static SubbandIndex original(int levels) { return {0, levels}; }
    static SubbandIndex approx(int level, int levels) { return {level, levels}; }
    static SubbandIndex detail(int level, int levels) { return {levels + level, levels}; }
    static SubbandIndex parse(std::string_view label, int levels);

    bool is_original() const { return j == 0; }
    bool is_approx() const { return j >= 1 && j <= levels; }
    bool is_detail() const { return j > levels; }
    int level() const { return is_detail() ? j - levels : j; }
    std::string label() const;

    friend bool operator==(const SubbandIndex& a, const SubbandIndex& b) {
        return a.j == b.j && a.levels == b.levels;
    }
};

/// Output of the analysis pyramid. approx[l-1] and detail[l-1] hold the
/// level-l coefficient arrays of length padded_length / 2^l; every
/// intermediate approximation level is kept so any subband can be
/// resynthesized without re-running the analysis.
struct WaveletCoefficients {
    std::vector<std::vector<double>> approx;
    std::vector<std::vector<double>> detail;
    int levels = 0;
    std::int64_t original_length = 0;
    std::int64_t padded_length = 0;
};

/// Smallest multiple of 2^levels that is >= length.
std::int64_t padded_length(std::int64_t length, int levels);

/// Extends a signal to target_length by repeated symmetric reflection.
std::vector<double> reflect_pad(const Vector& signal, std::int64_t target_length);

/// Pyramid analysis with periodic boundary on the reflect-padded signal.
/// Output index n of each decimated band consumes input indices (2n+k) mod N.
WaveletCoefficients decompose(const Vector& signal, const WaveletFamily& family, int levels);

/// Inverse pyramid with every band zeroed except the one selected by `band`;
/// the result is truncated back to original_length. band.j == 0 runs the
/// full inverse (all bands retained).
Vector reconstruct_subband(const WaveletCoefficients& coeffs, const SubbandIndex& band,
                           const WaveletFamily& family);

/// Per-subject family of 2L+1 reconstructed R x T matrices, indexed by j.
struct SubbandStack {
    std::string subject_id;
    std::string family;
    int levels = 0;
    std::vector<Matrix> bands;

    const Matrix& band(const SubbandIndex& idx) const { return bands.at(idx.j); }
};

/// Applies decompose + reconstruct_subband to every region row. The j = 0
/// entry is the input matrix itself.
SubbandStack subband_stack(const SubjectRecord& subject, const WaveletFamily& family, int levels);

/// Default subband selection for ensemble training:
/// {A_0, A_1, ..., A_L, D_2, ..., D_L}, i.e. everything except D_1.
std::vector<SubbandIndex> default_subbands(int levels);

}  // namespace meshband
