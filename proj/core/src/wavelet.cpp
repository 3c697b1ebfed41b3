#include "meshband/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meshband {

namespace {

// Orthonormalized cubic B-spline lowpass, truncated to 40 taps and projected
// onto the exact shift-2 orthonormality + zero-mean-highpass constraint set,
// so the periodized filterbank stays invertible to machine precision.
constexpr double kBattleLemarieCubic40[40] = {
    -8.06551759281161704e-05, -9.09936382032361905e-05, -2.70942469043944291e-04,
    -1.32262249142840976e-04, -9.87375639154414913e-04, -7.83368366343966554e-04,
    -3.74133026096570398e-04, +8.74916031104697157e-04, -1.33019503358531243e-03,
    -2.45699735562042530e-03, +3.22965635461714817e-03, +4.95224565421345433e-03,
    -1.06470702489552104e-02, -1.07186739113997228e-02, +2.94775559794387930e-02,
    +2.10520132293116231e-02, -9.80650968636045117e-02, -6.35277145145693167e-02,
    +4.32658613039085482e-01, +7.70974260332408678e-01, +4.32658682811444317e-01,
    -5.43752978146923582e-02, -9.80644170407371230e-02, +4.58407433860722330e-02,
    +2.94785874609040030e-02, -1.56341972019386939e-02, -1.06466492020212532e-02,
    +6.84626920693215315e-03, +3.22666418138090614e-03, -1.46385558293316530e-03,
    -1.32888112819158524e-03, +1.45664530550192921e-03, -3.72741450503185376e-04,
    +2.11738189797925497e-03, -9.55195883169040008e-04, +1.63967806022584698e-03,
    -4.44493610807743863e-04, +4.87120789696605212e-04, -5.51318685252236352e-05,
    +4.88679279447641244e-05,
};

std::vector<double> quadrature_mirror(const std::vector<double>& lowpass) {
    const std::size_t m = lowpass.size();
    std::vector<double> hi(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        hi[k] = sign * lowpass[m - 1 - k];
    }
    return hi;
}

// Decimated periodic correlation: out[n] = sum_k f[k] * in[(2n+k) mod N].
std::vector<double> analyze_band(const std::vector<double>& in, const std::vector<double>& f) {
    const std::size_t n_in = in.size();
    std::vector<double> out(n_in / 2, 0.0);
    for (std::size_t n = 0; n < out.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            acc += f[k] * in[(2 * n + k) % n_in];
        }
        out[n] = acc;
    }
    return out;
}

// Adjoint of analyze_band for a filter pair; exact inverse for orthonormal
// filters: out[(2n+k) mod N] += lo[k]*a[n] + hi[k]*d[n].
std::vector<double> synthesize_level(const std::vector<double>& approx,
                                     const std::vector<double>& detail,
                                     const WaveletFamily& family) {
    const std::size_t n_out = approx.size() * 2;
    std::vector<double> out(n_out, 0.0);
    for (std::size_t n = 0; n < approx.size(); ++n) {
        const double a = approx[n];
        const double d = detail[n];
        for (std::size_t k = 0; k < family.lowpass.size(); ++k) {
            out[(2 * n + k) % n_out] += family.lowpass[k] * a + family.highpass[k] * d;
        }
    }
    return out;
}

}  // namespace

WaveletFamily WaveletFamily::make(WaveletKind kind) {
    WaveletFamily fam;
    switch (kind) {
        case WaveletKind::haar: {
            const double s = 1.0 / std::sqrt(2.0);
            fam.name = "haar";
            fam.lowpass = {s, s};
            break;
        }
        case WaveletKind::daubechies4: {
            const double r3 = std::sqrt(3.0);
            const double d = 4.0 * std::sqrt(2.0);
            fam.name = "daubechies4";
            fam.lowpass = {(1.0 + r3) / d, (3.0 + r3) / d, (3.0 - r3) / d, (1.0 - r3) / d};
            break;
        }
        case WaveletKind::battle_lemarie_cubic: {
            fam.name = "battle_lemarie_cubic";
            fam.lowpass.assign(std::begin(kBattleLemarieCubic40), std::end(kBattleLemarieCubic40));
            break;
        }
    }
    fam.highpass = quadrature_mirror(fam.lowpass);
    return fam;
}

WaveletFamily WaveletFamily::from_name(std::string_view name) {
    if (name == "haar") return make(WaveletKind::haar);
    if (name == "daubechies4" || name == "db4") return make(WaveletKind::daubechies4);
    if (name == "battle_lemarie_cubic" || name == "battle-lemarie") {
        return make(WaveletKind::battle_lemarie_cubic);
    }
    throw std::invalid_argument("unknown wavelet family: " + std::string(name));
}

SubbandIndex::SubbandIndex(int j_, int levels_) : j(j_), levels(levels_) {
    if (levels < 1) throw std::invalid_argument("subband index: levels must be >= 1");
    if (j < 0 || j > 2 * levels) {
        throw std::invalid_argument("subband index j=" + std::to_string(j) +
                                    " outside [0, " + std::to_string(2 * levels) + "]");
    }
}

SubbandIndex SubbandIndex::parse(std::string_view label, int levels) {
    if (label.size() >= 2 && (label[0] == 'A' || label[0] == 'a' || label[0] == 'D' || label[0] == 'd')) {
        int level = 0;
        for (std::size_t i = 1; i < label.size(); ++i) {
            if (label[i] < '0' || label[i] > '9') {
                throw std::invalid_argument("bad subband label: " + std::string(label));
            }
            level = level * 10 + (label[i] - '0');
        }
        const bool approx_band = (label[0] == 'A' || label[0] == 'a');
        if (approx_band) {
            if (level > levels) {
                throw std::invalid_argument("subband " + std::string(label) + " exceeds L=" +
                                            std::to_string(levels));
            }
            return SubbandIndex(level, levels);
        }
        if (level < 1 || level > levels) {
            throw std::invalid_argument("subband " + std::string(label) + " exceeds L=" +
                                        std::to_string(levels));
        }
        return SubbandIndex(levels + level, levels);
    }
    throw std::invalid_argument("bad subband label: " + std::string(label));
}

std::string SubbandIndex::label() const {
    if (is_detail()) return "D" + std::to_string(level());
    return "A" + std::to_string(level());
}

std::int64_t padded_length(std::int64_t length, int levels) {
    const std::int64_t block = std::int64_t{1} << levels;
    return ((length + block - 1) / block) * block;
}

std::vector<double> reflect_pad(const Vector& signal, std::int64_t target_length) {
    const std::int64_t t = signal.size();
    std::vector<double> out(static_cast<std::size_t>(target_length));
    const std::int64_t period = 2 * t;
    for (std::int64_t i = 0; i < target_length; ++i) {
        const std::int64_t j = i % period;
        out[static_cast<std::size_t>(i)] = (j < t) ? signal[j] : signal[period - 1 - j];
    }
    return out;
}

WaveletCoefficients decompose(const Vector& signal, const WaveletFamily& family, int levels) {
    if (levels < 1) throw std::invalid_argument("decompose: levels must be >= 1");
    if (signal.size() < 2) throw std::invalid_argument("decompose: signal length must be >= 2");

    WaveletCoefficients coeffs;
    coeffs.levels = levels;
    coeffs.original_length = signal.size();
    coeffs.padded_length = padded_length(signal.size(), levels);
    coeffs.approx.reserve(levels);
    coeffs.detail.reserve(levels);

    std::vector<double> current = reflect_pad(signal, coeffs.padded_length);
    for (int l = 1; l <= levels; ++l) {
        coeffs.detail.push_back(analyze_band(current, family.highpass));
        coeffs.approx.push_back(analyze_band(current, family.lowpass));
        current = coeffs.approx.back();
    }
    return coeffs;
}

Vector reconstruct_subband(const WaveletCoefficients& coeffs, const SubbandIndex& band,
                           const WaveletFamily& family) {
    if (band.levels != coeffs.levels) {
        throw std::invalid_argument("subband index built for L=" + std::to_string(band.levels) +
                                    " but coefficients have L=" + std::to_string(coeffs.levels));
    }
    const int levels = coeffs.levels;

    std::vector<double> current;
    int start_level = 0;
    if (band.is_original()) {
        // Full inverse from the deepest approximation, details retained.
        current = coeffs.approx[levels - 1];
        for (int l = levels; l >= 1; --l) {
            current = synthesize_level(current, coeffs.detail[l - 1], family);
        }
    } else if (band.is_approx()) {
        const int l = band.level();
        current = coeffs.approx[l - 1];
        start_level = l;
    } else {
        const int l = band.level();
        const std::vector<double> zero_approx(coeffs.detail[l - 1].size(), 0.0);
        current = synthesize_level(zero_approx, coeffs.detail[l - 1], family);
        start_level = l - 1;
    }
    for (int l = start_level; l >= 1; --l) {
        const std::vector<double> zero_detail(current.size(), 0.0);
        current = synthesize_level(current, zero_detail, family);
    }

    Vector out(coeffs.original_length);
    std::copy_n(current.begin(), coeffs.original_length, out.data());
    return out;
}

SubbandStack subband_stack(const SubjectRecord& subject, const WaveletFamily& family, int levels) {
    const Index r_count = subject.series.rows();
    const Index t = subject.series.cols();

    SubbandStack stack;
    stack.subject_id = subject.subject_id;
    stack.family = family.name;
    stack.levels = levels;
    stack.bands.assign(2 * levels + 1, Matrix::Zero(r_count, t));
    stack.bands[0] = subject.series;

    for (Index r = 0; r < r_count; ++r) {
        const WaveletCoefficients coeffs = decompose(subject.series.row(r), family, levels);
        for (int j = 1; j <= 2 * levels; ++j) {
            stack.bands[j].row(r) = reconstruct_subband(coeffs, SubbandIndex(j, levels), family);
        }
    }
    return stack;
}

std::vector<SubbandIndex> default_subbands(int levels) {
    std::vector<SubbandIndex> bands;
    for (int j = 0; j <= 2 * levels; ++j) {
        if (j == levels + 1) continue;  // D_1
        bands.emplace_back(j, levels);
    }
    return bands;
}

}  // namespace meshband
