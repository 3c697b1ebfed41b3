#include "meshband/synth.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace meshband {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Self-contained normal generator (splitmix64 + Box-Muller) so datasets are
// byte-identical across standard libraries.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t state) : state_(state) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    double next_unit() {  // uniform in (0, 1]
        state_ = mix64(state_);
        return (static_cast<double>(state_ >> 11) + 1.0) * 0x1.0p-53;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Inverse filterbank step written locally: the generator shares only the
// filter arrays with the analysis code.
std::vector<double> synth_step(const std::vector<double>& approx,
                               const std::vector<double>& detail,
                               const WaveletFamily& family) {
    const std::size_t n_out = approx.size() * 2;
    std::vector<double> out(n_out, 0.0);
    for (std::size_t n = 0; n < approx.size(); ++n) {
        for (std::size_t k = 0; k < family.lowpass.size(); ++k) {
            out[(2 * n + k) % n_out] +=
                family.lowpass[k] * approx[n] + family.highpass[k] * detail[n];
        }
    }
    return out;
}

// Synthesizes a signal whose content sits in exactly one coefficient slot of
// a depth-L pyramid over a length-n_pad domain.
std::vector<double> synthesize_band(const std::vector<double>& coeffs, const SubbandIndex& band,
                                    const WaveletFamily& family) {
    std::vector<double> current;
    int remaining = 0;
    if (band.is_detail()) {
        const std::vector<double> zero(coeffs.size(), 0.0);
        current = synth_step(zero, coeffs, family);
        remaining = band.level() - 1;
    } else {
        current = coeffs;
        remaining = band.level();
    }
    for (int l = 0; l < remaining; ++l) {
        const std::vector<double> zero(current.size(), 0.0);
        current = synth_step(current, zero, family);
    }
    return current;
}

}  // namespace

void SynthConfig::validate() const {
    if (regions < 2) throw std::invalid_argument("synth: regions must be >= 2");
    if (n_classes < 1) throw std::invalid_argument("synth: n_classes must be >= 1");
    if (levels < 1) throw std::invalid_argument("synth: levels must be >= 1");
    if (n_subjects < 1) throw std::invalid_argument("synth: n_subjects must be >= 1");
    if (scans_per_session < 4) throw std::invalid_argument("synth: scans_per_session must be >= 4");
    if (noise_level < 0.0) throw std::invalid_argument("synth: noise_level must be >= 0");
    if (!classes.empty() && static_cast<int>(classes.size()) != n_classes) {
        throw std::invalid_argument("synth: classes must be empty or one plan per class");
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const ClassPlan& plan = classes[c];
        if (plan.arcs.empty()) continue;
        if (plan.subband_j < 1 || plan.subband_j > 2 * levels) {
            throw std::invalid_argument("synth: class " + std::to_string(c + 1) +
                                        " subband outside [1, 2L]");
        }
        std::set<int> sinks, sources;
        for (const PlantedArc& arc : plan.arcs) {
            if (arc.sink < 0 || arc.sink >= regions || arc.source < 0 || arc.source >= regions) {
                throw std::invalid_argument("synth: planted arc region outside [0, R)");
            }
            if (arc.sink == arc.source) {
                throw std::invalid_argument("synth: planted arc cannot be a self-loop");
            }
            if (!std::isfinite(arc.weight) || arc.weight == 0.0) {
                throw std::invalid_argument("synth: planted arc weight must be finite, nonzero");
            }
            sinks.insert(arc.sink);
            sources.insert(arc.source);
        }
        for (const int s : sinks) {
            if (sources.count(s)) {
                throw std::invalid_argument(
                    "synth: region " + std::to_string(s) +
                    " is both sink and source within one class plan");
            }
        }
    }
}

SynthConfig default_benchmark_config() {
    SynthConfig config;

    // Two disjoint sink/source patterns; classes sharing a subband carry
    // different patterns, so every class is identified by (subband, pattern).
    const auto pattern = [](int base) {
        std::vector<PlantedArc> arcs;
        const double weights[6] = {1.7, 1.2, 1.5, 1.9, 1.3, 1.6};
        int w = 0;
        for (int sink = base; sink < base + 3; ++sink) {
            for (int source = base + 10; source < base + 12; ++source) {
                arcs.push_back({sink, source, weights[w++ % 6]});
            }
        }
        return arcs;
    };
    const std::vector<PlantedArc> pattern_a = pattern(1);  // sinks 1..3, sources 11..12
    const std::vector<PlantedArc> pattern_b = pattern(5);  // sinks 5..7, sources 15..16

    const int l = config.levels;
    config.classes = {
        {l, pattern_a},          // A_4
        {l + 2, pattern_a},      // D_2
        {l + 3, pattern_a},      // D_3
        {l + 4, pattern_a},      // D_4
        {l + 2, pattern_b},      // D_2, disjoint regions
        {l + 3, pattern_b},      // D_3
        {l + 4, pattern_b},      // D_4
    };
    config.validate();
    return config;
}

Dataset generate(const SynthConfig& config) {
    config.validate();
    const WaveletFamily family = WaveletFamily::from_name(config.family);
    const int r_count = config.regions;
    const std::int64_t scans = config.scans_per_session;
    const std::int64_t padded = padded_length(scans, config.levels);
    const std::int64_t timeline = scans * config.n_classes;

    Dataset dataset;
    dataset.n_classes = config.n_classes;
    dataset.subjects.reserve(static_cast<std::size_t>(config.n_subjects));

    for (int u = 0; u < config.n_subjects; ++u) {
        SubjectRecord subject;
        subject.subject_id = "synth" + std::to_string(u);
        subject.series = Matrix::Zero(r_count, timeline);

        for (int c = 1; c <= config.n_classes; ++c) {
            const std::int64_t offset = static_cast<std::int64_t>(c - 1) * scans;
            subject.sessions.push_back({c, scans, offset});

            NormalStream rng(mix64(config.seed ^ (static_cast<std::uint64_t>(u) << 20) ^
                                   static_cast<std::uint64_t>(c)));

            const ClassPlan* plan = nullptr;
            if (!config.classes.empty() &&
                !config.classes[static_cast<std::size_t>(c - 1)].arcs.empty()) {
                plan = &config.classes[static_cast<std::size_t>(c - 1)];
            }

            std::vector<char> is_sink(static_cast<std::size_t>(r_count), 0);
            if (plan) {
                for (const PlantedArc& arc : plan->arcs) {
                    is_sink[static_cast<std::size_t>(arc.sink)] = 1;
                }
            }

            // Latent band components. Sinks carry no latent of their own, so
            // their band content is exactly the planted mixture.
            std::vector<std::vector<double>> latents(static_cast<std::size_t>(r_count));
            if (plan) {
                const SubbandIndex band(plan->subband_j, config.levels);
                const std::int64_t n_coeffs = padded >> band.level();
                for (int s = 0; s < r_count; ++s) {
                    std::vector<double> coeffs(static_cast<std::size_t>(n_coeffs));
                    for (double& v : coeffs) v = config.latent_scale * rng.next();
                    if (!is_sink[static_cast<std::size_t>(s)]) {
                        latents[static_cast<std::size_t>(s)] =
                            synthesize_band(coeffs, band, family);
                    }
                }
            }

            for (int r = 0; r < r_count; ++r) {
                auto window = subject.series.row(r).segment(offset, scans);
                const auto& own = latents[static_cast<std::size_t>(r)];
                for (std::int64_t t = 0; t < scans; ++t) {
                    double v = own.empty() ? 0.0 : own[static_cast<std::size_t>(t)];
                    window[t] += v;
                }
            }
            if (plan) {
                for (const PlantedArc& arc : plan->arcs) {
                    const auto& src = latents[static_cast<std::size_t>(arc.source)];
                    if (src.empty()) continue;
                    auto window = subject.series.row(arc.sink).segment(offset, scans);
                    for (std::int64_t t = 0; t < scans; ++t) {
                        window[t] += arc.weight * src[static_cast<std::size_t>(t)];
                    }
                }
            }
            if (config.noise_level > 0.0) {
                for (int r = 0; r < r_count; ++r) {
                    auto window = subject.series.row(r).segment(offset, scans);
                    for (std::int64_t t = 0; t < scans; ++t) {
                        window[t] += config.noise_level * rng.next();
                    }
                }
            }
        }
        dataset.subjects.push_back(std::move(subject));
    }
    dataset.validate();
    return dataset;
}

}  // namespace meshband
