#pragma once

#include "meshband/types.hpp"
#include "meshband/wavelet.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace meshband {

/// A planted directed dependency: the sink region's signal in the class's
/// designated subband is weight * the source region's latent component.
struct PlantedArc {
    int sink = 0;
    int source = 0;
    double weight = 1.0;
};

/// Ground truth for one class: which subband carries its structure, and the
/// mixture arcs planted there.
struct ClassPlan {
    int subband_j = 0;
    std::vector<PlantedArc> arcs;
};

struct SynthConfig {
    int regions = 20;
    int n_classes = 7;
    int levels = 4;
    int n_subjects = 20;
    std::int64_t scans_per_session = 128;  // every subject runs one session per class
    double noise_level = 0.3;
    double latent_scale = 1.0;
    std::uint64_t seed = 7;
    std::string family = "daubechies4";
    std::vector<ClassPlan> classes;  // size n_classes; empty entries mean noise only

    void validate() const;  // throws on inconsistency
};

/// The desk-scale benchmark: R=20, C=7, L=4, one session per class per
/// subject, disjoint sink/source pattern per class, positive mixture
/// weights, designated subbands spread over {A_4, D_2, D_3, D_4}.
SynthConfig default_benchmark_config();

/// Latent subband components are synthesized in coefficient space and pushed
/// through the inverse filterbank, so the generator shares only the filter
/// definitions with the analysis pipeline. Deterministic under seed, with
/// per-(subject, session) substreams.
Dataset generate(const SynthConfig& config);

}  // namespace meshband
