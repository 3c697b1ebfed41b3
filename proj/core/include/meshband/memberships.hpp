#pragma once

#include "meshband/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace meshband {

/// Out-of-fold base-layer posteriors for every session: N x (C*E) with one
/// C-block per base classifier, plus the alignment metadata the diversity
/// and significance stages need.
struct MembershipMatrix {
    Matrix memberships;
    std::vector<int> labels;
    std::vector<std::string> subject_ids;
    std::vector<std::string> base_labels;  // subband labels, block order
    int n_classes = 0;
};

void save_memberships(const MembershipMatrix& m, const std::filesystem::path& file);
MembershipMatrix load_memberships(const std::filesystem::path& file);

}  // namespace meshband
