#pragma once

#include "meshband/types.hpp"

#include <vector>

namespace meshband {

/// One-versus-rest class discrimination scores for membership features.
struct SignificanceTable {
    std::vector<Vector> z_per_class;  // C vectors, one z per feature column
    Matrix max_z_per_block;           // C x E block maxima (E = F / C when divisible, else 1)
};

/// For each class c the rows split into group c and the rest; each column
/// gets z = |mean difference| / (s_p * sqrt(1/n1 + 1/n0)) with the pooled
/// variance s_p^2 = ((n1-1)s1^2 + (n0-1)s0^2) / (n1+n0-2), sample variances.
///
/// as_printed switches to the alternative form
/// (mu1 - mu0) / sqrt(sd1/n1 - sd0/n0), which can produce NaN when the
/// radicand is negative; it exists for side-by-side comparison only.
SignificanceTable membership_significance(const Matrix& memberships,
                                          const std::vector<int>& labels, int n_classes,
                                          bool as_printed = false);

}  // namespace meshband
