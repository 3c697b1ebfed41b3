#pragma once

#include "meshband/types.hpp"

#include <vector>

namespace meshband {

/// N x E binary matrix; entry (n, e) is 1 when base classifier e assigned
/// membership > 0.5 to the true class of session n.
using OracleMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

OracleMatrix oracle_outputs(const Matrix& memberships, const std::vector<int>& labels,
                            int n_classes);

/// 2x2 agreement counts for one classifier pair over N sessions.
struct PairContingency {
    std::int64_t n11 = 0, n10 = 0, n01 = 0, n00 = 0;
};

struct PairwiseDiversity {
    double disagreement = 0.0;
    double mean_q = 0.0;
    double mean_rho = 0.0;
    bool degenerate = false;  // some pair had a zero denominator (reported as 0)
};

/// Averages the disagreement, Yule's Q and the binary correlation over all
/// unordered classifier pairs.
PairwiseDiversity pairwise_diversity(const OracleMatrix& oracle);

struct NonpairwiseDiversity {
    double entropy = 0.0;
    double kappa = 0.0;
    double kw_variance = 0.0;
    double theta = 0.0;       // variance over sessions of the correct fraction
    bool degenerate = false;  // kappa undefined (mean accuracy 0 or 1)
};

NonpairwiseDiversity nonpairwise_diversity(const OracleMatrix& oracle);

struct DiversityReport {
    PairwiseDiversity pairwise;
    NonpairwiseDiversity nonpairwise;
};

DiversityReport diversity_report(const OracleMatrix& oracle);

}  // namespace meshband
