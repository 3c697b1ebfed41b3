#include "meshband/significance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace meshband {

namespace {

struct GroupStats {
    Vector mean;
    Vector sample_var;  // ddof = 1
    Vector sample_sd;
    std::int64_t count = 0;
};

GroupStats column_stats(const Matrix& memberships, const std::vector<std::int64_t>& rows) {
    GroupStats stats;
    stats.count = static_cast<std::int64_t>(rows.size());
    stats.mean = Vector::Zero(memberships.cols());
    stats.sample_var = Vector::Zero(memberships.cols());
    for (const std::int64_t row : rows) stats.mean += memberships.row(row).transpose();
    stats.mean /= static_cast<double>(stats.count);
    for (const std::int64_t row : rows) {
        const Vector d = memberships.row(row).transpose() - stats.mean;
        stats.sample_var += d.cwiseProduct(d);
    }
    stats.sample_var /= static_cast<double>(stats.count - 1);
    stats.sample_sd = stats.sample_var.cwiseSqrt();
    return stats;
}

}  // namespace

SignificanceTable membership_significance(const Matrix& memberships,
                                          const std::vector<int>& labels, int n_classes,
                                          bool as_printed) {
    if (static_cast<Index>(labels.size()) != memberships.rows()) {
        throw std::invalid_argument("membership_significance: label count mismatch");
    }
    if (n_classes < 2) throw std::invalid_argument("membership_significance: need C >= 2");

    SignificanceTable table;
    table.z_per_class.reserve(static_cast<std::size_t>(n_classes));

    const Index f = memberships.cols();
    const Index e_blocks = (f % n_classes == 0) ? f / n_classes : 1;
    table.max_z_per_block = Matrix::Zero(n_classes, e_blocks);

    for (int c = 1; c <= n_classes; ++c) {
        std::vector<std::int64_t> group, rest;
        for (Index row = 0; row < memberships.rows(); ++row) {
            (labels[static_cast<std::size_t>(row)] == c ? group : rest).push_back(row);
        }
        if (group.size() < 2 || rest.size() < 2) {
            throw std::invalid_argument("membership_significance: class " + std::to_string(c) +
                                        " split leaves a group with fewer than 2 rows");
        }
        const GroupStats g1 = column_stats(memberships, group);
        const GroupStats g0 = column_stats(memberships, rest);
        const double n1 = static_cast<double>(g1.count);
        const double n0 = static_cast<double>(g0.count);

        Vector z(f);
        for (Index col = 0; col < f; ++col) {
            const double diff = g1.mean[col] - g0.mean[col];
            if (as_printed) {
                const double radicand = g1.sample_sd[col] / n1 - g0.sample_sd[col] / n0;
                z[col] = diff / std::sqrt(radicand);  // NaN when radicand < 0
            } else {
                const double pooled =
                    ((n1 - 1.0) * g1.sample_var[col] + (n0 - 1.0) * g0.sample_var[col]) /
                    (n1 + n0 - 2.0);
                const double denom = std::sqrt(pooled) * std::sqrt(1.0 / n1 + 1.0 / n0);
                if (denom > 0.0) {
                    z[col] = std::abs(diff) / denom;
                } else {
                    // Degenerate constant columns: zero unless perfectly separated.
                    z[col] = diff == 0.0 ? 0.0
                                         : std::numeric_limits<double>::infinity();
                }
            }
        }
        for (Index block = 0; block < e_blocks; ++block) {
            const Index width = f / e_blocks;
            table.max_z_per_block(c - 1, block) = z.segment(block * width, width).maxCoeff();
        }
        table.z_per_class.push_back(std::move(z));
    }
    return table;
}

}  // namespace meshband
