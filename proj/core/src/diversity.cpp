#include "meshband/diversity.hpp"

#include <cmath>
#include <stdexcept>

namespace meshband {

OracleMatrix oracle_outputs(const Matrix& memberships, const std::vector<int>& labels,
                            int n_classes) {
    if (static_cast<Index>(labels.size()) != memberships.rows()) {
        throw std::invalid_argument("oracle_outputs: label count does not match rows");
    }
    if (n_classes < 1 || memberships.cols() % n_classes != 0) {
        throw std::invalid_argument("oracle_outputs: columns are not C-blocks");
    }
    const Index e_count = memberships.cols() / n_classes;
    OracleMatrix oracle(memberships.rows(), e_count);
    for (Index n = 0; n < memberships.rows(); ++n) {
        const int truth = labels[static_cast<std::size_t>(n)];
        if (truth < 1 || truth > n_classes) {
            throw std::invalid_argument("oracle_outputs: label outside [1, C]");
        }
        for (Index e = 0; e < e_count; ++e) {
            oracle(n, e) = memberships(n, e * n_classes + truth - 1) > 0.5 ? 1 : 0;
        }
    }
    return oracle;
}

PairwiseDiversity pairwise_diversity(const OracleMatrix& oracle) {
    const Index n = oracle.rows();
    const Index e_count = oracle.cols();
    if (n < 1 || e_count < 1) throw std::invalid_argument("pairwise_diversity: empty oracle");

    PairwiseDiversity out;
    if (e_count == 1) {
        // A lone classifier agrees with itself perfectly.
        out.mean_q = 1.0;
        out.mean_rho = 1.0;
        out.degenerate = true;
        return out;
    }

    std::int64_t pairs = 0;
    for (Index i = 0; i < e_count; ++i) {
        for (Index k = i + 1; k < e_count; ++k) {
            PairContingency c;
            for (Index row = 0; row < n; ++row) {
                const int a = oracle(row, i);
                const int b = oracle(row, k);
                if (a == 1 && b == 1) ++c.n11;
                else if (a == 1 && b == 0) ++c.n10;
                else if (a == 0 && b == 1) ++c.n01;
                else ++c.n00;
            }
            ++pairs;
            out.disagreement += static_cast<double>(c.n10 + c.n01) / static_cast<double>(n);

            const double cross = static_cast<double>(c.n11) * static_cast<double>(c.n00) -
                                 static_cast<double>(c.n10) * static_cast<double>(c.n01);
            const double q_den = static_cast<double>(c.n11) * static_cast<double>(c.n00) +
                                 static_cast<double>(c.n10) * static_cast<double>(c.n01);
            if (q_den > 0.0) {
                out.mean_q += cross / q_den;
            } else {
                out.degenerate = true;
            }
            const double rho_den =
                std::sqrt(static_cast<double>(c.n11 + c.n10)) *
                std::sqrt(static_cast<double>(c.n01 + c.n00)) *
                std::sqrt(static_cast<double>(c.n11 + c.n01)) *
                std::sqrt(static_cast<double>(c.n10 + c.n00));
            if (rho_den > 0.0) {
                out.mean_rho += cross / rho_den;
            } else {
                out.degenerate = true;
            }
        }
    }
    out.disagreement /= static_cast<double>(pairs);
    out.mean_q /= static_cast<double>(pairs);
    out.mean_rho /= static_cast<double>(pairs);
    return out;
}

NonpairwiseDiversity nonpairwise_diversity(const OracleMatrix& oracle) {
    const Index n = oracle.rows();
    const Index e_count = oracle.cols();
    if (n < 1 || e_count < 1) throw std::invalid_argument("nonpairwise_diversity: empty oracle");
    const double nd = static_cast<double>(n);
    const double ed = static_cast<double>(e_count);

    NonpairwiseDiversity out;
    double sum_m = 0.0;          // total correct decisions
    double sum_m_wrong = 0.0;    // sum of m * (E - m)
    double sum_min = 0.0;        // sum of min(m, E - m)
    double sum_frac = 0.0, sum_frac_sq = 0.0;
    for (Index row = 0; row < n; ++row) {
        double m = 0.0;
        for (Index e = 0; e < e_count; ++e) m += oracle(row, e);
        sum_m += m;
        sum_m_wrong += m * (ed - m);
        sum_min += std::min(m, ed - m);
        const double frac = m / ed;
        sum_frac += frac;
        sum_frac_sq += frac * frac;
    }

    const double half_floor = ed - std::ceil(ed / 2.0);
    out.entropy = half_floor > 0.0 ? sum_min / (nd * half_floor) : 0.0;
    out.kw_variance = sum_m_wrong / (nd * ed * ed);

    const double p_bar = sum_m / (nd * ed);
    const double kappa_den = nd * (ed - 1.0) * p_bar * (1.0 - p_bar);
    if (kappa_den > 0.0) {
        out.kappa = 1.0 - (sum_m_wrong / ed) / kappa_den;
    } else {
        out.kappa = 1.0;  // every classifier always right or always wrong
        out.degenerate = true;
    }
    const double mean_frac = sum_frac / nd;
    out.theta = sum_frac_sq / nd - mean_frac * mean_frac;
    return out;
}

DiversityReport diversity_report(const OracleMatrix& oracle) {
    return DiversityReport{pairwise_diversity(oracle), nonpairwise_diversity(oracle)};
}

}  // namespace meshband
