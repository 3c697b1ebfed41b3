#include "meshband/mesh.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace meshband {

namespace {

// Row means and centered rows shared by correlation ranking.
struct CenteredRows {
    Matrix centered;
    Vector norms;  // sqrt of centered sum of squares, per row
};

CenteredRows center_rows(const Matrix& m) {
    CenteredRows out;
    out.centered = m;
    out.norms.resize(m.rows());
    for (Index r = 0; r < m.rows(); ++r) {
        out.centered.row(r).array() -= m.row(r).mean();
        out.norms[r] = out.centered.row(r).norm();
    }
    return out;
}

}  // namespace

std::string feature_kind_name(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::mesh_arcs: return "mesh";
        case FeatureKind::pairwise_corr: return "corr";
        case FeatureKind::raw_series: return "raw";
    }
    return "mesh";
}

FeatureKind feature_kind_from_name(std::string_view name) {
    if (name == "mesh" || name == "mesh_arcs") return FeatureKind::mesh_arcs;
    if (name == "corr" || name == "pairwise_corr") return FeatureKind::pairwise_corr;
    if (name == "raw" || name == "raw_series") return FeatureKind::raw_series;
    throw std::invalid_argument("unknown feature kind: " + std::string(name));
}

Matrix standardize_rows(const Matrix& session_matrix) {
    Matrix out = session_matrix;
    const double d = static_cast<double>(session_matrix.cols());
    for (Index r = 0; r < out.rows(); ++r) {
        const double mean = out.row(r).mean();
        out.row(r).array() -= mean;
        const double var = out.row(r).squaredNorm() / d;
        if (var <= 0.0) {
            throw std::runtime_error("region " + std::to_string(r) +
                                     " has zero variance in this session window");
        }
        out.row(r) /= std::sqrt(var);
    }
    return out;
}

Neighborhood functional_neighbors(const Matrix& session_matrix, int seed, int p) {
    const Index r_count = session_matrix.rows();
    if (p < 1 || p >= r_count) {
        throw std::invalid_argument("functional_neighbors: need 1 <= p < R, got p=" +
                                    std::to_string(p) + ", R=" + std::to_string(r_count));
    }
    if (session_matrix.cols() < 3) {
        throw std::invalid_argument("functional_neighbors: session needs at least 3 scans");
    }
    if (seed < 0 || seed >= r_count) {
        throw std::invalid_argument("functional_neighbors: seed outside [0, R)");
    }

    const CenteredRows rows = center_rows(session_matrix);
    for (Index r = 0; r < r_count; ++r) {
        if (rows.norms[r] <= 0.0) {
            throw std::runtime_error("region " + std::to_string(r) +
                                     " has zero variance in this session window");
        }
    }

    std::vector<int> order;
    order.reserve(r_count - 1);
    std::vector<double> corr(r_count, 0.0);
    for (Index s = 0; s < r_count; ++s) {
        if (s == seed) continue;
        corr[s] = rows.centered.row(seed).dot(rows.centered.row(s)) /
                  (rows.norms[seed] * rows.norms[s]);
        order.push_back(static_cast<int>(s));
    }
    std::sort(order.begin(), order.end(), [&corr](int a, int b) {
        if (corr[a] != corr[b]) return corr[a] > corr[b];
        return a < b;
    });
    order.resize(p);
    return Neighborhood{seed, std::move(order)};
}

RidgeFit ridge_mesh(const Matrix& session_matrix, const Neighborhood& hood, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ridge_mesh: lambda must be >= 0");
    const Index d = session_matrix.cols();
    const Index p = static_cast<Index>(hood.neighbors.size());

    Matrix design(d, p);  // neighbor series as columns
    for (Index i = 0; i < p; ++i) {
        design.col(i) = session_matrix.row(hood.neighbors[static_cast<std::size_t>(i)]).transpose();
    }
    const Vector target = session_matrix.row(hood.seed).transpose();

    Matrix gram = design.transpose() * design;
    gram.diagonal().array() += lambda;
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error(
            "ridge_mesh: singular normal equations; use a regularization lambda > 0");
    }
    RidgeFit fit;
    fit.weights = llt.solve(design.transpose() * target);

    Vector residual = target - design * fit.weights;
    residual.array() -= residual.mean();
    fit.residual_variance = residual.squaredNorm() / static_cast<double>(d);
    return fit;
}

MeshNetwork build_mesh_network(const Matrix& session_matrix, int p, double lambda,
                               bool standardize, const SubbandIndex& subband,
                               const SessionMeta& meta) {
    const Matrix& working = standardize ? standardize_rows(session_matrix) : session_matrix;
    const Index r_count = working.rows();

    MeshNetwork network;
    network.adjacency = Matrix::Zero(r_count, r_count);
    network.subband = subband;
    network.meta = meta;
    network.residual_variance = Vector::Zero(r_count);
    network.p = p;

    for (Index seed = 0; seed < r_count; ++seed) {
        const Neighborhood hood = functional_neighbors(working, static_cast<int>(seed), p);
        const RidgeFit fit = ridge_mesh(working, hood, lambda);
        for (std::size_t i = 0; i < hood.neighbors.size(); ++i) {
            network.adjacency(seed, hood.neighbors[i]) = fit.weights[static_cast<Index>(i)];
        }
        network.residual_variance[seed] = fit.residual_variance;
    }
    return network;
}

Vector embed_mesh(const MeshNetwork& network) {
    const Index r_count = network.adjacency.rows();
    Vector out(r_count * r_count);
    // Row-major storage makes the flattening a straight copy.
    std::copy_n(network.adjacency.data(), r_count * r_count, out.data());
    return out;
}

Matrix unflatten_embedding(const Vector& embedding, Index r_count) {
    if (embedding.size() != r_count * r_count) {
        throw std::invalid_argument("unflatten_embedding: size mismatch");
    }
    Matrix out(r_count, r_count);
    std::copy_n(embedding.data(), r_count * r_count, out.data());
    return out;
}

Vector pairwise_correlation_features(const Matrix& session_matrix) {
    const Index r_count = session_matrix.rows();
    const CenteredRows rows = center_rows(session_matrix);
    for (Index r = 0; r < r_count; ++r) {
        if (rows.norms[r] <= 0.0) {
            throw std::runtime_error("region " + std::to_string(r) +
                                     " has zero variance in this session window");
        }
    }
    Vector out(r_count * r_count);
    for (Index r = 0; r < r_count; ++r) {
        for (Index s = 0; s < r_count; ++s) {
            out[r * r_count + s] =
                (r == s) ? 1.0
                         : rows.centered.row(r).dot(rows.centered.row(s)) /
                               (rows.norms[r] * rows.norms[s]);
        }
    }
    return out;
}

Vector raw_series_features(const Matrix& session_matrix, std::int64_t t_fix) {
    if (t_fix < 1) throw std::invalid_argument("raw_series_features: t_fix must be >= 1");
    const Index r_count = session_matrix.rows();
    const Index keep = std::min<Index>(session_matrix.cols(), t_fix);
    Vector out = Vector::Zero(r_count * t_fix);
    for (Index r = 0; r < r_count; ++r) {
        out.segment(r * t_fix, keep) = session_matrix.row(r).head(keep).transpose();
    }
    return out;
}

}  // namespace meshband
