#pragma once

#include "meshband/types.hpp"
#include "meshband/wavelet.hpp"

#include <string>
#include <vector>

namespace meshband {

/// The p regions most correlated with a seed region within one session,
/// in descending Pearson correlation order (ties broken by lower index).
struct Neighborhood {
    int seed = 0;
    std::vector<int> neighbors;
};

struct SessionMeta {
    std::string subject_id;
    int session_index = 0;  // q, position within the subject timeline
    int task_label = 0;     // c
};

/// Directed weighted graph for one (session, subband). adjacency(r, s) is
/// the ridge weight of arc s -> r; zero when s is not a neighbor of seed r.
/// Every row has exactly p nonzero entries, so in-degree(r) == p.
struct MeshNetwork {
    Matrix adjacency;
    SubbandIndex subband;
    SessionMeta meta;
    Vector residual_variance;  // per seed region
    int p = 0;
};

enum class FeatureKind { mesh_arcs, pairwise_corr, raw_series };

std::string feature_kind_name(FeatureKind kind);
FeatureKind feature_kind_from_name(std::string_view name);

/// One row per session, aligned across subbands.
struct FeatureTable {
    Matrix features;  // N x F
    std::vector<int> labels;
    std::vector<std::string> subject_ids;
    FeatureKind kind = FeatureKind::mesh_arcs;
    SubbandIndex subband;
};

/// Z-scores every row to mean 0, population variance 1. Throws, naming the
/// region, if any row is constant.
Matrix standardize_rows(const Matrix& session_matrix);

Neighborhood functional_neighbors(const Matrix& session_matrix, int seed, int p);

struct RidgeFit {
    Vector weights;            // aligned with Neighborhood::neighbors
    double residual_variance;  // population variance of y - N w
};

/// Solves (N'N + lambda I) w = N'y on the p neighbor columns.
RidgeFit ridge_mesh(const Matrix& session_matrix, const Neighborhood& hood, double lambda);

MeshNetwork build_mesh_network(const Matrix& session_matrix, int p, double lambda,
                               bool standardize, const SubbandIndex& subband,
                               const SessionMeta& meta);

/// Row-major flattening of the adjacency into a length-R^2 vector.
Vector embed_mesh(const MeshNetwork& network);
Matrix unflatten_embedding(const Vector& embedding, Index r_count);

/// Full R x R Pearson matrix flattened row-major (diagonal = 1).
Vector pairwise_correlation_features(const Matrix& session_matrix);

/// Region rows truncated or zero-padded to t_fix, then concatenated.
Vector raw_series_features(const Matrix& session_matrix, std::int64_t t_fix);

}  // namespace meshband
