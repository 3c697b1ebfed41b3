#pragma once

#include "meshband/mesh.hpp"
#include "meshband/types.hpp"

#include <vector>

namespace meshband {

/// All metrics read the mesh adjacency convention: adjacency(r, s) is the
/// weight of arc s -> r. Shortest-path measures use only arcs with positive
/// weight; arc length is the reciprocal of the (scaled) weight.

std::vector<int> out_degree(const Matrix& adjacency);
std::vector<int> in_degree(const Matrix& adjacency);

/// Column sums: signed by default, absolute-value variant behind the flag.
Vector out_strength(const Matrix& adjacency, bool absolute = false);

/// Brandes accumulation over weighted shortest paths, lengths 1/w on the
/// positive arcs; path-length ties compared with tolerance 1e-12.
Vector betweenness_centrality(const Matrix& adjacency);

/// Mean inverse shortest-path length over ordered pairs; weights are mapped
/// to [0, 1] by dividing by the largest positive weight before inversion, so
/// the result lies in [0, 1]. Unreachable pairs contribute zero.
double global_efficiency(const Matrix& adjacency);

struct NetworkMetrics {
    std::vector<int> out_degree;
    std::vector<int> in_degree;
    Vector out_strength;
    Vector out_strength_abs;
    Vector betweenness;
    double total_strength = 0.0;
    double global_efficiency = 0.0;
    double std_out_degree = 0.0;  // across nodes, population convention
};

NetworkMetrics compute_network_metrics(const Matrix& adjacency);

/// Session-group summary for one (task, subband) cell: per-node mean and
/// std over the group's networks for each node metric, and mean/std of the
/// network-level scalars. Stds use the population convention.
struct GroupSummary {
    int n_networks = 0;
    Vector mean_out_degree, std_out_degree_nodewise;
    Vector mean_in_degree;
    Vector mean_out_strength, std_out_strength;
    Vector mean_betweenness, std_betweenness;
    double mean_total_strength = 0.0, std_total_strength = 0.0;
    double mean_global_efficiency = 0.0, std_global_efficiency = 0.0;
    double mean_std_out_degree = 0.0, std_std_out_degree = 0.0;
};

GroupSummary subband_summary(const std::vector<NetworkMetrics>& group);

}  // namespace meshband
