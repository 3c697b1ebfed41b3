#include "meshband/graph_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace meshband {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Arc {
    int to;
    double length;
};

// Positive arcs s -> r with length scale/adjacency(r, s).
std::vector<std::vector<Arc>> positive_arcs(const Matrix& adjacency, double scale) {
    const Index n = adjacency.rows();
    std::vector<std::vector<Arc>> arcs(static_cast<std::size_t>(n));
    for (Index s = 0; s < n; ++s) {
        for (Index r = 0; r < n; ++r) {
            const double w = adjacency(r, s);
            if (w > 0.0) {
                arcs[static_cast<std::size_t>(s)].push_back(
                    {static_cast<int>(r), scale / w});
            }
        }
    }
    return arcs;
}

struct ShortestPaths {
    std::vector<double> dist;
    std::vector<double> sigma;              // shortest-path counts
    std::vector<std::vector<int>> preds;    // predecessors on shortest paths
    std::vector<int> order;                 // settle order (nondecreasing dist)
};

ShortestPaths dijkstra_counted(const std::vector<std::vector<Arc>>& arcs, int source) {
    const std::size_t n = arcs.size();
    ShortestPaths sp;
    sp.dist.assign(n, kInf);
    sp.sigma.assign(n, 0.0);
    sp.preds.assign(n, {});
    sp.dist[static_cast<std::size_t>(source)] = 0.0;
    sp.sigma[static_cast<std::size_t>(source)] = 1.0;

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    queue.push({0.0, source});
    std::vector<char> settled(n, 0);

    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (settled[static_cast<std::size_t>(u)]) continue;
        settled[static_cast<std::size_t>(u)] = 1;
        sp.order.push_back(u);
        for (const Arc& arc : arcs[static_cast<std::size_t>(u)]) {
            const double cand = d + arc.length;
            double& best = sp.dist[static_cast<std::size_t>(arc.to)];
            if (cand < best - kTieTolerance) {
                best = cand;
                sp.sigma[static_cast<std::size_t>(arc.to)] = sp.sigma[static_cast<std::size_t>(u)];
                sp.preds[static_cast<std::size_t>(arc.to)] = {u};
                queue.push({cand, arc.to});
            } else if (std::abs(cand - best) <= kTieTolerance &&
                       !settled[static_cast<std::size_t>(arc.to)]) {
                sp.sigma[static_cast<std::size_t>(arc.to)] +=
                    sp.sigma[static_cast<std::size_t>(u)];
                sp.preds[static_cast<std::size_t>(arc.to)].push_back(u);
            }
        }
    }
    return sp;
}

double population_std(const Vector& values) {
    const double mean = values.mean();
    return std::sqrt((values.array() - mean).square().mean());
}

}  // namespace

std::vector<int> out_degree(const Matrix& adjacency) {
    const Index n = adjacency.rows();
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    for (Index s = 0; s < n; ++s) {
        for (Index r = 0; r < n; ++r) {
            if (adjacency(r, s) != 0.0) ++deg[static_cast<std::size_t>(s)];
        }
    }
    return deg;
}

std::vector<int> in_degree(const Matrix& adjacency) {
    const Index n = adjacency.rows();
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    for (Index r = 0; r < n; ++r) {
        for (Index s = 0; s < n; ++s) {
            if (adjacency(r, s) != 0.0) ++deg[static_cast<std::size_t>(r)];
        }
    }
    return deg;
}

Vector out_strength(const Matrix& adjacency, bool absolute) {
    if (absolute) return adjacency.array().abs().matrix().colwise().sum().transpose();
    return adjacency.colwise().sum().transpose();
}

Vector betweenness_centrality(const Matrix& adjacency) {
    const Index n = adjacency.rows();
    const auto arcs = positive_arcs(adjacency, 1.0);
    Vector bc = Vector::Zero(n);

    for (int source = 0; source < static_cast<int>(n); ++source) {
        ShortestPaths sp = dijkstra_counted(arcs, source);
        std::vector<double> delta(static_cast<std::size_t>(n), 0.0);
        for (auto it = sp.order.rbegin(); it != sp.order.rend(); ++it) {
            const int w = *it;
            for (const int v : sp.preds[static_cast<std::size_t>(w)]) {
                delta[static_cast<std::size_t>(v)] +=
                    sp.sigma[static_cast<std::size_t>(v)] /
                    sp.sigma[static_cast<std::size_t>(w)] *
                    (1.0 + delta[static_cast<std::size_t>(w)]);
            }
            if (w != source) bc[w] += delta[static_cast<std::size_t>(w)];
        }
    }
    return bc;
}

double global_efficiency(const Matrix& adjacency) {
    const Index n = adjacency.rows();
    if (n < 2) return 0.0;
    const double w_max = adjacency.maxCoeff();
    if (w_max <= 0.0) return 0.0;

    // Dividing weights by w_max means lengths are w_max / w.
    const auto arcs = positive_arcs(adjacency, w_max);
    double total = 0.0;
    for (int source = 0; source < static_cast<int>(n); ++source) {
        const ShortestPaths sp = dijkstra_counted(arcs, source);
        for (Index t = 0; t < n; ++t) {
            if (t == source) continue;
            const double d = sp.dist[static_cast<std::size_t>(t)];
            if (std::isfinite(d) && d > 0.0) total += 1.0 / d;
        }
    }
    return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

NetworkMetrics compute_network_metrics(const Matrix& adjacency) {
    NetworkMetrics m;
    m.out_degree = out_degree(adjacency);
    m.in_degree = in_degree(adjacency);
    m.out_strength = out_strength(adjacency, false);
    m.out_strength_abs = out_strength(adjacency, true);
    m.betweenness = betweenness_centrality(adjacency);
    m.total_strength = m.out_strength.sum();
    m.global_efficiency = global_efficiency(adjacency);

    Vector deg(adjacency.rows());
    for (Index i = 0; i < adjacency.rows(); ++i) deg[i] = m.out_degree[static_cast<std::size_t>(i)];
    m.std_out_degree = population_std(deg);
    return m;
}

GroupSummary subband_summary(const std::vector<NetworkMetrics>& group) {
    if (group.empty()) throw std::invalid_argument("subband_summary: empty group");
    const Index n = static_cast<Index>(group.front().out_degree.size());
    const double g = static_cast<double>(group.size());

    GroupSummary s;
    s.n_networks = static_cast<int>(group.size());
    s.mean_out_degree = Vector::Zero(n);
    s.std_out_degree_nodewise = Vector::Zero(n);
    s.mean_in_degree = Vector::Zero(n);
    s.mean_out_strength = Vector::Zero(n);
    s.std_out_strength = Vector::Zero(n);
    s.mean_betweenness = Vector::Zero(n);
    s.std_betweenness = Vector::Zero(n);

    for (const NetworkMetrics& m : group) {
        for (Index i = 0; i < n; ++i) {
            s.mean_out_degree[i] += m.out_degree[static_cast<std::size_t>(i)];
            s.mean_in_degree[i] += m.in_degree[static_cast<std::size_t>(i)];
        }
        s.mean_out_strength += m.out_strength;
        s.mean_betweenness += m.betweenness;
        s.mean_total_strength += m.total_strength;
        s.mean_global_efficiency += m.global_efficiency;
        s.mean_std_out_degree += m.std_out_degree;
    }
    s.mean_out_degree /= g;
    s.mean_in_degree /= g;
    s.mean_out_strength /= g;
    s.mean_betweenness /= g;
    s.mean_total_strength /= g;
    s.mean_global_efficiency /= g;
    s.mean_std_out_degree /= g;

    double var_total = 0.0, var_eff = 0.0, var_stddeg = 0.0;
    for (const NetworkMetrics& m : group) {
        for (Index i = 0; i < n; ++i) {
            const double dd = m.out_degree[static_cast<std::size_t>(i)] - s.mean_out_degree[i];
            s.std_out_degree_nodewise[i] += dd * dd;
        }
        s.std_out_strength += (m.out_strength - s.mean_out_strength).array().square().matrix();
        s.std_betweenness += (m.betweenness - s.mean_betweenness).array().square().matrix();
        var_total += std::pow(m.total_strength - s.mean_total_strength, 2);
        var_eff += std::pow(m.global_efficiency - s.mean_global_efficiency, 2);
        var_stddeg += std::pow(m.std_out_degree - s.mean_std_out_degree, 2);
    }
    s.std_out_degree_nodewise = (s.std_out_degree_nodewise / g).array().sqrt();
    s.std_out_strength = (s.std_out_strength / g).array().sqrt();
    s.std_betweenness = (s.std_betweenness / g).array().sqrt();
    s.std_total_strength = std::sqrt(var_total / g);
    s.std_global_efficiency = std::sqrt(var_eff / g);
    s.std_std_out_degree = std::sqrt(var_stddeg / g);
    return s;
}

}  // namespace meshband
