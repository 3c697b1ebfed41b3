#include "meshband/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace meshband::oracles {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-12;
}  // namespace

Vector dense_ridge_solve(const Matrix& design, const Vector& target, double lambda) {
    const Index p = design.cols();
    Matrix a(p, p + 1);  // augmented [N'N + lambda I | N'y]
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) {
            double acc = 0.0;
            for (Index t = 0; t < design.rows(); ++t) acc += design(t, i) * design(t, j);
            a(i, j) = acc + (i == j ? lambda : 0.0);
        }
        double acc = 0.0;
        for (Index t = 0; t < design.rows(); ++t) acc += design(t, i) * target[t];
        a(i, p) = acc;
    }

    for (Index col = 0; col < p; ++col) {
        Index pivot = col;
        for (Index row = col + 1; row < p; ++row) {
            if (std::abs(a(row, col)) > std::abs(a(pivot, col))) pivot = row;
        }
        if (a(pivot, col) == 0.0) {
            throw std::runtime_error("dense_ridge_solve: singular system");
        }
        if (pivot != col) a.row(pivot).swap(a.row(col));
        for (Index row = col + 1; row < p; ++row) {
            const double factor = a(row, col) / a(col, col);
            a.row(row).tail(p + 1 - col) -= factor * a.row(col).tail(p + 1 - col);
        }
    }
    Vector w(p);
    for (Index row = p - 1; row >= 0; --row) {
        double acc = a(row, p);
        for (Index col = row + 1; col < p; ++col) acc -= a(row, col) * w[col];
        w[row] = acc / a(row, row);
    }
    return w;
}

Matrix single_level_matrix(const WaveletFamily& family, Index n) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("single_level_matrix: n must be even and >= 2");
    }
    Matrix q = Matrix::Zero(n, n);
    const Index half = n / 2;
    for (Index row = 0; row < half; ++row) {
        for (std::size_t k = 0; k < family.lowpass.size(); ++k) {
            q(row, (2 * row + static_cast<Index>(k)) % n) += family.lowpass[k];
            q(half + row, (2 * row + static_cast<Index>(k)) % n) += family.highpass[k];
        }
    }
    return q;
}

WaveletCoefficients matrix_dwt(const Vector& signal, const WaveletFamily& family, int levels) {
    WaveletCoefficients coeffs;
    coeffs.levels = levels;
    coeffs.original_length = signal.size();
    coeffs.padded_length = padded_length(signal.size(), levels);

    const std::vector<double> padded = reflect_pad(signal, coeffs.padded_length);
    Vector current = Eigen::Map<const Vector>(padded.data(), coeffs.padded_length);
    for (int l = 1; l <= levels; ++l) {
        const Matrix q = single_level_matrix(family, current.size());
        const Vector both = q * current;
        const Index half = current.size() / 2;
        coeffs.approx.emplace_back(both.data(), both.data() + half);
        coeffs.detail.emplace_back(both.data() + half, both.data() + 2 * half);
        current = both.head(half);
    }
    return coeffs;
}

Matrix allpairs_paths(const Matrix& adjacency, double scale) {
    const Index n = adjacency.rows();
    Matrix dist = Matrix::Constant(n, n, kInf);
    for (Index i = 0; i < n; ++i) dist(i, i) = 0.0;
    for (Index s = 0; s < n; ++s) {
        for (Index r = 0; r < n; ++r) {
            if (adjacency(r, s) > 0.0) dist(s, r) = scale / adjacency(r, s);
        }
    }
    // Bellman-Ford style: sweep until nothing improves.
    for (Index sweep = 0; sweep < n; ++sweep) {
        bool changed = false;
        for (Index a = 0; a < n; ++a) {
            for (Index b = 0; b < n; ++b) {
                if (!std::isfinite(dist(a, b))) continue;
                for (Index c = 0; c < n; ++c) {
                    if (dist(a, b) + dist(b, c) < dist(a, c) - 1e-15) {
                        dist(a, c) = dist(a, b) + dist(b, c);
                        changed = true;
                    }
                }
            }
        }
        if (!changed) break;
    }
    return dist;
}

namespace {

struct PathSearch {
    const std::vector<std::vector<std::pair<int, double>>>* arcs = nullptr;
    int target = 0;
    double best = kInf;
    std::vector<std::vector<int>> best_paths;
    std::vector<int> stack;
    std::vector<char> on_stack;

    void dfs(int node, double length) {
        if (length > best + kTieTolerance) return;
        if (node == target) {
            if (length < best - kTieTolerance) {
                best = length;
                best_paths.clear();
            }
            best_paths.push_back(stack);
            return;
        }
        for (const auto& [next, arc_len] : (*arcs)[static_cast<std::size_t>(node)]) {
            if (on_stack[static_cast<std::size_t>(next)]) continue;
            on_stack[static_cast<std::size_t>(next)] = 1;
            stack.push_back(next);
            dfs(next, length + arc_len);
            stack.pop_back();
            on_stack[static_cast<std::size_t>(next)] = 0;
        }
    }
};

std::vector<std::vector<std::pair<int, double>>> arc_lists(const Matrix& adjacency,
                                                           double scale) {
    const Index n = adjacency.rows();
    std::vector<std::vector<std::pair<int, double>>> arcs(static_cast<std::size_t>(n));
    for (Index s = 0; s < n; ++s) {
        for (Index r = 0; r < n; ++r) {
            if (adjacency(r, s) > 0.0) {
                arcs[static_cast<std::size_t>(s)].push_back(
                    {static_cast<int>(r), scale / adjacency(r, s)});
            }
        }
    }
    return arcs;
}

}  // namespace

Vector brute_betweenness(const Matrix& adjacency) {
    const Index n = adjacency.rows();
    const auto arcs = arc_lists(adjacency, 1.0);
    Vector bc = Vector::Zero(n);
    for (int s = 0; s < static_cast<int>(n); ++s) {
        for (int t = 0; t < static_cast<int>(n); ++t) {
            if (s == t) continue;
            PathSearch search;
            search.arcs = &arcs;
            search.target = t;
            search.on_stack.assign(static_cast<std::size_t>(n), 0);
            search.on_stack[static_cast<std::size_t>(s)] = 1;
            search.dfs(s, 0.0);
            if (search.best_paths.empty()) continue;
            const double sigma = static_cast<double>(search.best_paths.size());
            for (const auto& path : search.best_paths) {
                for (const int v : path) {
                    if (v != t) bc[v] += 1.0 / sigma;
                }
            }
        }
    }
    return bc;
}

double brute_global_efficiency(const Matrix& adjacency) {
    const Index n = adjacency.rows();
    if (n < 2) return 0.0;
    const double w_max = adjacency.maxCoeff();
    if (w_max <= 0.0) return 0.0;
    const Matrix dist = allpairs_paths(adjacency, w_max);
    double total = 0.0;
    for (Index s = 0; s < n; ++s) {
        for (Index t = 0; t < n; ++t) {
            if (s == t) continue;
            if (std::isfinite(dist(s, t)) && dist(s, t) > 0.0) total += 1.0 / dist(s, t);
        }
    }
    return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

PairContingency pair_contingency(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("pair_contingency: size mismatch");
    PairContingency c;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 1 && b[i] == 1) ++c.n11;
        else if (a[i] == 1) ++c.n10;
        else if (b[i] == 1) ++c.n01;
        else ++c.n00;
    }
    return c;
}

}  // namespace meshband::oracles
