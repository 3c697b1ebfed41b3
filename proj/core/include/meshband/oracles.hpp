#pragma once

#include "meshband/diversity.hpp"
#include "meshband/types.hpp"
#include "meshband/wavelet.hpp"

#include <vector>

namespace meshband::oracles {

/// Slow, obviously-correct reference implementations. These deliberately
/// avoid the library's solver and transform code paths; they exist for the
/// test suites and the `verify` command.

/// Solves (N'N + lambda I) w = N'y by Gaussian elimination with partial
/// pivoting on a dense copy.
Vector dense_ridge_solve(const Matrix& design, const Vector& target, double lambda);

/// The n x n single-level analysis matrix: the first n/2 rows are the
/// decimated periodic lowpass shifts, the rest the highpass shifts.
Matrix single_level_matrix(const WaveletFamily& family, Index n);

/// Full pyramid computed by explicit matrix multiplication per level.
WaveletCoefficients matrix_dwt(const Vector& signal, const WaveletFamily& family, int levels);

/// All-pairs shortest-path distances over the positive arcs of a mesh
/// adjacency (arc s -> r stored at (r, s)), lengths scale / w, found by
/// exhaustive relaxation sweeps. Unreachable pairs stay infinite.
Matrix allpairs_paths(const Matrix& adjacency, double scale);

/// Betweenness by exhaustive enumeration of simple paths (graphs of a few
/// nodes only).
Vector brute_betweenness(const Matrix& adjacency);

double brute_global_efficiency(const Matrix& adjacency);

/// 2x2 agreement counts between two binary columns.
PairContingency pair_contingency(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace meshband::oracles
