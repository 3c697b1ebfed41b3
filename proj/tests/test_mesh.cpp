#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meshband/mesh.hpp"
#include "meshband/oracles.hpp"

#include <algorithm>
#include <random>

using namespace meshband;

namespace {

Matrix random_session(Index regions, Index scans, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(regions, scans);
    for (Index r = 0; r < regions; ++r) {
        for (Index t = 0; t < scans; ++t) m(r, t) = normal(rng);
    }
    return m;
}

double pearson(const Vector& a, const Vector& b) {
    const Vector ca = a.array() - a.mean();
    const Vector cb = b.array() - b.mean();
    return ca.dot(cb) / (ca.norm() * cb.norm());
}

SubbandIndex band0() { return SubbandIndex::original(1); }

}  // namespace

TEST_CASE("identical rows correlate perfectly and rank first") {
    Matrix session = random_session(3, 30, 1);
    session.row(1) = session.row(0);
    const Neighborhood hood = functional_neighbors(session, 0, 1);
    CHECK(hood.neighbors == std::vector<int>{1});
    CHECK(pearson(session.row(0).transpose(), session.row(1).transpose()) ==
          doctest::Approx(1.0));
}

TEST_CASE("a negated copy ranks last under signed correlation") {
    Matrix session = random_session(4, 50, 2);
    session.row(3) = -session.row(0);
    const Neighborhood hood = functional_neighbors(session, 0, 2);
    CHECK(std::find(hood.neighbors.begin(), hood.neighbors.end(), 3) == hood.neighbors.end());
}

TEST_CASE("neighbor ranking matches the exhaustive sort oracle") {
    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        const Matrix session = random_session(6, 40, seed);
        for (int seed_region = 0; seed_region < 6; ++seed_region) {
            const Neighborhood hood = functional_neighbors(session, seed_region, 3);

            std::vector<std::pair<double, int>> ranked;
            for (int s = 0; s < 6; ++s) {
                if (s == seed_region) continue;
                ranked.push_back({pearson(session.row(seed_region).transpose(),
                                          session.row(s).transpose()),
                                  s});
            }
            std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            for (int i = 0; i < 3; ++i) {
                CHECK(hood.neighbors[static_cast<std::size_t>(i)] == ranked[static_cast<std::size_t>(i)].second);
            }
        }
    }
}

TEST_CASE("zero-variance rows are rejected by name") {
    Matrix session = random_session(4, 20, 3);
    session.row(2).setConstant(3.0);
    CHECK_THROWS_WITH_AS(functional_neighbors(session, 0, 2),
                         "region 2 has zero variance in this session window",
                         std::runtime_error);
    CHECK_THROWS_AS(standardize_rows(session), std::runtime_error);
    CHECK_THROWS_AS(functional_neighbors(session, 0, 4), std::invalid_argument);  // p >= R
}

TEST_CASE("ridge on an identical neighbor gives weight one, residual zero") {
    Matrix session = random_session(3, 25, 4);
    session.row(1) = session.row(0);
    const RidgeFit fit = ridge_mesh(session, {0, {1}}, 0.0);
    CHECK(fit.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.residual_variance < 1e-20);
}

TEST_CASE("huge lambda shrinks weights toward zero") {
    const Matrix session = random_session(5, 60, 5);
    const Neighborhood hood = functional_neighbors(session, 0, 3);
    const RidgeFit moderate = ridge_mesh(session, hood, 32.0);
    const RidgeFit extreme = ridge_mesh(session, hood, 1e9);
    CHECK(extreme.weights.norm() < moderate.weights.norm());
    CHECK(extreme.weights.norm() < 1e-6);
}

TEST_CASE("singular system with lambda=0 asks for regularization") {
    Matrix session = random_session(4, 30, 6);
    session.row(2) = session.row(1);  // collinear neighbor columns
    CHECK_THROWS_WITH_AS(ridge_mesh(session, {0, {1, 2}}, 0.0),
                         "ridge_mesh: singular normal equations; use a regularization lambda > 0",
                         std::runtime_error);
    CHECK_NOTHROW(ridge_mesh(session, {0, {1, 2}}, 0.5));
}

TEST_CASE("ridge weights match the dense normal-equations oracle") {
    for (std::uint64_t seed = 30; seed < 40; ++seed) {
        const Matrix session = random_session(4, 35, seed);
        for (const double lambda : {0.1, 32.0}) {
            const Neighborhood hood = functional_neighbors(session, 1, 2);
            const RidgeFit fit = ridge_mesh(session, hood, lambda);

            Matrix design(session.cols(), 2);
            for (Index i = 0; i < 2; ++i) {
                design.col(i) = session.row(hood.neighbors[static_cast<std::size_t>(i)]).transpose();
            }
            const Vector expected =
                oracles::dense_ridge_solve(design, session.row(1).transpose(), lambda);
            CHECK((fit.weights - expected).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("duplicated series split ridge weight relative to a single copy") {
    Matrix session = random_session(4, 60, 41);
    session.row(2) = session.row(1);  // duplicate region 1
    const double lambda = 8.0;

    const RidgeFit solo = ridge_mesh(session, {0, {1, 3}}, lambda);
    const RidgeFit dup = ridge_mesh(session, {0, {1, 2, 3}}, lambda);
    // Against the oracle as well.
    Matrix design(session.cols(), 3);
    design.col(0) = session.row(1).transpose();
    design.col(1) = session.row(2).transpose();
    design.col(2) = session.row(3).transpose();
    const Vector expected = oracles::dense_ridge_solve(design, session.row(0).transpose(), lambda);
    CHECK((dup.weights - expected).cwiseAbs().maxCoeff() < 1e-9);

    CHECK(dup.weights[0] == doctest::Approx(dup.weights[1]).epsilon(1e-9));
    CHECK(std::abs(dup.weights[0]) < std::abs(solo.weights[0]));
    CHECK(dup.weights[0] + dup.weights[1] ==
          doctest::Approx(solo.weights[0]).epsilon(0.05));
}

TEST_CASE("ridge objective is locally optimal") {
    const Matrix session = random_session(6, 50, 42);
    const Neighborhood hood = functional_neighbors(session, 0, 3);
    const double lambda = 4.0;
    const RidgeFit fit = ridge_mesh(session, hood, lambda);

    Matrix design(session.cols(), 3);
    for (Index i = 0; i < 3; ++i) {
        design.col(i) = session.row(hood.neighbors[static_cast<std::size_t>(i)]).transpose();
    }
    const Vector y = session.row(0).transpose();
    const auto objective = [&](const Vector& w) {
        return (y - design * w).squaredNorm() + lambda * w.squaredNorm();
    };
    const double at_solution = objective(fit.weights);
    CHECK(at_solution <= objective(Vector::Zero(3)));
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 0.05);
    for (int trial = 0; trial < 100; ++trial) {
        Vector perturbed = fit.weights;
        for (Index i = 0; i < 3; ++i) perturbed[i] += normal(rng);
        CHECK(at_solution <= objective(perturbed) + 1e-12);
    }
}

TEST_CASE("solver output is bit-reproducible") {
    const Matrix session = random_session(5, 45, 43);
    const Neighborhood hood = functional_neighbors(session, 2, 3);
    const RidgeFit a = ridge_mesh(session, hood, 32.0);
    const RidgeFit b = ridge_mesh(session, hood, 32.0);
    CHECK(a.weights == b.weights);
    CHECK(a.residual_variance == b.residual_variance);
}

TEST_CASE("scaling the seed scales its incoming weights (standardization off)") {
    Matrix session = random_session(5, 40, 44);
    const Neighborhood hood = functional_neighbors(session, 0, 2);
    const RidgeFit base = ridge_mesh(session, hood, 3.0);
    session.row(0) *= 2.0;
    const RidgeFit scaled = ridge_mesh(session, hood, 3.0);
    CHECK((scaled.weights - 2.0 * base.weights).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("mesh network rows have exactly p nonzeros and zero diagonal") {
    const Matrix session = random_session(8, 64, 45);
    const MeshNetwork network = build_mesh_network(session, 3, 2.0, true, band0(), {});
    for (Index r = 0; r < 8; ++r) {
        int nonzeros = 0;
        for (Index s = 0; s < 8; ++s) {
            if (network.adjacency(r, s) != 0.0) ++nonzeros;
        }
        CHECK(nonzeros == 3);
        CHECK(network.adjacency(r, r) == 0.0);
    }
    // Witnessed asymmetry on a random instance.
    bool asymmetric = false;
    for (Index r = 0; r < 8 && !asymmetric; ++r) {
        for (Index s = 0; s < 8; ++s) {
            if (network.adjacency(r, s) != network.adjacency(s, r)) {
                asymmetric = true;
                break;
            }
        }
    }
    CHECK(asymmetric);
}

TEST_CASE("embedding flattens row-major and round-trips") {
    MeshNetwork network;
    network.adjacency = Matrix(2, 2);
    network.adjacency << 0.0, 0.25, -0.75, 0.0;
    const Vector flat = embed_mesh(network);
    CHECK(flat.size() == 4);
    CHECK(flat[0] == 0.0);
    CHECK(flat[1] == 0.25);
    CHECK(flat[2] == -0.75);
    CHECK(flat[3] == 0.0);
    CHECK(unflatten_embedding(flat, 2) == network.adjacency);

    network.adjacency.setZero();
    CHECK(embed_mesh(network).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pairwise correlation features are symmetric with unit diagonal") {
    Matrix session = random_session(5, 30, 46);
    session.row(3) = session.row(1);
    const Vector features = pairwise_correlation_features(session);
    const Matrix grid = unflatten_embedding(features, 5);
    for (Index r = 0; r < 5; ++r) {
        CHECK(grid(r, r) == 1.0);
        for (Index s = 0; s < 5; ++s) {
            CHECK(std::abs(grid(r, s) - grid(s, r)) < 1e-12);
        }
    }
    CHECK(grid(1, 3) == doctest::Approx(1.0));

    // Definitional covariance/std oracle.
    for (Index r = 0; r < 5; ++r) {
        for (Index s = 0; s < 5; ++s) {
            if (r == s) continue;
            CHECK(grid(r, s) == doctest::Approx(pearson(session.row(r).transpose(),
                                                        session.row(s).transpose()))
                                    .epsilon(1e-12));
        }
    }
}

TEST_CASE("raw series features truncate or zero-pad to the fixed length") {
    const Matrix session = random_session(2, 6, 47);

    const Vector exact = raw_series_features(session, 6);
    CHECK(exact.size() == 12);
    CHECK(exact[0] == session(0, 0));
    CHECK(exact[6] == session(1, 0));

    const Vector padded = raw_series_features(session, 9);
    CHECK(padded.size() == 18);
    for (Index t = 6; t < 9; ++t) {
        CHECK(padded[t] == 0.0);
        CHECK(padded[9 + t] == 0.0);
    }

    const Vector truncated = raw_series_features(session, 4);
    CHECK(truncated.size() == 8);
    CHECK(truncated[3] == session(0, 3));
    CHECK(truncated[4] == session(1, 0));
}
