#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meshband/classifier.hpp"

#include <cmath>
#include <random>

using namespace meshband;

namespace {

struct Toy {
    Matrix x;
    std::vector<int> y;
};

// Two well-separated clusters in the plane.
Toy separable_two_class() {
    Toy toy;
    toy.x = Matrix(8, 2);
    toy.x << -2.0, 0.1, -2.5, -0.2, -3.0, 0.3, -2.2, -0.1,
              2.0, -0.1, 2.5, 0.2, 3.0, -0.3, 2.2, 0.1;
    toy.y = {1, 1, 1, 1, 2, 2, 2, 2};
    return toy;
}

Toy random_multiclass(Index n, Index f, int c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Toy toy;
    toy.x = Matrix(n, f);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < f; ++j) toy.x(i, j) = normal(rng);
    }
    toy.y.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) toy.y[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng() % c);
    return toy;
}

}  // namespace

TEST_CASE("separable toy set reaches training accuracy 1.0") {
    const Toy toy = separable_two_class();
    const auto model = train_logistic(toy.x, toy.y, 2, 1e-4, 0);
    CHECK(accuracy(predict_labels(model, toy.x), toy.y) == doctest::Approx(1.0));

    const auto margin_model = train_linear_max_margin(toy.x, toy.y, 2, 1e-4, 0);
    CHECK(accuracy(predict_labels(margin_model, toy.x), toy.y) == doctest::Approx(1.0));
}

TEST_CASE("analytic logistic gradient matches central finite differences") {
    const Toy toy = random_multiclass(12, 5, 3, 77);
    const double reg = 0.7;
    std::mt19937_64 rng(123);
    std::normal_distribution<double> normal(0.0, 0.5);

    for (int point = 0; point < 20; ++point) {
        Matrix w(3, 6);
        for (Index r = 0; r < 3; ++r) {
            for (Index c = 0; c < 6; ++c) w(r, c) = normal(rng);
        }
        const Matrix grad = logistic_gradient(w, toy.x, toy.y, reg);
        const double h = 1e-6;
        for (int probe = 0; probe < 4; ++probe) {
            const Index r = static_cast<Index>(rng() % 3);
            const Index c = static_cast<Index>(rng() % 6);
            Matrix plus = w, minus = w;
            plus(r, c) += h;
            minus(r, c) -= h;
            const double numeric =
                (logistic_loss(plus, toy.x, toy.y, reg) - logistic_loss(minus, toy.x, toy.y, reg)) /
                (2.0 * h);
            const double scale = std::max(1.0, std::abs(numeric));
            CHECK(std::abs(grad(r, c) - numeric) / scale < 1e-5);
        }
    }
}

TEST_CASE("duplicating every row leaves the decision function unchanged") {
    const Toy toy = random_multiclass(10, 4, 3, 5);
    Matrix doubled(20, 4);
    doubled.topRows(10) = toy.x;
    doubled.bottomRows(10) = toy.x;
    std::vector<int> doubled_y = toy.y;
    doubled_y.insert(doubled_y.end(), toy.y.begin(), toy.y.end());

    const auto base = train_logistic(toy.x, toy.y, 3, 0.5, 0);
    const auto twice = train_logistic(doubled, doubled_y, 3, 0.5, 0);
    CHECK((base.weights - twice.weights).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(predict_labels(base, toy.x) == predict_labels(twice, toy.x));
}

TEST_CASE("zero-weight model yields uniform posteriors") {
    LinearClassifierModel model;
    model.kind = ClassifierKind::logistic;
    model.n_classes = 4;
    model.weights = Matrix::Zero(4, 6);
    const Matrix x = random_multiclass(5, 5, 2, 9).x;
    const Matrix posteriors = predict_posteriors(model, x);
    for (Index i = 0; i < posteriors.rows(); ++i) {
        for (Index c = 0; c < 4; ++c) CHECK(posteriors(i, c) == doctest::Approx(0.25));
    }
}

TEST_CASE("posteriors are shift-invariant, strictly positive, rows sum to one") {
    const Toy toy = random_multiclass(15, 4, 3, 11);
    auto model = train_logistic(toy.x, toy.y, 3, 1.0, 0, 200);
    const Matrix before = predict_posteriors(model, toy.x);

    LinearClassifierModel shifted = model;
    shifted.weights.col(model.weights.cols() - 1).array() += 3.25;  // same constant per class bias
    const Matrix after = predict_posteriors(shifted, toy.x);
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);

    for (Index i = 0; i < before.rows(); ++i) {
        CHECK(std::abs(before.row(i).sum() - 1.0) <= 1e-12);
        for (Index c = 0; c < 3; ++c) CHECK(before(i, c) > 0.0);
    }
}

TEST_CASE("posteriors equal a by-hand softmax of the scores") {
    LinearClassifierModel model;
    model.kind = ClassifierKind::logistic;
    model.n_classes = 2;
    model.weights = Matrix(2, 3);
    model.weights << 1.0, -1.0, 0.5,
                     -0.5, 2.0, 0.0;
    Matrix x(1, 2);
    x << 0.3, -0.7;
    const double s1 = 1.0 * 0.3 + (-1.0) * (-0.7) + 0.5;  // 1.5
    const double s2 = -0.5 * 0.3 + 2.0 * (-0.7) + 0.0;    // -1.55
    const double z = std::exp(s1) + std::exp(s2);
    const Matrix posteriors = predict_posteriors(model, x);
    CHECK(posteriors(0, 0) == doctest::Approx(std::exp(s1) / z).epsilon(1e-12));
    CHECK(posteriors(0, 1) == doctest::Approx(std::exp(s2) / z).epsilon(1e-12));
}

TEST_CASE("single-class or undersized input is rejected") {
    Matrix x(3, 2);
    x << 1, 2, 3, 4, 5, 6;
    CHECK_THROWS(train_logistic(x, {1, 1, 1}, 2, 1.0, 0));
    CHECK_THROWS(train_logistic(x, {1, 2, 1}, 4, 1.0, 0));  // N < C
    CHECK_THROWS(train_linear_max_margin(x, {2, 2, 2}, 2, 1.0, 0));
    CHECK_THROWS(train_logistic(x, {1, 2, 5}, 2, 1.0, 0));  // label out of range
}

TEST_CASE("training loss is non-increasing in iteration budget") {
    const Toy toy = random_multiclass(20, 6, 3, 13);
    double previous = std::numeric_limits<double>::infinity();
    for (const int budget : {1, 2, 5, 10, 25, 60, 150}) {
        const auto model = train_logistic(toy.x, toy.y, 3, 1.0, 0, budget);
        CHECK(model.final_loss <= previous + 1e-12);
        previous = model.final_loss;
    }
}

TEST_CASE("two-class one-vs-rest degenerates to a sign rule") {
    const Toy toy = separable_two_class();
    const auto model = train_linear_max_margin(toy.x, toy.y, 2, 0.01, 0);
    // The two OVR problems are mirror images, so the weight rows negate.
    CHECK((model.weights.row(0) + model.weights.row(1)).cwiseAbs().maxCoeff() < 1e-12);

    const Matrix scores = predict_posteriors(model, toy.x);
    const std::vector<int> labels = predict_labels(model, toy.x);
    for (Index i = 0; i < toy.x.rows(); ++i) {
        const int by_sign = scores(i, 0) >= scores(i, 1) ? 1 : 2;
        CHECK(labels[static_cast<std::size_t>(i)] == by_sign);
    }
}

TEST_CASE("max-margin decisions survive feature doubling with matched reg") {
    const Toy toy = separable_two_class();
    const auto base = train_linear_max_margin(toy.x, toy.y, 2, 0.1, 0);
    const Matrix doubled = 2.0 * toy.x;
    const auto rescaled = train_linear_max_margin(doubled, toy.y, 2, 0.4, 0);
    CHECK(predict_labels(base, toy.x) == predict_labels(rescaled, doubled));
}

TEST_CASE("max-margin posteriors are softmax over margins") {
    const Toy toy = random_multiclass(10, 3, 3, 21);
    const auto model = train_linear_max_margin(toy.x, toy.y, 3, 0.5, 0, 200);
    const Matrix posteriors = predict_posteriors(model, toy.x);
    for (Index i = 0; i < posteriors.rows(); ++i) {
        CHECK(std::abs(posteriors.row(i).sum() - 1.0) <= 1e-12);
    }
}
