#include "meshband/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace meshband {

namespace {

Matrix with_bias(const Matrix& features) {
    Matrix out(features.rows(), features.cols() + 1);
    out.leftCols(features.cols()) = features;
    out.col(features.cols()).setOnes();
    return out;
}

void check_training_inputs(const Matrix& features, const std::vector<int>& labels,
                           int n_classes) {
    if (static_cast<Index>(labels.size()) != features.rows()) {
        throw std::invalid_argument("training: label count does not match feature rows");
    }
    if (features.rows() < n_classes) {
        throw std::invalid_argument("training: need at least one sample per class (N >= C)");
    }
    std::set<int> distinct;
    for (const int label : labels) {
        if (label < 1 || label > n_classes) {
            throw std::invalid_argument("training: label " + std::to_string(label) +
                                        " outside [1, " + std::to_string(n_classes) + "]");
        }
        distinct.insert(label);
    }
    if (distinct.size() < 2) {
        throw std::invalid_argument("training: labels cover fewer than two classes");
    }
}

Matrix row_softmax(Matrix scores) {
    for (Index n = 0; n < scores.rows(); ++n) {
        const double m = scores.row(n).maxCoeff();
        scores.row(n) = (scores.row(n).array() - m).exp();
        scores.row(n) /= scores.row(n).sum();
    }
    return scores;
}

// Regularizer acts on everything except the bias column.
double l2_penalty(const Matrix& weights, double reg) {
    return 0.5 * reg * weights.leftCols(weights.cols() - 1).squaredNorm();
}

}  // namespace

ClassifierKind classifier_kind_from_name(std::string_view name) {
    if (name == "logistic") return ClassifierKind::logistic;
    if (name == "maxmargin" || name == "max_margin" || name == "svm") {
        return ClassifierKind::max_margin;
    }
    throw std::invalid_argument("unknown classifier kind: " + std::string(name));
}

std::string classifier_kind_name(ClassifierKind kind) {
    return kind == ClassifierKind::logistic ? "logistic" : "maxmargin";
}

double logistic_loss(const Matrix& weights, const Matrix& features,
                     const std::vector<int>& labels, double reg) {
    const Matrix xb = with_bias(features);
    const Matrix scores = xb * weights.transpose();
    double loss = 0.0;
    for (Index n = 0; n < scores.rows(); ++n) {
        const double m = scores.row(n).maxCoeff();
        const double log_sum = std::log((scores.row(n).array() - m).exp().sum()) + m;
        loss += log_sum - scores(n, labels[static_cast<std::size_t>(n)] - 1);
    }
    return loss / static_cast<double>(scores.rows()) + l2_penalty(weights, reg);
}

Matrix logistic_gradient(const Matrix& weights, const Matrix& features,
                         const std::vector<int>& labels, double reg) {
    const Matrix xb = with_bias(features);
    Matrix residual = row_softmax(xb * weights.transpose());  // N x C
    for (Index n = 0; n < residual.rows(); ++n) {
        residual(n, labels[static_cast<std::size_t>(n)] - 1) -= 1.0;
    }
    Matrix grad = (residual.transpose() * xb) / static_cast<double>(xb.rows());
    grad.leftCols(grad.cols() - 1) += reg * weights.leftCols(weights.cols() - 1);
    return grad;
}

LinearClassifierModel train_logistic(const Matrix& features, const std::vector<int>& labels,
                                     int n_classes, double reg, std::uint64_t seed,
                                     int max_iter, double tol) {
    check_training_inputs(features, labels, n_classes);

    LinearClassifierModel model;
    model.kind = ClassifierKind::logistic;
    model.n_classes = n_classes;
    model.seed = seed;
    model.weights = Matrix::Zero(n_classes, features.cols() + 1);

    double loss = logistic_loss(model.weights, features, labels, reg);
    double step = 1.0;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        const Matrix grad = logistic_gradient(model.weights, features, labels, reg);
        const double grad_norm_sq = grad.squaredNorm();
        if (std::sqrt(grad_norm_sq) <= tol) break;

        // Backtracking line search with Armijo condition; the accepted step
        // seeds the next iteration so well-behaved regions take few probes.
        step = std::min(step * 2.0, 1e6);
        bool accepted = false;
        for (int probe = 0; probe < 60; ++probe) {
            const Matrix candidate = model.weights - step * grad;
            const double cand_loss = logistic_loss(candidate, features, labels, reg);
            if (cand_loss <= loss - 1e-4 * step * grad_norm_sq) {
                model.weights = candidate;
                loss = cand_loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: no descent direction left
    }
    model.iterations = iter;
    model.final_loss = loss;
    return model;
}

namespace {

double hinge_objective(const Matrix& weights, const Matrix& xb,
                       const Matrix& sign_targets, double reg) {
    const Matrix margins = xb * weights.transpose();  // N x C
    const double n = static_cast<double>(xb.rows());
    const auto losses = (1.0 - sign_targets.array() * margins.array()).max(0.0);
    return losses.sum() / n + l2_penalty(weights, reg);
}

}  // namespace

LinearClassifierModel train_linear_max_margin(const Matrix& features,
                                              const std::vector<int>& labels, int n_classes,
                                              double reg, std::uint64_t seed, int max_iter) {
    check_training_inputs(features, labels, n_classes);
    const Matrix xb = with_bias(features);
    const double n = static_cast<double>(xb.rows());

    Matrix sign_targets(xb.rows(), n_classes);  // +1 for own class, -1 otherwise
    sign_targets.setConstant(-1.0);
    for (Index i = 0; i < xb.rows(); ++i) {
        sign_targets(i, labels[static_cast<std::size_t>(i)] - 1) = 1.0;
    }

    LinearClassifierModel model;
    model.kind = ClassifierKind::max_margin;
    model.n_classes = n_classes;
    model.seed = seed;

    Matrix weights = Matrix::Zero(n_classes, xb.cols());
    Matrix best = weights;
    double best_loss = hinge_objective(weights, xb, sign_targets, reg);

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        const Matrix margins = xb * weights.transpose();
        // Subgradient of the mean hinge: -y_n x_n where the margin is violated.
        Matrix active = ((sign_targets.array() * margins.array()) < 1.0)
                            .select(-sign_targets, Matrix::Zero(xb.rows(), n_classes));
        Matrix grad = (active.transpose() * xb) / n;
        grad.leftCols(grad.cols() - 1) += reg * weights.leftCols(weights.cols() - 1);

        const double step = 1.0 / std::sqrt(static_cast<double>(iter) + 1.0);
        weights -= step * grad;

        const double loss = hinge_objective(weights, xb, sign_targets, reg);
        if (loss < best_loss) {
            best_loss = loss;
            best = weights;
        }
    }
    model.weights = best;
    model.iterations = iter;
    model.final_loss = best_loss;
    return model;
}

Matrix predict_posteriors(const LinearClassifierModel& model, const Matrix& features) {
    return row_softmax(with_bias(features) * model.weights.transpose());
}

std::vector<int> predict_labels(const LinearClassifierModel& model, const Matrix& features) {
    const Matrix scores = with_bias(features) * model.weights.transpose();
    std::vector<int> out(static_cast<std::size_t>(scores.rows()));
    for (Index i = 0; i < scores.rows(); ++i) {
        Index best = 0;
        scores.row(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
    }
    return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size() || truth.empty()) {
        throw std::invalid_argument("accuracy: size mismatch or empty input");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] == truth[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

}  // namespace meshband
