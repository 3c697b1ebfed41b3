#pragma once

#include "meshband/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace meshband {

enum class ClassifierKind { logistic, max_margin };

ClassifierKind classifier_kind_from_name(std::string_view name);
std::string classifier_kind_name(ClassifierKind kind);

/// Linear model over F features for C classes; weights is C x (F+1) with the
/// bias in the last column. Labels are 1-based class indices.
struct LinearClassifierModel {
    ClassifierKind kind = ClassifierKind::logistic;
    Matrix weights;
    int n_classes = 0;
    int iterations = 0;
    double final_loss = 0.0;
    std::uint64_t seed = 0;
};

/// Mean multinomial cross-entropy plus (reg/2)*||W||^2 over the non-bias
/// columns. The mean normalization makes the optimum invariant to
/// duplicating the dataset.
double logistic_loss(const Matrix& weights, const Matrix& features,
                     const std::vector<int>& labels, double reg);
Matrix logistic_gradient(const Matrix& weights, const Matrix& features,
                         const std::vector<int>& labels, double reg);

/// Deterministic full-batch gradient descent with backtracking line search;
/// stops when the gradient Frobenius norm drops to tol or after max_iter
/// iterations. Throws if labels cover fewer than two classes or N < C.
LinearClassifierModel train_logistic(const Matrix& features, const std::vector<int>& labels,
                                     int n_classes, double reg, std::uint64_t seed,
                                     int max_iter = 2000, double tol = 1e-6);

/// One-vs-rest hinge loss + L2, deterministic full-batch subgradient descent
/// on a fixed diminishing schedule; keeps the best-loss iterate.
LinearClassifierModel train_linear_max_margin(const Matrix& features,
                                              const std::vector<int>& labels, int n_classes,
                                              double reg, std::uint64_t seed,
                                              int max_iter = 2000);

/// Rows sum to one: softmax of the linear scores (for the max-margin kind,
/// softmax over the raw one-vs-rest margins).
Matrix predict_posteriors(const LinearClassifierModel& model, const Matrix& features);

/// Argmax of the scores, returned as 1-based labels.
std::vector<int> predict_labels(const LinearClassifierModel& model, const Matrix& features);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace meshband
