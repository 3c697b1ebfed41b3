#pragma once

#include "meshband/classifier.hpp"
#include "meshband/mesh.hpp"
#include "meshband/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace meshband {

/// Subject-level fold assignment; every session of a subject shares its
/// subject's fold, so train and test folds contain disjoint subjects.
struct FoldPlan {
    int k = 0;
    std::map<std::string, int> assignment;

    int fold_of(const std::string& subject_id) const;
};

/// Subjects are shuffled by a seeded generator and dealt round-robin, so
/// fold sizes differ by at most one.
FoldPlan make_fold_plan(const std::vector<std::string>& subject_ids, int k, std::uint64_t seed);

enum class MetaKind { logistic, max_margin, majority_vote, weighted_majority_vote };

MetaKind meta_kind_from_name(std::string_view name);
std::string meta_kind_name(MetaKind kind);

/// Concatenated base-layer memberships for one outer fold. Training rows
/// carry nested leave-one-fold-out predictions (no row is predicted by a
/// model that saw it); test rows carry direct predictions from bases
/// trained on all training folds.
struct DecisionSpace {
    Matrix train_features;  // N_train x (C*E)
    Matrix test_features;   // N_test x (C*E)
    std::vector<int> train_labels, test_labels;
    std::vector<std::string> train_subjects, test_subjects;
    std::vector<std::int64_t> test_session_rows;  // global row indices
    std::vector<SubbandIndex> base_order;
    int n_classes = 0;
    std::vector<double> base_train_accuracy;  // per base, nested-CV accuracy
    std::vector<double> base_test_accuracy;   // per base, accuracy on the test fold
};

DecisionSpace build_decision_space(const std::vector<FeatureTable>& tables, const FoldPlan& plan,
                                   int test_fold, ClassifierKind base_kind, double reg,
                                   std::uint64_t seed);

struct FoldOutcome {
    std::vector<int> predictions;  // test part, 1-based labels
    double accuracy = 0.0;
};

/// Meta layer on one fold's decision space: a trained classifier for
/// logistic/max_margin, or a voting rule over the base blocks.
FoldOutcome fsg_classify(const DecisionSpace& space, MetaKind meta, double reg,
                         std::uint64_t seed);

/// Each base votes the argmax of its C-block; plurality wins, ties broken by
/// summed membership for the tied classes, then by lowest class index.
std::vector<int> majority_vote(const Matrix& decision_features, int n_classes);
std::vector<int> weighted_majority_vote(const Matrix& decision_features, int n_classes,
                                        const std::vector<double>& weights);

struct FsgRunResult {
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population convention over folds
    Matrix confusion;           // C x C, rows = truth
    std::vector<SubbandIndex> base_order;
    std::vector<double> base_mean_accuracy;   // per base, mean over folds (test side)
    std::vector<double> base_std_accuracy;
    std::vector<double> base_train_accuracy;  // per base, mean nested-CV accuracy
    Matrix memberships;  // N x (C*E), out-of-fold test memberships per session
    std::vector<int> labels;
    std::vector<std::string> subject_ids;
};

/// Full k-fold run: builds each fold's decision space, applies the meta
/// rule, and assembles the out-of-fold membership matrix.
FsgRunResult run_fsg(const std::vector<FeatureTable>& tables, const FoldPlan& plan,
                     ClassifierKind base_kind, MetaKind meta, double reg, std::uint64_t seed,
                     int n_threads = 1);

}  // namespace meshband
