#include "meshband/fsg.hpp"

#include "meshband/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace meshband {

namespace {

// splitmix64; used so fold shuffles are identical across platforms.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void check_aligned(const std::vector<FeatureTable>& tables) {
    if (tables.empty()) throw std::invalid_argument("decision space: no feature tables");
    const auto& first = tables.front();
    for (const auto& t : tables) {
        if (t.labels != first.labels || t.subject_ids != first.subject_ids) {
            throw std::invalid_argument(
                "decision space: feature tables are misaligned (row order differs)");
        }
    }
}

LinearClassifierModel train_base(ClassifierKind kind, const Matrix& x,
                                 const std::vector<int>& y, int n_classes, double reg,
                                 std::uint64_t seed) {
    if (kind == ClassifierKind::logistic) return train_logistic(x, y, n_classes, reg, seed);
    return train_linear_max_margin(x, y, n_classes, reg, seed);
}

Matrix take_rows(const Matrix& m, const std::vector<std::int64_t>& rows) {
    Matrix out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Index>(i)) = m.row(rows[i]);
    }
    return out;
}

}  // namespace

int FoldPlan::fold_of(const std::string& subject_id) const {
    const auto it = assignment.find(subject_id);
    if (it == assignment.end()) {
        throw std::invalid_argument("fold plan: unknown subject " + subject_id);
    }
    return it->second;
}

FoldPlan make_fold_plan(const std::vector<std::string>& subject_ids, int k,
                        std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("fold plan: k must be >= 2");
    if (static_cast<int>(subject_ids.size()) < k) {
        throw std::invalid_argument("fold plan: fewer subjects than folds");
    }

    std::vector<std::string> shuffled = subject_ids;
    // Fisher-Yates with splitmix64 draws; std::shuffle is not portable.
    std::uint64_t state = seed;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
        state = mix64(state);
        std::swap(shuffled[i], shuffled[state % (i + 1)]);
    }

    FoldPlan plan;
    plan.k = k;
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
        plan.assignment[shuffled[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return plan;
}

MetaKind meta_kind_from_name(std::string_view name) {
    if (name == "logistic") return MetaKind::logistic;
    if (name == "maxmargin" || name == "max_margin" || name == "svm") return MetaKind::max_margin;
    if (name == "mv" || name == "majority") return MetaKind::majority_vote;
    if (name == "wmv" || name == "weighted_majority") return MetaKind::weighted_majority_vote;
    throw std::invalid_argument("unknown meta kind: " + std::string(name));
}

std::string meta_kind_name(MetaKind kind) {
    switch (kind) {
        case MetaKind::logistic: return "logistic";
        case MetaKind::max_margin: return "maxmargin";
        case MetaKind::majority_vote: return "mv";
        case MetaKind::weighted_majority_vote: return "wmv";
    }
    return "logistic";
}

DecisionSpace build_decision_space(const std::vector<FeatureTable>& tables, const FoldPlan& plan,
                                   int test_fold, ClassifierKind base_kind, double reg,
                                   std::uint64_t seed) {
    check_aligned(tables);
    if (plan.k < 3) {
        throw std::invalid_argument(
            "decision space: k must be >= 3 so the training folds support nested validation");
    }
    if (test_fold < 0 || test_fold >= plan.k) {
        throw std::invalid_argument("decision space: test fold outside [0, k)");
    }

    const auto& labels = tables.front().labels;
    const auto& subjects = tables.front().subject_ids;
    const std::int64_t n = static_cast<std::int64_t>(labels.size());

    int n_classes = 0;
    for (const int label : labels) n_classes = std::max(n_classes, label);

    std::vector<std::int64_t> train_rows, test_rows;
    std::vector<int> row_fold(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const int fold = plan.fold_of(subjects[static_cast<std::size_t>(i)]);
        row_fold[static_cast<std::size_t>(i)] = fold;
        (fold == test_fold ? test_rows : train_rows).push_back(i);
    }
    if (train_rows.empty() || test_rows.empty()) {
        throw std::invalid_argument("decision space: empty train or test fold");
    }

    const int e_count = static_cast<int>(tables.size());
    DecisionSpace space;
    space.n_classes = n_classes;
    space.base_order.reserve(tables.size());
    for (const auto& t : tables) space.base_order.push_back(t.subband);
    space.train_features.resize(static_cast<Index>(train_rows.size()),
                                static_cast<Index>(n_classes) * e_count);
    space.test_features.resize(static_cast<Index>(test_rows.size()),
                               static_cast<Index>(n_classes) * e_count);
    for (const std::int64_t row : train_rows) {
        space.train_labels.push_back(labels[static_cast<std::size_t>(row)]);
        space.train_subjects.push_back(subjects[static_cast<std::size_t>(row)]);
    }
    for (const std::int64_t row : test_rows) {
        space.test_labels.push_back(labels[static_cast<std::size_t>(row)]);
        space.test_subjects.push_back(subjects[static_cast<std::size_t>(row)]);
    }
    space.test_session_rows = test_rows;
    space.base_train_accuracy.assign(tables.size(), 0.0);
    space.base_test_accuracy.assign(tables.size(), 0.0);

    // Position of each global train row inside train_features.
    std::vector<std::int64_t> train_pos(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        train_pos[static_cast<std::size_t>(train_rows[i])] = static_cast<std::int64_t>(i);
    }

    for (int e = 0; e < e_count; ++e) {
        const FeatureTable& table = tables[static_cast<std::size_t>(e)];
        const Index block = static_cast<Index>(e) * n_classes;

        // Nested pass: each training fold is predicted by bases trained on
        // the remaining training folds.
        std::vector<int> nested_pred(train_rows.size(), 0);
        for (int inner = 0; inner < plan.k; ++inner) {
            if (inner == test_fold) continue;
            std::vector<std::int64_t> fit_rows, holdout_rows;
            for (const std::int64_t row : train_rows) {
                (row_fold[static_cast<std::size_t>(row)] == inner ? holdout_rows : fit_rows)
                    .push_back(row);
            }
            if (holdout_rows.empty()) continue;
            std::vector<int> fit_labels;
            fit_labels.reserve(fit_rows.size());
            for (const std::int64_t row : fit_rows) {
                fit_labels.push_back(labels[static_cast<std::size_t>(row)]);
            }
            const LinearClassifierModel model =
                train_base(base_kind, take_rows(table.features, fit_rows), fit_labels,
                           n_classes, reg, seed);
            const Matrix holdout = take_rows(table.features, holdout_rows);
            const Matrix posteriors = predict_posteriors(model, holdout);
            const std::vector<int> predicted = predict_labels(model, holdout);
            for (std::size_t i = 0; i < holdout_rows.size(); ++i) {
                const std::int64_t pos = train_pos[static_cast<std::size_t>(holdout_rows[i])];
                space.train_features.block(pos, block, 1, n_classes) =
                    posteriors.row(static_cast<Index>(i));
                nested_pred[static_cast<std::size_t>(pos)] = predicted[i];
            }
        }
        space.base_train_accuracy[static_cast<std::size_t>(e)] =
            accuracy(nested_pred, space.train_labels);

        // Direct pass: bases trained on all training folds predict the test fold.
        const LinearClassifierModel model =
            train_base(base_kind, take_rows(table.features, train_rows), space.train_labels,
                       n_classes, reg, seed);
        const Matrix test_x = take_rows(table.features, test_rows);
        space.test_features.block(0, block, space.test_features.rows(), n_classes) =
            predict_posteriors(model, test_x);
        space.base_test_accuracy[static_cast<std::size_t>(e)] =
            accuracy(predict_labels(model, test_x), space.test_labels);
    }
    return space;
}

namespace {

std::vector<int> vote(const Matrix& features, int n_classes,
                      const std::vector<double>* weights) {
    const Index e_count = features.cols() / n_classes;
    std::vector<int> out(static_cast<std::size_t>(features.rows()));
    for (Index row = 0; row < features.rows(); ++row) {
        std::vector<double> tally(static_cast<std::size_t>(n_classes), 0.0);
        std::vector<double> membership_sum(static_cast<std::size_t>(n_classes), 0.0);
        for (Index e = 0; e < e_count; ++e) {
            const auto block = features.row(row).segment(e * n_classes, n_classes);
            Index winner = 0;
            block.maxCoeff(&winner);
            tally[static_cast<std::size_t>(winner)] +=
                weights ? (*weights)[static_cast<std::size_t>(e)] : 1.0;
            for (Index c = 0; c < n_classes; ++c) {
                membership_sum[static_cast<std::size_t>(c)] += block[c];
            }
        }
        int best = 0;
        for (int c = 1; c < n_classes; ++c) {
            const auto cu = static_cast<std::size_t>(c);
            const auto bu = static_cast<std::size_t>(best);
            if (tally[cu] > tally[bu] ||
                (tally[cu] == tally[bu] && membership_sum[cu] > membership_sum[bu])) {
                best = c;
            }
        }
        out[static_cast<std::size_t>(row)] = best + 1;
    }
    return out;
}

}  // namespace

std::vector<int> majority_vote(const Matrix& decision_features, int n_classes) {
    return vote(decision_features, n_classes, nullptr);
}

std::vector<int> weighted_majority_vote(const Matrix& decision_features, int n_classes,
                                        const std::vector<double>& weights) {
    if (static_cast<Index>(weights.size()) != decision_features.cols() / n_classes) {
        throw std::invalid_argument("weighted_majority_vote: one weight per base required");
    }
    return vote(decision_features, n_classes, &weights);
}

FoldOutcome fsg_classify(const DecisionSpace& space, MetaKind meta, double reg,
                         std::uint64_t seed) {
    FoldOutcome outcome;
    switch (meta) {
        case MetaKind::logistic:
        case MetaKind::max_margin: {
            const ClassifierKind kind = (meta == MetaKind::logistic)
                                            ? ClassifierKind::logistic
                                            : ClassifierKind::max_margin;
            const LinearClassifierModel model =
                train_base(kind, space.train_features, space.train_labels, space.n_classes,
                           reg, seed);
            outcome.predictions = predict_labels(model, space.test_features);
            break;
        }
        case MetaKind::majority_vote:
            outcome.predictions = majority_vote(space.test_features, space.n_classes);
            break;
        case MetaKind::weighted_majority_vote:
            outcome.predictions = weighted_majority_vote(space.test_features, space.n_classes,
                                                         space.base_train_accuracy);
            break;
    }
    outcome.accuracy = accuracy(outcome.predictions, space.test_labels);
    return outcome;
}

FsgRunResult run_fsg(const std::vector<FeatureTable>& tables, const FoldPlan& plan,
                     ClassifierKind base_kind, MetaKind meta, double reg, std::uint64_t seed,
                     int n_threads) {
    check_aligned(tables);
    const std::int64_t n = static_cast<std::int64_t>(tables.front().labels.size());
    int n_classes = 0;
    for (const int label : tables.front().labels) n_classes = std::max(n_classes, label);
    const Index width = static_cast<Index>(n_classes) * static_cast<Index>(tables.size());

    FsgRunResult result;
    result.base_order.reserve(tables.size());
    for (const auto& t : tables) result.base_order.push_back(t.subband);
    result.labels = tables.front().labels;
    result.subject_ids = tables.front().subject_ids;
    result.memberships = Matrix::Zero(n, width);
    result.confusion = Matrix::Zero(n_classes, n_classes);
    result.fold_accuracies.assign(static_cast<std::size_t>(plan.k), 0.0);
    result.base_mean_accuracy.assign(tables.size(), 0.0);
    result.base_std_accuracy.assign(tables.size(), 0.0);
    result.base_train_accuracy.assign(tables.size(), 0.0);

    std::vector<DecisionSpace> spaces(static_cast<std::size_t>(plan.k));
    std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(plan.k));
    parallel_for(plan.k, n_threads, [&](int fold) {
        spaces[static_cast<std::size_t>(fold)] =
            build_decision_space(tables, plan, fold, base_kind, reg, seed);
        outcomes[static_cast<std::size_t>(fold)] =
            fsg_classify(spaces[static_cast<std::size_t>(fold)], meta, reg, seed);
    });

    Matrix base_acc(plan.k, static_cast<Index>(tables.size()));
    for (int fold = 0; fold < plan.k; ++fold) {
        const DecisionSpace& space = spaces[static_cast<std::size_t>(fold)];
        const FoldOutcome& outcome = outcomes[static_cast<std::size_t>(fold)];
        result.fold_accuracies[static_cast<std::size_t>(fold)] = outcome.accuracy;
        for (std::size_t i = 0; i < space.test_session_rows.size(); ++i) {
            result.memberships.row(space.test_session_rows[i]) =
                space.test_features.row(static_cast<Index>(i));
            result.confusion(space.test_labels[i] - 1, outcome.predictions[i] - 1) += 1.0;
        }
        for (std::size_t e = 0; e < tables.size(); ++e) {
            base_acc(fold, static_cast<Index>(e)) = space.base_test_accuracy[e];
            result.base_train_accuracy[e] +=
                space.base_train_accuracy[e] / static_cast<double>(plan.k);
        }
    }

    const double k = static_cast<double>(plan.k);
    double mean = 0.0;
    for (const double a : result.fold_accuracies) mean += a;
    mean /= k;
    double var = 0.0;
    for (const double a : result.fold_accuracies) var += (a - mean) * (a - mean);
    result.mean_accuracy = mean;
    result.std_accuracy = std::sqrt(var / k);

    for (std::size_t e = 0; e < tables.size(); ++e) {
        const double m = base_acc.col(static_cast<Index>(e)).mean();
        result.base_mean_accuracy[e] = m;
        result.base_std_accuracy[e] = std::sqrt(
            (base_acc.col(static_cast<Index>(e)).array() - m).square().mean());
    }
    return result;
}

}  // namespace meshband
