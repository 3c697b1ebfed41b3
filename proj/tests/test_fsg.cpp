#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meshband/fsg.hpp"

#include <random>
#include <set>

using namespace meshband;

namespace {

// A small aligned multi-band corpus: six subjects, two sessions each, with a
// band-dependent class signal so bases are imperfect but informative.
std::vector<FeatureTable> toy_tables(int n_bands, std::uint64_t seed, double signal = 2.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n_subjects = 6;
    const int per_subject = 2;
    const Index n = n_subjects * per_subject;
    const Index f = 4;

    std::vector<FeatureTable> tables(static_cast<std::size_t>(n_bands));
    std::vector<int> labels;
    std::vector<std::string> subjects;
    for (int u = 0; u < n_subjects; ++u) {
        for (int q = 0; q < per_subject; ++q) {
            labels.push_back(1 + (q + u) % 2);
            subjects.push_back("subj" + std::to_string(u));
        }
    }
    for (int b = 0; b < n_bands; ++b) {
        FeatureTable& table = tables[static_cast<std::size_t>(b)];
        table.kind = FeatureKind::mesh_arcs;
        table.subband = SubbandIndex(b, n_bands);
        table.labels = labels;
        table.subject_ids = subjects;
        table.features = Matrix(n, f);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < f; ++j) {
                table.features(i, j) = normal(rng);
            }
            // class signal lives in coordinate b % f
            table.features(i, b % f) +=
                (labels[static_cast<std::size_t>(i)] == 1 ? signal : -signal);
        }
    }
    return tables;
}

}  // namespace

TEST_CASE("fold plans are balanced, seeded, and subject-complete") {
    std::vector<std::string> ids;
    for (int u = 0; u < 11; ++u) ids.push_back("s" + std::to_string(u));

    const FoldPlan plan = make_fold_plan(ids, 3, 42);
    const FoldPlan again = make_fold_plan(ids, 3, 42);
    CHECK(plan.assignment == again.assignment);

    const FoldPlan other = make_fold_plan(ids, 3, 43);
    CHECK(plan.assignment != other.assignment);

    std::vector<int> sizes(3, 0);
    for (const auto& [id, fold] : plan.assignment) {
        CHECK(fold >= 0);
        CHECK(fold < 3);
        ++sizes[static_cast<std::size_t>(fold)];
    }
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*hi - *lo <= 1);
    CHECK(plan.assignment.size() == ids.size());

    // k = N gives leave-one-subject-out.
    const FoldPlan loso = make_fold_plan(ids, 11, 1);
    std::set<int> folds;
    for (const auto& [id, fold] : loso.assignment) folds.insert(fold);
    CHECK(folds.size() == 11);

    CHECK_THROWS(make_fold_plan(ids, 1, 0));
    CHECK_THROWS(make_fold_plan(ids, 12, 0));
}

TEST_CASE("decision space with one base equals that base's posterior matrix") {
    const auto tables = toy_tables(1, 7);
    const FoldPlan plan = make_fold_plan(
        {"subj0", "subj1", "subj2", "subj3", "subj4", "subj5"}, 3, 5);
    const DecisionSpace space =
        build_decision_space(tables, plan, 0, ClassifierKind::logistic, 1.0, 0);
    CHECK(space.test_features.cols() == 2);

    // Reproduce the direct pass by hand.
    std::vector<std::int64_t> train_rows, test_rows;
    for (std::int64_t i = 0; i < 12; ++i) {
        const int fold = plan.fold_of(tables[0].subject_ids[static_cast<std::size_t>(i)]);
        (fold == 0 ? test_rows : train_rows).push_back(i);
    }
    Matrix train_x(static_cast<Index>(train_rows.size()), 4);
    std::vector<int> train_y;
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        train_x.row(static_cast<Index>(i)) = tables[0].features.row(train_rows[i]);
        train_y.push_back(tables[0].labels[static_cast<std::size_t>(train_rows[i])]);
    }
    const auto model = train_logistic(train_x, train_y, 2, 1.0, 0);
    Matrix test_x(static_cast<Index>(test_rows.size()), 4);
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
        test_x.row(static_cast<Index>(i)) = tables[0].features.row(test_rows[i]);
    }
    const Matrix expected = predict_posteriors(model, test_x);
    CHECK((space.test_features - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("every C-block of every row sums to one") {
    const auto tables = toy_tables(3, 8);
    const FoldPlan plan = make_fold_plan(
        {"subj0", "subj1", "subj2", "subj3", "subj4", "subj5"}, 3, 6);
    const DecisionSpace space =
        build_decision_space(tables, plan, 1, ClassifierKind::logistic, 1.0, 0);
    for (const Matrix* part : {&space.train_features, &space.test_features}) {
        for (Index i = 0; i < part->rows(); ++i) {
            for (int e = 0; e < 3; ++e) {
                CHECK(part->row(i).segment(2 * e, 2).sum() == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("two-base decision space matches a hand-assembled concatenation") {
    const auto tables = toy_tables(2, 9);
    const FoldPlan plan = make_fold_plan(
        {"subj0", "subj1", "subj2", "subj3", "subj4", "subj5"}, 3, 7);
    const DecisionSpace space =
        build_decision_space(tables, plan, 2, ClassifierKind::logistic, 1.0, 0);

    const std::vector<FeatureTable> first = {tables[0]};
    const std::vector<FeatureTable> second = {tables[1]};
    const DecisionSpace a = build_decision_space(first, plan, 2, ClassifierKind::logistic, 1.0, 0);
    const DecisionSpace b = build_decision_space(second, plan, 2, ClassifierKind::logistic, 1.0, 0);
    CHECK((space.test_features.leftCols(2) - a.test_features).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((space.test_features.rightCols(2) - b.test_features).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((space.train_features.leftCols(2) - a.train_features).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((space.train_features.rightCols(2) - b.train_features).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("misaligned tables are rejected") {
    auto tables = toy_tables(2, 10);
    tables[1].labels[0] = 2;
    CHECK_THROWS(build_decision_space(tables,
                                      make_fold_plan({"subj0", "subj1", "subj2", "subj3",
                                                      "subj4", "subj5"},
                                                     3, 1),
                                      0, ClassifierKind::logistic, 1.0, 0));
}

TEST_CASE("a perfect base classifier drives FSG to accuracy 1.0") {
    auto tables = toy_tables(2, 11);
    // Overwrite base 0's blocks with the one-hot truth in both parts by
    // planting an extreme signal.
    const auto perfect = toy_tables(1, 11, 50.0);
    tables[0] = perfect[0];
    const FoldPlan plan = make_fold_plan(
        {"subj0", "subj1", "subj2", "subj3", "subj4", "subj5"}, 3, 2);
    for (int fold = 0; fold < 3; ++fold) {
        const DecisionSpace space =
            build_decision_space(tables, plan, fold, ClassifierKind::logistic, 0.01, 0);
        const FoldOutcome outcome = fsg_classify(space, MetaKind::logistic, 0.01, 0);
        CHECK(outcome.accuracy == doctest::Approx(1.0));
    }
}

TEST_CASE("permuting base order consistently leaves accuracy unchanged") {
    const auto tables = toy_tables(3, 12);
    std::vector<FeatureTable> permuted = {tables[2], tables[0], tables[1]};
    const FoldPlan plan = make_fold_plan(
        {"subj0", "subj1", "subj2", "subj3", "subj4", "subj5"}, 3, 3);
    const FsgRunResult base = run_fsg(tables, plan, ClassifierKind::logistic,
                                      MetaKind::logistic, 1.0, 0);
    const FsgRunResult shuffled = run_fsg(permuted, plan, ClassifierKind::logistic,
                                          MetaKind::logistic, 1.0, 0);
    CHECK(base.mean_accuracy == doctest::Approx(shuffled.mean_accuracy));
    CHECK(base.fold_accuracies == shuffled.fold_accuracies);
}

TEST_CASE("majority vote follows plurality with the documented tie rules") {
    // 3 bases voting {1, 1, 2}.
    Matrix features(1, 6);
    features << 0.8, 0.2, 0.7, 0.3, 0.1, 0.9;
    CHECK(majority_vote(features, 2) == std::vector<int>{1});

    // 2 bases voting {1, 2}: tie broken by summed membership 1.3 vs 0.7.
    Matrix tie(1, 4);
    tie << 0.9, 0.1, 0.4, 0.6;
    CHECK(majority_vote(tie, 2) == std::vector<int>{1});

    // Weighted votes {2, 1, 1} with weights (0.9, 0.3, 0.3): 0.9 beats 0.6.
    Matrix weighted(1, 6);
    weighted << 0.1, 0.9, 0.8, 0.2, 0.7, 0.3;
    CHECK(weighted_majority_vote(weighted, 2, {0.9, 0.3, 0.3}) == std::vector<int>{2});
    CHECK(majority_vote(weighted, 2) == std::vector<int>{1});
}

TEST_CASE("vote invariants: odd duplication and weight renormalization") {
    std::mt19937_64 rng(55);
    Matrix block(4, 2);
    for (Index i = 0; i < 4; ++i) {
        const double p = 0.1 + 0.8 * static_cast<double>(rng() % 100) / 99.0;
        block(i, 0) = p;
        block(i, 1) = 1.0 - p;
    }
    // MV over an odd number of identical bases equals that base's argmax.
    Matrix tripled(4, 6);
    tripled << block, block, block;
    std::vector<int> expected;
    for (Index i = 0; i < 4; ++i) expected.push_back(block(i, 0) >= block(i, 1) ? 1 : 2);
    CHECK(majority_vote(tripled, 2) == expected);

    // WMV is invariant to duplicating a base when weights are renormalized.
    Matrix single(4, 4);
    single << block, block.array().square().matrix();  // second, different base
    Matrix doubled(4, 6);
    doubled << block, block, block.array().square().matrix();
    const auto a = weighted_majority_vote(single, 2, {0.6, 0.4});
    const auto b = weighted_majority_vote(doubled, 2, {0.3, 0.3, 0.4});
    CHECK(a == b);
}

TEST_CASE("no test-fold leakage: a subject's data never reaches its own fold's models") {
    const auto tables = toy_tables(2, 13);
    const FoldPlan plan = make_fold_plan(
        {"subj0", "subj1", "subj2", "subj3", "subj4", "subj5"}, 3, 4);
    const FsgRunResult clean = run_fsg(tables, plan, ClassifierKind::logistic,
                                       MetaKind::logistic, 1.0, 0);

    // Perturb one fold-0 subject. Rows of OTHER folds may legitimately move
    // (the victim is in their training data); rows of the victim's OWN test
    // fold that belong to other subjects must not move at all, because
    // nothing from fold 0 is allowed into fold 0's models.
    std::string victim;
    for (const auto& [id, fold] : plan.assignment) {
        if (fold == 0) {
            victim = id;
            break;
        }
    }
    auto poisoned = tables;
    std::vector<Index> victim_rows, cofold_rows;
    for (Index i = 0; i < poisoned[0].features.rows(); ++i) {
        const std::string& id = poisoned[0].subject_ids[static_cast<std::size_t>(i)];
        if (id == victim) {
            poisoned[0].features.row(i).array() += 500.0;
            poisoned[1].features.row(i).array() += 500.0;
            victim_rows.push_back(i);
        } else if (plan.fold_of(id) == 0) {
            cofold_rows.push_back(i);
        }
    }
    REQUIRE(!victim_rows.empty());
    REQUIRE(!cofold_rows.empty());
    const FsgRunResult dirty = run_fsg(poisoned, plan, ClassifierKind::logistic,
                                       MetaKind::logistic, 1.0, 0);

    for (const Index i : cofold_rows) {
        const double delta =
            (clean.memberships.row(i) - dirty.memberships.row(i)).cwiseAbs().maxCoeff();
        CHECK(delta == 0.0);
    }
    double victim_delta = 0.0;
    for (const Index i : victim_rows) {
        victim_delta = std::max(
            victim_delta,
            (clean.memberships.row(i) - dirty.memberships.row(i)).cwiseAbs().maxCoeff());
    }
    CHECK(victim_delta > 1e-3);
}

TEST_CASE("run_fsg aggregates folds deterministically") {
    const auto tables = toy_tables(2, 14);
    const FoldPlan plan = make_fold_plan(
        {"subj0", "subj1", "subj2", "subj3", "subj4", "subj5"}, 3, 9);
    const FsgRunResult a = run_fsg(tables, plan, ClassifierKind::logistic,
                                   MetaKind::weighted_majority_vote, 1.0, 0);
    const FsgRunResult b = run_fsg(tables, plan, ClassifierKind::logistic,
                                   MetaKind::weighted_majority_vote, 1.0, 0);
    CHECK(a.memberships == b.memberships);
    CHECK(a.fold_accuracies == b.fold_accuracies);
    CHECK(a.confusion == b.confusion);
    CHECK(a.confusion.sum() == doctest::Approx(12.0));  // every session tested once
}
