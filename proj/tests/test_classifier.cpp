#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cogdist/classifier.hpp"
#include "cogdist/rng.hpp"
#include "cogdist/vectorize.hpp"

using namespace cogdist;

namespace {

struct ToyProblem {
    std::vector<TermVector> rows;
    std::vector<int> y;
    size_t n_features;
};

ToyProblem random_problem(Rng& rng, size_t n_features, size_t n_rows) {
    ToyProblem p;
    p.n_features = n_features;
    p.rows.resize(n_rows);
    p.y.resize(n_rows);
    for (size_t i = 0; i < n_rows; ++i) {
        const size_t nnz = 1 + rng.below(5);
        std::vector<uint32_t> idx;
        while (idx.size() < nnz) {
            const auto cand = static_cast<uint32_t>(rng.below(n_features));
            if (std::find(idx.begin(), idx.end(), cand) == idx.end()) idx.push_back(cand);
        }
        std::sort(idx.begin(), idx.end());
        for (const auto k : idx) p.rows[i].emplace_back(k, rng.real01() * 4.0 - 2.0);
        p.y[i] = rng.below(2) == 0 ? 0 : 1;
    }
    p.y[0] = 0;  // force both classes
    p.y[1] = 1;
    return p;
}

TermVector unit_x(double value) { return {{0u, value}}; }

std::shared_ptr<const Vocabulary> dummy_vocab(size_t v) {
    Vocabulary vocab;
    for (size_t i = 0; i < v; ++i) {
        vocab.entries.push_back({"term" + std::to_string(i), 1, 1.0});
    }
    std::sort(vocab.entries.begin(), vocab.entries.end(),
              [](const VocabEntry& a, const VocabEntry& b) { return a.term < b.term; });
    vocab.n_train_docs = 1;
    return std::make_shared<const Vocabulary>(std::move(vocab));
}

}  // namespace

TEST_CASE("gradient at the zero start matches hand arithmetic") {
    const std::vector<TermVector> rows = {unit_x(1.0)};
    const std::vector<int> y = {1};
    std::vector<double> grad_w;
    double grad_b = 0.0;
    logistic_gradient(rows, y, {0.0}, 0.0, 1.0, grad_w, grad_b);
    REQUIRE(grad_w.size() == 1);
    CHECK(grad_w[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(grad_b == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(314159);
    for (int problem = 0; problem < 10; ++problem) {
        const auto p = random_problem(rng, 20, 50);
        const double C = std::vector<double>{0.1, 1.0, 10.0}[rng.below(3)];
        std::vector<double> w(p.n_features);
        for (auto& v : w) v = rng.real01() * 2.0 - 1.0;
        const double b = rng.real01() * 2.0 - 1.0;

        std::vector<double> grad_w;
        double grad_b = 0.0;
        logistic_gradient(p.rows, p.y, w, b, C, grad_w, grad_b);

        auto fd = [&](size_t k) {
            const double h = 1e-6;
            auto wp = w;
            auto wm = w;
            double bp = b;
            double bm = b;
            if (k < p.n_features) {
                wp[k] += h;
                wm[k] -= h;
            } else {
                bp += h;
                bm -= h;
            }
            return (logistic_objective(p.rows, p.y, wp, bp, C) -
                    logistic_objective(p.rows, p.y, wm, bm, C)) /
                   (2.0 * h);
        };
        for (size_t k = 0; k <= p.n_features; ++k) {
            const double analytic = k < p.n_features ? grad_w[k] : grad_b;
            const double numeric = fd(k);
            const double rel = std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
            CHECK(rel < 1e-4);
        }
    }
}

TEST_CASE("objective is convex") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_problem(rng, 8, 20);
        std::vector<double> w1(p.n_features), w2(p.n_features), mid(p.n_features);
        for (size_t k = 0; k < p.n_features; ++k) {
            w1[k] = rng.real01() * 6.0 - 3.0;
            w2[k] = rng.real01() * 6.0 - 3.0;
            mid[k] = 0.5 * (w1[k] + w2[k]);
        }
        const double b1 = rng.real01() * 6.0 - 3.0;
        const double b2 = rng.real01() * 6.0 - 3.0;
        const double j1 = logistic_objective(p.rows, p.y, w1, b1, 1.0);
        const double j2 = logistic_objective(p.rows, p.y, w2, b2, 1.0);
        const double jm = logistic_objective(p.rows, p.y, mid, 0.5 * (b1 + b2), 1.0);
        CHECK(jm <= 0.5 * (j1 + j2) + 1e-9);
    }
}

TEST_CASE("separable toy problem, checked against a brute-force grid minimum") {
    const std::vector<TermVector> rows = {unit_x(-1.0), unit_x(1.0)};
    const std::vector<int> y = {0, 1};
    const double C = 100.0;
    const auto model = fit_binary(rows, 1, y, C, 1e-8, 2000);

    CHECK(model.weights[0] > 0.0);
    CHECK(predict_proba(model, unit_x(1.0)) > 0.9);
    CHECK(model.diagnostics.converged);

    double grid_best = 1e300;
    for (double w = -10.0; w <= 10.0; w += 0.01) {
        for (double b = -2.0; b <= 2.0; b += 0.01) {
            grid_best = std::min(grid_best, logistic_objective(rows, y, {w}, b, C));
        }
    }
    const double fitted = logistic_objective(rows, y, model.weights, model.intercept, C);
    CHECK(fitted <= grid_best + 1e-3);
}

TEST_CASE("objective decreases monotonically from the zero start") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = random_problem(rng, 12, 40);
        const auto model = fit_binary(p.rows, p.n_features, p.y, 1.0, 1e-8, 500);
        const auto& trace = model.diagnostics.objective_trace;
        REQUIRE(!trace.empty());
        CHECK(trace.front() ==
              doctest::Approx(static_cast<double>(p.rows.size()) * std::log(2.0)).epsilon(1e-12));
        for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
        CHECK(trace.back() < trace.front());
    }
}

TEST_CASE("refit is bitwise deterministic") {
    Rng rng(11);
    const auto p = random_problem(rng, 15, 60);
    const auto a = fit_binary(p.rows, p.n_features, p.y, 2.0, 1e-7, 300);
    const auto b = fit_binary(p.rows, p.n_features, p.y, 2.0, 1e-7, 300);
    REQUIRE(a.weights.size() == b.weights.size());
    for (size_t k = 0; k < a.weights.size(); ++k) CHECK(a.weights[k] == b.weights[k]);
    CHECK(a.intercept == b.intercept);
    CHECK(a.diagnostics.iterations == b.diagnostics.iterations);
}

TEST_CASE("vanishing C shrinks weights to the intercept-only rate") {
    Rng rng(5);
    const auto p = random_problem(rng, 10, 40);
    double mean_y = 0.0;
    for (const int v : p.y) mean_y += v;
    mean_y /= static_cast<double>(p.y.size());

    const auto model = fit_binary(p.rows, p.n_features, p.y, 1e-4, 1e-10, 2000);
    for (const double w : model.weights) CHECK(std::abs(w) < 0.05);
    CHECK(predict_proba(model, TermVector{}) == doctest::Approx(mean_y).epsilon(1e-2));
}

TEST_CASE("predict_proba pinned values and overflow safety") {
    BinaryLogisticModel zero;
    zero.weights = {0.0, 0.0};
    CHECK(predict_proba(zero, {{0u, 3.0}}) == 0.5);

    BinaryLogisticModel m;
    m.weights = {1.0};
    SUBCASE("sigma(ln 3) = 0.75") {
        CHECK(predict_proba(m, unit_x(std::log(3.0))) == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("huge scores saturate without overflow") {
        CHECK(predict_proba(m, unit_x(500.0)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(predict_proba(m, unit_x(-500.0)) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::isfinite(predict_proba(m, unit_x(1e308))));
    }
    SUBCASE("sigmoid symmetry") {
        for (const double z : {0.0, 0.3, 2.0, 40.0}) {
            CHECK(sigmoid(z) + sigmoid(-z) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("fit_binary rejects bad input") {
    const std::vector<TermVector> rows = {unit_x(1.0), unit_x(-1.0)};
    CHECK_THROWS_AS(fit_binary(rows, 1, {1, 1}, 1.0, 1e-6, 100), std::invalid_argument);
    CHECK_THROWS_AS(fit_binary(rows, 1, {0, 0}, 1.0, 1e-6, 100), std::invalid_argument);
    CHECK_THROWS_AS(fit_binary(rows, 1, {0}, 1.0, 1e-6, 100), std::invalid_argument);
    CHECK_THROWS_AS(fit_binary(rows, 1, {0, 1}, 0.0, 1e-6, 100), std::invalid_argument);
    CHECK_THROWS_AS(fit_binary(rows, 1, {0, 2}, 1.0, 1e-6, 100), std::invalid_argument);
    const std::vector<TermVector> nan_rows = {unit_x(std::nan("")), unit_x(1.0)};
    CHECK_THROWS_AS(fit_binary(nan_rows, 1, {0, 1}, 1.0, 1e-6, 100), std::invalid_argument);
    const std::vector<TermVector> oob = {{{5u, 1.0}}, unit_x(1.0)};
    CHECK_THROWS_AS(fit_binary(oob, 1, {0, 1}, 1.0, 1e-6, 100), std::invalid_argument);
}

namespace {

DocTermMatrix three_class_matrix() {
    // three well-separated clusters on six features
    DocTermMatrix X;
    X.vocab = dummy_vocab(6);
    auto row = [](std::vector<std::pair<uint32_t, double>> entries) { return TermVector(entries); };
    for (int rep = 0; rep < 4; ++rep) {
        const double v = 0.8 + 0.1 * rep;
        X.rows.push_back(row({{0u, v}, {1u, 0.2}}));
        X.rows.push_back(row({{2u, v}, {3u, 0.2}}));
        X.rows.push_back(row({{4u, v}, {5u, 0.2}}));
    }
    return X;
}

std::vector<std::string> three_class_labels() {
    std::vector<std::string> labels;
    for (int rep = 0; rep < 4; ++rep) {
        labels.push_back("Alpha");
        labels.push_back("Beta");
        labels.push_back("Gamma");
    }
    return labels;
}

}  // namespace

TEST_CASE("one-vs-rest trains one model per class and predicts the right cluster") {
    const auto X = three_class_matrix();
    const auto labels = three_class_labels();
    const auto model = fit_ovr(X, labels, {"Alpha", "Beta", "Gamma"}, 10.0, 1e-7, 500);

    REQUIRE(model.classes.size() == 3);
    REQUIRE(model.models.size() == 3);
    for (const auto& m : model.models) {
        CHECK(m.weights.size() == 6);
        CHECK(!m.degenerate);
    }
    for (size_t i = 0; i < X.rows.size(); ++i) {
        CHECK(predict(model, X.rows[i]) == labels[i]);
    }
    const auto norm = normalized_scores(model, X.rows[0]);
    double total = 0.0;
    for (const double s : norm) total += s;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("classes with no positive rows become degenerate and never win") {
    const auto X = three_class_matrix();
    const auto labels = three_class_labels();
    const auto model =
        fit_ovr(X, labels, {"Alpha", "Beta", "Empty", "Gamma"}, 10.0, 1e-7, 500);

    REQUIRE(model.models.size() == 4);
    CHECK(model.models[2].degenerate);
    for (const double w : model.models[2].weights) CHECK(w == 0.0);
    CHECK(!model.models[0].degenerate);

    for (size_t i = 0; i < X.rows.size(); ++i) {
        CHECK(predict(model, X.rows[i]) != "Empty");
        CHECK(predict(model, X.rows[i]) == labels[i]);
    }
    // a far-away point scores below 0.5 everywhere, still never "Empty"
    CHECK(predict(model, TermVector{}) != "Empty");
}

TEST_CASE("all-degenerate model falls back to the first class") {
    OvrModel model;
    model.classes = {"Alpha", "Beta"};
    model.vocab = dummy_vocab(2);
    for (int i = 0; i < 2; ++i) {
        BinaryLogisticModel m;
        m.weights = {0.0, 0.0};
        m.degenerate = true;
        model.models.push_back(m);
    }
    CHECK(predict(model, {{0u, 1.0}}) == "Alpha");
}

TEST_CASE("two-class one-vs-rest equals a single thresholded binary fit") {
    Rng rng(23);
    DocTermMatrix X;
    X.vocab = dummy_vocab(8);
    std::vector<std::string> labels;
    std::vector<int> y;
    for (int i = 0; i < 10; ++i) {
        TermVector row;
        for (uint32_t k = 0; k < 8; ++k) {
            if (rng.below(2) == 0) row.emplace_back(k, rng.real01() * 2.0 - 1.0);
        }
        X.rows.push_back(row);
        const bool pos = rng.below(2) == 0;
        labels.push_back(pos ? "Alpha" : "Beta");
        y.push_back(pos ? 1 : 0);
    }
    labels[0] = "Alpha";
    y[0] = 1;
    labels[1] = "Beta";
    y[1] = 0;

    const auto ovr = fit_ovr(X, labels, {"Alpha", "Beta"}, 3.0, 1e-7, 500);
    const auto binary = fit_binary(X, y, 3.0, 1e-7, 500);

    // the complementary fit is an exact sign flip
    for (size_t k = 0; k < 8; ++k) {
        CHECK(ovr.models[1].weights[k] == -ovr.models[0].weights[k]);
    }
    for (const auto& row : X.rows) {
        const std::string thresholded = predict_proba(binary, row) >= 0.5 ? "Alpha" : "Beta";
        CHECK(predict(ovr, row) == thresholded);
    }
}

TEST_CASE("prediction is stable under monotone score transforms") {
    const auto X = three_class_matrix();
    const auto model = fit_ovr(X, three_class_labels(), {"Alpha", "Beta", "Gamma"}, 5.0, 1e-7, 500);
    for (const auto& row : X.rows) {
        const auto scores = predict_scores(model, row);
        const size_t direct = predict_index(model, row);
        for (const auto transform : {+[](double s) { return 2.0 * s + 1.0; },
                                     +[](double s) { return s * s * s; },
                                     +[](double s) { return std::exp(s); }}) {
            size_t best = 0;
            for (size_t c = 1; c < scores.size(); ++c) {
                if (transform(scores[c]) > transform(scores[best])) best = c;
            }
            CHECK(best == direct);
        }
    }
}

TEST_CASE("fit_ovr rejects bad input") {
    const auto X = three_class_matrix();
    const auto labels = three_class_labels();
    CHECK_THROWS_AS(fit_ovr(X, labels, {"Alpha"}, 1.0, 1e-6, 100), std::invalid_argument);
    CHECK_THROWS_AS(fit_ovr(X, labels, {"Alpha", "Alpha", "Beta", "Gamma"}, 1.0, 1e-6, 100),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_ovr(X, labels, {"Alpha", "Beta"}, 1.0, 1e-6, 100),
                    std::invalid_argument);  // Gamma rows not covered
    std::vector<std::string> mono(labels.size(), "Alpha");
    CHECK_THROWS_AS(fit_ovr(X, mono, {"Alpha", "Beta", "Gamma"}, 1.0, 1e-6, 100),
                    std::invalid_argument);
}

TEST_CASE("top coefficient terms come back ranked") {
    OvrModel model;
    model.classes = {"Alpha", "Beta"};
    Vocabulary vocab;
    vocab.entries = {{"prove", 1, 1.0}, {"quiet", 1, 1.0}, {"right", 1, 1.0}, {"wrong", 1, 1.0}};
    vocab.n_train_docs = 1;
    model.vocab = std::make_shared<const Vocabulary>(std::move(vocab));
    BinaryLogisticModel alpha;
    alpha.weights = {0.9, -0.4, 2.1, 1.3};  // prove, quiet, right, wrong
    BinaryLogisticModel beta;
    beta.weights = {0.5, 0.5, -1.0, -1.0};
    model.models = {alpha, beta};

    SUBCASE("descending by coefficient") {
        const auto top = top_terms(model, "Alpha", 3);
        REQUIRE(top.size() == 3);
        CHECK(top[0].first == "right");
        CHECK(top[0].second == doctest::Approx(2.1));
        CHECK(top[1].first == "wrong");
        CHECK(top[2].first == "prove");
    }
    SUBCASE("ties break by term, k clamps to vocabulary size") {
        const auto top = top_terms(model, "Beta", 10);
        REQUIRE(top.size() == 4);
        CHECK(top[0].first == "prove");
        CHECK(top[1].first == "quiet");
        CHECK(top[2].first == "right");
        CHECK(top[3].first == "wrong");
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(top_terms(model, "Gamma", 3), std::invalid_argument);
        CHECK_THROWS_AS(top_terms(model, "Alpha", 0), std::invalid_argument);
    }
}
