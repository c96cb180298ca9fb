#include "cogdist/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cogdist/labels.hpp"
#include "cogdist/rng.hpp"

namespace cogdist {

std::vector<ClassMetrics> per_class_metrics(const std::vector<std::string>& y_true,
                                            const std::vector<std::string>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("per_class_metrics: length mismatch");
    }
    if (y_true.empty()) throw std::invalid_argument("per_class_metrics: empty input");

    std::set<std::string, decltype(&label_order_less)> classes(&label_order_less);
    classes.insert(y_true.begin(), y_true.end());
    classes.insert(y_pred.begin(), y_pred.end());

    std::vector<ClassMetrics> result;
    result.reserve(classes.size());
    for (const auto& cls : classes) {
        size_t tp = 0, fp = 0, fn = 0, support = 0;
        for (size_t i = 0; i < y_true.size(); ++i) {
            const bool t = y_true[i] == cls;
            const bool p = y_pred[i] == cls;
            if (t) ++support;
            if (t && p) ++tp;
            if (!t && p) ++fp;
            if (t && !p) ++fn;
        }
        ClassMetrics m;
        m.cls = cls;
        m.support = support;
        m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        m.f1 = m.precision + m.recall > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        result.push_back(std::move(m));
    }
    return result;
}

AggregateMetrics aggregate(const std::vector<ClassMetrics>& per_class, AggregateMode mode) {
    if (per_class.empty()) throw std::invalid_argument("aggregate: no classes");
    AggregateMetrics agg;
    double weight_total = 0.0;
    for (const auto& m : per_class) {
        const double w = mode == AggregateMode::Macro ? 1.0 : static_cast<double>(m.support);
        agg.precision += w * m.precision;
        agg.recall += w * m.recall;
        agg.f1 += w * m.f1;
        weight_total += w;
    }
    if (weight_total > 0.0) {
        agg.precision /= weight_total;
        agg.recall /= weight_total;
        agg.f1 /= weight_total;
    }
    return agg;
}

EvaluationReport evaluate(const std::vector<std::string>& y_true,
                          const std::vector<std::string>& y_pred) {
    EvaluationReport report;
    report.per_class = per_class_metrics(y_true, y_pred);
    report.macro = aggregate(report.per_class, AggregateMode::Macro);
    report.weighted = aggregate(report.per_class, AggregateMode::Weighted);
    report.total = y_true.size();
    size_t correct = 0;
    for (size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == y_pred[i]) ++correct;
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());
    return report;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (const char c : s) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string fixed4(double v) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(4);
    out << v;
    return out.str();
}

}  // namespace

std::string report_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "Label,N,Precision,Recall,F1\n";
    for (const auto& m : report.per_class) {
        out << csv_field(m.cls) << ',' << m.support << ',' << fixed4(m.precision) << ','
            << fixed4(m.recall) << ',' << fixed4(m.f1) << '\n';
    }
    out << "Macro," << report.total << ',' << fixed4(report.macro.precision) << ','
        << fixed4(report.macro.recall) << ',' << fixed4(report.macro.f1) << '\n';
    out << "Weighted," << report.total << ',' << fixed4(report.weighted.precision) << ','
        << fixed4(report.weighted.recall) << ',' << fixed4(report.weighted.f1) << '\n';
    return out.str();
}

std::vector<HyperparamPoint> enumerate_grid(const HyperparamGrid& grid) {
    if (grid.C.empty() || grid.ngram_ranges.empty() || grid.min_df.empty() ||
        grid.max_df.empty()) {
        throw std::invalid_argument("grid: every dimension needs at least one candidate");
    }
    std::vector<HyperparamPoint> points;
    points.reserve(grid.C.size() * grid.ngram_ranges.size() * grid.min_df.size() *
                   grid.max_df.size());
    for (const double c : grid.C) {
        for (const auto& ngram : grid.ngram_ranges) {
            for (const uint32_t min_df : grid.min_df) {
                for (const double max_df : grid.max_df) {
                    points.push_back({c, ngram, min_df, max_df});
                }
            }
        }
    }
    return points;
}

PipelineConfig to_config(const HyperparamPoint& point, const FitSettings& settings) {
    PipelineConfig config;
    config.n_min = point.ngram.n_min;
    config.n_max = point.ngram.n_max;
    config.min_df = point.min_df;
    config.max_df = point.max_df;
    config.C = point.C;
    config.tol = settings.tol;
    config.max_iter = settings.max_iter;
    return config;
}

HyperparamGrid default_grid() {
    HyperparamGrid grid;
    grid.C = {0.01, 0.1, 1.0, 10.0};
    grid.ngram_ranges = {{1, 1}, {1, 2}};
    grid.min_df = {1, 2, 5};
    grid.max_df = {0.5, 1.0};
    return grid;
}

namespace {

// Per-fold document views shared by every grid point with the same n-gram
// range: expanding and splitting once keeps the search linear in corpus size.
struct FoldSplit {
    std::vector<TermSequence> train_seqs;
    std::vector<std::string> train_labels;
    std::vector<TermSequence> test_seqs;
    std::vector<size_t> test_rows;  // indices into the full corpus
};

std::vector<FoldSplit> split_by_fold(const std::vector<TermSequence>& seqs,
                                     const std::vector<LabeledPassage>& corpus,
                                     const FoldAssignment& folds) {
    std::vector<FoldSplit> splits(static_cast<size_t>(folds.k));
    for (size_t i = 0; i < corpus.size(); ++i) {
        const int fold = folds.assignment.at(corpus[i].id);
        for (int j = 0; j < folds.k; ++j) {
            auto& split = splits[static_cast<size_t>(j)];
            if (fold == j) {
                split.test_seqs.push_back(seqs[i]);
                split.test_rows.push_back(i);
            } else {
                split.train_seqs.push_back(seqs[i]);
                split.train_labels.push_back(corpus[i].label);
            }
        }
    }
    return splits;
}

}  // namespace

GridSearchResult grid_search(const std::vector<LabeledPassage>& train,
                             const HyperparamGrid& grid, int inner_k, uint64_t seed,
                             const FitSettings& settings) {
    if (inner_k < 2) throw std::invalid_argument("grid_search: inner_k must be >= 2");
    if (train.size() < static_cast<size_t>(inner_k)) {
        throw std::invalid_argument("grid_search: fewer passages than folds");
    }
    const auto points = enumerate_grid(grid);
    const Task task = train[0].task;

    const auto folds = stratified_kfold(train, inner_k, seed);
    const auto tokens = tokenize_corpus(train);

    // one expansion + fold split per distinct n-gram range
    std::vector<NgramRange> ranges;
    std::vector<std::vector<FoldSplit>> splits_by_range;
    for (const auto& point : points) {
        if (std::find(ranges.begin(), ranges.end(), point.ngram) == ranges.end()) {
            ranges.push_back(point.ngram);
            splits_by_range.push_back(split_by_fold(
                expand_ngrams(tokens, point.ngram.n_min, point.ngram.n_max), train, folds));
        }
    }

    GridSearchResult result;
    result.points = points;
    result.scores.assign(points.size(), -std::numeric_limits<double>::infinity());
    for (size_t p = 0; p < points.size(); ++p) {
        const auto& point = points[p];
        const auto range_pos = static_cast<size_t>(
            std::find(ranges.begin(), ranges.end(), point.ngram) - ranges.begin());
        const auto& splits = splits_by_range[range_pos];

        std::vector<std::string> y_true, y_pred;
        y_true.reserve(train.size());
        y_pred.reserve(train.size());
        bool usable = true;
        for (const auto& split : splits) {
            TrainedPipeline pipeline;
            try {
                pipeline = fit_pipeline_seqs(split.train_seqs, split.train_labels, task,
                                             to_config(point, settings));
            } catch (const std::exception&) {
                usable = false;
                break;
            }
            for (size_t t = 0; t < split.test_seqs.size(); ++t) {
                const auto vec = transform(*pipeline.model.vocab, split.test_seqs[t]);
                y_true.push_back(train[split.test_rows[t]].label);
                y_pred.push_back(predict(pipeline.model, vec));
            }
        }
        if (usable) result.scores[p] = evaluate(y_true, y_pred).weighted.f1;
    }

    size_t best = points.size();
    for (size_t p = 0; p < points.size(); ++p) {
        if (std::isinf(result.scores[p])) continue;
        if (best == points.size() || result.scores[p] > result.scores[best]) best = p;
    }
    if (best == points.size()) {
        throw std::runtime_error("grid_search: every grid point failed to fit");
    }
    result.best = points[best];
    return result;
}

CVReport nested_cv(const std::vector<LabeledPassage>& corpus, const HyperparamGrid& grid,
                   int outer_k, int inner_k, uint64_t seed, const FitSettings& settings) {
    CVReport report;
    report.outer_k = outer_k;
    report.inner_k = inner_k;
    report.seed = seed;
    report.folds = stratified_kfold(corpus, outer_k, seed);

    std::vector<std::string> pooled_true, pooled_pred;
    pooled_true.reserve(corpus.size());
    pooled_pred.reserve(corpus.size());
    for (int fold = 0; fold < outer_k; ++fold) {
        std::vector<LabeledPassage> train, test;
        for (const auto& passage : corpus) {
            (report.folds.assignment.at(passage.id) == fold ? test : train).push_back(passage);
        }
        const auto search = grid_search(train, grid, inner_k,
                                        mix_seed(seed, static_cast<uint64_t>(fold)), settings);
        const auto pipeline = train_pipeline(train, to_config(search.best, settings));

        std::vector<std::string> y_true, y_pred;
        y_true.reserve(test.size());
        y_pred.reserve(test.size());
        for (const auto& passage : test) {
            y_true.push_back(passage.label);
            y_pred.push_back(predict_label(pipeline, passage.text));
        }
        FoldOutcome outcome;
        outcome.fold = fold;
        outcome.chosen = search.best;
        outcome.report = evaluate(y_true, y_pred);
        report.fold_outcomes.push_back(std::move(outcome));

        pooled_true.insert(pooled_true.end(), y_true.begin(), y_true.end());
        pooled_pred.insert(pooled_pred.end(), y_pred.begin(), y_pred.end());
    }
    report.pooled = evaluate(pooled_true, pooled_pred);
    return report;
}

}  // namespace cogdist
