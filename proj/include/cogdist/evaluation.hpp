#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cogdist/corpus.hpp"
#include "cogdist/pipeline.hpp"

namespace cogdist {

struct ClassMetrics {
    std::string cls;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    size_t support = 0;
};

struct AggregateMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvaluationReport {
    std::vector<ClassMetrics> per_class;  // canonical label order
    AggregateMetrics macro;
    AggregateMetrics weighted;
    double accuracy = 0.0;
    size_t total = 0;
};

enum class AggregateMode { Macro, Weighted };

/// Per-class precision/recall/F1 over the union of observed and predicted
/// classes, in canonical order. Zero-denominator cases are defined as 0.
std::vector<ClassMetrics> per_class_metrics(const std::vector<std::string>& y_true,
                                            const std::vector<std::string>& y_pred);

/// Macro: unweighted mean over the listed classes. Weighted: support-weighted
/// mean (classes with zero support contribute nothing).
AggregateMetrics aggregate(const std::vector<ClassMetrics>& per_class, AggregateMode mode);

EvaluationReport evaluate(const std::vector<std::string>& y_true,
                          const std::vector<std::string>& y_pred);

/// CSV table: Label,N,Precision,Recall,F1 rows per class, then Macro and
/// Weighted rows over the total support.
std::string report_csv(const EvaluationReport& report);

struct NgramRange {
    int n_min = 1;
    int n_max = 1;
    bool operator==(const NgramRange&) const = default;
};

struct HyperparamGrid {
    std::vector<double> C;
    std::vector<NgramRange> ngram_ranges;
    std::vector<uint32_t> min_df;
    std::vector<double> max_df;
};

struct HyperparamPoint {
    double C = 1.0;
    NgramRange ngram;
    uint32_t min_df = 1;
    double max_df = 1.0;
    bool operator==(const HyperparamPoint&) const = default;
};

/// Cartesian product in declaration order: C outermost, then ngram range,
/// min_df, max_df. Ties in grid search resolve to the earliest point in this
/// order.
std::vector<HyperparamPoint> enumerate_grid(const HyperparamGrid& grid);

struct FitSettings {
    double tol = 1e-6;
    int max_iter = 1000;
};

PipelineConfig to_config(const HyperparamPoint& point, const FitSettings& settings);

struct GridSearchResult {
    HyperparamPoint best;
    std::vector<HyperparamPoint> points;
    std::vector<double> scores;  // pooled weighted F1 per point; -inf = unusable
};

/// Scores every grid point by inner_k-fold cross-validation inside `train`
/// (vocabulary refitted per fold, so no term statistics leak across splits);
/// the selection metric is weighted F1 over the pooled inner predictions.
/// Points whose pipeline cannot be fitted (for example thresholds emptying
/// the vocabulary) are skipped; if every point is unusable, throws.
GridSearchResult grid_search(const std::vector<LabeledPassage>& train,
                             const HyperparamGrid& grid, int inner_k, uint64_t seed,
                             const FitSettings& settings = FitSettings{});

struct FoldOutcome {
    int fold = 0;
    HyperparamPoint chosen;
    EvaluationReport report;  // on this fold's held-out passages
};

struct CVReport {
    int outer_k = 0;
    int inner_k = 0;
    uint64_t seed = 0;
    FoldAssignment folds;
    std::vector<FoldOutcome> fold_outcomes;
    EvaluationReport pooled;  // over the concatenated held-out predictions
};

/// Nested cross-validation: stratified outer split with `seed`, per-fold grid
/// search on the training portion (inner split seeded by mixing the fold
/// index into `seed`), refit with the winner, predict the held-out fold, and
/// pool all held-out predictions into one report.
CVReport nested_cv(const std::vector<LabeledPassage>& corpus, const HyperparamGrid& grid,
                   int outer_k, int inner_k, uint64_t seed,
                   const FitSettings& settings = FitSettings{});

/// The built-in search grid used when no grid file is supplied.
HyperparamGrid default_grid();

}  // namespace cogdist
