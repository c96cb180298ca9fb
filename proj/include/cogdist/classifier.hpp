#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cogdist/vectorize.hpp"

namespace cogdist {

struct FitDiagnostics {
    int iterations = 0;
    double final_grad_norm = 0.0;
    bool converged = false;
    std::vector<double> objective_trace;  // J after each accepted step
};

/// L2-regularized binary logistic regression. Minimizes
///   J(w, b) = 0.5 * ||w||^2 + C * sum_i log(1 + exp(-s_i * (w.x_i + b)))
/// with s_i in {-1, +1}; the intercept is not penalized. Larger C means
/// weaker regularization.
struct BinaryLogisticModel {
    std::vector<double> weights;  // aligned to vocabulary indices
    double intercept = 0.0;
    double C = 1.0;
    bool degenerate = false;  // all-zero placeholder for a class with no positives
    FitDiagnostics diagnostics;
};

/// Objective value at (w, b); y holds 0/1 responses.
double logistic_objective(const std::vector<TermVector>& rows, const std::vector<int>& y,
                          const std::vector<double>& w, double b, double C);

/// Gradient at (w, b); grad_w gets d J / d w, grad_b gets d J / d b.
void logistic_gradient(const std::vector<TermVector>& rows, const std::vector<int>& y,
                       const std::vector<double>& w, double b, double C,
                       std::vector<double>& grad_w, double& grad_b);

/// Deterministic batch fit from the zero start, stopping when the gradient
/// infinity norm drops to tol or after max_iter accepted steps. Throws
/// std::invalid_argument when y is single-class, sizes mismatch, C <= 0, or
/// features are non-finite.
BinaryLogisticModel fit_binary(const std::vector<TermVector>& rows, size_t n_features,
                               const std::vector<int>& y, double C, double tol, int max_iter);
BinaryLogisticModel fit_binary(const DocTermMatrix& X, const std::vector<int>& y, double C,
                               double tol, int max_iter);

/// sigma(w.x + b), overflow-safe at any magnitude of the linear score.
double predict_proba(const BinaryLogisticModel& model, const TermVector& x);

double sigmoid(double z);

/// One binary model per class over an explicit class universe, in canonical
/// order. Classes absent from the training labels carry degenerate all-zero
/// models; they never beat a trained class at prediction time.
struct OvrModel {
    std::vector<std::string> classes;
    std::vector<BinaryLogisticModel> models;
    std::shared_ptr<const Vocabulary> vocab;
};

/// Fits one-vs-rest over `classes` (duplicate-free, size >= 2). Every label
/// must belong to the universe and at least two distinct labels must be
/// present in the data.
OvrModel fit_ovr(const DocTermMatrix& X, const std::vector<std::string>& labels,
                 const std::vector<std::string>& classes, double C, double tol, int max_iter);

/// Per-class sigma scores in class order (degenerate classes score 0.5).
std::vector<double> predict_scores(const OvrModel& model, const TermVector& x);

/// Scores rescaled to sum to 1; a reporting view only, never used for argmax.
std::vector<double> normalized_scores(const OvrModel& model, const TermVector& x);

/// Argmax class index; ties go to the earlier class. Degenerate classes are
/// skipped unless every class is degenerate, in which case index 0 wins.
size_t predict_index(const OvrModel& model, const TermVector& x);
const std::string& predict(const OvrModel& model, const TermVector& x);

/// The k largest-coefficient terms of one class's model, descending by
/// coefficient with ties broken by term; k is clamped to the vocabulary size.
std::vector<std::pair<std::string, double>> top_terms(const OvrModel& model,
                                                      const std::string& cls, size_t k);

}  // namespace cogdist
