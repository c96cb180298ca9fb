#include "cogdist/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cogdist {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

// log(1 + exp(t)) without overflow for large positive t.
double log1p_exp(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

double linear_score(const TermVector& x, const std::vector<double>& w, double b) {
    double z = b;
    for (const auto& [index, value] : x) z += w[index] * value;
    return z;
}

struct Problem {
    const std::vector<TermVector>& rows;
    const std::vector<int>& y;
    size_t n_features;
    double C;

    // theta = [w_0 .. w_{V-1}, b]
    double objective(const std::vector<double>& theta) const {
        double j = 0.0;
        for (size_t k = 0; k < n_features; ++k) j += theta[k] * theta[k];
        j *= 0.5;
        double loss = 0.0;
        for (size_t i = 0; i < rows.size(); ++i) {
            const double z = linear_score(rows[i], theta, theta[n_features]);
            loss += log1p_exp(y[i] == 1 ? -z : z);
        }
        return j + C * loss;
    }

    double value_and_grad(const std::vector<double>& theta, std::vector<double>& grad) const {
        grad.assign(theta.size(), 0.0);
        double j = 0.0;
        for (size_t k = 0; k < n_features; ++k) {
            grad[k] = theta[k];
            j += theta[k] * theta[k];
        }
        j *= 0.5;
        double loss = 0.0;
        for (size_t i = 0; i < rows.size(); ++i) {
            const double z = linear_score(rows[i], theta, theta[n_features]);
            loss += log1p_exp(y[i] == 1 ? -z : z);
            // residual sigma(z) - y, written per branch: exact for saturated
            // positives and exactly antisymmetric under label complement
            const double r = C * (y[i] == 1 ? -sigmoid(-z) : sigmoid(z));
            for (const auto& [index, value] : rows[i]) grad[index] += r * value;
            grad[n_features] += r;
        }
        return j + C * loss;
    }
};

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot_dense(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double logistic_objective(const std::vector<TermVector>& rows, const std::vector<int>& y,
                          const std::vector<double>& w, double b, double C) {
    std::vector<double> theta = w;
    theta.push_back(b);
    return Problem{rows, y, w.size(), C}.objective(theta);
}

void logistic_gradient(const std::vector<TermVector>& rows, const std::vector<int>& y,
                       const std::vector<double>& w, double b, double C,
                       std::vector<double>& grad_w, double& grad_b) {
    std::vector<double> theta = w;
    theta.push_back(b);
    std::vector<double> grad;
    Problem{rows, y, w.size(), C}.value_and_grad(theta, grad);
    grad_b = grad.back();
    grad.pop_back();
    grad_w = std::move(grad);
}

BinaryLogisticModel fit_binary(const std::vector<TermVector>& rows, size_t n_features,
                               const std::vector<int>& y, double C, double tol, int max_iter) {
    if (rows.size() != y.size()) throw std::invalid_argument("fit_binary: |X| != |y|");
    if (rows.size() < 2) throw std::invalid_argument("fit_binary: need at least 2 rows");
    if (!(C > 0.0)) throw std::invalid_argument("fit_binary: C must be > 0");
    if (!(tol > 0.0) || max_iter < 1) throw std::invalid_argument("fit_binary: bad stopping rule");
    bool any_pos = false;
    bool any_neg = false;
    for (const int v : y) {
        if (v != 0 && v != 1) throw std::invalid_argument("fit_binary: labels must be 0/1");
        (v == 1 ? any_pos : any_neg) = true;
    }
    if (!any_pos || !any_neg) throw std::invalid_argument("fit_binary: both classes required");
    for (const auto& row : rows) {
        for (const auto& [index, value] : row) {
            if (index >= n_features) throw std::invalid_argument("fit_binary: index out of range");
            if (!std::isfinite(value)) throw std::invalid_argument("fit_binary: non-finite feature");
        }
    }

    const Problem problem{rows, y, n_features, C};
    const size_t dim = n_features + 1;
    std::vector<double> theta(dim, 0.0);
    std::vector<double> grad;
    double f = problem.value_and_grad(theta, grad);

    // L-BFGS with Armijo backtracking; memory m = 8. Everything runs in a
    // fixed order so refits are bitwise identical.
    constexpr size_t kMemory = 8;
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    BinaryLogisticModel model;
    model.C = C;
    model.diagnostics.objective_trace.push_back(f);

    int iter = 0;
    std::vector<double> direction(dim), theta_new(dim), grad_new(dim);
    while (iter < max_iter && inf_norm(grad) > tol) {
        // two-loop recursion for the quasi-Newton direction
        direction = grad;
        std::vector<double> alpha(s_hist.size());
        for (size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * dot_dense(s_hist[i], direction);
            for (size_t k = 0; k < dim; ++k) direction[k] -= alpha[i] * y_hist[i][k];
        }
        if (!s_hist.empty()) {
            const double gamma = 1.0 / (rho_hist.back() * dot_dense(y_hist.back(), y_hist.back()));
            for (auto& d : direction) d *= gamma;
        }
        for (size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * dot_dense(y_hist[i], direction);
            for (size_t k = 0; k < dim; ++k) direction[k] += (alpha[i] - beta) * s_hist[i][k];
        }
        for (auto& d : direction) d = -d;

        double slope = dot_dense(grad, direction);
        if (!(slope < 0.0)) {  // not a descent direction; fall back to steepest descent
            for (size_t k = 0; k < dim; ++k) direction[k] = -grad[k];
            slope = -dot_dense(grad, grad);
        }

        double step = 1.0;
        double f_new = f;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (size_t k = 0; k < dim; ++k) theta_new[k] = theta[k] + step * direction[k];
            f_new = problem.objective(theta_new);
            if (f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // stalled below float resolution

        const double f_next = problem.value_and_grad(theta_new, grad_new);
        (void)f_next;

        std::vector<double> s(dim), yv(dim);
        for (size_t k = 0; k < dim; ++k) {
            s[k] = theta_new[k] - theta[k];
            yv[k] = grad_new[k] - grad[k];
        }
        const double sy = dot_dense(s, yv);
        const double scale = std::sqrt(dot_dense(s, s) * dot_dense(yv, yv));
        if (sy > 1e-10 * scale && scale > 0.0) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > kMemory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        theta.swap(theta_new);
        grad.swap(grad_new);
        f = f_new;
        model.diagnostics.objective_trace.push_back(f);
        ++iter;
    }

    model.weights.assign(theta.begin(), theta.begin() + static_cast<long>(n_features));
    model.intercept = theta[n_features];
    model.diagnostics.iterations = iter;
    model.diagnostics.final_grad_norm = inf_norm(grad);
    model.diagnostics.converged = model.diagnostics.final_grad_norm <= tol;
    return model;
}

BinaryLogisticModel fit_binary(const DocTermMatrix& X, const std::vector<int>& y, double C,
                               double tol, int max_iter) {
    if (!X.vocab) throw std::invalid_argument("fit_binary: matrix has no vocabulary");
    return fit_binary(X.rows, X.vocab->size(), y, C, tol, max_iter);
}

double predict_proba(const BinaryLogisticModel& model, const TermVector& x) {
    return sigmoid(linear_score(x, model.weights, model.intercept));
}

OvrModel fit_ovr(const DocTermMatrix& X, const std::vector<std::string>& labels,
                 const std::vector<std::string>& classes, double C, double tol, int max_iter) {
    if (!X.vocab) throw std::invalid_argument("fit_ovr: matrix has no vocabulary");
    if (X.rows.size() != labels.size()) throw std::invalid_argument("fit_ovr: |X| != |labels|");
    if (classes.size() < 2) throw std::invalid_argument("fit_ovr: need at least 2 classes");
    if (std::set<std::string>(classes.begin(), classes.end()).size() != classes.size()) {
        throw std::invalid_argument("fit_ovr: duplicate class");
    }
    for (const auto& label : labels) {
        if (std::find(classes.begin(), classes.end(), label) == classes.end()) {
            throw std::invalid_argument("fit_ovr: label \"" + label + "\" not in class list");
        }
    }
    if (std::set<std::string>(labels.begin(), labels.end()).size() < 2) {
        throw std::invalid_argument("fit_ovr: need at least 2 distinct labels in the data");
    }

    OvrModel model;
    model.classes = classes;
    model.vocab = X.vocab;
    model.models.reserve(classes.size());
    std::vector<int> y(labels.size());
    for (const auto& cls : classes) {
        size_t positives = 0;
        for (size_t i = 0; i < labels.size(); ++i) {
            y[i] = labels[i] == cls ? 1 : 0;
            positives += static_cast<size_t>(y[i]);
        }
        if (positives == 0) {
            BinaryLogisticModel degenerate;
            degenerate.weights.assign(X.vocab->size(), 0.0);
            degenerate.C = C;
            degenerate.degenerate = true;
            degenerate.diagnostics.converged = true;
            model.models.push_back(std::move(degenerate));
        } else {
            model.models.push_back(fit_binary(X, y, C, tol, max_iter));
        }
    }
    return model;
}

std::vector<double> predict_scores(const OvrModel& model, const TermVector& x) {
    std::vector<double> scores;
    scores.reserve(model.models.size());
    for (const auto& m : model.models) scores.push_back(predict_proba(m, x));
    return scores;
}

std::vector<double> normalized_scores(const OvrModel& model, const TermVector& x) {
    auto scores = predict_scores(model, x);
    const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
    for (auto& s : scores) s /= total;
    return scores;
}

size_t predict_index(const OvrModel& model, const TermVector& x) {
    size_t best = 0;
    double best_score = -1.0;
    bool found = false;
    for (size_t c = 0; c < model.models.size(); ++c) {
        if (model.models[c].degenerate) continue;
        const double score = predict_proba(model.models[c], x);
        if (!found || score > best_score) {
            best = c;
            best_score = score;
            found = true;
        }
    }
    return found ? best : 0;
}

const std::string& predict(const OvrModel& model, const TermVector& x) {
    return model.classes[predict_index(model, x)];
}

std::vector<std::pair<std::string, double>> top_terms(const OvrModel& model,
                                                      const std::string& cls, size_t k) {
    if (k < 1) throw std::invalid_argument("top_terms: k must be >= 1");
    if (!model.vocab) throw std::invalid_argument("top_terms: model has no vocabulary");
    const auto it = std::find(model.classes.begin(), model.classes.end(), cls);
    if (it == model.classes.end()) {
        throw std::invalid_argument("top_terms: class \"" + cls + "\" not in model");
    }
    const auto& weights = model.models[static_cast<size_t>(it - model.classes.begin())].weights;

    std::vector<uint32_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (weights[a] != weights[b]) return weights[a] > weights[b];
        return model.vocab->entries[a].term < model.vocab->entries[b].term;
    });

    const size_t take = std::min(k, order.size());
    std::vector<std::pair<std::string, double>> result;
    result.reserve(take);
    for (size_t i = 0; i < take; ++i) {
        result.emplace_back(model.vocab->entries[order[i]].term, weights[order[i]]);
    }
    return result;
}

}  // namespace cogdist
