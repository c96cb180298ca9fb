#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cogdist/classifier.hpp"
#include "cogdist/corpus.hpp"
#include "cogdist/textprep.hpp"
#include "cogdist/vectorize.hpp"

namespace cogdist {

struct PipelineConfig {
    int n_min = 1;
    int n_max = 1;
    uint32_t min_df = 1;
    double max_df = 1.0;
    double C = 1.0;
    double tol = 1e-6;
    int max_iter = 1000;
};

/// Fitted end-to-end text classifier: n-gram expansion parameters, the
/// train-only vocabulary (inside the model) and one-vs-rest weights.
struct TrainedPipeline {
    PipelineConfig config;
    Task task = Task::Classification;
    OvrModel model;
};

/// The fixed class list for a task: the 15 distortion names, or
/// Distorted/NotDistorted, both in canonical order.
std::vector<std::string> class_universe(Task task);

/// normalize + tokenize for every passage, in corpus order.
std::vector<std::vector<std::string>> tokenize_corpus(const std::vector<LabeledPassage>& corpus);

std::vector<TermSequence> expand_ngrams(const std::vector<std::vector<std::string>>& token_docs,
                                        int n_min, int n_max);

/// Fits vocabulary + one-vs-rest model from pre-expanded term sequences.
/// The class universe comes from the task, so classes missing from `labels`
/// produce degenerate models rather than shrinking the output space.
TrainedPipeline fit_pipeline_seqs(const std::vector<TermSequence>& seqs,
                                  const std::vector<std::string>& labels, Task task,
                                  const PipelineConfig& config);

TrainedPipeline train_pipeline(const std::vector<LabeledPassage>& corpus,
                               const PipelineConfig& config);

/// Raw text -> tf-idf vector under the pipeline's vocabulary.
TermVector vectorize_text(const TrainedPipeline& pipeline, const std::string& text);

std::string predict_label(const TrainedPipeline& pipeline, const std::string& text);

/// Per-class sigma scores for one text, aligned to model.classes.
std::vector<double> predict_class_scores(const TrainedPipeline& pipeline, const std::string& text);

}  // namespace cogdist
