#include "cogdist/pipeline.hpp"

#include <stdexcept>

#include "cogdist/labels.hpp"

namespace cogdist {

std::vector<std::string> class_universe(Task task) {
    if (task == Task::Detection) {
        return {std::string(kDistortedName), std::string(kNotDistortedName)};
    }
    return distortion_names();
}

std::vector<std::vector<std::string>> tokenize_corpus(const std::vector<LabeledPassage>& corpus) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(corpus.size());
    for (const auto& passage : corpus) tokens.push_back(tokenize(normalize(passage.text)));
    return tokens;
}

std::vector<TermSequence> expand_ngrams(const std::vector<std::vector<std::string>>& token_docs,
                                        int n_min, int n_max) {
    std::vector<TermSequence> seqs;
    seqs.reserve(token_docs.size());
    for (const auto& tokens : token_docs) seqs.push_back(ngrams(tokens, n_min, n_max));
    return seqs;
}

TrainedPipeline fit_pipeline_seqs(const std::vector<TermSequence>& seqs,
                                  const std::vector<std::string>& labels, Task task,
                                  const PipelineConfig& config) {
    if (seqs.size() != labels.size()) {
        throw std::invalid_argument("fit_pipeline_seqs: document/label count mismatch");
    }
    auto vocab = std::make_shared<const Vocabulary>(
        fit_vocabulary(seqs, config.min_df, config.max_df, config.n_min, config.n_max));
    const auto matrix = transform_all(vocab, seqs);

    TrainedPipeline pipeline;
    pipeline.config = config;
    pipeline.task = task;
    pipeline.model = fit_ovr(matrix, labels, class_universe(task), config.C, config.tol,
                             config.max_iter);
    return pipeline;
}

TrainedPipeline train_pipeline(const std::vector<LabeledPassage>& corpus,
                               const PipelineConfig& config) {
    if (corpus.empty()) throw std::invalid_argument("train_pipeline: empty corpus");
    const Task task = corpus[0].task;
    std::vector<std::string> labels;
    labels.reserve(corpus.size());
    for (const auto& passage : corpus) {
        if (passage.task != task) {
            throw std::invalid_argument("train_pipeline: corpus mixes tasks");
        }
        labels.push_back(passage.label);
    }
    const auto seqs = expand_ngrams(tokenize_corpus(corpus), config.n_min, config.n_max);
    return fit_pipeline_seqs(seqs, labels, task, config);
}

TermVector vectorize_text(const TrainedPipeline& pipeline, const std::string& text) {
    const auto seq = ngrams(tokenize(normalize(text)), pipeline.config.n_min,
                            pipeline.config.n_max);
    return transform(*pipeline.model.vocab, seq);
}

std::string predict_label(const TrainedPipeline& pipeline, const std::string& text) {
    return predict(pipeline.model, vectorize_text(pipeline, text));
}

std::vector<double> predict_class_scores(const TrainedPipeline& pipeline,
                                         const std::string& text) {
    return predict_scores(pipeline.model, vectorize_text(pipeline, text));
}

}  // namespace cogdist
