#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cogdist/corpus.hpp"
#include "cogdist/vectorize.hpp"

namespace cogdist {

/// Aggregate feature vector for one class: the elementwise sum of its
/// passages' representations (tf-idf space of size V, or topic space of
/// size K).
struct ClassProfile {
    std::string cls;
    std::vector<double> values;
    size_t n_passages = 0;
};

struct Merge {
    int left = 0;
    int right = 0;
    double height = 0.0;
    size_t size = 0;
};

/// Agglomerative clustering result. Leaves are numbered 0..n-1 in the order
/// of `leaves`; the cluster formed by merges[m] has node id n+m. Heights
/// should be non-decreasing; merges where they dip are listed in
/// `inversions` rather than treated as errors.
struct Dendrogram {
    std::vector<std::string> leaves;
    std::vector<Merge> merges;
    std::vector<size_t> inversions;
};

std::vector<ClassProfile> class_profiles_tfidf(const std::vector<LabeledPassage>& corpus,
                                               const Vocabulary& vocab);

/// (u.v)/(|u||v|). Exactly one zero vector compares as 0; two zero vectors
/// have no defined angle and throw.
double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v);

/// Bottom-up clustering of the given profiles over cosine distance
/// d = 1 - cosine, merging the closest pair and updating distances with the
/// Ward recurrence. Ties pick the smallest (left id, right id) pair.
Dendrogram ward_cluster(const std::vector<ClassProfile>& profiles);

std::string newick(const Dendrogram& dendro);

/// Bag-of-words documents over a shared count vocabulary, for topic
/// modeling. Unigrams only, min_df = 2; passages left empty by the
/// vocabulary cut are dropped and `passage_indices` maps each kept doc back
/// to its corpus position.
struct CountDoc {
    std::vector<std::pair<uint32_t, uint32_t>> counts;
};

struct LdaCorpus {
    std::vector<std::string> terms;
    std::vector<CountDoc> docs;
    std::vector<size_t> passage_indices;
};

LdaCorpus build_lda_corpus(const std::vector<LabeledPassage>& corpus);

struct TopicModel {
    size_t K = 0;
    double alpha = 0.1;
    double beta = 0.01;
    size_t sweeps = 0;
    uint64_t seed = 0;
    std::vector<std::string> terms;
    std::vector<std::vector<uint32_t>> topic_word;
    std::vector<uint32_t> topic_total;
    std::vector<std::vector<uint32_t>> doc_topic;
    std::vector<uint32_t> doc_len;
};

/// Collapsed Gibbs sampler. Token-topic assignments are initialized
/// uniformly at random and resampled for `sweeps` full passes in document
/// and token order, so a given seed always yields the same count matrices.
TopicModel lda_fit(const LdaCorpus& corpus, size_t K = 25, double alpha = 0.1,
                   double beta = 0.01, size_t sweeps = 1000, uint64_t seed = 0);

/// Smoothed topic distribution of document d:
/// theta_dk = (n_dk + alpha) / (len_d + K*alpha).
std::vector<double> doc_topics(const TopicModel& model, size_t d);

std::vector<ClassProfile> class_profiles_lda(const TopicModel& model, const LdaCorpus& lda,
                                             const std::vector<LabeledPassage>& corpus);

/// Per topic, the `n_terms` highest-probability terms with their smoothed
/// probabilities (n_kw + beta) / (n_k + V*beta), ties by term ascending.
std::vector<std::vector<std::pair<std::string, double>>> top_topic_terms(
    const TopicModel& model, size_t n_terms = 20);

struct SimilarityMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<double>> values;
    /// Up to five most similar off-diagonal (i, j, similarity) triples,
    /// i < j, similarity descending.
    std::vector<std::tuple<size_t, size_t, double>> top_pairs;
};

SimilarityMatrix similarity_matrix(const std::vector<ClassProfile>& profiles);

std::string similarity_csv(const SimilarityMatrix& matrix);

}  // namespace cogdist
