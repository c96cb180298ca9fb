#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cogdist/textprep.hpp"

namespace cogdist {

struct VocabEntry {
    std::string term;
    uint32_t document_frequency = 0;
    double idf = 0.0;
};

/// Term inventory fitted on training documents only. Entries are sorted by
/// term; the index of a term is its position, so indices are contiguous,
/// lexicographically assigned and reproducible across runs.
struct Vocabulary {
    std::vector<VocabEntry> entries;
    int n_min = 1;
    int n_max = 1;
    uint32_t min_df = 1;
    double max_df = 1.0;
    uint32_t n_train_docs = 0;

    size_t size() const { return entries.size(); }
    std::optional<uint32_t> find(std::string_view term) const;
};

/// Sparse document vector: (term index, weight) sorted by index, zero
/// entries absent. Nonempty vectors have Euclidean norm 1.
using TermVector = std::vector<std::pair<uint32_t, double>>;

struct DocTermMatrix {
    std::vector<TermVector> rows;
    std::shared_ptr<const Vocabulary> vocab;
};

/// Builds the vocabulary from training documents. A term is retained iff its
/// document frequency d satisfies min_df <= d <= ceil(max_df * N). The idf of
/// a retained term is ln((1 + N) / (1 + d)) + 1. The n-gram range is recorded
/// so later stages know how to expand raw text.
///
/// Throws std::invalid_argument on parameter misuse and std::runtime_error
/// ("empty vocabulary") when the thresholds exclude every term.
Vocabulary fit_vocabulary(const std::vector<TermSequence>& train_docs, uint32_t min_df,
                          double max_df, int n_min, int n_max);

/// tf-idf weights for one document: count(t) * idf(t), L2-normalized.
/// Out-of-vocabulary terms are dropped silently; a document with no
/// in-vocabulary terms maps to the zero vector.
TermVector transform(const Vocabulary& vocab, const TermSequence& doc);

DocTermMatrix transform_all(std::shared_ptr<const Vocabulary> vocab,
                            const std::vector<TermSequence>& docs);

/// Dot product of two sparse vectors (both sorted by index).
double dot(const TermVector& a, const TermVector& b);

}  // namespace cogdist
