#include "cogdist/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cogdist {

std::optional<uint32_t> Vocabulary::find(std::string_view term) const {
    const auto it = std::lower_bound(
        entries.begin(), entries.end(), term,
        [](const VocabEntry& e, std::string_view t) { return e.term < t; });
    if (it == entries.end() || it->term != term) return std::nullopt;
    return static_cast<uint32_t>(it - entries.begin());
}

Vocabulary fit_vocabulary(const std::vector<TermSequence>& train_docs, uint32_t min_df,
                          double max_df, int n_min, int n_max) {
    if (train_docs.empty()) throw std::invalid_argument("fit_vocabulary: no training documents");
    if (min_df < 1) throw std::invalid_argument("fit_vocabulary: min_df must be >= 1");
    if (!(max_df > 0.0) || max_df > 1.0) {
        throw std::invalid_argument("fit_vocabulary: max_df must be in (0, 1]");
    }
    if (n_min < 1 || n_min > n_max || n_max > 2) {
        throw std::invalid_argument("fit_vocabulary: invalid n-gram range");
    }

    const size_t n_docs = train_docs.size();
    std::map<std::string, uint32_t> df;
    std::vector<std::string_view> seen;
    for (const auto& doc : train_docs) {
        seen.assign(doc.terms.begin(), doc.terms.end());
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (const auto term : seen) ++df[std::string(term)];
    }

    // The small epsilon keeps ceil() from jumping one past the intended cap
    // when max_df * N lands a hair above an integer in floating point.
    const auto cap = static_cast<uint32_t>(
        std::ceil(max_df * static_cast<double>(n_docs) - 1e-9));

    Vocabulary vocab;
    vocab.n_min = n_min;
    vocab.n_max = n_max;
    vocab.min_df = min_df;
    vocab.max_df = max_df;
    vocab.n_train_docs = static_cast<uint32_t>(n_docs);
    for (const auto& [term, count] : df) {
        if (count < min_df || count > cap) continue;
        const double idf =
            std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(count))) +
            1.0;
        vocab.entries.push_back({term, count, idf});
    }
    if (vocab.entries.empty()) {
        throw std::runtime_error("empty vocabulary: document-frequency thresholds excluded every term");
    }
    return vocab;
}

TermVector transform(const Vocabulary& vocab, const TermSequence& doc) {
    std::map<uint32_t, uint32_t> counts;
    for (const auto& term : doc.terms) {
        if (const auto index = vocab.find(term)) ++counts[*index];
    }
    TermVector vec;
    vec.reserve(counts.size());
    double norm_sq = 0.0;
    for (const auto& [index, count] : counts) {
        const double weight = static_cast<double>(count) * vocab.entries[index].idf;
        norm_sq += weight * weight;
        vec.emplace_back(index, weight);
    }
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& [index, weight] : vec) weight *= inv;
    }
    return vec;
}

DocTermMatrix transform_all(std::shared_ptr<const Vocabulary> vocab,
                            const std::vector<TermSequence>& docs) {
    DocTermMatrix matrix;
    matrix.vocab = std::move(vocab);
    matrix.rows.reserve(docs.size());
    for (const auto& doc : docs) matrix.rows.push_back(transform(*matrix.vocab, doc));
    return matrix;
}

double dot(const TermVector& a, const TermVector& b) {
    double sum = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            sum += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return sum;
}

}  // namespace cogdist
