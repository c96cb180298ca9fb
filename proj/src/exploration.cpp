#include "cogdist/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include "cogdist/labels.hpp"
#include "cogdist/rng.hpp"
#include "cogdist/textprep.hpp"

namespace cogdist {

namespace {

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

std::string fmt4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", x);
    return buf;
}

}  // namespace

std::vector<ClassProfile> class_profiles_tfidf(const std::vector<LabeledPassage>& corpus,
                                               const Vocabulary& vocab) {
    if (corpus.empty()) throw std::invalid_argument("class_profiles_tfidf: empty corpus");
    std::map<std::string, ClassProfile, decltype(&label_order_less)> by_class(
        &label_order_less);
    for (const auto& passage : corpus) {
        auto& profile = by_class[passage.label];
        if (profile.values.empty()) {
            profile.cls = passage.label;
            profile.values.assign(vocab.entries.size(), 0.0);
        }
        const auto seq = ngrams(tokenize(normalize(passage.text)), vocab.n_min, vocab.n_max);
        for (const auto& [index, weight] : transform(vocab, seq)) {
            profile.values[index] += weight;
        }
        profile.n_passages++;
    }
    std::vector<ClassProfile> profiles;
    profiles.reserve(by_class.size());
    for (auto& [cls, profile] : by_class) profiles.push_back(std::move(profile));
    return profiles;
}

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("cosine_similarity: vector lengths differ");
    }
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 && nv == 0.0) {
        throw std::invalid_argument("cosine_similarity: both vectors are zero");
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    double dot = 0.0;
    for (size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
    return dot / (nu * nv);
}

Dendrogram ward_cluster(const std::vector<ClassProfile>& profiles) {
    const size_t n = profiles.size();
    if (n < 2) throw std::invalid_argument("ward_cluster: need at least two profiles");
    for (const auto& profile : profiles) {
        if (norm(profile.values) == 0.0) {
            throw std::invalid_argument("ward_cluster: zero profile for class " + profile.cls);
        }
    }

    const size_t total = 2 * n - 1;
    std::vector<std::vector<double>> dist(total, std::vector<double>(total, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const double d = 1.0 - cosine_similarity(profiles[i].values, profiles[j].values);
            dist[i][j] = dist[j][i] = d;
        }
    }

    std::vector<size_t> active(n);
    std::vector<size_t> sizes(total, 1);
    for (size_t i = 0; i < n; ++i) active[i] = i;

    Dendrogram out;
    out.leaves.reserve(n);
    for (const auto& profile : profiles) out.leaves.push_back(profile.cls);

    for (size_t m = 0; m + 1 < n; ++m) {
        size_t best_a = 0, best_b = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t ai = 0; ai < active.size(); ++ai) {
            for (size_t bi = ai + 1; bi < active.size(); ++bi) {
                const double d = dist[active[ai]][active[bi]];
                if (d < best) {
                    best = d;
                    best_a = active[ai];
                    best_b = active[bi];
                }
            }
        }

        const size_t fresh = n + m;
        sizes[fresh] = sizes[best_a] + sizes[best_b];
        for (const size_t k : active) {
            if (k == best_a || k == best_b) continue;
            const double na = static_cast<double>(sizes[best_a]);
            const double nb = static_cast<double>(sizes[best_b]);
            const double nk = static_cast<double>(sizes[k]);
            const double d2 = ((na + nk) * dist[best_a][k] * dist[best_a][k] +
                               (nb + nk) * dist[best_b][k] * dist[best_b][k] -
                               nk * best * best) /
                              (na + nb + nk);
            dist[fresh][k] = dist[k][fresh] = std::sqrt(std::max(d2, 0.0));
        }

        if (!out.merges.empty() && best < out.merges.back().height) {
            out.inversions.push_back(m);
        }
        out.merges.push_back({static_cast<int>(best_a), static_cast<int>(best_b), best,
                              sizes[fresh]});
        std::erase(active, best_a);
        std::erase(active, best_b);
        active.push_back(fresh);
    }
    return out;
}

std::string newick(const Dendrogram& dendro) {
    const size_t n = dendro.leaves.size();
    std::vector<std::string> repr(2 * n - 1);
    std::vector<double> height(2 * n - 1, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const std::string& label = dendro.leaves[i];
        const bool plain = !label.empty() &&
                           std::all_of(label.begin(), label.end(), [](unsigned char c) {
                               return std::isalnum(c) || c == '_' || c == '.' || c == '-';
                           });
        if (plain) {
            repr[i] = label;
        } else {
            repr[i] = "'";
            for (const char c : label) {
                repr[i] += c;
                if (c == '\'') repr[i] += '\'';
            }
            repr[i] += "'";
        }
    }
    for (size_t m = 0; m < dendro.merges.size(); ++m) {
        const auto& merge = dendro.merges[m];
        const size_t node = n + m;
        height[node] = merge.height;
        char left_len[32], right_len[32];
        std::snprintf(left_len, sizeof(left_len), "%.9g",
                      merge.height - height[static_cast<size_t>(merge.left)]);
        std::snprintf(right_len, sizeof(right_len), "%.9g",
                      merge.height - height[static_cast<size_t>(merge.right)]);
        repr[node] = "(" + repr[static_cast<size_t>(merge.left)] + ":" + left_len + "," +
                     repr[static_cast<size_t>(merge.right)] + ":" + right_len + ")";
    }
    return repr[2 * n - 2] + ";";
}

LdaCorpus build_lda_corpus(const std::vector<LabeledPassage>& corpus) {
    if (corpus.empty()) throw std::invalid_argument("build_lda_corpus: empty corpus");
    std::vector<std::vector<std::string>> token_docs;
    token_docs.reserve(corpus.size());
    for (const auto& passage : corpus) token_docs.push_back(tokenize(normalize(passage.text)));

    std::map<std::string, uint32_t> df;
    for (const auto& tokens : token_docs) {
        auto unique = tokens;
        std::sort(unique.begin(), unique.end());
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        for (const auto& term : unique) df[term]++;
    }

    LdaCorpus out;
    for (const auto& [term, count] : df) {
        if (count >= 2) out.terms.push_back(term);
    }

    for (size_t i = 0; i < token_docs.size(); ++i) {
        std::map<uint32_t, uint32_t> counts;
        for (const auto& token : token_docs[i]) {
            const auto it = std::lower_bound(out.terms.begin(), out.terms.end(), token);
            if (it != out.terms.end() && *it == token) {
                counts[static_cast<uint32_t>(it - out.terms.begin())]++;
            }
        }
        if (counts.empty()) continue;
        CountDoc doc;
        doc.counts.assign(counts.begin(), counts.end());
        out.docs.push_back(std::move(doc));
        out.passage_indices.push_back(i);
    }
    return out;
}

TopicModel lda_fit(const LdaCorpus& corpus, size_t K, double alpha, double beta,
                   size_t sweeps, uint64_t seed) {
    if (corpus.docs.empty()) throw std::invalid_argument("lda_fit: no documents to model");
    if (K < 1) throw std::invalid_argument("lda_fit: K must be at least 1");
    for (const auto& doc : corpus.docs) {
        if (doc.counts.empty()) throw std::invalid_argument("lda_fit: empty document");
    }

    const size_t V = corpus.terms.size();
    const size_t D = corpus.docs.size();
    TopicModel model;
    model.K = K;
    model.alpha = alpha;
    model.beta = beta;
    model.sweeps = sweeps;
    model.seed = seed;
    model.terms = corpus.terms;
    model.topic_word.assign(K, std::vector<uint32_t>(V, 0));
    model.topic_total.assign(K, 0);
    model.doc_topic.assign(D, std::vector<uint32_t>(K, 0));
    model.doc_len.assign(D, 0);

    std::vector<std::vector<uint32_t>> tokens(D);
    std::vector<std::vector<uint32_t>> topics(D);
    Rng rng(seed);
    for (size_t d = 0; d < D; ++d) {
        for (const auto& [term, count] : corpus.docs[d].counts) {
            for (uint32_t c = 0; c < count; ++c) tokens[d].push_back(term);
        }
        model.doc_len[d] = static_cast<uint32_t>(tokens[d].size());
        topics[d].resize(tokens[d].size());
        for (size_t t = 0; t < tokens[d].size(); ++t) {
            const auto z = static_cast<uint32_t>(rng.below(K));
            topics[d][t] = z;
            model.doc_topic[d][z]++;
            model.topic_word[z][tokens[d][t]]++;
            model.topic_total[z]++;
        }
    }

    const double v_beta = static_cast<double>(V) * beta;
    std::vector<double> p(K);
    for (size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (size_t d = 0; d < D; ++d) {
            auto& doc_topic = model.doc_topic[d];
            for (size_t t = 0; t < tokens[d].size(); ++t) {
                const uint32_t w = tokens[d][t];
                const uint32_t old = topics[d][t];
                doc_topic[old]--;
                model.topic_word[old][w]--;
                model.topic_total[old]--;

                double total = 0.0;
                for (size_t k = 0; k < K; ++k) {
                    p[k] = (doc_topic[k] + alpha) * (model.topic_word[k][w] + beta) /
                           (model.topic_total[k] + v_beta);
                    total += p[k];
                }
                const double r = rng.real01() * total;
                uint32_t fresh = static_cast<uint32_t>(K) - 1;
                double cum = 0.0;
                for (size_t k = 0; k < K; ++k) {
                    cum += p[k];
                    if (r < cum) {
                        fresh = static_cast<uint32_t>(k);
                        break;
                    }
                }
                topics[d][t] = fresh;
                doc_topic[fresh]++;
                model.topic_word[fresh][w]++;
                model.topic_total[fresh]++;
            }
        }
    }
    return model;
}

std::vector<double> doc_topics(const TopicModel& model, size_t d) {
    if (d >= model.doc_topic.size()) {
        throw std::out_of_range("doc_topics: document index out of range");
    }
    std::vector<double> theta(model.K);
    const double denom = model.doc_len[d] + static_cast<double>(model.K) * model.alpha;
    for (size_t k = 0; k < model.K; ++k) {
        theta[k] = (model.doc_topic[d][k] + model.alpha) / denom;
    }
    return theta;
}

std::vector<ClassProfile> class_profiles_lda(const TopicModel& model, const LdaCorpus& lda,
                                             const std::vector<LabeledPassage>& corpus) {
    if (model.doc_topic.size() != lda.docs.size()) {
        throw std::invalid_argument("class_profiles_lda: model does not match corpus");
    }
    std::map<std::string, ClassProfile, decltype(&label_order_less)> by_class(
        &label_order_less);
    for (size_t d = 0; d < lda.docs.size(); ++d) {
        const auto& passage = corpus.at(lda.passage_indices[d]);
        auto& profile = by_class[passage.label];
        if (profile.values.empty()) {
            profile.cls = passage.label;
            profile.values.assign(model.K, 0.0);
        }
        const auto theta = doc_topics(model, d);
        for (size_t k = 0; k < model.K; ++k) profile.values[k] += theta[k];
        profile.n_passages++;
    }
    std::vector<ClassProfile> profiles;
    profiles.reserve(by_class.size());
    for (auto& [cls, profile] : by_class) profiles.push_back(std::move(profile));
    return profiles;
}

std::vector<std::vector<std::pair<std::string, double>>> top_topic_terms(
    const TopicModel& model, size_t n_terms) {
    const size_t V = model.terms.size();
    const double v_beta = static_cast<double>(V) * model.beta;
    std::vector<std::vector<std::pair<std::string, double>>> out(model.K);
    for (size_t k = 0; k < model.K; ++k) {
        std::vector<std::pair<std::string, double>> scored;
        scored.reserve(V);
        for (size_t w = 0; w < V; ++w) {
            scored.emplace_back(model.terms[w], (model.topic_word[k][w] + model.beta) /
                                                    (model.topic_total[k] + v_beta));
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        scored.resize(std::min(n_terms, scored.size()));
        out[k] = std::move(scored);
    }
    return out;
}

SimilarityMatrix similarity_matrix(const std::vector<ClassProfile>& profiles) {
    if (profiles.empty()) throw std::invalid_argument("similarity_matrix: no profiles");
    for (const auto& profile : profiles) {
        if (norm(profile.values) == 0.0) {
            throw std::invalid_argument("similarity_matrix: zero profile for class " +
                                        profile.cls);
        }
    }
    const size_t n = profiles.size();
    SimilarityMatrix out;
    out.classes.reserve(n);
    for (const auto& profile : profiles) out.classes.push_back(profile.cls);
    out.values.assign(n, std::vector<double>(n, 1.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const double s = cosine_similarity(profiles[i].values, profiles[j].values);
            out.values[i][j] = out.values[j][i] = s;
            out.top_pairs.emplace_back(i, j, s);
        }
    }
    std::sort(out.top_pairs.begin(), out.top_pairs.end(), [](const auto& a, const auto& b) {
        if (std::get<2>(a) != std::get<2>(b)) return std::get<2>(a) > std::get<2>(b);
        return std::tie(std::get<0>(a), std::get<1>(a)) <
               std::tie(std::get<0>(b), std::get<1>(b));
    });
    if (out.top_pairs.size() > 5) out.top_pairs.resize(5);
    return out;
}

std::string similarity_csv(const SimilarityMatrix& matrix) {
    std::string csv;
    for (const auto& cls : matrix.classes) {
        csv += ",";
        csv += cls;
    }
    csv += "\n";
    for (size_t i = 0; i < matrix.classes.size(); ++i) {
        csv += matrix.classes[i];
        for (const double value : matrix.values[i]) {
            csv += ",";
            csv += fmt4(value);
        }
        csv += "\n";
    }
    return csv;
}

}  // namespace cogdist
