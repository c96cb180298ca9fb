#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "cogdist/exploration.hpp"
#include "cogdist/rng.hpp"
#include "cogdist/textprep.hpp"

using namespace cogdist;

namespace {

LabeledPassage passage(std::string id, std::string text, std::string label) {
    LabeledPassage p;
    p.id = std::move(id);
    p.text = std::move(text);
    p.label = std::move(label);
    p.task = Task::Classification;
    return p;
}

Vocabulary unigram_vocab(const std::vector<LabeledPassage>& corpus) {
    std::vector<TermSequence> seqs;
    for (const auto& p : corpus) seqs.push_back(ngrams(tokenize(normalize(p.text)), 1, 1));
    return fit_vocabulary(seqs, 1, 1.0, 1, 1);
}

double hand_cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double uv = 0, uu = 0, vv = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        uv += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    return uv / (std::sqrt(uu) * std::sqrt(vv));
}

// Reference agglomerative clustering that rebuilds the whole distance matrix
// after every merge instead of updating rows in place.
std::vector<Merge> ward_rescan(const std::vector<ClassProfile>& profiles) {
    const size_t n = profiles.size();
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<double> sizes(n, 1.0);
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i != j) dist[i][j] = 1.0 - hand_cosine(profiles[i].values, profiles[j].values);
        }
    }

    std::vector<Merge> merges;
    int next_id = static_cast<int>(n);
    while (ids.size() > 1) {
        size_t bi = 0, bj = 1;
        for (size_t i = 0; i < ids.size(); ++i) {
            for (size_t j = i + 1; j < ids.size(); ++j) {
                if (dist[i][j] < dist[bi][bj]) {
                    bi = i;
                    bj = j;
                }
            }
        }
        const double h = dist[bi][bj];
        merges.push_back({ids[bi], ids[bj], h, static_cast<size_t>(sizes[bi] + sizes[bj])});

        std::vector<size_t> keep;
        for (size_t i = 0; i < ids.size(); ++i) {
            if (i != bi && i != bj) keep.push_back(i);
        }
        const size_t m = keep.size() + 1;
        std::vector<std::vector<double>> fresh(m, std::vector<double>(m, 0.0));
        for (size_t a = 0; a < keep.size(); ++a) {
            for (size_t b = 0; b < keep.size(); ++b) fresh[a][b] = dist[keep[a]][keep[b]];
            const double na = sizes[bi], nb = sizes[bj], nk = sizes[keep[a]];
            const double dik = dist[bi][keep[a]], djk = dist[bj][keep[a]];
            const double d2 =
                ((na + nk) * dik * dik + (nb + nk) * djk * djk - nk * h * h) / (na + nb + nk);
            fresh[a][m - 1] = fresh[m - 1][a] = std::sqrt(std::max(d2, 0.0));
        }

        std::vector<int> fresh_ids;
        std::vector<double> fresh_sizes;
        for (const size_t i : keep) {
            fresh_ids.push_back(ids[i]);
            fresh_sizes.push_back(sizes[i]);
        }
        fresh_ids.push_back(next_id++);
        fresh_sizes.push_back(sizes[bi] + sizes[bj]);
        ids = std::move(fresh_ids);
        sizes = std::move(fresh_sizes);
        dist = std::move(fresh);
    }
    return merges;
}

std::vector<ClassProfile> random_profiles(size_t n, size_t dim, Rng& rng) {
    std::vector<ClassProfile> profiles(n);
    for (size_t i = 0; i < n; ++i) {
        profiles[i].cls = "c" + std::to_string(i);
        profiles[i].n_passages = 1;
        for (size_t j = 0; j < dim; ++j) profiles[i].values.push_back(rng.real01() + 0.1);
    }
    return profiles;
}

}  // namespace

TEST_CASE("cosine similarity pins") {
    CHECK(cosine_similarity({3, 4}, {3, 4}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine_similarity({1, 0}, {0, 1}) == 0.0);
    CHECK(cosine_similarity({1, 1, 0}, {1, 0, 0}) == doctest::Approx(0.70711).epsilon(1e-5));
    CHECK(cosine_similarity({0, 0}, {1, 2}) == 0.0);
    CHECK(cosine_similarity({1, 2}, {0, 0}) == 0.0);
    CHECK_THROWS_AS(cosine_similarity({0, 0}, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(cosine_similarity({1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("tf-idf class profiles are per-class sums") {
    const std::vector<LabeledPassage> corpus = {
        passage("p1", "blame fault blame", "Blaming"),
        passage("p2", "always never always", "Overgeneralization"),
        passage("p3", "always never always", "Overgeneralization"),
    };
    const auto vocab = unigram_vocab(corpus);
    const auto profiles = class_profiles_tfidf(corpus, vocab);
    REQUIRE(profiles.size() == 2);
    CHECK(profiles[0].cls == "Blaming");
    CHECK(profiles[1].cls == "Overgeneralization");
    CHECK(profiles[0].n_passages == 1);
    CHECK(profiles[1].n_passages == 2);

    // singleton class: profile equals the passage's own vector
    const auto single = transform(vocab, ngrams(tokenize(normalize("blame fault blame")), 1, 1));
    for (const auto& [index, weight] : single) {
        CHECK(profiles[0].values[index] == doctest::Approx(weight).epsilon(1e-12));
    }

    // duplicated passages: profile is twice the single vector
    const auto dup = transform(vocab, ngrams(tokenize(normalize("always never always")), 1, 1));
    for (const auto& [index, weight] : dup) {
        CHECK(profiles[1].values[index] == doctest::Approx(2 * weight).epsilon(1e-12));
    }

    CHECK_THROWS_AS(class_profiles_tfidf({}, vocab), std::invalid_argument);
}

TEST_CASE("two-leaf clustering is the closed-form base case") {
    std::vector<ClassProfile> profiles(2);
    profiles[0] = {"a", {1, 0}, 1};
    profiles[1] = {"b", {0, 1}, 1};
    const auto dendro = ward_cluster(profiles);
    REQUIRE(dendro.merges.size() == 1);
    CHECK(dendro.merges[0].left == 0);
    CHECK(dendro.merges[0].right == 1);
    CHECK(dendro.merges[0].height == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dendro.merges[0].size == 2);
    CHECK(dendro.inversions.empty());
    CHECK(newick(dendro) == "(a:1,b:1);");
}

TEST_CASE("duplicate profiles merge first at height zero") {
    std::vector<ClassProfile> profiles(4);
    profiles[0] = {"a", {1, 2, 3}, 1};
    profiles[1] = {"b", {5, 1, 0}, 1};
    profiles[2] = {"c", {2, 4, 6}, 1};  // same direction as a
    profiles[3] = {"d", {0, 1, 9}, 1};
    const auto dendro = ward_cluster(profiles);
    CHECK(dendro.merges[0].left == 0);
    CHECK(dendro.merges[0].right == 2);
    CHECK(dendro.merges[0].height <= 1e-12);
}

TEST_CASE("clustering validates its input") {
    CHECK_THROWS_AS(ward_cluster({{"a", {1, 2}, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(ward_cluster({{"a", {1, 2}, 1}, {"z", {0, 0}, 1}}), std::invalid_argument);
}

TEST_CASE("merge sequence matches a full-rescan reference") {
    Rng rng(4242);
    for (int trial = 0; trial < 60; ++trial) {
        const size_t n = 2 + rng.below(7);
        const auto profiles = random_profiles(n, 3 + rng.below(4), rng);
        const auto dendro = ward_cluster(profiles);
        const auto expected = ward_rescan(profiles);

        REQUIRE(dendro.merges.size() == n - 1);
        REQUIRE(expected.size() == n - 1);
        for (size_t m = 0; m < expected.size(); ++m) {
            CAPTURE(trial);
            CAPTURE(m);
            CHECK(dendro.merges[m].left == expected[m].left);
            CHECK(dendro.merges[m].right == expected[m].right);
            CHECK(dendro.merges[m].size == expected[m].size);
            CHECK(dendro.merges[m].height ==
                  doctest::Approx(expected[m].height).epsilon(1e-9));
        }

        // every node joins exactly one later merge, except the root
        std::map<int, int> uses;
        for (const auto& merge : dendro.merges) {
            uses[merge.left]++;
            uses[merge.right]++;
        }
        for (size_t node = 0; node + 1 < 2 * n - 1; ++node) {
            CHECK(uses[static_cast<int>(node)] == 1);
        }
        CHECK(uses.find(static_cast<int>(2 * n - 2)) == uses.end());

        // recorded inversions are exactly the height dips
        std::vector<size_t> dips;
        for (size_t m = 1; m < dendro.merges.size(); ++m) {
            if (dendro.merges[m].height < dendro.merges[m - 1].height) dips.push_back(m);
        }
        CHECK(dendro.inversions == dips);
    }
}

TEST_CASE("clustering is invariant under uniform scaling") {
    Rng rng(77);
    const auto profiles = random_profiles(6, 4, rng);
    auto scaled = profiles;
    for (auto& profile : scaled) {
        for (auto& value : profile.values) value *= 3.7;
    }
    const auto a = ward_cluster(profiles);
    const auto b = ward_cluster(scaled);
    REQUIRE(a.merges.size() == b.merges.size());
    for (size_t m = 0; m < a.merges.size(); ++m) {
        CHECK(a.merges[m].left == b.merges[m].left);
        CHECK(a.merges[m].right == b.merges[m].right);
        CHECK(a.merges[m].height == doctest::Approx(b.merges[m].height).epsilon(1e-9));
    }
}

TEST_CASE("newick quoting of awkward labels") {
    std::vector<ClassProfile> profiles(2);
    profiles[0] = {"Heaven's Reward Fallacy", {1, 0}, 1};
    profiles[1] = {"Blaming", {0, 1}, 1};
    const auto text = newick(ward_cluster(profiles));
    CHECK(text == "('Heaven''s Reward Fallacy':1,Blaming:1);");
}

TEST_CASE("count corpus keeps terms seen in at least two passages") {
    const std::vector<LabeledPassage> corpus = {
        passage("p1", "apple banana apple", "Blaming"),
        passage("p2", "banana cherry", "Blaming"),
        passage("p3", "quartz", "Filtering"),  // every term rare: dropped
        passage("p4", "apple apple", "Filtering"),
    };
    const auto lda = build_lda_corpus(corpus);
    CHECK(lda.terms == std::vector<std::string>{"apple", "banana"});
    REQUIRE(lda.docs.size() == 3);
    CHECK(lda.passage_indices == std::vector<size_t>{0, 1, 3});
    CHECK(lda.docs[0].counts ==
          std::vector<std::pair<uint32_t, uint32_t>>{{0, 2}, {1, 1}});
    CHECK(lda.docs[1].counts == std::vector<std::pair<uint32_t, uint32_t>>{{1, 1}});
    CHECK(lda.docs[2].counts == std::vector<std::pair<uint32_t, uint32_t>>{{0, 2}});
    CHECK_THROWS_AS(build_lda_corpus({}), std::invalid_argument);
}

namespace {

std::vector<LabeledPassage> two_theme_corpus() {
    const std::vector<std::string> reds = {"red", "blue", "green", "cyan", "violet"};
    const std::vector<std::string> pets = {"dog", "cat", "fox", "owl", "hen"};
    std::vector<LabeledPassage> corpus;
    for (int i = 0; i < 15; ++i) {
        std::string a, b;
        for (int t = 0; t < 12; ++t) {
            a += reds[static_cast<size_t>(i + t) % reds.size()] + " ";
            b += pets[static_cast<size_t>(i + 2 * t) % pets.size()] + " ";
        }
        corpus.push_back(passage("r" + std::to_string(i), a, "Blaming"));
        corpus.push_back(passage("p" + std::to_string(i), b, "Filtering"));
    }
    return corpus;
}

}  // namespace

TEST_CASE("topic model count bookkeeping") {
    const auto corpus = two_theme_corpus();
    const auto lda = build_lda_corpus(corpus);
    const auto model = lda_fit(lda, 3, 0.1, 0.01, 50, 11);

    // per-document topic counts add up to document length
    for (size_t d = 0; d < lda.docs.size(); ++d) {
        uint32_t len = 0;
        for (const auto& [term, count] : lda.docs[d].counts) len += count;
        CHECK(model.doc_len[d] == len);
        uint32_t sum = 0;
        for (size_t k = 0; k < model.K; ++k) sum += model.doc_topic[d][k];
        CHECK(sum == len);

        const auto theta = doc_topics(model, d);
        const double total = std::accumulate(theta.begin(), theta.end(), 0.0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }

    // per-term topic counts add up to corpus frequency
    for (size_t w = 0; w < model.terms.size(); ++w) {
        uint32_t freq = 0;
        for (const auto& doc : lda.docs) {
            for (const auto& [term, count] : doc.counts) {
                if (term == w) freq += count;
            }
        }
        uint32_t sum = 0;
        for (size_t k = 0; k < model.K; ++k) sum += model.topic_word[k][w];
        CHECK(sum == freq);
    }

    // topic totals match their word rows
    for (size_t k = 0; k < model.K; ++k) {
        uint32_t sum = 0;
        for (size_t w = 0; w < model.terms.size(); ++w) sum += model.topic_word[k][w];
        CHECK(sum == model.topic_total[k]);
    }

    CHECK_THROWS_AS(doc_topics(model, lda.docs.size()), std::out_of_range);
    CHECK_THROWS_AS(lda_fit(LdaCorpus{}, 3), std::invalid_argument);
    CHECK_THROWS_AS(lda_fit(lda, 0), std::invalid_argument);
}

TEST_CASE("single topic degenerates to certainty") {
    const auto lda = build_lda_corpus(two_theme_corpus());
    const auto model = lda_fit(lda, 1, 0.1, 0.01, 5, 3);
    for (size_t d = 0; d < lda.docs.size(); ++d) {
        const auto theta = doc_topics(model, d);
        REQUIRE(theta.size() == 1);
        CHECK(theta[0] == 1.0);
    }
}

TEST_CASE("uniform topic counts give a uniform distribution") {
    TopicModel model;
    model.K = 4;
    model.alpha = 0.1;
    model.doc_topic = {{3, 3, 3, 3}};
    model.doc_len = {12};
    const auto theta = doc_topics(model, 0);
    for (const double x : theta) CHECK(x == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("disjoint themes separate into their own topics") {
    const auto corpus = two_theme_corpus();
    const auto lda = build_lda_corpus(corpus);
    const auto model = lda_fit(lda, 2, 0.1, 0.01, 500, 19);

    std::map<std::string, std::array<int, 2>> dominant;
    for (size_t d = 0; d < lda.docs.size(); ++d) {
        const auto theta = doc_topics(model, d);
        const size_t top = theta[0] >= theta[1] ? 0 : 1;
        dominant[corpus[lda.passage_indices[d]].label][top]++;
    }
    double purity = 0.0;
    for (const auto& [label, counts] : dominant) {
        purity += static_cast<double>(std::max(counts[0], counts[1])) / (counts[0] + counts[1]);
    }
    purity /= static_cast<double>(dominant.size());
    CHECK(purity >= 0.9);

    // the two topics' top terms come from different theme vocabularies
    const auto tops = top_topic_terms(model, 5);
    REQUIRE(tops.size() == 2);
    const std::vector<std::string> reds = {"red", "blue", "green", "cyan", "violet"};
    const auto is_red = [&](const std::string& t) {
        return std::find(reds.begin(), reds.end(), t) != reds.end();
    };
    int red_topics = 0;
    for (const auto& top : tops) {
        size_t red = 0;
        for (const auto& [term, prob] : top) red += is_red(term) ? 1 : 0;
        if (red == top.size()) red_topics++;
        CHECK((red == 0 || red == top.size()));
    }
    CHECK(red_topics == 1);
}

TEST_CASE("seeded sampling is exactly reproducible") {
    const auto lda = build_lda_corpus(two_theme_corpus());
    const auto a = lda_fit(lda, 4, 0.1, 0.01, 60, 123);
    const auto b = lda_fit(lda, 4, 0.1, 0.01, 60, 123);
    CHECK(a.topic_word == b.topic_word);
    CHECK(a.doc_topic == b.doc_topic);
    CHECK(a.topic_total == b.topic_total);

    const auto c = lda_fit(lda, 4, 0.1, 0.01, 60, 124);
    CHECK(a.topic_word != c.topic_word);
}

TEST_CASE("topic term probabilities follow the smoothed counts") {
    TopicModel model;
    model.K = 2;
    model.beta = 0.01;
    model.terms = {"apple", "banana", "cherry"};
    model.topic_word = {{5, 0, 0}, {2, 2, 1}};
    model.topic_total = {5, 5};
    const auto tops = top_topic_terms(model, 2);
    REQUIRE(tops.size() == 2);
    CHECK(tops[0][0].first == "apple");
    CHECK(tops[0][0].second == doctest::Approx(5.01 / 5.03).epsilon(1e-12));
    CHECK(tops[0][1].first == "banana");  // tie with cherry broken alphabetically
    CHECK(tops[1][0].first == "apple");
    CHECK(tops[1][1].first == "banana");
}

TEST_CASE("class topic profiles sum passage distributions") {
    const auto corpus = two_theme_corpus();
    const auto lda = build_lda_corpus(corpus);
    const auto model = lda_fit(lda, 3, 0.1, 0.01, 30, 7);
    const auto profiles = class_profiles_lda(model, lda, corpus);
    REQUIRE(profiles.size() == 2);
    CHECK(profiles[0].cls == "Blaming");
    CHECK(profiles[1].cls == "Filtering");
    for (const auto& profile : profiles) {
        CHECK(profile.values.size() == 3);
        const double total =
            std::accumulate(profile.values.begin(), profile.values.end(), 0.0);
        CHECK(total == doctest::Approx(static_cast<double>(profile.n_passages)).epsilon(1e-6));
    }
}

TEST_CASE("similarity matrix shape and ordering") {
    std::vector<ClassProfile> profiles(4);
    profiles[0] = {"a", {1, 0, 0}, 1};
    profiles[1] = {"b", {1, 1, 0}, 1};
    profiles[2] = {"c", {1, 0, 0}, 1};  // duplicate of a
    profiles[3] = {"d", {0, 0, 1}, 1};
    const auto matrix = similarity_matrix(profiles);
    REQUIRE(matrix.classes.size() == 4);
    for (size_t i = 0; i < 4; ++i) {
        CHECK(matrix.values[i][i] == 1.0);
        for (size_t j = 0; j < 4; ++j) {
            CHECK(matrix.values[i][j] == matrix.values[j][i]);
            CHECK(matrix.values[i][j] >= 0.0);
            CHECK(matrix.values[i][j] <= 1.0);
        }
    }
    CHECK(matrix.values[0][2] == doctest::Approx(1.0).epsilon(1e-12));

    REQUIRE(matrix.top_pairs.size() == 5);
    CHECK(std::get<0>(matrix.top_pairs[0]) == 0);
    CHECK(std::get<1>(matrix.top_pairs[0]) == 2);
    for (size_t i = 1; i < matrix.top_pairs.size(); ++i) {
        CHECK(std::get<2>(matrix.top_pairs[i - 1]) >= std::get<2>(matrix.top_pairs[i]));
    }

    CHECK_THROWS_AS(similarity_matrix({{"a", {0, 0}, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(similarity_matrix({}), std::invalid_argument);
}

TEST_CASE("similarity CSV layout") {
    std::vector<ClassProfile> profiles(2);
    profiles[0] = {"A", {1, 0}, 1};
    profiles[1] = {"B", {1, 1}, 1};
    CHECK(similarity_csv(similarity_matrix(profiles)) ==
          ",A,B\n"
          "A,1.0000,0.7071\n"
          "B,0.7071,1.0000\n");
}
