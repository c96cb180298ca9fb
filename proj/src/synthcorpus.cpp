#include "cogdist/synthcorpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "cogdist/labels.hpp"
#include "cogdist/rng.hpp"

namespace cogdist {

namespace {

void validate(const SynthConfig& config) {
    if (config.classes.empty()) {
        throw std::invalid_argument("synth config: classes must not be empty");
    }
    std::set<std::string> seen;
    for (const auto& cls : config.classes) {
        const auto parsed = parse_label(cls);
        if (!parsed || *parsed == DistortionLabel::NotDistorted) {
            throw std::invalid_argument("synth config: classes contains unknown label \"" +
                                        cls + "\"");
        }
        if (!seen.insert(cls).second) {
            throw std::invalid_argument("synth config: classes lists \"" + cls + "\" twice");
        }
    }
    if (config.docs_per_class.empty() ||
        (config.docs_per_class.size() != 1 &&
         config.docs_per_class.size() != config.classes.size())) {
        throw std::invalid_argument(
            "synth config: docs_per_class needs one entry or one per class");
    }
    for (const size_t docs : config.docs_per_class) {
        if (docs == 0) throw std::invalid_argument("synth config: docs_per_class entry is zero");
    }
    if (config.signature_terms_per_class == 0) {
        throw std::invalid_argument("synth config: signature_terms_per_class must be positive");
    }
    if (!(config.signature_probability > 0.0 && config.signature_probability <= 1.0)) {
        throw std::invalid_argument("synth config: signature_probability must be in (0, 1]");
    }
    if (config.background_vocab_size == 0) {
        throw std::invalid_argument("synth config: background_vocab_size must be positive");
    }
    if (config.min_length < 2) {
        throw std::invalid_argument("synth config: passage min_length must be at least 2");
    }
    if (config.max_length < config.min_length) {
        throw std::invalid_argument("synth config: passage max_length below min_length");
    }
    if (!(config.not_distorted_fraction >= 0.0 && config.not_distorted_fraction < 1.0)) {
        throw std::invalid_argument("synth config: not_distorted_fraction must be in [0, 1)");
    }
    if (config.annotators == 0) {
        throw std::invalid_argument("synth config: annotators must be positive");
    }
    if (!(config.annotator_noise >= 0.0 && config.annotator_noise < 1.0)) {
        throw std::invalid_argument("synth config: annotator_noise must be in [0, 1)");
    }
    if (config.annotator_noise > 0.0 && config.classes.size() < 2 &&
        config.not_distorted_fraction == 0.0) {
        throw std::invalid_argument(
            "synth config: annotator_noise needs at least two possible labels");
    }
}

std::string passage_id(size_t counter) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "synth-%06zu", counter);
    return buf;
}

}  // namespace

std::vector<AnnotatedPassage> generate_corpus(const SynthConfig& config) {
    validate(config);
    Rng rng(config.seed);

    // rank-inverse background weights so df thresholds bite unevenly
    std::vector<double> cumulative(config.background_vocab_size);
    double total = 0.0;
    for (size_t i = 0; i < config.background_vocab_size; ++i) {
        total += 1.0 / static_cast<double>(i + 1);
        cumulative[i] = total;
    }
    const auto draw_background = [&]() {
        const double r = rng.real01() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        const size_t i = std::min(static_cast<size_t>(it - cumulative.begin()),
                                  config.background_vocab_size - 1);
        return "bg" + std::to_string(i);
    };
    const auto draw_length = [&]() {
        return config.min_length + rng.below(config.max_length - config.min_length + 1);
    };

    const size_t n_classes = config.classes.size();
    std::vector<DistortionLabel> class_labels;
    class_labels.reserve(n_classes);
    for (const auto& cls : config.classes) class_labels.push_back(*parse_label(cls));
    const bool with_not_distorted = config.not_distorted_fraction > 0.0;

    // noisy annotators pick uniformly among the other possible annotations;
    // "none selected" is possible only in corpora that contain such passages
    const auto annotate = [&](size_t true_class, bool none_selected) {
        std::vector<Annotation> annotations;
        annotations.reserve(config.annotators);
        for (size_t a = 0; a < config.annotators; ++a) {
            Annotation annotation;
            annotation.annotator = "ann" + std::to_string(a);
            const bool miss = rng.real01() < config.annotator_noise;
            if (!miss) {
                if (!none_selected) annotation.labels = {class_labels[true_class]};
            } else {
                std::vector<size_t> alternatives;
                for (size_t c = 0; c < n_classes; ++c) {
                    if (none_selected || c != true_class) alternatives.push_back(c);
                }
                const size_t empty_slot = alternatives.size();
                const size_t universe =
                    alternatives.size() + (with_not_distorted && !none_selected ? 1 : 0);
                const size_t pick = rng.below(universe);
                if (pick < empty_slot) {
                    annotation.labels = {class_labels[alternatives[pick]]};
                }
            }
            annotations.push_back(std::move(annotation));
        }
        return annotations;
    };

    std::vector<AnnotatedPassage> out;
    size_t counter = 0;
    size_t n_distorted = 0;
    for (size_t c = 0; c < n_classes; ++c) {
        const size_t docs =
            config.docs_per_class.size() == 1 ? config.docs_per_class[0] : config.docs_per_class[c];
        n_distorted += docs;
        for (size_t d = 0; d < docs; ++d) {
            AnnotatedPassage passage;
            passage.id = passage_id(counter++);
            const size_t length = draw_length();
            for (size_t t = 0; t < length; ++t) {
                std::string token = draw_background();
                if (rng.real01() < config.signature_probability) {
                    token = "sig" + std::to_string(c) + "x" +
                            std::to_string(rng.below(config.signature_terms_per_class));
                }
                if (t > 0) passage.text += " ";
                passage.text += token;
            }
            passage.annotations = annotate(c, false);
            out.push_back(std::move(passage));
        }
    }

    const double f = config.not_distorted_fraction;
    const auto n_plain = static_cast<size_t>(
        std::llround(f / (1.0 - f) * static_cast<double>(n_distorted)));
    for (size_t d = 0; d < n_plain; ++d) {
        AnnotatedPassage passage;
        passage.id = passage_id(counter++);
        const size_t length = draw_length();
        for (size_t t = 0; t < length; ++t) {
            if (t > 0) passage.text += " ";
            passage.text += draw_background();
        }
        passage.annotations = annotate(0, true);
        out.push_back(std::move(passage));
    }
    return out;
}

std::vector<LabeledPassage> shuffle_labels(const std::vector<LabeledPassage>& corpus,
                                           uint64_t seed) {
    if (corpus.empty()) throw std::invalid_argument("shuffle_labels: empty corpus");
    std::vector<std::string> labels;
    labels.reserve(corpus.size());
    for (const auto& passage : corpus) labels.push_back(passage.label);
    Rng rng(seed);
    rng.shuffle(labels);
    auto out = corpus;
    for (size_t i = 0; i < out.size(); ++i) out[i].label = std::move(labels[i]);
    return out;
}

}  // namespace cogdist
