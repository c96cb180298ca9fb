#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cogdist/corpus.hpp"

namespace cogdist {

/// Recipe for a seeded synthetic annotated corpus. Passage tokens come from
/// a shared rank-weighted background vocabulary; each token is independently
/// swapped for one of the class's signature terms with
/// signature_probability, so classes are separable exactly to the degree
/// configured. Signature sets are disjoint across classes and from the
/// background. Annotators report the true label unless annotator noise
/// flips them to a uniformly chosen wrong one.
struct SynthConfig {
    std::vector<std::string> classes;
    /// One entry per class, or a single entry applied to every class.
    std::vector<size_t> docs_per_class = {20};
    size_t signature_terms_per_class = 5;
    double signature_probability = 0.3;
    size_t background_vocab_size = 200;
    size_t min_length = 8;
    size_t max_length = 20;
    /// Fraction of the final corpus made of background-only passages whose
    /// annotations select no label.
    double not_distorted_fraction = 0.0;
    size_t annotators = 3;
    double annotator_noise = 0.0;
    uint64_t seed = 0;
};

std::vector<AnnotatedPassage> generate_corpus(const SynthConfig& config);

/// Reassigns the existing labels to passages by a seeded uniform
/// permutation; the label histogram is untouched.
std::vector<LabeledPassage> shuffle_labels(const std::vector<LabeledPassage>& corpus,
                                           uint64_t seed);

}  // namespace cogdist
