#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cogdist/pipeline.hpp"

namespace cogdist {

inline constexpr int kBundleFormatVersion = 1;

/// Where a saved model came from: a digest of the corpus it was trained on,
/// the seed in play, and a wall-clock timestamp (informational only; every
/// other field is part of the determinism contract).
struct Provenance {
    std::string corpus_digest;
    uint64_t seed = 0;
    std::string timestamp;
};

struct ModelBundle {
    TrainedPipeline pipeline;
    Provenance provenance;
};

/// FNV-1a over ids, texts and labels, as a 16-digit hex string.
std::string corpus_digest(const std::vector<LabeledPassage>& corpus);

/// Writes the bundle as versioned JSON with round-trip-exact numerals, so a
/// reloaded model scores every input identically.
void save_model(const ModelBundle& bundle, const std::string& path);

ModelBundle load_model(const std::string& path);

}  // namespace cogdist
