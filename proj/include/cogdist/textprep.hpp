#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cogdist {

/// Ordered unigram/bigram terms extracted from one document. Bigrams are the
/// two component tokens joined by a single space.
struct TermSequence {
    std::vector<std::string> terms;
};

/// Lowercases and strips punctuation. Every punctuation character becomes a
/// single space; apostrophes survive only between two letters or digits, so
/// contractions like "i'll" stay intact while quote marks do not. Input is
/// treated as UTF-8; curly apostrophes (U+2019) are folded to ASCII.
std::string normalize(std::string_view text);

/// Splits on whitespace. Tokens are maximal runs of non-whitespace; the
/// result never contains empty tokens.
std::vector<std::string> tokenize(std::string_view text);

/// All contiguous n-grams for each n in [n_min, n_max], grouped by n, each
/// group in document order. Only 1 <= n_min <= n_max <= 2 is supported.
TermSequence ngrams(const std::vector<std::string>& tokens, int n_min, int n_max);

}  // namespace cogdist
