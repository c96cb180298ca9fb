#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cogdist/labels.hpp"

namespace cogdist {

/// One annotator's judgement for a passage. An empty label set means the
/// annotator selected no distortion; NotDistorted never appears explicitly.
struct Annotation {
    std::string annotator;
    std::vector<DistortionLabel> labels;  // sorted, unique
};

/// Raw passage with per-annotator label sets, before adjudication.
struct AnnotatedPassage {
    std::string id;
    std::string text;
    std::vector<Annotation> annotations;
};

enum class Task { Detection, Classification };

std::string_view to_string(Task task);

/// Adjudicated passage carrying a single task label. For the classification
/// task the label is one of the 15 distortion names; for the detection task
/// it is "Distorted" or "NotDistorted".
struct LabeledPassage {
    std::string id;
    std::string text;
    std::string label;
    Task task = Task::Classification;
};

struct AdjudicationResult {
    std::vector<LabeledPassage> passages;
    size_t kept = 0;
    size_t discarded = 0;
};

enum class CorpusFormat { Jsonl, Csv };

/// Reads annotated passages from a file. JSONL: one object per line with
/// id/text/annotations. CSV: columns id,text,annotator,labels with labels
/// semicolon-separated; rows sharing an id merge into one passage.
std::vector<AnnotatedPassage> load_corpus(const std::string& path, CorpusFormat format);

/// Stream variant of load_corpus.
std::vector<AnnotatedPassage> parse_corpus(std::istream& in, CorpusFormat format);

void save_annotated(const std::vector<AnnotatedPassage>& corpus, std::ostream& out);
void save_annotated_file(const std::vector<AnnotatedPassage>& corpus, const std::string& path);

/// Keeps a passage iff a strict majority (> n/2) of its annotators included
/// one unique label; everything else is discarded as "no clear majority".
AdjudicationResult adjudicate_classification(const std::vector<AnnotatedPassage>& corpus);

/// Labels a passage Distorted iff a strict majority of annotators selected at
/// least one distortion, NotDistorted iff a strict majority selected none;
/// exact ties are discarded.
AdjudicationResult adjudicate_detection(const std::vector<AnnotatedPassage>& corpus);

/// Partition of a labeled corpus into k folds.
struct FoldAssignment {
    int k = 0;
    std::map<std::string, int> assignment;  // passage id -> fold in [0, k)
};

/// Stratified k-fold split. Labels with >= k instances are balanced so that
/// per-fold counts differ by at most one; rarer labels are placed uniformly
/// at random. Deterministic given (corpus, k, seed) and independent of
/// passage order (grouping works over ids).
FoldAssignment stratified_kfold(const std::vector<LabeledPassage>& corpus, int k, uint64_t seed);

/// Labeled-corpus JSONL: {"id","text","label"} per line. The task is inferred
/// from the label set on load.
std::vector<LabeledPassage> load_labeled(const std::string& path);
std::vector<LabeledPassage> parse_labeled(std::istream& in);
void save_labeled(const std::vector<LabeledPassage>& corpus, std::ostream& out);
void save_labeled_file(const std::vector<LabeledPassage>& corpus, const std::string& path);

}  // namespace cogdist
