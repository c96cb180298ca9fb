#include "cogdist/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "cogdist/rng.hpp"

namespace cogdist {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail_line(size_t line, const std::string& what) {
    throw std::runtime_error("load_corpus: line " + std::to_string(line) + ": " + what);
}

DistortionLabel parse_label_or_fail(const std::string& name, size_t line) {
    const auto label = parse_label(name);
    if (!label) fail_line(line, "unknown label \"" + name + "\"");
    if (*label == DistortionLabel::NotDistorted) {
        fail_line(line, "NotDistorted may not appear in an annotation; use an empty label list");
    }
    return *label;
}

void sort_unique(std::vector<DistortionLabel>& labels) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
}

std::vector<AnnotatedPassage> parse_jsonl(std::istream& in) {
    std::vector<AnnotatedPassage> corpus;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json rec;
        try {
            rec = ordered_json::parse(line);
        } catch (const ordered_json::parse_error& e) {
            fail_line(lineno, std::string("malformed record: ") + e.what());
        }
        if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
            !rec.contains("text") || !rec["text"].is_string() ||
            !rec.contains("annotations") || !rec["annotations"].is_array()) {
            fail_line(lineno, "malformed record: expected object with id, text, annotations");
        }
        AnnotatedPassage passage;
        passage.id = rec["id"].get<std::string>();
        passage.text = rec["text"].get<std::string>();
        if (passage.id.empty()) fail_line(lineno, "empty id");
        if (!seen_ids.insert(passage.id).second) {
            fail_line(lineno, "duplicate id \"" + passage.id + "\"");
        }
        std::unordered_set<std::string> annotators;
        for (const auto& ann : rec["annotations"]) {
            if (!ann.is_object() || !ann.contains("annotator") || !ann["annotator"].is_string() ||
                !ann.contains("labels") || !ann["labels"].is_array()) {
                fail_line(lineno, "malformed record: bad annotation entry");
            }
            Annotation a;
            a.annotator = ann["annotator"].get<std::string>();
            if (!annotators.insert(a.annotator).second) {
                fail_line(lineno, "duplicate annotator \"" + a.annotator + "\"");
            }
            for (const auto& l : ann["labels"]) {
                if (!l.is_string()) fail_line(lineno, "malformed record: label must be a string");
                a.labels.push_back(parse_label_or_fail(l.get<std::string>(), lineno));
            }
            sort_unique(a.labels);
            passage.annotations.push_back(std::move(a));
        }
        corpus.push_back(std::move(passage));
    }
    return corpus;
}

// RFC-4180 style reader: quoted fields may contain commas, doubled quotes and
// newlines. Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, size_t& lineno) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;
    ++lineno;
    std::string field;
    bool quoted = false;
    while (true) {
        if (c == EOF) {
            fields.push_back(field);
            return true;
        }
        const char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++lineno;
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty()) {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(field);
            return true;
        } else {
            field.push_back(ch);
        }
        c = in.get();
    }
}

std::vector<std::string> split_semicolons(const std::string& s) {
    std::vector<std::string> parts;
    std::string part;
    std::stringstream ss(s);
    while (std::getline(ss, part, ';')) {
        const size_t b = part.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const size_t e = part.find_last_not_of(" \t");
        parts.push_back(part.substr(b, e - b + 1));
    }
    return parts;
}

std::vector<AnnotatedPassage> parse_csv(std::istream& in) {
    std::vector<std::string> fields;
    size_t lineno = 0;
    if (!read_csv_record(in, fields, lineno) || fields.size() != 4 || fields[0] != "id" ||
        fields[1] != "text" || fields[2] != "annotator" || fields[3] != "labels") {
        throw std::runtime_error("load_corpus: expected CSV header id,text,annotator,labels");
    }

    std::vector<AnnotatedPassage> corpus;
    std::unordered_map<std::string, size_t> by_id;
    while (read_csv_record(in, fields, lineno)) {
        const size_t record_line = lineno;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 4) fail_line(record_line, "malformed record: expected 4 columns");
        const std::string& id = fields[0];
        if (id.empty()) fail_line(record_line, "empty id");

        Annotation a;
        a.annotator = fields[2];
        for (const auto& name : split_semicolons(fields[3])) {
            a.labels.push_back(parse_label_or_fail(name, record_line));
        }
        sort_unique(a.labels);

        const auto it = by_id.find(id);
        if (it == by_id.end()) {
            AnnotatedPassage passage;
            passage.id = id;
            passage.text = fields[1];
            passage.annotations.push_back(std::move(a));
            by_id.emplace(id, corpus.size());
            corpus.push_back(std::move(passage));
        } else {
            AnnotatedPassage& passage = corpus[it->second];
            if (passage.text != fields[1]) {
                fail_line(record_line, "id \"" + id + "\" repeated with different text");
            }
            for (const auto& existing : passage.annotations) {
                if (existing.annotator == a.annotator) {
                    fail_line(record_line, "duplicate annotator \"" + a.annotator + "\" for id \"" + id + "\"");
                }
            }
            passage.annotations.push_back(std::move(a));
        }
    }
    return corpus;
}

}  // namespace

std::string_view to_string(Task task) {
    return task == Task::Detection ? "detection" : "classification";
}

std::vector<AnnotatedPassage> parse_corpus(std::istream& in, CorpusFormat format) {
    return format == CorpusFormat::Jsonl ? parse_jsonl(in) : parse_csv(in);
}

std::vector<AnnotatedPassage> load_corpus(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_corpus: cannot open " + path);
    return parse_corpus(in, format);
}

void save_annotated(const std::vector<AnnotatedPassage>& corpus, std::ostream& out) {
    for (const auto& passage : corpus) {
        ordered_json rec;
        rec["id"] = passage.id;
        rec["text"] = passage.text;
        rec["annotations"] = ordered_json::array();
        for (const auto& ann : passage.annotations) {
            ordered_json a;
            a["annotator"] = ann.annotator;
            a["labels"] = ordered_json::array();
            for (const auto label : ann.labels) a["labels"].push_back(std::string(to_string(label)));
            rec["annotations"].push_back(std::move(a));
        }
        out << rec.dump() << '\n';
    }
}

void save_annotated_file(const std::vector<AnnotatedPassage>& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    save_annotated(corpus, out);
}

namespace {

void check_adjudication_input(const std::vector<AnnotatedPassage>& corpus) {
    if (corpus.empty()) throw std::invalid_argument("adjudicate: empty corpus");
    for (const auto& passage : corpus) {
        if (passage.annotations.empty()) {
            throw std::invalid_argument("adjudicate: passage \"" + passage.id + "\" has no annotations");
        }
    }
}

}  // namespace

AdjudicationResult adjudicate_classification(const std::vector<AnnotatedPassage>& corpus) {
    check_adjudication_input(corpus);
    AdjudicationResult result;
    for (const auto& passage : corpus) {
        const size_t n = passage.annotations.size();
        std::map<DistortionLabel, size_t> votes;
        for (const auto& ann : passage.annotations) {
            for (const auto label : ann.labels) ++votes[label];
        }
        // Strict majority: more than half of this passage's annotators, and
        // no second label may clear the same bar.
        DistortionLabel winner{};
        size_t above = 0;
        for (const auto& [label, count] : votes) {
            if (2 * count > n) {
                ++above;
                winner = label;
            }
        }
        if (above == 1) {
            result.passages.push_back({passage.id, passage.text,
                                       std::string(to_string(winner)), Task::Classification});
            ++result.kept;
        } else {
            ++result.discarded;
        }
    }
    return result;
}

AdjudicationResult adjudicate_detection(const std::vector<AnnotatedPassage>& corpus) {
    check_adjudication_input(corpus);
    AdjudicationResult result;
    for (const auto& passage : corpus) {
        const size_t n = passage.annotations.size();
        size_t selected_any = 0;
        for (const auto& ann : passage.annotations) {
            if (!ann.labels.empty()) ++selected_any;
        }
        const size_t selected_none = n - selected_any;
        if (2 * selected_any > n) {
            result.passages.push_back({passage.id, passage.text,
                                       std::string(kDistortedName), Task::Detection});
            ++result.kept;
        } else if (2 * selected_none > n) {
            result.passages.push_back({passage.id, passage.text,
                                       std::string(kNotDistortedName), Task::Detection});
            ++result.kept;
        } else {
            ++result.discarded;
        }
    }
    return result;
}

FoldAssignment stratified_kfold(const std::vector<LabeledPassage>& corpus, int k, uint64_t seed) {
    if (corpus.empty()) throw std::invalid_argument("stratified_kfold: empty corpus");
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
    if (static_cast<size_t>(k) > corpus.size()) {
        throw std::invalid_argument("stratified_kfold: k exceeds corpus size");
    }

    std::map<std::string, std::vector<std::string>, decltype(&label_order_less)> by_label(
        &label_order_less);
    for (const auto& passage : corpus) by_label[passage.label].push_back(passage.id);

    FoldAssignment folds;
    folds.k = k;
    Rng rng(seed);
    for (auto& [label, ids] : by_label) {
        std::sort(ids.begin(), ids.end());
        if (ids.size() >= static_cast<size_t>(k)) {
            // Deal round-robin from a random offset so remainders do not pile
            // onto fold 0; per-fold counts for this label differ by at most 1.
            rng.shuffle(ids);
            const size_t offset = rng.below(static_cast<uint64_t>(k));
            for (size_t i = 0; i < ids.size(); ++i) {
                folds.assignment[ids[i]] = static_cast<int>((i + offset) % k);
            }
        } else {
            for (const auto& id : ids) {
                folds.assignment[id] = static_cast<int>(rng.below(static_cast<uint64_t>(k)));
            }
        }
    }
    return folds;
}

namespace {

Task infer_task(const std::vector<LabeledPassage>& corpus, const std::string& path) {
    bool any_detection = false;
    bool any_classification = false;
    for (const auto& passage : corpus) {
        if (passage.label == kDistortedName || passage.label == kNotDistortedName) {
            any_detection = true;
        } else {
            any_classification = true;
        }
    }
    if (any_detection && any_classification) {
        throw std::runtime_error("load_labeled: " + path + " mixes detection and classification labels");
    }
    return any_detection ? Task::Detection : Task::Classification;
}

}  // namespace

std::vector<LabeledPassage> parse_labeled(std::istream& in) {
    std::vector<LabeledPassage> corpus;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json rec;
        try {
            rec = ordered_json::parse(line);
        } catch (const ordered_json::parse_error& e) {
            fail_line(lineno, std::string("malformed record: ") + e.what());
        }
        if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
            !rec.contains("text") || !rec["text"].is_string() ||
            !rec.contains("label") || !rec["label"].is_string()) {
            fail_line(lineno, "malformed record: expected object with id, text, label");
        }
        LabeledPassage passage;
        passage.id = rec["id"].get<std::string>();
        passage.text = rec["text"].get<std::string>();
        passage.label = rec["label"].get<std::string>();
        if (passage.id.empty()) fail_line(lineno, "empty id");
        if (!seen_ids.insert(passage.id).second) {
            fail_line(lineno, "duplicate id \"" + passage.id + "\"");
        }
        if (passage.label != kDistortedName) {
            const auto parsed = parse_label(passage.label);
            if (!parsed) fail_line(lineno, "unknown label \"" + passage.label + "\"");
        }
        corpus.push_back(std::move(passage));
    }
    const Task task = infer_task(corpus, "<stream>");
    for (auto& passage : corpus) passage.task = task;
    return corpus;
}

std::vector<LabeledPassage> load_labeled(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_labeled: cannot open " + path);
    return parse_labeled(in);
}

void save_labeled(const std::vector<LabeledPassage>& corpus, std::ostream& out) {
    for (const auto& passage : corpus) {
        ordered_json rec;
        rec["id"] = passage.id;
        rec["text"] = passage.text;
        rec["label"] = passage.label;
        out << rec.dump() << '\n';
    }
}

void save_labeled_file(const std::vector<LabeledPassage>& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    save_labeled(corpus, out);
}

}  // namespace cogdist
