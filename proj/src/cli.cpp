#include "cogdist/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "cogdist/corpus.hpp"
#include "cogdist/evaluation.hpp"
#include "cogdist/exploration.hpp"
#include "cogdist/labels.hpp"
#include "cogdist/model_io.hpp"
#include "cogdist/pipeline.hpp"
#include "cogdist/synthcorpus.hpp"

namespace cogdist {

namespace {

using nlohmann::ordered_json;

/// Caller mistakes: unknown values, missing files, malformed configs.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const std::string& what) {
    if (!std::filesystem::is_regular_file(path)) {
        throw UsageError("missing " + what + " file: " + path);
    }
}

std::string now_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string digest_hex(std::string_view bytes) {
    uint64_t state = 1469598103934665603ULL;
    for (const char c : bytes) {
        state ^= static_cast<unsigned char>(c);
        state *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state));
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out.good()) throw std::runtime_error("failed writing file: " + path);
}

ordered_json parse_config_file(const std::string& path) {
    require_file(path, "config");
    try {
        return ordered_json::parse(slurp(path));
    } catch (const std::exception& e) {
        throw UsageError("invalid config file " + path + ": " + e.what());
    }
}

ordered_json input_entry(const std::string& path) {
    return {{"path", path}, {"digest", digest_hex(slurp(path))}};
}

/// Writes <out>.manifest.json describing the run. Everything but the
/// timestamp is reproducible from the inputs.
void write_manifest(const std::string& out, const std::string& command,
                    ordered_json inputs, const std::vector<std::string>& outputs,
                    ordered_json config, ordered_json extra = ordered_json::object()) {
    ordered_json manifest;
    manifest["command"] = command;
    manifest["inputs"] = std::move(inputs);
    manifest["outputs"] = outputs;
    manifest["config"] = config;
    manifest["config_digest"] = digest_hex(config.dump());
    for (auto& [key, value] : extra.items()) manifest[key] = value;
    manifest["timestamp"] = now_utc();
    write_text(out + ".manifest.json", manifest.dump(2) + "\n");
}

ordered_json config_json(const PipelineConfig& config) {
    return {
        {"n_min", config.n_min},       {"n_max", config.n_max},
        {"min_df", config.min_df},     {"max_df", config.max_df},
        {"C", config.C},               {"tol", config.tol},
        {"max_iter", config.max_iter},
    };
}

ordered_json metrics_json(const AggregateMetrics& metrics) {
    return {{"precision", metrics.precision},
            {"recall", metrics.recall},
            {"f1", metrics.f1}};
}

ordered_json report_json(const EvaluationReport& report) {
    ordered_json per_class = ordered_json::array();
    for (const auto& m : report.per_class) {
        per_class.push_back({{"label", m.cls},
                             {"n", m.support},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1}});
    }
    return {{"total", report.total},
            {"accuracy", report.accuracy},
            {"per_class", std::move(per_class)},
            {"macro", metrics_json(report.macro)},
            {"weighted", metrics_json(report.weighted)}};
}

ordered_json point_json(const HyperparamPoint& point) {
    return {{"C", point.C},
            {"n_min", point.ngram.n_min},
            {"n_max", point.ngram.n_max},
            {"min_df", point.min_df},
            {"max_df", point.max_df}};
}

Task parse_task_flag(const std::string& value) {
    if (value == "detect") return Task::Detection;
    if (value == "classify") return Task::Classification;
    throw UsageError("unknown task \"" + value + "\" (expected detect or classify)");
}

Task corpus_task(const std::vector<LabeledPassage>& corpus) {
    if (corpus.empty()) throw UsageError("corpus is empty");
    return corpus[0].task;
}

// ---- shared option blocks ---------------------------------------------

struct PipelineOptions {
    PipelineConfig config;
    std::string config_path;

    void attach(CLI::App* sub, bool with_classifier) {
        sub->add_option("--config", config_path, "JSON config file (flags win over it)");
        sub->add_option("--ngram-min", config.n_min, "smallest n-gram order");
        sub->add_option("--ngram-max", config.n_max, "largest n-gram order");
        sub->add_option("--min-df", config.min_df, "drop terms in fewer documents");
        sub->add_option("--max-df", config.max_df, "drop terms above this document share");
        if (with_classifier) {
            sub->add_option("--C", config.C, "loss weight (inverse regularization)");
            sub->add_option("--tol", config.tol, "gradient stopping tolerance");
            sub->add_option("--max-iter", config.max_iter, "optimizer iteration cap");
        }
    }

    /// flag > config file > default
    PipelineConfig resolve(const CLI::App* sub) const {
        PipelineConfig resolved = config;
        if (config_path.empty()) return resolved;
        const auto file = parse_config_file(config_path);
        for (const auto& [key, value] : file.items()) {
            try {
                if (key == "n_min" && !sub->count("--ngram-min")) {
                    resolved.n_min = value.get<int>();
                } else if (key == "n_max" && !sub->count("--ngram-max")) {
                    resolved.n_max = value.get<int>();
                } else if (key == "min_df" && !sub->count("--min-df")) {
                    resolved.min_df = value.get<uint32_t>();
                } else if (key == "max_df" && !sub->count("--max-df")) {
                    resolved.max_df = value.get<double>();
                } else if (key == "C" && !sub->count("--C")) {
                    resolved.C = value.get<double>();
                } else if (key == "tol" && !sub->count("--tol")) {
                    resolved.tol = value.get<double>();
                } else if (key == "max_iter" && !sub->count("--max-iter")) {
                    resolved.max_iter = value.get<int>();
                } else if (key != "n_min" && key != "n_max" && key != "min_df" &&
                           key != "max_df" && key != "C" && key != "tol" &&
                           key != "max_iter") {
                    throw UsageError("invalid config file " + config_path +
                                     ": unknown key \"" + key + "\"");
                }
            } catch (const ordered_json::exception& e) {
                throw UsageError("invalid config file " + config_path + ": " + e.what());
            }
        }
        return resolved;
    }
};

HyperparamGrid load_grid(const std::string& path) {
    const auto file = parse_config_file(path);
    HyperparamGrid grid = default_grid();
    try {
        for (const auto& [key, value] : file.items()) {
            if (key == "C") {
                grid.C = value.get<std::vector<double>>();
            } else if (key == "ngram_ranges") {
                grid.ngram_ranges.clear();
                for (const auto& range : value) {
                    if (!range.is_array() || range.size() != 2) {
                        throw UsageError("invalid config file " + path +
                                         ": ngram_ranges entries must be [min, max]");
                    }
                    grid.ngram_ranges.push_back({range[0].get<int>(), range[1].get<int>()});
                }
            } else if (key == "min_df") {
                grid.min_df = value.get<std::vector<uint32_t>>();
            } else if (key == "max_df") {
                grid.max_df = value.get<std::vector<double>>();
            } else {
                throw UsageError("invalid config file " + path + ": unknown key \"" + key +
                                 "\"");
            }
        }
    } catch (const ordered_json::exception& e) {
        throw UsageError("invalid config file " + path + ": " + e.what());
    }
    return grid;
}

ordered_json grid_json(const HyperparamGrid& grid) {
    ordered_json ranges = ordered_json::array();
    for (const auto& range : grid.ngram_ranges) {
        ranges.push_back(ordered_json::array({range.n_min, range.n_max}));
    }
    return {{"C", grid.C},
            {"ngram_ranges", std::move(ranges)},
            {"min_df", grid.min_df},
            {"max_df", grid.max_df}};
}

// ---- subcommands -------------------------------------------------------

struct IngestArgs {
    std::string in, out, format = "jsonl";
};

void run_ingest(const IngestArgs& args) {
    require_file(args.in, "input");
    CorpusFormat format = CorpusFormat::Jsonl;
    if (args.format == "csv") {
        format = CorpusFormat::Csv;
    } else if (args.format != "jsonl") {
        throw UsageError("unknown format \"" + args.format + "\" (expected jsonl or csv)");
    }
    const auto corpus = load_corpus(args.in, format);
    save_annotated_file(corpus, args.out);
    write_manifest(args.out, "ingest", {{"corpus", input_entry(args.in)}}, {args.out},
                   {{"format", args.format}}, {{"passages", corpus.size()}});
    std::cout << "wrote " << args.out << " (" << corpus.size() << " passages)\n";
}

struct AdjudicateArgs {
    std::string in, out, task;
};

void run_adjudicate(const AdjudicateArgs& args) {
    require_file(args.in, "input");
    const Task task = parse_task_flag(args.task);
    const auto corpus = load_corpus(args.in, CorpusFormat::Jsonl);
    const auto result = task == Task::Detection ? adjudicate_detection(corpus)
                                                : adjudicate_classification(corpus);
    save_labeled_file(result.passages, args.out);
    write_manifest(args.out, "adjudicate", {{"corpus", input_entry(args.in)}}, {args.out},
                   {{"task", args.task}},
                   {{"kept", result.kept}, {"discarded", result.discarded}});
    std::cout << "wrote " << args.out << " (kept " << result.kept << ", discarded "
              << result.discarded << ")\n";
}

struct SplitArgs {
    std::string in, out;
    int k = 5;
    uint64_t seed = 0;
};

void run_split(const SplitArgs& args) {
    require_file(args.in, "input");
    const auto corpus = load_labeled(args.in);
    const auto folds = stratified_kfold(corpus, args.k, args.seed);
    ordered_json assignment = ordered_json::object();
    for (const auto& [id, fold] : folds.assignment) assignment[id] = fold;
    const ordered_json doc = {{"k", folds.k}, {"seed", args.seed},
                              {"assignment", std::move(assignment)}};
    write_text(args.out, doc.dump(2) + "\n");
    write_manifest(args.out, "split", {{"corpus", input_entry(args.in)}}, {args.out},
                   {{"k", args.k}}, {{"seed", args.seed}});
    std::cout << "wrote " << args.out << " (" << corpus.size() << " passages, " << args.k
              << " folds)\n";
}

struct TrainArgs {
    std::string in, out;
    PipelineOptions pipeline;
    uint64_t seed = 0;
};

void run_train(const TrainArgs& args, const CLI::App* sub) {
    require_file(args.in, "input");
    const auto corpus = load_labeled(args.in);
    const auto config = args.pipeline.resolve(sub);

    ModelBundle bundle;
    bundle.pipeline = train_pipeline(corpus, config);
    bundle.provenance.corpus_digest = corpus_digest(corpus);
    bundle.provenance.seed = args.seed;
    bundle.provenance.timestamp = now_utc();
    save_model(bundle, args.out);

    write_manifest(args.out, "train", {{"corpus", input_entry(args.in)}}, {args.out},
                   config_json(config),
                   {{"seed", args.seed},
                    {"task", to_string(bundle.pipeline.task)},
                    {"corpus_digest", bundle.provenance.corpus_digest},
                    {"vocabulary_size", bundle.pipeline.model.vocab->entries.size()}});
    std::cout << "wrote " << args.out << " ("
              << bundle.pipeline.model.vocab->entries.size() << " terms)\n";
}

struct EvalArgs {
    std::string in, out, grid_path, model_path;
    bool nested = false;
    int outer = 5;
    int inner = 3;
    uint64_t seed = 0;
    FitSettings settings;
};

void run_eval(const EvalArgs& args) {
    require_file(args.in, "input");
    const auto corpus = load_labeled(args.in);

    ordered_json doc;
    EvaluationReport pooled;
    ordered_json inputs = {{"corpus", input_entry(args.in)}};
    ordered_json config;

    if (args.nested) {
        const auto grid = args.grid_path.empty() ? default_grid() : load_grid(args.grid_path);
        if (!args.grid_path.empty()) inputs["grid"] = input_entry(args.grid_path);
        const auto report =
            nested_cv(corpus, grid, args.outer, args.inner, args.seed, args.settings);
        pooled = report.pooled;

        doc["protocol"] = "nested_cv";
        doc["outer_k"] = report.outer_k;
        doc["inner_k"] = report.inner_k;
        doc["seed"] = report.seed;
        ordered_json folds = ordered_json::array();
        for (const auto& outcome : report.fold_outcomes) {
            folds.push_back({{"fold", outcome.fold},
                             {"chosen", point_json(outcome.chosen)},
                             {"held_out", outcome.report.total},
                             {"accuracy", outcome.report.accuracy},
                             {"weighted_f1", outcome.report.weighted.f1}});
        }
        doc["folds"] = std::move(folds);
        config = {{"grid", grid_json(grid)},
                  {"outer_k", args.outer},
                  {"inner_k", args.inner},
                  {"tol", args.settings.tol},
                  {"max_iter", args.settings.max_iter}};
    } else {
        if (args.model_path.empty()) {
            throw UsageError("eval needs --nested or a --model bundle to score");
        }
        require_file(args.model_path, "model");
        const auto bundle = load_model(args.model_path);
        inputs["model"] = input_entry(args.model_path);
        if (corpus_task(corpus) != bundle.pipeline.task) {
            throw UsageError("corpus task does not match the model's task");
        }
        std::vector<std::string> y_true, y_pred;
        y_true.reserve(corpus.size());
        y_pred.reserve(corpus.size());
        for (const auto& passage : corpus) {
            y_true.push_back(passage.label);
            y_pred.push_back(predict_label(bundle.pipeline, passage.text));
        }
        pooled = evaluate(y_true, y_pred);
        doc["protocol"] = "holdout";
        config = config_json(bundle.pipeline.config);
    }

    doc["pooled"] = report_json(pooled);
    const std::string json_path = args.out + ".json";
    const std::string csv_path = args.out + ".csv";
    write_text(json_path, doc.dump(2) + "\n");
    write_text(csv_path, report_csv(pooled));
    write_manifest(args.out, "eval", std::move(inputs), {json_path, csv_path}, config,
                   {{"seed", args.seed}});
    std::cout << "wrote " << json_path << " and " << csv_path << " (weighted F1 "
              << pooled.weighted.f1 << ")\n";
}

struct PredictArgs {
    std::string model_path, in, out, text;
};

ordered_json predict_json(const TrainedPipeline& pipeline, const std::string& text) {
    const auto vec = vectorize_text(pipeline, text);
    const size_t index = predict_index(pipeline.model, vec);
    const auto scores = normalized_scores(pipeline.model, vec);
    return {{"label", pipeline.model.classes[index]}, {"probability", scores[index]}};
}

void run_predict(const PredictArgs& args) {
    require_file(args.model_path, "model");
    if (args.text.empty() == args.in.empty()) {
        throw UsageError("predict needs exactly one of --text or --in");
    }
    const auto bundle = load_model(args.model_path);

    std::string body;
    if (!args.text.empty()) {
        body = predict_json(bundle.pipeline, args.text).dump(2) + "\n";
    } else {
        require_file(args.in, "input");
        std::ifstream in(args.in);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            body += predict_json(bundle.pipeline, line).dump() + "\n";
        }
    }

    if (args.out.empty()) {
        std::cout << body;
        return;
    }
    write_text(args.out, body);
    ordered_json inputs = {{"model", input_entry(args.model_path)}};
    if (!args.in.empty()) inputs["corpus"] = input_entry(args.in);
    write_manifest(args.out, "predict", std::move(inputs), {args.out},
                   ordered_json::object());
    std::cout << "wrote " << args.out << "\n";
}

struct TermsArgs {
    std::string model_path, out;
    size_t k = 10;
};

void run_terms(const TermsArgs& args) {
    require_file(args.model_path, "model");
    if (args.k == 0) throw UsageError("--k must be at least 1");
    const auto bundle = load_model(args.model_path);
    const auto& classes = bundle.pipeline.model.classes;

    std::vector<std::vector<std::pair<std::string, double>>> columns;
    columns.reserve(classes.size());
    for (const auto& cls : classes) {
        columns.push_back(top_terms(bundle.pipeline.model, cls, args.k));
    }

    std::string csv;
    for (size_t c = 0; c < classes.size(); ++c) {
        if (c > 0) csv += ",";
        csv += classes[c];
    }
    csv += "\n";
    for (size_t rank = 0; rank < args.k; ++rank) {
        for (size_t c = 0; c < classes.size(); ++c) {
            if (c > 0) csv += ",";
            if (rank < columns[c].size()) csv += columns[c][rank].first;
        }
        csv += "\n";
    }

    ordered_json by_class = ordered_json::object();
    for (size_t c = 0; c < classes.size(); ++c) {
        ordered_json terms = ordered_json::array();
        for (const auto& [term, weight] : columns[c]) {
            terms.push_back({{"term", term}, {"weight", weight}});
        }
        by_class[classes[c]] = std::move(terms);
    }

    const std::string csv_path = args.out + ".csv";
    const std::string json_path = args.out + ".json";
    write_text(csv_path, csv);
    write_text(json_path, ordered_json{{"k", args.k}, {"classes", by_class}}.dump(2) + "\n");
    write_manifest(args.out, "terms", {{"model", input_entry(args.model_path)}},
                   {csv_path, json_path}, {{"k", args.k}});
    std::cout << "wrote " << csv_path << " and " << json_path << "\n";
}

struct ClusterArgs {
    std::string in, out;
    PipelineOptions pipeline;
};

Vocabulary corpus_vocabulary(const std::vector<LabeledPassage>& corpus,
                             const PipelineConfig& config) {
    const auto seqs =
        expand_ngrams(tokenize_corpus(corpus), config.n_min, config.n_max);
    return fit_vocabulary(seqs, config.min_df, config.max_df, config.n_min, config.n_max);
}

void run_cluster(const ClusterArgs& args, const CLI::App* sub) {
    require_file(args.in, "input");
    const auto corpus = load_labeled(args.in);
    const auto config = args.pipeline.resolve(sub);
    const auto vocab = corpus_vocabulary(corpus, config);
    const auto profiles = class_profiles_tfidf(corpus, vocab);
    const auto dendro = ward_cluster(profiles);

    ordered_json merges = ordered_json::array();
    for (const auto& merge : dendro.merges) {
        merges.push_back({{"left", merge.left},
                          {"right", merge.right},
                          {"height", merge.height},
                          {"size", merge.size}});
    }
    const ordered_json doc = {{"leaves", dendro.leaves},
                              {"merges", std::move(merges)},
                              {"inversions", dendro.inversions}};
    const std::string json_path = args.out + ".json";
    const std::string newick_path = args.out + ".newick";
    write_text(json_path, doc.dump(2) + "\n");
    write_text(newick_path, newick(dendro) + "\n");
    write_manifest(args.out, "cluster", {{"corpus", input_entry(args.in)}},
                   {json_path, newick_path}, config_json(config),
                   {{"classes", dendro.leaves.size()}});
    std::cout << "wrote " << json_path << " and " << newick_path << " ("
              << dendro.leaves.size() << " classes)\n";
}

struct TopicsArgs {
    std::string in, out;
    size_t k = 25;
    size_t sweeps = 1000;
    uint64_t seed = 0;
};

void run_topics(const TopicsArgs& args) {
    require_file(args.in, "input");
    const auto corpus = load_labeled(args.in);
    const auto lda = build_lda_corpus(corpus);
    const auto model = lda_fit(lda, args.k, 0.1, 0.01, args.sweeps, args.seed);
    const auto tops = top_topic_terms(model, 20);

    ordered_json topics = ordered_json::array();
    std::string csv = "topic,rank,term,probability\n";
    char buf[32];
    for (size_t k = 0; k < tops.size(); ++k) {
        ordered_json terms = ordered_json::array();
        for (size_t rank = 0; rank < tops[k].size(); ++rank) {
            const auto& [term, probability] = tops[k][rank];
            terms.push_back({{"term", term}, {"probability", probability}});
            std::snprintf(buf, sizeof(buf), "%.6f", probability);
            csv += std::to_string(k) + "," + std::to_string(rank + 1) + "," + term + "," +
                   buf + "\n";
        }
        topics.push_back({{"topic", k}, {"terms", std::move(terms)}});
    }

    const ordered_json doc = {{"k", model.K},
                              {"sweeps", model.sweeps},
                              {"seed", model.seed},
                              {"alpha", model.alpha},
                              {"beta", model.beta},
                              {"documents", lda.docs.size()},
                              {"dropped_passages", corpus.size() - lda.docs.size()},
                              {"vocabulary_size", model.terms.size()},
                              {"topics", std::move(topics)}};
    const std::string json_path = args.out + ".json";
    const std::string csv_path = args.out + ".csv";
    write_text(json_path, doc.dump(2) + "\n");
    write_text(csv_path, csv);
    write_manifest(args.out, "topics", {{"corpus", input_entry(args.in)}},
                   {json_path, csv_path},
                   {{"k", args.k}, {"sweeps", args.sweeps}}, {{"seed", args.seed}});
    std::cout << "wrote " << json_path << " and " << csv_path << " (" << lda.docs.size()
              << " documents, " << model.terms.size() << " terms)\n";
}

struct SimArgs {
    std::string in, out, space;
    PipelineOptions pipeline;
    size_t k = 25;
    size_t sweeps = 1000;
    uint64_t seed = 0;
};

void run_sim(const SimArgs& args, const CLI::App* sub) {
    require_file(args.in, "input");
    const auto corpus = load_labeled(args.in);

    std::vector<ClassProfile> profiles;
    ordered_json config;
    if (args.space == "tfidf") {
        const auto pipeline_config = args.pipeline.resolve(sub);
        profiles = class_profiles_tfidf(corpus, corpus_vocabulary(corpus, pipeline_config));
        config = config_json(pipeline_config);
        config["space"] = "tfidf";
    } else if (args.space == "lda") {
        const auto lda = build_lda_corpus(corpus);
        const auto model = lda_fit(lda, args.k, 0.1, 0.01, args.sweeps, args.seed);
        profiles = class_profiles_lda(model, lda, corpus);
        config = {{"space", "lda"}, {"k", args.k}, {"sweeps", args.sweeps}};
    } else {
        throw UsageError("unknown space \"" + args.space + "\" (expected tfidf or lda)");
    }

    const auto matrix = similarity_matrix(profiles);
    ordered_json pairs = ordered_json::array();
    for (const auto& [a, b, similarity] : matrix.top_pairs) {
        pairs.push_back({{"a", matrix.classes[a]},
                         {"b", matrix.classes[b]},
                         {"similarity", similarity}});
    }
    const ordered_json doc = {{"classes", matrix.classes},
                              {"matrix", matrix.values},
                              {"top_pairs", std::move(pairs)}};
    const std::string csv_path = args.out + ".csv";
    const std::string json_path = args.out + ".json";
    write_text(csv_path, similarity_csv(matrix));
    write_text(json_path, doc.dump(2) + "\n");
    write_manifest(args.out, "sim", {{"corpus", input_entry(args.in)}},
                   {csv_path, json_path}, config, {{"seed", args.seed}});
    std::cout << "wrote " << csv_path << " and " << json_path << " ("
              << matrix.classes.size() << " classes)\n";
}

struct SynthArgs {
    SynthConfig config;
    std::string out, config_path;
    size_t n_classes = 0;
    size_t docs = 0;
};

void apply_synth_config_file(SynthConfig& config, const std::string& path,
                             const CLI::App* sub) {
    const auto file = parse_config_file(path);
    try {
        for (const auto& [key, value] : file.items()) {
            if (key == "classes") {
                if (!sub->count("--classes")) {
                    config.classes = value.get<std::vector<std::string>>();
                }
            } else if (key == "docs_per_class") {
                if (!sub->count("--docs-per-class")) {
                    if (value.is_array()) {
                        config.docs_per_class = value.get<std::vector<size_t>>();
                    } else {
                        config.docs_per_class = {value.get<size_t>()};
                    }
                }
            } else if (key == "signature_terms_per_class") {
                if (!sub->count("--signature-terms")) {
                    config.signature_terms_per_class = value.get<size_t>();
                }
            } else if (key == "signature_probability") {
                if (!sub->count("--signature-prob")) {
                    config.signature_probability = value.get<double>();
                }
            } else if (key == "background_vocab_size") {
                if (!sub->count("--background-vocab")) {
                    config.background_vocab_size = value.get<size_t>();
                }
            } else if (key == "min_length") {
                if (!sub->count("--min-length")) config.min_length = value.get<size_t>();
            } else if (key == "max_length") {
                if (!sub->count("--max-length")) config.max_length = value.get<size_t>();
            } else if (key == "not_distorted_fraction") {
                if (!sub->count("--nd-fraction")) {
                    config.not_distorted_fraction = value.get<double>();
                }
            } else if (key == "annotators") {
                if (!sub->count("--annotators")) config.annotators = value.get<size_t>();
            } else if (key == "annotator_noise") {
                if (!sub->count("--noise")) config.annotator_noise = value.get<double>();
            } else if (key == "seed") {
                if (!sub->count("--seed")) config.seed = value.get<uint64_t>();
            } else {
                throw UsageError("invalid config file " + path + ": unknown key \"" + key +
                                 "\"");
            }
        }
    } catch (const ordered_json::exception& e) {
        throw UsageError("invalid config file " + path + ": " + e.what());
    }
}

void run_synth(SynthArgs& args, const CLI::App* sub) {
    auto& config = args.config;
    if (sub->count("--classes")) {
        if (args.n_classes == 0 || args.n_classes > kDistortionCount) {
            throw UsageError("--classes must be between 1 and " +
                             std::to_string(kDistortionCount));
        }
        const auto& names = distortion_names();
        config.classes.assign(names.begin(),
                              names.begin() + static_cast<long>(args.n_classes));
    }
    if (sub->count("--docs-per-class")) config.docs_per_class = {args.docs};
    if (!args.config_path.empty()) apply_synth_config_file(config, args.config_path, sub);
    if (config.classes.empty()) config.classes = distortion_names();

    const auto corpus = generate_corpus(config);
    save_annotated_file(corpus, args.out);

    const ordered_json effective = {
        {"classes", config.classes},
        {"docs_per_class", config.docs_per_class},
        {"signature_terms_per_class", config.signature_terms_per_class},
        {"signature_probability", config.signature_probability},
        {"background_vocab_size", config.background_vocab_size},
        {"min_length", config.min_length},
        {"max_length", config.max_length},
        {"not_distorted_fraction", config.not_distorted_fraction},
        {"annotators", config.annotators},
        {"annotator_noise", config.annotator_noise},
    };
    ordered_json inputs = ordered_json::object();
    if (!args.config_path.empty()) inputs["config"] = input_entry(args.config_path);
    write_manifest(args.out, "synth", std::move(inputs), {args.out}, effective,
                   {{"seed", config.seed}, {"passages", corpus.size()}});
    std::cout << "wrote " << args.out << " (" << corpus.size() << " passages)\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"cognitive-distortion text classification toolkit"};
    app.require_subcommand(1);

    auto ingest = std::make_shared<IngestArgs>();
    auto* ingest_cmd = app.add_subcommand("ingest", "normalize an annotated corpus file");
    ingest_cmd->add_option("--in", ingest->in, "annotated corpus (jsonl or csv)")->required();
    ingest_cmd->add_option("--format", ingest->format, "jsonl or csv");
    ingest_cmd->add_option("--out", ingest->out, "normalized JSONL path")->required();
    ingest_cmd->callback([ingest]() { run_ingest(*ingest); });

    auto adjudicate = std::make_shared<AdjudicateArgs>();
    auto* adjudicate_cmd =
        app.add_subcommand("adjudicate", "collapse annotations to gold labels");
    adjudicate_cmd->add_option("--in", adjudicate->in, "annotated JSONL")->required();
    adjudicate_cmd->add_option("--task", adjudicate->task, "detect or classify")->required();
    adjudicate_cmd->add_option("--out", adjudicate->out, "labeled JSONL path")->required();
    adjudicate_cmd->callback([adjudicate]() { run_adjudicate(*adjudicate); });

    auto split = std::make_shared<SplitArgs>();
    auto* split_cmd = app.add_subcommand("split", "stratified fold assignment");
    split_cmd->add_option("--in", split->in, "labeled JSONL")->required();
    split_cmd->add_option("--k", split->k, "fold count");
    split_cmd->add_option("--seed", split->seed, "shuffle seed");
    split_cmd->add_option("--out", split->out, "fold JSON path")->required();
    split_cmd->callback([split]() { run_split(*split); });

    auto train = std::make_shared<TrainArgs>();
    auto* train_cmd = app.add_subcommand("train", "fit a model on a labeled corpus");
    train_cmd->add_option("--in", train->in, "labeled JSONL")->required();
    train_cmd->add_option("--out", train->out, "model bundle path")->required();
    train_cmd->add_option("--seed", train->seed, "recorded in provenance");
    train->pipeline.attach(train_cmd, true);
    train_cmd->callback([train, train_cmd]() { run_train(*train, train_cmd); });

    auto eval = std::make_shared<EvalArgs>();
    auto* eval_cmd = app.add_subcommand("eval", "evaluate on a labeled corpus");
    eval_cmd->add_option("--in", eval->in, "labeled JSONL")->required();
    eval_cmd->add_option("--out", eval->out, "report path prefix")->required();
    eval_cmd->add_flag("--nested", eval->nested, "nested cross-validation");
    eval_cmd->add_option("--outer", eval->outer, "outer fold count");
    eval_cmd->add_option("--inner", eval->inner, "inner fold count");
    eval_cmd->add_option("--grid", eval->grid_path, "hyperparameter grid JSON");
    eval_cmd->add_option("--model", eval->model_path, "bundle to score (without --nested)");
    eval_cmd->add_option("--seed", eval->seed, "fold shuffle seed");
    eval_cmd->add_option("--tol", eval->settings.tol, "gradient stopping tolerance");
    eval_cmd->add_option("--max-iter", eval->settings.max_iter, "optimizer iteration cap");
    eval_cmd->callback([eval]() { run_eval(*eval); });

    auto predict = std::make_shared<PredictArgs>();
    auto* predict_cmd = app.add_subcommand("predict", "label new passages");
    predict_cmd->add_option("--model", predict->model_path, "model bundle")->required();
    predict_cmd->add_option("--text", predict->text, "single passage text");
    predict_cmd->add_option("--in", predict->in, "file with one passage per line");
    predict_cmd->add_option("--out", predict->out, "output path (default stdout)");
    predict_cmd->callback([predict]() { run_predict(*predict); });

    auto terms = std::make_shared<TermsArgs>();
    auto* terms_cmd = app.add_subcommand("terms", "most discriminative terms per class");
    terms_cmd->add_option("--model", terms->model_path, "model bundle")->required();
    terms_cmd->add_option("--k", terms->k, "terms per class");
    terms_cmd->add_option("--out", terms->out, "report path prefix")->required();
    terms_cmd->callback([terms]() { run_terms(*terms); });

    auto cluster = std::make_shared<ClusterArgs>();
    auto* cluster_cmd = app.add_subcommand("cluster", "Ward clustering of class profiles");
    cluster_cmd->add_option("--in", cluster->in, "labeled JSONL")->required();
    cluster_cmd->add_option("--out", cluster->out, "output path prefix")->required();
    cluster->pipeline.attach(cluster_cmd, false);
    cluster_cmd->callback([cluster, cluster_cmd]() { run_cluster(*cluster, cluster_cmd); });

    auto topics = std::make_shared<TopicsArgs>();
    auto* topics_cmd = app.add_subcommand("topics", "topic model of the corpus");
    topics_cmd->add_option("--in", topics->in, "labeled JSONL")->required();
    topics_cmd->add_option("--k", topics->k, "topic count");
    topics_cmd->add_option("--sweeps", topics->sweeps, "sampler sweeps");
    topics_cmd->add_option("--seed", topics->seed, "sampler seed");
    topics_cmd->add_option("--out", topics->out, "report path prefix")->required();
    topics_cmd->callback([topics]() { run_topics(*topics); });

    auto sim = std::make_shared<SimArgs>();
    auto* sim_cmd = app.add_subcommand("sim", "pairwise class similarity matrix");
    sim_cmd->add_option("--in", sim->in, "labeled JSONL")->required();
    sim_cmd->add_option("--space", sim->space, "tfidf or lda")->required();
    sim_cmd->add_option("--k", sim->k, "topic count (lda space)");
    sim_cmd->add_option("--sweeps", sim->sweeps, "sampler sweeps (lda space)");
    sim_cmd->add_option("--seed", sim->seed, "sampler seed (lda space)");
    sim_cmd->add_option("--out", sim->out, "output path prefix")->required();
    sim->pipeline.attach(sim_cmd, false);
    sim_cmd->callback([sim, sim_cmd]() { run_sim(*sim, sim_cmd); });

    auto synth = std::make_shared<SynthArgs>();
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic annotated corpus");
    synth_cmd->add_option("--out", synth->out, "annotated JSONL path")->required();
    synth_cmd->add_option("--config", synth->config_path, "SynthConfig JSON file");
    synth_cmd->add_option("--classes", synth->n_classes, "use the first N distortion classes");
    synth_cmd->add_option("--docs-per-class", synth->docs, "passages per class");
    synth_cmd->add_option("--signature-terms", synth->config.signature_terms_per_class,
                          "signature terms per class");
    synth_cmd->add_option("--signature-prob", synth->config.signature_probability,
                          "per-token signature replacement probability");
    synth_cmd->add_option("--background-vocab", synth->config.background_vocab_size,
                          "background vocabulary size");
    synth_cmd->add_option("--min-length", synth->config.min_length, "shortest passage");
    synth_cmd->add_option("--max-length", synth->config.max_length, "longest passage");
    synth_cmd->add_option("--nd-fraction", synth->config.not_distorted_fraction,
                          "share of passages with no distortion");
    synth_cmd->add_option("--annotators", synth->config.annotators, "annotators per passage");
    synth_cmd->add_option("--noise", synth->config.annotator_noise,
                          "chance an annotator picks a wrong label");
    synth_cmd->add_option("--seed", synth->config.seed, "generator seed");
    synth_cmd->callback([synth, synth_cmd]() { run_synth(*synth, synth_cmd); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace cogdist
