#include "cogdist/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <json.hpp>

namespace cogdist {

namespace {

using nlohmann::ordered_json;

void hash_bytes(uint64_t& state, std::string_view bytes) {
    for (const char c : bytes) {
        state ^= static_cast<unsigned char>(c);
        state *= 1099511628211ULL;
    }
    state ^= 0xff;
    state *= 1099511628211ULL;
}

[[noreturn]] void corrupt(const std::string& detail) {
    throw std::runtime_error("corrupt bundle: " + detail);
}

}  // namespace

std::string corpus_digest(const std::vector<LabeledPassage>& corpus) {
    uint64_t state = 1469598103934665603ULL;
    for (const auto& passage : corpus) {
        hash_bytes(state, passage.id);
        hash_bytes(state, passage.text);
        hash_bytes(state, passage.label);
        hash_bytes(state, to_string(passage.task));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state));
    return buf;
}

void save_model(const ModelBundle& bundle, const std::string& path) {
    const auto& pipeline = bundle.pipeline;
    const auto& vocab = *pipeline.model.vocab;

    ordered_json doc;
    doc["format_version"] = kBundleFormatVersion;
    doc["task"] = to_string(pipeline.task);
    doc["config"] = {
        {"n_min", pipeline.config.n_min},       {"n_max", pipeline.config.n_max},
        {"min_df", pipeline.config.min_df},     {"max_df", pipeline.config.max_df},
        {"C", pipeline.config.C},               {"tol", pipeline.config.tol},
        {"max_iter", pipeline.config.max_iter},
    };

    ordered_json terms = ordered_json::array();
    ordered_json dfs = ordered_json::array();
    ordered_json idfs = ordered_json::array();
    for (const auto& entry : vocab.entries) {
        terms.push_back(entry.term);
        dfs.push_back(entry.document_frequency);
        idfs.push_back(entry.idf);
    }
    doc["vocabulary"] = {
        {"n_train_docs", vocab.n_train_docs},
        {"terms", std::move(terms)},
        {"document_frequencies", std::move(dfs)},
        {"idf", std::move(idfs)},
    };

    ordered_json models = ordered_json::array();
    for (size_t c = 0; c < pipeline.model.classes.size(); ++c) {
        const auto& model = pipeline.model.models[c];
        models.push_back({
            {"class", pipeline.model.classes[c]},
            {"weights", model.weights},
            {"intercept", model.intercept},
            {"C", model.C},
            {"degenerate", model.degenerate},
        });
    }
    doc["models"] = std::move(models);
    doc["provenance"] = {
        {"corpus_digest", bundle.provenance.corpus_digest},
        {"seed", bundle.provenance.seed},
        {"timestamp", bundle.provenance.timestamp},
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << doc.dump(2) << "\n";
    if (!out.good()) throw std::runtime_error("failed writing model file: " + path);
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);

    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const std::exception& e) {
        corrupt(e.what());
    }

    try {
        if (!doc.contains("format_version")) corrupt("format_version missing");
        const int version = doc.at("format_version").get<int>();
        if (version != kBundleFormatVersion) {
            throw std::runtime_error("unsupported version " + std::to_string(version) +
                                     " in model file: " + path);
        }

        ModelBundle bundle;
        const std::string task = doc.at("task").get<std::string>();
        if (task == "classification") {
            bundle.pipeline.task = Task::Classification;
        } else if (task == "detection") {
            bundle.pipeline.task = Task::Detection;
        } else {
            corrupt("unknown task \"" + task + "\"");
        }

        const auto& config = doc.at("config");
        auto& dst = bundle.pipeline.config;
        dst.n_min = config.at("n_min").get<int>();
        dst.n_max = config.at("n_max").get<int>();
        dst.min_df = config.at("min_df").get<uint32_t>();
        dst.max_df = config.at("max_df").get<double>();
        dst.C = config.at("C").get<double>();
        dst.tol = config.at("tol").get<double>();
        dst.max_iter = config.at("max_iter").get<int>();

        const auto& voc = doc.at("vocabulary");
        const auto terms = voc.at("terms").get<std::vector<std::string>>();
        const auto dfs = voc.at("document_frequencies").get<std::vector<uint32_t>>();
        const auto idfs = voc.at("idf").get<std::vector<double>>();
        if (dfs.size() != terms.size() || idfs.size() != terms.size()) {
            throw std::runtime_error("model bundle length mismatch: " +
                                     std::to_string(terms.size()) + " terms vs " +
                                     std::to_string(dfs.size()) + " document frequencies and " +
                                     std::to_string(idfs.size()) + " idf values");
        }
        auto vocab = std::make_shared<Vocabulary>();
        vocab->n_min = dst.n_min;
        vocab->n_max = dst.n_max;
        vocab->min_df = dst.min_df;
        vocab->max_df = dst.max_df;
        vocab->n_train_docs = voc.at("n_train_docs").get<uint32_t>();
        vocab->entries.reserve(terms.size());
        for (size_t i = 0; i < terms.size(); ++i) {
            vocab->entries.push_back({terms[i], dfs[i], idfs[i]});
        }
        bundle.pipeline.model.vocab = vocab;

        for (const auto& entry : doc.at("models")) {
            BinaryLogisticModel model;
            bundle.pipeline.model.classes.push_back(entry.at("class").get<std::string>());
            model.weights = entry.at("weights").get<std::vector<double>>();
            model.intercept = entry.at("intercept").get<double>();
            model.C = entry.at("C").get<double>();
            model.degenerate = entry.at("degenerate").get<bool>();
            if (model.weights.size() != terms.size()) {
                throw std::runtime_error(
                    "model bundle length mismatch: class " + bundle.pipeline.model.classes.back() +
                    " has " + std::to_string(model.weights.size()) + " weights for " +
                    std::to_string(terms.size()) + " vocabulary terms");
            }
            bundle.pipeline.model.models.push_back(std::move(model));
        }
        if (bundle.pipeline.model.classes.empty()) corrupt("no per-class models");

        const auto& prov = doc.at("provenance");
        bundle.provenance.corpus_digest = prov.at("corpus_digest").get<std::string>();
        bundle.provenance.seed = prov.at("seed").get<uint64_t>();
        bundle.provenance.timestamp = prov.at("timestamp").get<std::string>();
        return bundle;
    } catch (const ordered_json::exception& e) {
        corrupt(e.what());
    }
}

}  // namespace cogdist
