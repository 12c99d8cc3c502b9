#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfqa/fields.hpp"

// Averaged perceptron training of the per-field weights. Weights start at 1,
// a mistaken prediction moves each weight by alpha * sign(r_oracle - r_pred)
// for its field, the running vector is accumulated after every question, and
// the result is the accumulated vector divided by (iterations * questions).

namespace mfqa {

inline int sign(double x) { return x < 0.0 ? -1 : (x > 0.0 ? 1 : 0); }

struct TrainConfig {
    int max_iters = 40;    // M
    double alpha = 0.002;  // learning rate
};

// One question with its exact per-candidate, per-field relevance scores.
// Scores are computed over the full candidate set: the oracle comparison
// needs r even for documents retrieval would not have returned.
struct TrainQuestion {
    int qid = 0;
    std::vector<DocId> candidates;       // recency order (tie-break order)
    DocId oracle = 0;
    std::vector<std::vector<double>> r;  // candidates x fields
};

struct TrainReport {
    std::vector<double> averaged;             // final averaged weights
    std::vector<double> iteration_accuracy;   // training accuracy per iteration
    std::vector<long> updates_per_field;      // non-zero deltas applied
};

inline TrainReport train(const std::vector<TrainQuestion>& questions, std::size_t n_fields,
                         const TrainConfig& cfg = {}) {
    if (questions.empty()) throw std::runtime_error("training requires at least one question");
    if (cfg.max_iters < 1) throw std::runtime_error("max_iters must be >= 1");
    if (!(cfg.alpha > 0.0)) throw std::runtime_error("alpha must be positive");
    for (const TrainQuestion& q : questions) {
        bool found = false;
        std::size_t oracle_pos = 0;
        for (std::size_t i = 0; i < q.candidates.size(); ++i)
            if (q.candidates[i] == q.oracle) {
                found = true;
                oracle_pos = i;
                break;
            }
        if (!found)
            throw std::runtime_error("question " + std::to_string(q.qid) +
                                     ": oracle document is not among its candidates");
        if (q.r.size() != q.candidates.size() || q.r[oracle_pos].size() != n_fields)
            throw std::runtime_error("question " + std::to_string(q.qid) + ": bad score matrix shape");
    }

    std::vector<double> lambda(n_fields, 1.0);
    std::vector<double> accumulated(n_fields, 0.0);
    TrainReport report;
    report.updates_per_field.assign(n_fields, 0);

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        std::size_t correct = 0;
        for (const TrainQuestion& q : questions) {
            // argmax f with the current weights; ties go to the more recent
            // candidate, matching the ranker
            std::size_t best = 0;
            double best_f = 0.0;
            std::size_t oracle_pos = 0;
            for (std::size_t c = 0; c < q.candidates.size(); ++c) {
                double f = 0.0;
                for (std::size_t i = 0; i < n_fields; ++i) f += lambda[i] * q.r[c][i];
                if (c == 0 || f > best_f) {
                    best = c;
                    best_f = f;
                }
                if (q.candidates[c] == q.oracle) oracle_pos = c;
            }
            if (q.candidates[best] == q.oracle) {
                ++correct;
            } else {
                for (std::size_t i = 0; i < n_fields; ++i) {
                    double delta = cfg.alpha * sign(q.r[oracle_pos][i] - q.r[best][i]);
                    if (delta != 0.0) {
                        lambda[i] += delta;
                        ++report.updates_per_field[i];
                    }
                }
            }
            for (std::size_t i = 0; i < n_fields; ++i) accumulated[i] += lambda[i];
        }
        report.iteration_accuracy.push_back(static_cast<double>(correct) /
                                            static_cast<double>(questions.size()));
    }

    double steps = static_cast<double>(cfg.max_iters) * static_cast<double>(questions.size());
    report.averaged.resize(n_fields);
    for (std::size_t i = 0; i < n_fields; ++i) report.averaged[i] = accumulated[i] / steps;
    return report;
}

// Model file: a header carrying the schema hash and hyper-parameters, then
// one `field<TAB>weight` line per field with 17 significant digits.
inline void save_model(const FieldSchema& schema, const std::vector<double>& weights,
                       const TrainConfig& cfg, std::ostream& out) {
    if (weights.size() != schema.size())
        throw std::runtime_error("weight vector length does not match the schema");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", cfg.alpha);
    out << "mfqa-model 1 schema=" << schema_hash_hex(schema) << " M=" << cfg.max_iters
        << " alpha=" << buf << '\n';
    for (std::size_t i = 0; i < weights.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", weights[i]);
        out << schema.fields[i].name << '\t' << buf << '\n';
    }
}

struct LoadedModel {
    std::string schema_hash;
    std::vector<std::string> field_names;
    std::vector<double> weights;
    TrainConfig config;
};

inline LoadedModel load_model(std::istream& in) {
    LoadedModel model;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty model file");
    std::istringstream header(line);
    std::string magic, version;
    header >> magic >> version;
    if (magic != "mfqa-model" || version != "1")
        throw std::runtime_error("not an mfqa model file (bad header)");
    std::string kv;
    while (header >> kv) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos) continue;
        std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "schema") model.schema_hash = value;
        else if (key == "M") model.config.max_iters = std::stoi(value);
        else if (key == "alpha") model.config.alpha = std::stod(value);
    }
    if (model.schema_hash.empty()) throw std::runtime_error("model header lacks a schema hash");
    std::size_t file_line = 1;
    while (std::getline(in, line)) {
        ++file_line;
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) detail::parse_fail(file_line, "expected 'field<TAB>weight'");
        model.field_names.push_back(line.substr(0, tab));
        try {
            model.weights.push_back(std::stod(line.substr(tab + 1)));
        } catch (const std::exception&) {
            detail::parse_fail(file_line, "bad weight value");
        }
    }
    if (model.weights.empty()) throw std::runtime_error("model file defines no weights");
    return model;
}

// Loading verifies the hash: a model only applies to the schema it was
// trained with.
inline std::vector<double> model_weights_for(const LoadedModel& model, const FieldSchema& schema) {
    if (model.schema_hash != schema_hash_hex(schema))
        throw std::runtime_error("model schema hash " + model.schema_hash +
                                 " does not match schema " + schema_hash_hex(schema));
    if (model.field_names != schema.names())
        throw std::runtime_error("model field names do not match the schema");
    return model.weights;
}

}  // namespace mfqa
