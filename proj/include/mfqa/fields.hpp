#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfqa/annotate.hpp"
#include "mfqa/corpus.hpp"

// Decomposes annotated sentences into named term fields and turns question
// fields into literal/wildcard queries. Terms render as single lowercase
// tokens: role suffixes with `_`, frame infixes with `:`, arcs with `>`,
// bigrams with `+`.

namespace mfqa {

enum class FieldCategory { Lexical, Syntactic, Semantic };

inline const char* to_string(FieldCategory c) {
    switch (c) {
        case FieldCategory::Lexical: return "lexical";
        case FieldCategory::Syntactic: return "syntactic";
        case FieldCategory::Semantic: return "semantic";
    }
    return "lexical";
}

inline FieldCategory field_category_from_string(const std::string& s) {
    if (s == "lexical") return FieldCategory::Lexical;
    if (s == "syntactic") return FieldCategory::Syntactic;
    if (s == "semantic") return FieldCategory::Semantic;
    throw std::runtime_error("unknown field category '" + s + "'");
}

enum class Extractor {
    Word,
    Lemma,
    WordBigram,
    LemmaBigram,
    PosTag,
    DepRel,
    DepPair,
    RootLemma,
    Pred,
    Arg,
    PredArg,
    PredDist,
};

inline const char* to_string(Extractor e) {
    switch (e) {
        case Extractor::Word: return "word";
        case Extractor::Lemma: return "lemma";
        case Extractor::WordBigram: return "word_bigram";
        case Extractor::LemmaBigram: return "lemma_bigram";
        case Extractor::PosTag: return "pos";
        case Extractor::DepRel: return "dep";
        case Extractor::DepPair: return "dep_pair";
        case Extractor::RootLemma: return "root";
        case Extractor::Pred: return "pred";
        case Extractor::Arg: return "arg";
        case Extractor::PredArg: return "pred_arg";
        case Extractor::PredDist: return "pred_dist";
    }
    return "word";
}

inline Extractor extractor_from_string(const std::string& s) {
    static const std::vector<Extractor> all = {
        Extractor::Word,    Extractor::Lemma,   Extractor::WordBigram, Extractor::LemmaBigram,
        Extractor::PosTag,  Extractor::DepRel,  Extractor::DepPair,    Extractor::RootLemma,
        Extractor::Pred,    Extractor::Arg,     Extractor::PredArg,    Extractor::PredDist};
    for (Extractor e : all)
        if (s == to_string(e)) return e;
    throw std::runtime_error("unknown extractor '" + s + "'");
}

struct FieldDef {
    std::string name;
    FieldCategory category = FieldCategory::Lexical;
    Extractor extractor = Extractor::Word;

    bool operator==(const FieldDef&) const = default;
};

struct FieldSchema {
    std::vector<FieldDef> fields;

    std::size_t size() const { return fields.size(); }

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (fields[i].name == name) return static_cast<int>(i);
        return -1;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(fields.size());
        for (const FieldDef& f : fields) out.push_back(f.name);
        return out;
    }

    bool operator==(const FieldSchema&) const = default;
};

// FNV-1a over the canonical schema text; ties model and index files to the
// schema they were built with.
inline std::uint64_t schema_hash(const FieldSchema& schema) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    };
    for (const FieldDef& f : schema.fields) {
        mix(f.name);
        mix(to_string(f.category));
        mix(to_string(f.extractor));
    }
    return h;
}

inline std::string schema_hash_hex(const FieldSchema& schema) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(schema_hash(schema)));
    return buf;
}

// The 12-field default: four lexical, four syntactic, four semantic.
inline FieldSchema default_schema() {
    FieldSchema s;
    s.fields = {
        {"word", FieldCategory::Lexical, Extractor::Word},
        {"lemma", FieldCategory::Lexical, Extractor::Lemma},
        {"word_bigram", FieldCategory::Lexical, Extractor::WordBigram},
        {"lemma_bigram", FieldCategory::Lexical, Extractor::LemmaBigram},
        {"pos", FieldCategory::Syntactic, Extractor::PosTag},
        {"dep", FieldCategory::Syntactic, Extractor::DepRel},
        {"dep_pair", FieldCategory::Syntactic, Extractor::DepPair},
        {"root", FieldCategory::Syntactic, Extractor::RootLemma},
        {"pred", FieldCategory::Semantic, Extractor::Pred},
        {"arg", FieldCategory::Semantic, Extractor::Arg},
        {"pred_arg", FieldCategory::Semantic, Extractor::PredArg},
        {"pred_dist", FieldCategory::Semantic, Extractor::PredDist},
    };
    return s;
}

inline FieldSchema filter_schema(const FieldSchema& schema, const std::vector<FieldCategory>& keep) {
    FieldSchema out;
    for (const FieldDef& f : schema.fields)
        for (FieldCategory c : keep)
            if (f.category == c) {
                out.fields.push_back(f);
                break;
            }
    if (out.fields.empty()) throw std::runtime_error("schema filter left no fields");
    return out;
}

// Plain-text schema config: one `name category extractor` line per field.
inline void save_schema(const FieldSchema& schema, std::ostream& out) {
    out << "# field schema: name category extractor\n";
    for (const FieldDef& f : schema.fields)
        out << f.name << ' ' << to_string(f.category) << ' ' << to_string(f.extractor) << '\n';
}

inline FieldSchema load_schema(std::istream& in) {
    FieldSchema schema;
    std::string line;
    std::size_t file_line = 0;
    while (std::getline(in, line)) {
        ++file_line;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string name, category, extractor;
        if (!(ls >> name >> category >> extractor))
            detail::parse_fail(file_line, "expected 'name category extractor'");
        for (const FieldDef& f : schema.fields)
            if (f.name == name) detail::parse_fail(file_line, "duplicate field name '" + name + "'");
        schema.fields.push_back({name, field_category_from_string(category), extractor_from_string(extractor)});
    }
    if (schema.fields.empty()) throw std::runtime_error("schema config defines no fields");
    return schema;
}

struct FieldedDoc {
    DocId doc_id = 0;
    std::vector<std::vector<std::string>> terms;  // schema order; multisets

    bool operator==(const FieldedDoc&) const = default;
};

struct QueryTerm {
    std::string text;
    bool is_pattern = false;  // exactly one `*` slot when true

    bool operator==(const QueryTerm&) const = default;
};

struct QueryBundle {
    int qid = 0;
    std::vector<std::vector<QueryTerm>> queries;  // schema order; deduplicated

    bool operator==(const QueryBundle&) const = default;
};

namespace fields_detail {

// A term is a sequence of pieces; pieces sourced from a token can be
// wildcarded when that token is a question word.
struct Piece {
    std::string text;
    int token = -1;
};
using Pieces = std::vector<Piece>;

inline std::string dist_bucket(int pred, int arg) {
    int d = pred > arg ? pred - arg : arg - pred;
    if (d <= 1) return "1";
    if (d == 2) return "2";
    return "3+";
}

inline std::vector<Pieces> extract_pieces(const AnnotatedSentence& s, Extractor ex) {
    std::vector<Pieces> out;
    const auto& toks = s.tokens;
    auto lemma_of = [&](int i) { return toks[static_cast<std::size_t>(i)].lemma; };
    // coreference substitutions feed the semantic fields only
    auto sem_lemma_of = [&](int i) {
        auto it = s.coref.find(i);
        return it != s.coref.end() ? it->second : lemma_of(i);
    };
    auto surface_of = [&](int i) { return detail::lower(toks[static_cast<std::size_t>(i)].form); };
    auto non_punct = [&]() {
        std::vector<int> ids;
        for (const Token& t : toks)
            if (t.pos != Pos::Punct) ids.push_back(t.index);
        return ids;
    };

    switch (ex) {
        case Extractor::Word:
            for (int i : non_punct()) out.push_back({{surface_of(i), i}});
            break;
        case Extractor::Lemma:
            for (int i : non_punct()) out.push_back({{lemma_of(i), i}});
            break;
        case Extractor::WordBigram: {
            auto ids = non_punct();
            for (std::size_t k = 1; k < ids.size(); ++k)
                out.push_back({{surface_of(ids[k - 1]), ids[k - 1]}, {"+", -1}, {surface_of(ids[k]), ids[k]}});
            break;
        }
        case Extractor::LemmaBigram: {
            auto ids = non_punct();
            for (std::size_t k = 1; k < ids.size(); ++k)
                out.push_back({{lemma_of(ids[k - 1]), ids[k - 1]}, {"+", -1}, {lemma_of(ids[k]), ids[k]}});
            break;
        }
        case Extractor::PosTag:
            for (int i : non_punct())
                out.push_back({{lemma_of(i), i},
                               {std::string("_") + detail::lower(to_string(toks[static_cast<std::size_t>(i)].pos)), -1}});
            break;
        case Extractor::DepRel:
            for (const DepArc& a : s.arcs) {
                if (toks[static_cast<std::size_t>(a.dependent)].pos == Pos::Punct) continue;
                out.push_back({{lemma_of(a.dependent), a.dependent},
                               {std::string("_") + to_string(a.label), -1}});
            }
            break;
        case Extractor::DepPair:
            for (const DepArc& a : s.arcs) {
                if (a.head < 0) continue;
                if (toks[static_cast<std::size_t>(a.dependent)].pos == Pos::Punct) continue;
                out.push_back({{lemma_of(a.head), a.head},
                               {std::string(">") + to_string(a.label) + ">", -1},
                               {lemma_of(a.dependent), a.dependent}});
            }
            break;
        case Extractor::RootLemma:
            for (const DepArc& a : s.arcs)
                if (a.label == DepLabel::Root && toks[static_cast<std::size_t>(a.dependent)].pos != Pos::Punct)
                    out.push_back({{lemma_of(a.dependent), a.dependent}});
            break;
        case Extractor::Pred:
            for (const PredArgFrame& f : s.frames) out.push_back({{lemma_of(f.predicate), f.predicate}});
            break;
        case Extractor::Arg:
            for (const PredArgFrame& f : s.frames)
                for (const RoleBinding& b : f.args)
                    out.push_back({{sem_lemma_of(b.arg), b.arg},
                                   {std::string("_") + detail::lower(to_string(b.role)), -1}});
            break;
        case Extractor::PredArg:
            for (const PredArgFrame& f : s.frames)
                for (const RoleBinding& b : f.args)
                    out.push_back({{lemma_of(f.predicate), f.predicate},
                                   {std::string(":") + to_string(b.role) + ":", -1},
                                   {sem_lemma_of(b.arg), b.arg}});
            break;
        case Extractor::PredDist:
            // distance between predicate and argument, bucketed {1,2,3+};
            // the bucket slot is sourced from the argument token
            for (const PredArgFrame& f : s.frames)
                for (const RoleBinding& b : f.args)
                    out.push_back({{lemma_of(f.predicate), f.predicate},
                                   {std::string(":") + to_string(b.role) + ":", -1},
                                   {dist_bucket(f.predicate, b.arg), b.arg}});
            break;
    }
    return out;
}

inline std::string render(const Pieces& pieces) {
    std::string s;
    for (const Piece& p : pieces) s += p.text;
    return s;
}

}  // namespace fields_detail

// Populates every schema field (possibly empty), in schema order.
inline FieldedDoc extract_fields(const AnnotatedSentence& s, const FieldSchema& schema, DocId doc_id = 0) {
    FieldedDoc doc;
    doc.doc_id = doc_id;
    doc.terms.reserve(schema.size());
    for (const FieldDef& f : schema.fields) {
        std::vector<std::string> terms;
        for (const auto& pieces : fields_detail::extract_pieces(s, f.extractor))
            terms.push_back(fields_detail::render(pieces));
        doc.terms.push_back(std::move(terms));
    }
    return doc;
}

// Runs the extractors, replaces question-word slots with `*`, drops bare
// match-all terms and patterns without a literal slot, and deduplicates.
inline QueryBundle build_query(const AnnotatedSentence& s, const FieldSchema& schema, int qid = 0) {
    QueryBundle qb;
    qb.qid = qid;
    qb.queries.reserve(schema.size());
    for (const FieldDef& f : schema.fields) {
        std::vector<QueryTerm> terms;
        for (const auto& pieces : fields_detail::extract_pieces(s, f.extractor)) {
            std::string text;
            int stars = 0;
            for (const auto& p : pieces) {
                bool wildcard = p.token >= 0 &&
                                s.tokens[static_cast<std::size_t>(p.token)].question_word;
                if (wildcard) {
                    // adjacent wildcard slots collapse into one star
                    if (!text.ends_with('*')) {
                        text += '*';
                        ++stars;
                    }
                } else {
                    text += p.text;
                }
            }
            if (stars == 0) {
                terms.push_back({text, false});
            } else if (stars == 1 && text != "*") {
                terms.push_back({text, true});
            }
            // bare `*` and multi-star patterns are dropped
        }
        std::vector<QueryTerm> dedup;
        for (QueryTerm& t : terms) {
            bool seen = false;
            for (const QueryTerm& d : dedup)
                if (d.text == t.text && d.is_pattern == t.is_pattern) {
                    seen = true;
                    break;
                }
            if (!seen) dedup.push_back(std::move(t));
        }
        qb.queries.push_back(std::move(dedup));
    }
    return qb;
}

// Line-delimited fielded-document records.
inline void save_fielded_docs(const std::vector<FieldedDoc>& docs, const FieldSchema& schema,
                              std::ostream& out) {
    for (const FieldedDoc& d : docs) {
        nlohmann::json j;
        j["doc_id"] = d.doc_id;
        nlohmann::json fields = nlohmann::json::object();
        for (std::size_t i = 0; i < schema.size(); ++i) fields[schema.fields[i].name] = d.terms[i];
        j["fields"] = fields;
        out << j.dump() << '\n';
    }
}

inline std::vector<FieldedDoc> load_fielded_docs(const FieldSchema& schema, std::istream& in) {
    std::vector<FieldedDoc> docs;
    std::string line;
    std::size_t file_line = 0;
    while (std::getline(in, line)) {
        ++file_line;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            detail::parse_fail(file_line, std::string("bad record: ") + e.what());
        }
        FieldedDoc d;
        d.doc_id = j.at("doc_id").get<DocId>();
        const auto& fields = j.at("fields");
        for (const FieldDef& f : schema.fields) {
            auto it = fields.find(f.name);
            if (it == fields.end()) detail::parse_fail(file_line, "missing field '" + f.name + "'");
            d.terms.push_back(it->get<std::vector<std::string>>());
        }
        docs.push_back(std::move(d));
    }
    return docs;
}

}  // namespace mfqa
