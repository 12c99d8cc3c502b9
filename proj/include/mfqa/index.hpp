#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfqa/fields.hpp"

// In-process multi-field inverted index. A term's contribution to a field's
// relevance score is tf * idf * norm with
//   tf   = sqrt(term frequency in the document's field)
//   idf  = max(0, 1 + ln(N / (df + 1)))
//   norm = 1 / sqrt(field length)
// and a field's relevance is the sum over distinct matched vocabulary terms.

namespace mfqa {

struct Posting {
    DocId doc = 0;
    int freq = 0;
};

struct FieldScore {
    DocId doc = 0;
    double r = 0.0;
};

inline constexpr int kDefaultTopK = 20;
inline constexpr std::size_t kMaxPatternExpansions = 1024;

class MultiFieldIndex {
public:
    MultiFieldIndex() = default;

    MultiFieldIndex(const std::vector<FieldedDoc>& docs, const FieldSchema& schema) {
        field_names_ = schema.names();
        schema_hash_ = schema_hash_hex(schema);
        fields_.resize(field_names_.size());
        std::set<DocId> seen;
        for (const FieldedDoc& d : docs) {
            if (!seen.insert(d.doc_id).second)
                throw std::runtime_error("duplicate doc_id " + std::to_string(d.doc_id));
            if (d.terms.size() != fields_.size())
                throw std::runtime_error("fielded doc " + std::to_string(d.doc_id) +
                                         " does not match the schema");
            for (std::size_t f = 0; f < fields_.size(); ++f) {
                if (d.terms[f].empty()) continue;
                Field& field = fields_[f];
                field.length[d.doc_id] = static_cast<int>(d.terms[f].size());
                std::map<std::string, int> counts;
                for (const std::string& t : d.terms[f]) ++counts[t];
                for (const auto& [term, freq] : counts) field.postings[term].push_back({d.doc_id, freq});
            }
        }
        doc_count_ = static_cast<std::int64_t>(docs.size());
    }

    std::int64_t doc_count() const { return doc_count_; }
    const std::vector<std::string>& field_names() const { return field_names_; }
    const std::string& schema_hash() const { return schema_hash_; }

    int field_index(const std::string& name) const {
        for (std::size_t i = 0; i < field_names_.size(); ++i)
            if (field_names_[i] == name) return static_cast<int>(i);
        return -1;
    }

    std::size_t vocabulary_size(std::size_t field) const { return fields_.at(field).postings.size(); }

    int doc_frequency(std::size_t field, const std::string& term) const {
        const Field& f = fields_.at(field);
        auto it = f.postings.find(term);
        return it == f.postings.end() ? 0 : static_cast<int>(it->second.size());
    }

    int field_length(std::size_t field, DocId doc) const {
        const Field& f = fields_.at(field);
        auto it = f.length.find(doc);
        return it == f.length.end() ? 0 : it->second;
    }

    int term_frequency(std::size_t field, const std::string& term, DocId doc) const {
        const Field& f = fields_.at(field);
        auto it = f.postings.find(term);
        if (it == f.postings.end()) return 0;
        for (const Posting& p : it->second)
            if (p.doc == doc) return p.freq;
        return 0;
    }

    double score_term(std::size_t field, const std::string& term, DocId doc) const {
        const Field& f = fields_.at(field);
        auto it = f.postings.find(term);
        if (it == f.postings.end()) return 0.0;
        int freq = 0;
        for (const Posting& p : it->second)
            if (p.doc == doc) {
                freq = p.freq;
                break;
            }
        if (freq == 0) return 0.0;
        double tf = std::sqrt(static_cast<double>(freq));
        double idf = 1.0 + std::log(static_cast<double>(doc_count_) /
                                    (static_cast<double>(it->second.size()) + 1.0));
        if (idf < 0.0) idf = 0.0;
        auto len = f.length.find(doc);
        double norm = 1.0 / std::sqrt(static_cast<double>(len->second));
        return tf * idf * norm;
    }

    // Vocabulary terms matching a single-`*` pattern with a non-empty slot,
    // lexicographic order, capped at kMaxPatternExpansions.
    std::vector<std::string> expand_pattern(std::size_t field, const std::string& pattern,
                                            bool* truncated = nullptr) const {
        std::size_t star = pattern.find('*');
        if (star == std::string::npos || pattern.find('*', star + 1) != std::string::npos)
            throw std::runtime_error("pattern must contain exactly one '*': " + pattern);
        std::string prefix = pattern.substr(0, star);
        std::string suffix = pattern.substr(star + 1);
        const Field& f = fields_.at(field);
        std::vector<std::string> out;
        if (truncated) *truncated = false;
        auto it = prefix.empty() ? f.postings.begin() : f.postings.lower_bound(prefix);
        for (; it != f.postings.end(); ++it) {
            const std::string& term = it->first;
            if (!prefix.empty() && term.compare(0, prefix.size(), prefix) != 0) break;
            if (term.size() <= prefix.size() + suffix.size()) continue;  // slot must be non-empty
            if (!term.ends_with(suffix)) continue;
            if (out.size() >= kMaxPatternExpansions) {
                if (truncated) *truncated = true;
                break;
            }
            out.push_back(term);
        }
        return out;
    }

    // Distinct vocabulary terms matched by the query's literals and pattern
    // expansions; the summation domain of r(q_i, d_i).
    std::vector<std::string> matched_terms(std::size_t field, std::span<const QueryTerm> query) const {
        std::set<std::string> matched;
        for (const QueryTerm& qt : query) {
            if (qt.is_pattern) {
                for (std::string& t : expand_pattern(field, qt.text)) matched.insert(std::move(t));
            } else {
                matched.insert(qt.text);
            }
        }
        return {matched.begin(), matched.end()};
    }

    // r(q_i, d_i): sum of tf*idf*norm over the distinct matched terms.
    double relevance(std::size_t field, std::span<const QueryTerm> query, DocId doc) const {
        double r = 0.0;
        for (const std::string& t : matched_terms(field, query)) r += score_term(field, t, doc);
        return r;
    }

    // Candidates with r > 0, sorted by r descending with ties in candidate
    // order, truncated to k.
    std::vector<FieldScore> top_k(std::size_t field, std::span<const QueryTerm> query,
                                  std::span<const DocId> candidates, int k = kDefaultTopK) const {
        if (k < 1) throw std::runtime_error("top_k requires k >= 1");
        std::vector<std::string> terms = matched_terms(field, query);
        std::vector<FieldScore> scored;
        for (DocId d : candidates) {
            double r = 0.0;
            for (const std::string& t : terms) r += score_term(field, t, d);
            if (r > 0.0) scored.push_back({d, r});
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const FieldScore& a, const FieldScore& b) { return a.r > b.r; });
        if (scored.size() > static_cast<std::size_t>(k)) scored.resize(static_cast<std::size_t>(k));
        return scored;
    }

    // Versioned text segment; integers only, so round-trips are exact.
    void save(std::ostream& out) const {
        out << "mfqa-index 1\n";
        out << "schema " << schema_hash_ << '\n';
        out << "ndocs " << doc_count_ << '\n';
        for (std::size_t f = 0; f < fields_.size(); ++f) {
            out << "field " << field_names_[f] << '\n';
            for (const auto& [doc, len] : fields_[f].length) out << "len " << doc << ' ' << len << '\n';
            for (const auto& [term, postings] : fields_[f].postings) {
                out << "term " << term;
                for (const Posting& p : postings) out << ' ' << p.doc << ':' << p.freq;
                out << '\n';
            }
        }
        out << "end\n";
    }

    static MultiFieldIndex load(std::istream& in) {
        MultiFieldIndex idx;
        std::string line;
        std::size_t file_line = 0;
        auto next = [&]() -> bool {
            if (!std::getline(in, line)) return false;
            ++file_line;
            return true;
        };
        if (!next() || line != "mfqa-index 1")
            throw std::runtime_error("not an mfqa index segment (bad header)");
        Field* field = nullptr;
        while (next()) {
            if (line == "end") return idx;
            std::istringstream ls(line);
            std::string tag;
            ls >> tag;
            if (tag == "schema") {
                ls >> idx.schema_hash_;
            } else if (tag == "ndocs") {
                ls >> idx.doc_count_;
            } else if (tag == "field") {
                std::string name;
                ls >> name;
                idx.field_names_.push_back(name);
                idx.fields_.emplace_back();
                field = &idx.fields_.back();
            } else if (tag == "len") {
                DocId doc;
                int len;
                if (!field || !(ls >> doc >> len)) detail::parse_fail(file_line, "bad len record");
                field->length[doc] = len;
            } else if (tag == "term") {
                std::string term;
                if (!field || !(ls >> term)) detail::parse_fail(file_line, "bad term record");
                auto& postings = field->postings[term];
                std::string pair;
                while (ls >> pair) {
                    std::size_t colon = pair.rfind(':');
                    if (colon == std::string::npos) detail::parse_fail(file_line, "bad posting '" + pair + "'");
                    postings.push_back(
                        {std::stoi(pair.substr(0, colon)), std::stoi(pair.substr(colon + 1))});
                }
            } else {
                detail::parse_fail(file_line, "unknown record '" + tag + "'");
            }
        }
        throw std::runtime_error("truncated index segment (missing 'end')");
    }

private:
    struct Field {
        std::map<std::string, std::vector<Posting>> postings;
        std::map<DocId, int> length;
    };

    std::vector<Field> fields_;
    std::vector<std::string> field_names_;
    std::string schema_hash_;
    std::int64_t doc_count_ = 0;
};

inline MultiFieldIndex build_index(const std::vector<FieldedDoc>& docs, const FieldSchema& schema) {
    return MultiFieldIndex(docs, schema);
}

}  // namespace mfqa
