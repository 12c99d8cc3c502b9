#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfqa/common.hpp"

// bAbI-format corpus: stories made of one-sentence documents and questions
// annotated with their supporting line.

namespace mfqa {

using DocId = std::int32_t;

struct SentenceDoc {
    DocId doc_id = 0;   // global ordinal in file order
    int story_id = 0;
    int line_no = 0;
    std::string text;
};

struct QuestionRecord {
    int qid = 0;
    int story_id = 0;
    int line_no = 0;
    std::string text;
    std::string answer;
    std::vector<int> supporting;  // line numbers within the same story
};

struct StoryEntry {
    int line_no = 0;
    bool is_question = false;
    int index = 0;  // into Corpus::docs or Corpus::questions
};

struct Story {
    int story_id = 0;
    std::vector<StoryEntry> entries;  // line_no ascending
};

struct Corpus {
    std::vector<Story> stories;
    std::vector<SentenceDoc> docs;
    std::vector<QuestionRecord> questions;

    const SentenceDoc* find_doc(int story_id, int line_no) const {
        if (story_id < 0 || story_id >= static_cast<int>(stories.size())) return nullptr;
        for (const StoryEntry& e : stories[story_id].entries) {
            if (e.line_no == line_no)
                return e.is_question ? nullptr : &docs[e.index];
        }
        return nullptr;
    }
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

// Parses bAbI task text: `N sentence` or `N question?\tanswer\tsupporting-ids`.
// A story starts whenever the line number resets to 1.
inline Corpus parse_babi(std::istream& in) {
    Corpus corpus;
    std::string raw;
    std::size_t file_line = 0;
    int prev_line_no = 0;
    while (std::getline(in, raw)) {
        ++file_line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;

        std::size_t tabs = static_cast<std::size_t>(std::count(raw.begin(), raw.end(), '\t'));
        if (tabs != 0 && tabs != 2)
            detail::parse_fail(file_line, "expected 0 or 2 tab characters, found " + std::to_string(tabs));

        std::size_t sp = raw.find(' ');
        if (sp == std::string::npos || sp == 0)
            detail::parse_fail(file_line, "missing line number");
        int line_no = 0;
        try {
            std::size_t used = 0;
            line_no = std::stoi(raw.substr(0, sp), &used);
            if (used != sp) throw std::invalid_argument("");
        } catch (const std::exception&) {
            detail::parse_fail(file_line, "malformed line number '" + raw.substr(0, sp) + "'");
        }
        if (line_no < 1) detail::parse_fail(file_line, "line number must be positive");

        if (line_no == 1 || corpus.stories.empty()) {
            corpus.stories.push_back(Story{static_cast<int>(corpus.stories.size()), {}});
        } else if (line_no <= prev_line_no) {
            detail::parse_fail(file_line, "line number not increasing within story");
        }
        prev_line_no = line_no;
        Story& story = corpus.stories.back();

        std::string rest = raw.substr(sp + 1);
        if (tabs == 0) {
            if (rest.empty()) detail::parse_fail(file_line, "empty sentence");
            SentenceDoc doc;
            doc.doc_id = static_cast<DocId>(corpus.docs.size());
            doc.story_id = story.story_id;
            doc.line_no = line_no;
            doc.text = rest;
            story.entries.push_back({line_no, false, static_cast<int>(corpus.docs.size())});
            corpus.docs.push_back(std::move(doc));
        } else {
            std::size_t t1 = rest.find('\t');
            std::size_t t2 = rest.find('\t', t1 + 1);
            QuestionRecord q;
            q.qid = static_cast<int>(corpus.questions.size());
            q.story_id = story.story_id;
            q.line_no = line_no;
            q.text = rest.substr(0, t1);
            q.answer = rest.substr(t1 + 1, t2 - t1 - 1);
            if (q.text.empty()) detail::parse_fail(file_line, "empty question");
            for (const std::string& tok : detail::split_ws(rest.substr(t2 + 1))) {
                int sup = 0;
                try {
                    std::size_t used = 0;
                    sup = std::stoi(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument("");
                } catch (const std::exception&) {
                    detail::parse_fail(file_line, "malformed supporting line id '" + tok + "'");
                }
                bool found = false;
                for (const StoryEntry& e : story.entries) {
                    if (e.line_no == sup) {
                        if (e.is_question)
                            detail::parse_fail(file_line, "supporting id " + tok + " refers to a question line");
                        found = true;
                        break;
                    }
                }
                if (!found)
                    detail::parse_fail(file_line, "supporting id " + tok + " does not refer to an earlier sentence");
                q.supporting.push_back(sup);
            }
            if (q.supporting.empty()) detail::parse_fail(file_line, "question has no supporting line");
            story.entries.push_back({line_no, true, static_cast<int>(corpus.questions.size())});
            corpus.questions.push_back(std::move(q));
        }
    }
    return corpus;
}

inline Corpus parse_babi(const std::string& text) {
    std::istringstream in(text);
    return parse_babi(in);
}

// Serializes back to bAbI text; parse_babi(to_babi(c)) reproduces c.
inline std::string to_babi(const Corpus& corpus) {
    std::string out;
    for (const Story& story : corpus.stories) {
        for (const StoryEntry& e : story.entries) {
            out += std::to_string(e.line_no);
            out += ' ';
            if (e.is_question) {
                const QuestionRecord& q = corpus.questions[e.index];
                out += q.text;
                out += '\t';
                out += q.answer;
                out += '\t';
                for (std::size_t i = 0; i < q.supporting.size(); ++i) {
                    if (i) out += ' ';
                    out += std::to_string(q.supporting[i]);
                }
            } else {
                out += corpus.docs[e.index].text;
            }
            out += '\n';
        }
    }
    return out;
}

// Sentences of the question's story strictly before it, most recent first.
// This order doubles as the tie-break order during ranking.
inline std::vector<DocId> candidate_set(const QuestionRecord& q, const Corpus& corpus) {
    std::vector<DocId> out;
    const Story& story = corpus.stories.at(static_cast<std::size_t>(q.story_id));
    for (const StoryEntry& e : story.entries) {
        if (e.line_no >= q.line_no) break;
        if (!e.is_question) out.push_back(corpus.docs[e.index].doc_id);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

// The oracle is the sentence of the first supporting line.
inline DocId oracle_doc(const QuestionRecord& q, const Corpus& corpus) {
    if (q.supporting.empty())
        throw std::runtime_error("question " + std::to_string(q.qid) + " has no supporting line");
    const SentenceDoc* doc = corpus.find_doc(q.story_id, q.supporting.front());
    if (!doc)
        throw std::runtime_error("question " + std::to_string(q.qid) + ": no sentence at supporting line " +
                                 std::to_string(q.supporting.front()));
    return doc->doc_id;
}

// Line-delimited records, one per document or question.
inline void save_corpus(const Corpus& corpus, std::ostream& out) {
    for (const Story& story : corpus.stories) {
        for (const StoryEntry& e : story.entries) {
            nlohmann::json j;
            if (e.is_question) {
                const QuestionRecord& q = corpus.questions[e.index];
                j["kind"] = "question";
                j["id"] = q.qid;
                j["story_id"] = q.story_id;
                j["line_no"] = q.line_no;
                j["text"] = q.text;
                j["answer"] = q.answer;
                j["supporting"] = q.supporting;
            } else {
                const SentenceDoc& d = corpus.docs[e.index];
                j["kind"] = "doc";
                j["id"] = d.doc_id;
                j["story_id"] = d.story_id;
                j["line_no"] = d.line_no;
                j["text"] = d.text;
            }
            out << j.dump() << '\n';
        }
    }
}

inline Corpus load_corpus(std::istream& in) {
    Corpus corpus;
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
        int story_id = j.at("story_id").get<int>();
        while (static_cast<int>(corpus.stories.size()) <= story_id)
            corpus.stories.push_back(Story{static_cast<int>(corpus.stories.size()), {}});
        Story& story = corpus.stories[static_cast<std::size_t>(story_id)];
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "doc") {
            SentenceDoc d;
            d.doc_id = j.at("id").get<DocId>();
            d.story_id = story_id;
            d.line_no = j.at("line_no").get<int>();
            d.text = j.at("text").get<std::string>();
            story.entries.push_back({d.line_no, false, static_cast<int>(corpus.docs.size())});
            corpus.docs.push_back(std::move(d));
        } else if (kind == "question") {
            QuestionRecord q;
            q.qid = j.at("id").get<int>();
            q.story_id = story_id;
            q.line_no = j.at("line_no").get<int>();
            q.text = j.at("text").get<std::string>();
            q.answer = j.at("answer").get<std::string>();
            q.supporting = j.at("supporting").get<std::vector<int>>();
            story.entries.push_back({q.line_no, true, static_cast<int>(corpus.questions.size())});
            corpus.questions.push_back(std::move(q));
        } else {
            detail::parse_fail(file_line, "unknown record kind '" + kind + "'");
        }
    }
    for (Story& story : corpus.stories)
        std::sort(story.entries.begin(), story.entries.end(),
                  [](const StoryEntry& a, const StoryEntry& b) { return a.line_no < b.line_no; });
    return corpus;
}

}  // namespace mfqa
