#pragma once

#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mfqa/common.hpp"

// Deterministic rule-based annotation sized for controlled bAbI-style English:
// tokenizer, lexicon+suffix tagger/lemmatizer, shallow dependency grammar,
// arc-to-role projection, and a recency-based pronoun resolver. A CoNLL-style
// import path substitutes externally produced annotations for richer text.

namespace mfqa {

enum class Pos { Noun, Propn, Verb, Adj, Adv, Adp, Det, Pron, Num, Cconj, Part, Punct, X };

inline const char* to_string(Pos p) {
    switch (p) {
        case Pos::Noun: return "NOUN";
        case Pos::Propn: return "PROPN";
        case Pos::Verb: return "VERB";
        case Pos::Adj: return "ADJ";
        case Pos::Adv: return "ADV";
        case Pos::Adp: return "ADP";
        case Pos::Det: return "DET";
        case Pos::Pron: return "PRON";
        case Pos::Num: return "NUM";
        case Pos::Cconj: return "CCONJ";
        case Pos::Part: return "PART";
        case Pos::Punct: return "PUNCT";
        case Pos::X: return "X";
    }
    return "X";
}

inline std::optional<Pos> pos_from_string(const std::string& s) {
    static const std::unordered_map<std::string, Pos> m = {
        {"NOUN", Pos::Noun}, {"PROPN", Pos::Propn}, {"VERB", Pos::Verb},  {"ADJ", Pos::Adj},
        {"ADV", Pos::Adv},   {"ADP", Pos::Adp},     {"DET", Pos::Det},    {"PRON", Pos::Pron},
        {"NUM", Pos::Num},   {"CCONJ", Pos::Cconj}, {"PART", Pos::Part},  {"PUNCT", Pos::Punct},
        {"X", Pos::X}};
    auto it = m.find(s);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

enum class DepLabel { Root, Nsubj, Obj, Obl, Case, Det, Advmod, Cc, Conj, Cop, Aux, Neg, Nummod, Dep };

inline const char* to_string(DepLabel l) {
    switch (l) {
        case DepLabel::Root: return "root";
        case DepLabel::Nsubj: return "nsubj";
        case DepLabel::Obj: return "obj";
        case DepLabel::Obl: return "obl";
        case DepLabel::Case: return "case";
        case DepLabel::Det: return "det";
        case DepLabel::Advmod: return "advmod";
        case DepLabel::Cc: return "cc";
        case DepLabel::Conj: return "conj";
        case DepLabel::Cop: return "cop";
        case DepLabel::Aux: return "aux";
        case DepLabel::Neg: return "neg";
        case DepLabel::Nummod: return "nummod";
        case DepLabel::Dep: return "dep";
    }
    return "dep";
}

inline std::optional<DepLabel> dep_label_from_string(const std::string& s) {
    static const std::unordered_map<std::string, DepLabel> m = {
        {"root", DepLabel::Root},     {"nsubj", DepLabel::Nsubj}, {"obj", DepLabel::Obj},
        {"obl", DepLabel::Obl},       {"case", DepLabel::Case},   {"det", DepLabel::Det},
        {"advmod", DepLabel::Advmod}, {"cc", DepLabel::Cc},       {"conj", DepLabel::Conj},
        {"cop", DepLabel::Cop},       {"aux", DepLabel::Aux},     {"neg", DepLabel::Neg},
        {"nummod", DepLabel::Nummod}, {"dep", DepLabel::Dep}};
    auto it = m.find(s);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

enum class Role { A0, A1, A2, Loc, Tmp, Neg, Dir };

inline const char* to_string(Role r) {
    switch (r) {
        case Role::A0: return "A0";
        case Role::A1: return "A1";
        case Role::A2: return "A2";
        case Role::Loc: return "LOC";
        case Role::Tmp: return "TMP";
        case Role::Neg: return "NEG";
        case Role::Dir: return "DIR";
    }
    return "A0";
}

inline std::optional<Role> role_from_string(const std::string& s) {
    static const std::unordered_map<std::string, Role> m = {{"A0", Role::A0},   {"A1", Role::A1},
                                                            {"A2", Role::A2},   {"LOC", Role::Loc},
                                                            {"TMP", Role::Tmp}, {"NEG", Role::Neg},
                                                            {"DIR", Role::Dir}};
    auto it = m.find(s);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

struct Token {
    int index = 0;
    std::string form;
    std::string lemma;  // lowercase, non-empty
    Pos pos = Pos::X;
    bool question_word = false;

    bool operator==(const Token&) const = default;
};

inline constexpr int kRootHead = -1;

struct DepArc {
    int head = kRootHead;  // token index, or kRootHead for the root arc
    int dependent = 0;
    DepLabel label = DepLabel::Dep;

    bool operator==(const DepArc&) const = default;
};

struct RoleBinding {
    Role role = Role::A0;
    int arg = 0;  // argument head token index

    bool operator==(const RoleBinding&) const = default;
};

struct PredArgFrame {
    int predicate = 0;  // token index; the lemma names the frame
    std::vector<RoleBinding> args;

    bool operator==(const PredArgFrame&) const = default;
};

struct AnnotatedSentence {
    std::vector<Token> tokens;
    std::vector<DepArc> arcs;  // one arc per token, ordered by dependent
    std::vector<PredArgFrame> frames;
    std::map<int, std::string> coref;  // pronoun token index -> replacement lemma
    bool degenerate_parse = false;     // no verb found

    bool operator==(const AnnotatedSentence&) const = default;
};

namespace lex {

struct LexEntry {
    Pos pos;
    const char* lemma;  // nullptr -> lowercased form
    bool question_word = false;
};

inline const std::unordered_map<std::string, LexEntry>& closed_class() {
    static const std::unordered_map<std::string, LexEntry> m = {
        // determiners
        {"the", {Pos::Det, nullptr}}, {"a", {Pos::Det, nullptr}}, {"an", {Pos::Det, nullptr}},
        {"this", {Pos::Det, nullptr}}, {"that", {Pos::Det, nullptr}}, {"these", {Pos::Det, nullptr}},
        {"those", {Pos::Det, nullptr}}, {"every", {Pos::Det, nullptr}}, {"each", {Pos::Det, nullptr}},
        // prepositions
        {"to", {Pos::Adp, nullptr}}, {"in", {Pos::Adp, nullptr}}, {"on", {Pos::Adp, nullptr}},
        {"at", {Pos::Adp, nullptr}}, {"of", {Pos::Adp, nullptr}}, {"from", {Pos::Adp, nullptr}},
        {"with", {Pos::Adp, nullptr}}, {"inside", {Pos::Adp, nullptr}}, {"into", {Pos::Adp, nullptr}},
        {"under", {Pos::Adp, nullptr}}, {"over", {Pos::Adp, nullptr}}, {"near", {Pos::Adp, nullptr}},
        {"behind", {Pos::Adp, nullptr}}, {"by", {Pos::Adp, nullptr}}, {"for", {Pos::Adp, nullptr}},
        // pronouns
        {"he", {Pos::Pron, nullptr}}, {"she", {Pos::Pron, nullptr}}, {"it", {Pos::Pron, nullptr}},
        {"they", {Pos::Pron, nullptr}}, {"him", {Pos::Pron, nullptr}}, {"her", {Pos::Pron, nullptr}},
        {"them", {Pos::Pron, nullptr}}, {"i", {Pos::Pron, nullptr}}, {"you", {Pos::Pron, nullptr}},
        {"we", {Pos::Pron, nullptr}}, {"me", {Pos::Pron, nullptr}}, {"us", {Pos::Pron, nullptr}},
        // question words
        {"what", {Pos::Pron, nullptr, true}}, {"who", {Pos::Pron, nullptr, true}},
        {"whom", {Pos::Pron, nullptr, true}}, {"whose", {Pos::Pron, nullptr, true}},
        {"where", {Pos::Adv, nullptr, true}}, {"when", {Pos::Adv, nullptr, true}},
        {"why", {Pos::Adv, nullptr, true}}, {"how", {Pos::Adv, nullptr, true}},
        {"many", {Pos::Adj, nullptr, true}},
        // adverbs
        {"there", {Pos::Adv, nullptr}}, {"here", {Pos::Adv, nullptr}}, {"then", {Pos::Adv, nullptr}},
        {"now", {Pos::Adv, nullptr}}, {"again", {Pos::Adv, nullptr}}, {"back", {Pos::Adv, nullptr}},
        {"afterwards", {Pos::Adv, nullptr}}, {"longer", {Pos::Adv, nullptr}},
        {"today", {Pos::Adv, nullptr}}, {"tonight", {Pos::Adv, nullptr}},
        {"yesterday", {Pos::Adv, nullptr}}, {"either", {Pos::Cconj, nullptr}},
        // conjunctions
        {"and", {Pos::Cconj, nullptr}}, {"or", {Pos::Cconj, nullptr}}, {"but", {Pos::Cconj, nullptr}},
        {"neither", {Pos::Cconj, nullptr}}, {"nor", {Pos::Cconj, nullptr}},
        // particles
        {"not", {Pos::Part, nullptr}}, {"no", {Pos::Part, nullptr}}, {"up", {Pos::Part, nullptr}},
        {"down", {Pos::Part, nullptr}},
        // copulas and auxiliaries
        {"is", {Pos::Verb, "be"}}, {"was", {Pos::Verb, "be"}}, {"are", {Pos::Verb, "be"}},
        {"were", {Pos::Verb, "be"}}, {"am", {Pos::Verb, "be"}}, {"be", {Pos::Verb, "be"}},
        {"been", {Pos::Verb, "be"}}, {"being", {Pos::Verb, "be"}},
        {"do", {Pos::Verb, "do"}}, {"does", {Pos::Verb, "do"}}, {"did", {Pos::Verb, "do"}},
        {"has", {Pos::Verb, "have"}}, {"had", {Pos::Verb, "have"}}, {"have", {Pos::Verb, "have"}},
        {"will", {Pos::Verb, "will"}}, {"would", {Pos::Verb, "would"}}, {"can", {Pos::Verb, "can"}},
        {"could", {Pos::Verb, "could"}}, {"may", {Pos::Verb, "may"}}, {"might", {Pos::Verb, "might"}},
        {"must", {Pos::Verb, "must"}}, {"shall", {Pos::Verb, "shall"}}, {"should", {Pos::Verb, "should"}},
        // numerals
        {"zero", {Pos::Num, nullptr}}, {"one", {Pos::Num, nullptr}}, {"two", {Pos::Num, nullptr}},
        {"three", {Pos::Num, nullptr}}, {"four", {Pos::Num, nullptr}}, {"five", {Pos::Num, nullptr}},
        {"six", {Pos::Num, nullptr}}, {"seven", {Pos::Num, nullptr}}, {"eight", {Pos::Num, nullptr}},
        {"nine", {Pos::Num, nullptr}}, {"ten", {Pos::Num, nullptr}},
        // adjectives
        {"tired", {Pos::Adj, nullptr}}, {"bored", {Pos::Adj, nullptr}}, {"hungry", {Pos::Adj, nullptr}},
        {"thirsty", {Pos::Adj, nullptr}}, {"sleepy", {Pos::Adj, nullptr}}, {"afraid", {Pos::Adj, nullptr}},
        {"scared", {Pos::Adj, nullptr}}, {"red", {Pos::Adj, nullptr}}, {"blue", {Pos::Adj, nullptr}},
        {"green", {Pos::Adj, nullptr}}, {"yellow", {Pos::Adj, nullptr}}, {"white", {Pos::Adj, nullptr}},
        {"gray", {Pos::Adj, nullptr}}, {"big", {Pos::Adj, nullptr}}, {"small", {Pos::Adj, nullptr}},
    };
    return m;
}

enum class Gender { Female, Male };

inline const std::unordered_map<std::string, Gender>& name_gender() {
    static const std::unordered_map<std::string, Gender> m = {
        {"mary", Gender::Female},   {"sandra", Gender::Female}, {"julie", Gender::Female},
        {"emily", Gender::Female},  {"jessica", Gender::Female}, {"lily", Gender::Female},
        {"winona", Gender::Female}, {"gertrude", Gender::Female},
        {"john", Gender::Male},     {"daniel", Gender::Male},   {"fred", Gender::Male},
        {"bill", Gender::Male},     {"jeff", Gender::Male},     {"antoine", Gender::Male},
        {"sumit", Gender::Male},    {"yann", Gender::Male},     {"jason", Gender::Male},
        {"brian", Gender::Male},    {"greg", Gender::Male},     {"bernhard", Gender::Male},
        {"julius", Gender::Male},   {"frank", Gender::Male},    {"lucy", Gender::Female},
    };
    return m;
}

// went -> go and friends; also covers -ed forms whose stem needs an -e back.
inline const std::unordered_map<std::string, std::string>& irregular_verbs() {
    static const std::unordered_map<std::string, std::string> m = {
        {"went", "go"},         {"got", "get"},       {"took", "take"},     {"gave", "give"},
        {"picked", "pick"},     {"dropped", "drop"},  {"moved", "move"},    {"travelled", "travel"},
        {"traveled", "travel"}, {"journeyed", "journey"}, {"grabbed", "grab"}, {"left", "leave"},
        {"put", "put"},         {"came", "come"},     {"ran", "run"},       {"smiled", "smile"},
        {"received", "receive"}, {"gathered", "gather"}, {"returned", "return"}, {"departed", "depart"},
        {"handed", "hand"},     {"passed", "pass"},   {"fled", "flee"},     {"thought", "think"},
        {"caught", "catch"},    {"gone", "go"},       {"made", "make"},     {"threw", "throw"},
    };
    return m;
}

// Base verb forms, for bare infinitives after do-support ("What did Mary
// give to Fred?") and modal futures ("Where will Sumit go?").
inline const std::unordered_set<std::string>& base_verbs() {
    static const std::unordered_set<std::string> s = {
        "go",    "move",  "travel", "journey", "come",  "return", "walk",  "run",    "leave",
        "depart", "take", "grab",   "drop",    "discard", "give", "get",   "put",    "pick",
        "carry", "hold",  "pass",   "hand",    "receive", "gather", "smile", "laugh", "wait",
        "count", "fetch", "bring",  "throw",   "catch",  "play",  "stay",  "remain", "visit",
        "follow",
    };
    return s;
}

// -ing forms that are not verbs in this domain.
inline const std::unordered_set<std::string>& ing_nouns() {
    static const std::unordered_set<std::string> s = {
        "nothing", "anything", "something", "everything", "thing",   "morning",
        "evening", "ring",     "king",      "string",     "spring", "swing", "wing", "building",
    };
    return s;
}

// -ing stems that restore a final e (mov+ing -> move).
inline const std::unordered_map<std::string, std::string>& ing_lemmas() {
    static const std::unordered_map<std::string, std::string> m = {
        {"moving", "move"},   {"taking", "take"},   {"giving", "give"},   {"leaving", "leave"},
        {"having", "have"},   {"coming", "come"},   {"making", "make"},   {"writing", "write"},
        {"getting", "get"},   {"putting", "put"},   {"running", "run"},   {"sitting", "sit"},
        {"travelling", "travel"}, {"traveling", "travel"},
    };
    return m;
}

inline bool is_motion_verb(const std::string& lemma) {
    static const std::unordered_set<std::string> s = {"go",   "move",  "travel", "journey", "come",
                                                      "return", "walk", "run",    "leave",   "depart",
                                                      "head"};
    return s.count(lemma) > 0;
}

inline bool is_aux_lemma(const std::string& lemma) {
    static const std::unordered_set<std::string> s = {"be",  "do",    "will",  "would", "can",
                                                      "could", "may", "might", "must",  "shall",
                                                      "should"};
    return s.count(lemma) > 0;
}

inline bool locative_case(const std::string& lemma) {
    return lemma == "in" || lemma == "to" || lemma == "at" || lemma == "inside";
}

inline bool directional_case(const std::string& lemma) { return lemma == "from"; }

}  // namespace lex

namespace detail {

inline bool is_punct_form(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c != '.' && c != '?' && c != '!' && c != ',') return false;
    return true;
}

inline bool is_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

inline bool is_capitalized(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

inline bool is_consonant(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) && std::string("aeiou").find(c) == std::string::npos;
}

inline bool is_nominal(Pos p) { return p == Pos::Noun || p == Pos::Propn || p == Pos::Pron; }

}  // namespace detail

// Whitespace split; terminal punctuation (. ? !) and commas become their own
// tokens. Case is preserved.
inline std::vector<std::string> tokenize(const std::string& text) {
    if (text.empty()) throw std::runtime_error("tokenize: empty text");
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string chunk;
    while (in >> chunk) {
        std::vector<std::string> tail;
        while (chunk.size() > 1) {
            char last = chunk.back();
            if (last == '.' || last == '?' || last == '!' || last == ',') {
                tail.emplace_back(1, last);
                chunk.pop_back();
            } else {
                break;
            }
        }
        out.push_back(chunk);
        out.insert(out.end(), tail.rbegin(), tail.rend());
    }
    return out;
}

// Lexicon lookup, PROPN detection, then verb suffix rules; everything else is
// a NOUN with an identity lemma.
inline std::vector<Token> tag_and_lemmatize(const std::vector<std::string>& forms) {
    std::vector<Token> tokens;
    tokens.reserve(forms.size());
    bool verb_seen = false;
    for (std::size_t i = 0; i < forms.size(); ++i) {
        const std::string& form = forms[i];
        std::string low = detail::lower(form);
        Token t;
        t.index = static_cast<int>(i);
        t.form = form;
        t.lemma = low;
        t.pos = Pos::Noun;

        if (detail::is_punct_form(form)) {
            t.pos = Pos::Punct;
        } else if (detail::is_digits(form)) {
            t.pos = Pos::Num;
        } else if (auto it = lex::closed_class().find(low); it != lex::closed_class().end()) {
            t.pos = it->second.pos;
            t.lemma = it->second.lemma ? it->second.lemma : low;
            t.question_word = it->second.question_word;
        } else if (lex::name_gender().count(low) || (detail::is_capitalized(form) && i > 0)) {
            t.pos = Pos::Propn;
        } else if (auto iv = lex::irregular_verbs().find(low); iv != lex::irregular_verbs().end()) {
            t.pos = Pos::Verb;
            t.lemma = iv->second;
        } else if (low.size() >= 5 && low.ends_with("ing") && !lex::ing_nouns().count(low)) {
            t.pos = Pos::Verb;
            if (auto im = lex::ing_lemmas().find(low); im != lex::ing_lemmas().end()) {
                t.lemma = im->second;
            } else {
                std::string stem = low.substr(0, low.size() - 3);
                if (stem.size() >= 3 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
                    detail::is_consonant(stem.back()))
                    stem.pop_back();
                t.lemma = stem;
            }
        } else if (low.size() >= 4 && low.ends_with("ed")) {
            t.pos = Pos::Verb;
            if (low.ends_with("ied")) {
                t.lemma = low.substr(0, low.size() - 3) + "y";
            } else {
                std::string stem = low.substr(0, low.size() - 2);
                if (stem.size() >= 3 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
                    detail::is_consonant(stem.back()))
                    stem.pop_back();
                t.lemma = stem;
            }
        } else if (lex::base_verbs().count(low)) {
            t.pos = Pos::Verb;
        } else if (low.size() >= 3 && low.ends_with("s") && !low.ends_with("ss") && !verb_seen && i > 0 &&
                   detail::is_nominal(tokens.back().pos)) {
            t.pos = Pos::Verb;
            if (low.ends_with("ies"))
                t.lemma = low.substr(0, low.size() - 3) + "y";
            else if (low.ends_with("es") &&
                     (low.ends_with("sses") || low.ends_with("shes") || low.ends_with("ches") ||
                      low.ends_with("xes") || low.ends_with("zes") || low.ends_with("oes")))
                t.lemma = low.substr(0, low.size() - 2);
            else
                t.lemma = low.substr(0, low.size() - 1);
        }
        if (t.pos == Pos::Verb) verb_seen = true;
        tokens.push_back(std::move(t));
    }
    return tokens;
}

struct ParseResult {
    std::vector<DepArc> arcs;
    bool degenerate = false;
};

// Shallow deterministic grammar. The root is the first main verb (skipping
// auxiliaries when a later verb exists); subjects attach to the nearest
// preceding nominal, with subject-verb inversion for questions.
inline ParseResult parse_deps(const std::vector<Token>& tokens) {
    const int n = static_cast<int>(tokens.size());
    ParseResult result;
    if (n == 0) return result;

    std::vector<int> head(static_cast<std::size_t>(n), -2);  // -2 = unassigned
    std::vector<DepLabel> label(static_cast<std::size_t>(n), DepLabel::Dep);
    auto assigned = [&](int i) { return head[static_cast<std::size_t>(i)] != -2; };
    auto attach = [&](int h, int d, DepLabel l) {
        head[static_cast<std::size_t>(d)] = h;
        label[static_cast<std::size_t>(d)] = l;
    };

    // root selection
    int root = -1;
    int first_verb = -1;
    for (int i = 0; i < n; ++i) {
        if (tokens[static_cast<std::size_t>(i)].pos != Pos::Verb) continue;
        if (first_verb < 0) first_verb = i;
        if (!lex::is_aux_lemma(tokens[static_cast<std::size_t>(i)].lemma)) {
            root = i;
            break;
        }
    }
    if (root < 0) root = first_verb;  // copula/auxiliary as main verb
    if (root < 0) {
        // degenerate: no verb at all
        result.degenerate = true;
        int fallback = 0;
        for (int i = 0; i < n; ++i) {
            if (tokens[static_cast<std::size_t>(i)].pos == Pos::Noun ||
                tokens[static_cast<std::size_t>(i)].pos == Pos::Propn) {
                fallback = i;
                break;
            }
        }
        attach(kRootHead, fallback, DepLabel::Root);
        for (int i = 0; i < n; ++i)
            if (i != fallback) attach(fallback, i, DepLabel::Dep);
        for (int i = 0; i < n; ++i)
            result.arcs.push_back({head[static_cast<std::size_t>(i)], i, label[static_cast<std::size_t>(i)]});
        return result;
    }
    attach(kRootHead, root, DepLabel::Root);

    // nominal coordination: X (CCONJ|,) [DET/ADJ/NUM]* Y  =>  conj(X -> Y)
    std::vector<int> conj_head(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (!detail::is_nominal(tokens[static_cast<std::size_t>(i)].pos)) continue;
        int chain = conj_head[static_cast<std::size_t>(i)] >= 0 ? conj_head[static_cast<std::size_t>(i)] : i;
        int j = i + 1;
        if (j >= n) break;
        const Token& link = tokens[static_cast<std::size_t>(j)];
        bool comma = link.pos == Pos::Punct && link.form == ",";
        if (link.pos != Pos::Cconj && !comma) continue;
        int k = j + 1;
        while (k < n && (tokens[static_cast<std::size_t>(k)].pos == Pos::Det ||
                         tokens[static_cast<std::size_t>(k)].pos == Pos::Adj ||
                         tokens[static_cast<std::size_t>(k)].pos == Pos::Num))
            ++k;
        if (k >= n || !detail::is_nominal(tokens[static_cast<std::size_t>(k)].pos)) continue;
        attach(chain, k, DepLabel::Conj);
        conj_head[static_cast<std::size_t>(k)] = chain;
        if (link.pos == Pos::Cconj) attach(k, j, DepLabel::Cc);
    }
    auto is_conj_child = [&](int i) { return conj_head[static_cast<std::size_t>(i)] >= 0; };

    // auxiliaries of the promoted root
    for (int i = 0; i < n; ++i) {
        if (i == root || assigned(i)) continue;
        if (tokens[static_cast<std::size_t>(i)].pos == Pos::Verb &&
            lex::is_aux_lemma(tokens[static_cast<std::size_t>(i)].lemma))
            attach(root, i, DepLabel::Aux);
    }

    // subject: nearest preceding nominal, else first following (inversion)
    int subj = -1;
    for (int i = root - 1; i >= 0; --i) {
        if (detail::is_nominal(tokens[static_cast<std::size_t>(i)].pos) && !is_conj_child(i) && !assigned(i)) {
            subj = i;
            break;
        }
    }
    if (subj < 0) {
        for (int i = root + 1; i < n; ++i) {
            if (detail::is_nominal(tokens[static_cast<std::size_t>(i)].pos) && !is_conj_child(i) &&
                !assigned(i)) {
                subj = i;
                break;
            }
        }
    }
    if (subj >= 0) attach(root, subj, DepLabel::Nsubj);

    // prepositional attachment: ADP + [DET/ADJ/NUM]* + nominal  =>  obl + case
    for (int a = 0; a < n; ++a) {
        if (tokens[static_cast<std::size_t>(a)].pos != Pos::Adp || assigned(a)) continue;
        int k = a + 1;
        while (k < n && (tokens[static_cast<std::size_t>(k)].pos == Pos::Det ||
                         tokens[static_cast<std::size_t>(k)].pos == Pos::Adj ||
                         tokens[static_cast<std::size_t>(k)].pos == Pos::Num))
            ++k;
        if (k < n && detail::is_nominal(tokens[static_cast<std::size_t>(k)].pos)) {
            attach(k, a, DepLabel::Case);
            if (!assigned(k)) attach(root, k, DepLabel::Obl);
        }
    }

    // object: first following bare nominal, else a fronted unclaimed nominal
    int obj = -1;
    for (int i = root + 1; i < n; ++i) {
        Pos p = tokens[static_cast<std::size_t>(i)].pos;
        if ((p == Pos::Noun || p == Pos::Propn) && !assigned(i) && !is_conj_child(i)) {
            obj = i;
            break;
        }
    }
    if (obj < 0) {
        for (int i = 0; i < root; ++i) {
            Pos p = tokens[static_cast<std::size_t>(i)].pos;
            if ((p == Pos::Noun || p == Pos::Propn) && !assigned(i) && !is_conj_child(i)) {
                obj = i;
                break;
            }
        }
    }
    if (obj >= 0) attach(root, obj, DepLabel::Obj);

    // determiners and numerals attach to the next nominal
    for (int i = 0; i < n; ++i) {
        if (assigned(i)) continue;
        Pos p = tokens[static_cast<std::size_t>(i)].pos;
        if (p != Pos::Det && p != Pos::Num) continue;
        for (int k = i + 1; k < n; ++k) {
            Pos pk = tokens[static_cast<std::size_t>(k)].pos;
            if (detail::is_nominal(pk)) {
                attach(k, i, p == Pos::Det ? DepLabel::Det : DepLabel::Nummod);
                break;
            }
            if (pk != Pos::Adj && pk != Pos::Num && pk != Pos::Det) break;
        }
    }

    // adverbs and negation on the root
    for (int i = 0; i < n; ++i) {
        if (assigned(i)) continue;
        const Token& t = tokens[static_cast<std::size_t>(i)];
        if (t.pos == Pos::Adv) attach(root, i, DepLabel::Advmod);
        else if (t.pos == Pos::Part && (t.lemma == "not" || t.lemma == "no")) attach(root, i, DepLabel::Neg);
    }

    // everything still loose hangs off the root
    for (int i = 0; i < n; ++i)
        if (!assigned(i)) attach(root, i, DepLabel::Dep);

    for (int i = 0; i < n; ++i)
        result.arcs.push_back({head[static_cast<std::size_t>(i)], i, label[static_cast<std::size_t>(i)]});
    return result;
}

// Arc-to-role projection. One frame per verb that is the root or a conj of
// it. Copula subjects become A1; coordinated nominals duplicate the role of
// their chain head.
inline std::vector<PredArgFrame> label_roles(const std::vector<Token>& tokens,
                                             const std::vector<DepArc>& arcs) {
    std::vector<PredArgFrame> frames;
    const int n = static_cast<int>(tokens.size());
    if (n == 0) return frames;

    int root = -1;
    for (const DepArc& a : arcs)
        if (a.label == DepLabel::Root) root = a.dependent;

    std::vector<int> predicates;
    if (root >= 0 && tokens[static_cast<std::size_t>(root)].pos == Pos::Verb) predicates.push_back(root);
    for (const DepArc& a : arcs)
        if (a.label == DepLabel::Conj && tokens[static_cast<std::size_t>(a.dependent)].pos == Pos::Verb)
            predicates.push_back(a.dependent);

    // conj children, for role duplication
    auto conj_children = [&](int head_tok) {
        std::vector<int> out;
        for (const DepArc& a : arcs)
            if (a.label == DepLabel::Conj && a.head == head_tok) out.push_back(a.dependent);
        return out;
    };

    int root_subj = -1;
    for (const DepArc& a : arcs)
        if (a.label == DepLabel::Nsubj && a.head == root) root_subj = a.dependent;

    for (int p : predicates) {
        PredArgFrame frame;
        frame.predicate = p;
        const std::string& plemma = tokens[static_cast<std::size_t>(p)].lemma;
        bool copula = plemma == "be";

        int subj = -1, obj = -1;
        std::vector<int> obls, advs, negs;
        for (const DepArc& a : arcs) {
            if (a.head != p) continue;
            switch (a.label) {
                case DepLabel::Nsubj: subj = a.dependent; break;
                case DepLabel::Obj: obj = a.dependent; break;
                case DepLabel::Obl: obls.push_back(a.dependent); break;
                case DepLabel::Advmod: advs.push_back(a.dependent); break;
                case DepLabel::Neg: negs.push_back(a.dependent); break;
                default: break;
            }
        }
        if (subj < 0 && p != root) subj = root_subj;  // shared subject of coordinated verbs

        std::vector<RoleBinding> bindings;
        std::array<bool, 7> bound{};
        auto bind = [&](Role r, int tok, bool allow_dup = false) {
            if (tok < 0) return;
            std::size_t ri = static_cast<std::size_t>(r);
            if (bound[ri] && !allow_dup) return;
            bound[ri] = true;
            bindings.push_back({r, tok});
            if (detail::is_nominal(tokens[static_cast<std::size_t>(tok)].pos))
                for (int c : conj_children(tok)) bindings.push_back({r, c});
        };

        if (subj >= 0) {
            Role subj_role = Role::A0;
            if (copula) subj_role = Role::A1;
            else if (lex::is_motion_verb(plemma) && obj < 0 && obls.empty()) subj_role = Role::A1;
            bind(subj_role, subj);
        }
        if (obj >= 0) bind(bound[static_cast<std::size_t>(Role::A1)] ? Role::A2 : Role::A1, obj);
        for (int o : obls) {
            // find this obl's case marker
            std::string case_lemma;
            for (const DepArc& a : arcs)
                if (a.label == DepLabel::Case && a.head == o)
                    case_lemma = tokens[static_cast<std::size_t>(a.dependent)].lemma;
            if (lex::locative_case(case_lemma)) bind(Role::Loc, o);
            else if (lex::directional_case(case_lemma)) bind(Role::Dir, o);
        }
        for (int a : advs) {
            const std::string& l = tokens[static_cast<std::size_t>(a)].lemma;
            if (l == "where" || l == "here" || l == "there") bind(Role::Loc, a);
            else if (l == "when" || l == "today" || l == "tonight" || l == "yesterday" || l == "now")
                bind(Role::Tmp, a);
        }
        for (int g : negs) bind(Role::Neg, g);

        frame.args = std::move(bindings);
        frames.push_back(std::move(frame));
    }
    return frames;
}

// he/she/it/they resolve to the most recent compatible mention; unresolvable
// pronouns map to themselves. Context is ordered oldest first.
inline std::map<int, std::string> resolve_pronouns(std::span<const AnnotatedSentence> context,
                                                   const AnnotatedSentence& sentence) {
    std::map<int, std::string> coref;

    auto gender_of = [](const std::string& lemma) -> std::optional<lex::Gender> {
        auto it = lex::name_gender().find(lemma);
        if (it == lex::name_gender().end()) return std::nullopt;
        return it->second;
    };

    auto match = [&](const Token& t, const std::string& pron) {
        if (pron == "it") return t.pos == Pos::Noun;
        if (t.pos != Pos::Propn) return false;
        if (pron == "they" || pron == "them") return true;
        auto g = gender_of(t.lemma);
        if (!g) return true;  // unknown names remain candidates
        bool female = pron == "she" || pron == "her";
        return female ? *g == lex::Gender::Female : *g == lex::Gender::Male;
    };

    auto search = [&](int before_index, const std::string& pron) -> std::optional<std::string> {
        for (int i = before_index - 1; i >= 0; --i) {
            const Token& t = sentence.tokens[static_cast<std::size_t>(i)];
            if (match(t, pron)) return t.lemma;
        }
        for (auto s = context.rbegin(); s != context.rend(); ++s)
            for (auto t = s->tokens.rbegin(); t != s->tokens.rend(); ++t)
                if (match(*t, pron)) return t->lemma;
        return std::nullopt;
    };

    static const std::unordered_set<std::string> targets = {"he", "she", "it", "they", "him", "her", "them"};
    for (const Token& t : sentence.tokens) {
        if (t.pos != Pos::Pron || !targets.count(t.lemma)) continue;
        auto found = search(t.index, t.lemma);
        coref[t.index] = found ? *found : t.lemma;
    }
    return coref;
}

// Full pipeline over one sentence; pronoun resolution only when requested
// (it depends on story order).
inline AnnotatedSentence annotate(const std::string& text,
                                  std::span<const AnnotatedSentence> context = {},
                                  bool resolve_coref = false) {
    AnnotatedSentence s;
    s.tokens = tag_and_lemmatize(tokenize(text));
    ParseResult parsed = parse_deps(s.tokens);
    s.arcs = std::move(parsed.arcs);
    s.degenerate_parse = parsed.degenerate;
    s.frames = label_roles(s.tokens, s.arcs);
    if (resolve_coref) s.coref = resolve_pronouns(context, s);
    return s;
}

struct ConllImport {
    std::vector<AnnotatedSentence> sentences;
    int warnings = 0;  // unknown POS / dependency / role labels
};

// Tab-separated ID FORM LEMMA POS HEAD DEPREL [PRED APRED...] rows, sentences
// separated by blank lines. Unknown labels fall back to dep / X with a
// warning count; structural problems are rejected with their line number.
inline ConllImport import_conll(std::istream& in) {
    ConllImport result;
    std::vector<std::vector<std::string>> block;
    std::string line;
    std::size_t file_line = 0;
    std::size_t block_start = 0;

    auto flush = [&]() {
        if (block.empty()) return;
        std::size_t cols = block.front().size();
        AnnotatedSentence s;
        std::vector<int> pred_rows;
        for (std::size_t r = 0; r < block.size(); ++r) {
            const auto& row = block[r];
            if (row.size() != cols)
                detail::parse_fail(block_start + r, "ragged row: expected " + std::to_string(cols) +
                                                        " columns, found " + std::to_string(row.size()));
            Token t;
            try {
                std::size_t used = 0;
                int id = std::stoi(row[0], &used);
                if (used != row[0].size() || id != static_cast<int>(r) + 1) throw std::invalid_argument("");
                t.index = id - 1;
            } catch (const std::exception&) {
                detail::parse_fail(block_start + r, "bad token id '" + row[0] + "'");
            }
            t.form = row[1];
            t.lemma = detail::lower(row[2]);
            if (t.lemma.empty()) t.lemma = detail::lower(t.form);
            if (auto p = pos_from_string(row[3])) {
                t.pos = *p;
            } else {
                t.pos = Pos::X;
                ++result.warnings;
            }
            int head = 0;
            try {
                std::size_t used = 0;
                head = std::stoi(row[4], &used);
                if (used != row[4].size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                detail::parse_fail(block_start + r, "non-numeric HEAD '" + row[4] + "'");
            }
            if (head < 0 || head > static_cast<int>(block.size()))
                detail::parse_fail(block_start + r, "HEAD out of range");
            DepLabel dl = DepLabel::Dep;
            if (auto l = dep_label_from_string(row[5])) {
                dl = *l;
            } else {
                ++result.warnings;
            }
            s.arcs.push_back({head - 1, t.index, dl});
            if (cols >= 7 && row[6] != "_") pred_rows.push_back(t.index);
            s.tokens.push_back(std::move(t));
        }
        for (std::size_t p = 0; p < pred_rows.size(); ++p) {
            PredArgFrame frame;
            frame.predicate = pred_rows[p];
            std::size_t col = 7 + p;
            if (col < cols) {
                for (std::size_t r = 0; r < block.size(); ++r) {
                    const std::string& cell = block[r][col];
                    if (cell == "_") continue;
                    if (auto role = role_from_string(cell))
                        frame.args.push_back({*role, static_cast<int>(r)});
                    else
                        ++result.warnings;
                }
            }
            s.frames.push_back(std::move(frame));
        }
        result.sentences.push_back(std::move(s));
        block.clear();
    };

    while (std::getline(in, line)) {
        ++file_line;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        std::vector<std::string> row;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            row.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (row.size() < 6) detail::parse_fail(file_line, "expected at least 6 columns");
        if (block.empty()) block_start = file_line;
        block.push_back(std::move(row));
    }
    flush();
    return result;
}

inline ConllImport import_conll(const std::string& text) {
    std::istringstream in(text);
    return import_conll(in);
}

}  // namespace mfqa
