#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

// Deterministic bAbI-style story generator for hermetic tests. Three kinds:
//   location — movements plus short distractor actions; "Where is X?"
//   yes_no   — movements; "Is X in the Y?" with yes/no answers
//   counting — take/drop actions; "How many objects is X carrying?"
// The supporting line of a question is always the single sentence that
// determines its answer.

namespace mfqa {

enum class TaskKind { location, yes_no, counting };

inline TaskKind task_kind_from_string(const std::string& s) {
    if (s == "location") return TaskKind::location;
    if (s == "yes_no") return TaskKind::yes_no;
    if (s == "counting") return TaskKind::counting;
    throw std::runtime_error("unknown task kind '" + s + "'");
}

namespace synth_detail {

inline const std::vector<std::string>& names() {
    static const std::vector<std::string> v = {"Mary", "John", "Daniel", "Sandra", "Julie", "Fred"};
    return v;
}
inline const std::vector<std::string>& places() {
    static const std::vector<std::string> v = {"bathroom", "kitchen", "garden", "office", "hallway", "bedroom"};
    return v;
}
inline const std::vector<std::string>& objects() {
    static const std::vector<std::string> v = {"football", "apple", "milk", "book", "ball", "plate"};
    return v;
}
inline const std::vector<std::string>& move_verbs() {
    static const std::vector<std::string> v = {"moved", "went", "journeyed", "travelled"};
    return v;
}
inline const std::vector<std::string>& take_verbs() {
    static const std::vector<std::string> v = {"took", "grabbed"};
    return v;
}
inline const std::vector<std::string>& drop_verbs() {
    static const std::vector<std::string> v = {"dropped", "discarded"};
    return v;
}
inline const std::vector<std::string>& idle_verbs() {
    static const std::vector<std::string> v = {"smiled", "laughed", "waited"};
    return v;
}
inline const std::vector<std::string>& state_adjectives() {
    static const std::vector<std::string> v = {"tired", "bored", "hungry", "thirsty"};
    return v;
}
inline const std::vector<std::string>& numerals() {
    static const std::vector<std::string> v = {"none", "one", "two", "three", "four", "five"};
    return v;
}

struct Writer {
    std::string out;
    int line_no = 0;

    int statement(const std::string& text) {
        ++line_no;
        out += std::to_string(line_no) + " " + text + "\n";
        return line_no;
    }
    void question(const std::string& text, const std::string& answer, int support) {
        ++line_no;
        out += std::to_string(line_no) + " " + text + "\t" + answer + "\t" + std::to_string(support) + "\n";
    }
    void reset() {
        out.clear();
        line_no = 0;
    }
};

template <class T>
const T& pick(std::mt19937& g, const std::vector<T>& v) {
    return v[g() % v.size()];
}

inline bool chance(std::mt19937& g, unsigned pct) { return g() % 100u < pct; }

inline std::vector<std::string> pick_people(std::mt19937& g, std::size_t n) {
    std::vector<std::string> pool = names();
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n && !pool.empty(); ++i) {
        std::size_t k = g() % pool.size();
        out.push_back(pool[k]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return out;
}

}  // namespace synth_detail

inline std::string generate_synthetic(TaskKind kind, int n_stories, std::uint32_t rng_seed) {
    using namespace synth_detail;
    if (n_stories < 1) throw std::runtime_error("n_stories must be >= 1");
    std::mt19937 g(rng_seed);
    Writer w;
    std::string out;

    for (int s = 0; s < n_stories; ++s) {
        w.reset();
        auto people = pick_people(g, 3 + g() % 2);

        if (kind == TaskKind::location) {
            for (const std::string& person : people) {
                const std::string& place = pick(g, places());
                int move_line = w.statement(person + " " + pick(g, move_verbs()) + " to the " + place + ".");
                if (chance(g, 85)) w.statement(person + " " + pick(g, idle_verbs()) + ".");
                if (chance(g, 50)) w.statement(person + " " + pick(g, take_verbs()) + " the " + pick(g, objects()) + ".");
                if (chance(g, 35)) w.statement(person + " " + pick(g, idle_verbs()) + ".");
                if (chance(g, 80)) w.question("Where is " + person + "?", place, move_line);
            }
        } else if (kind == TaskKind::yes_no) {
            for (const std::string& person : people) {
                std::string place;
                int move_line = 0;
                int n_moves = 1 + g() % 2;
                for (int m = 0; m < n_moves; ++m) {
                    place = pick(g, places());
                    move_line = w.statement(person + " " + pick(g, move_verbs()) + " to the " + place + ".");
                }
                if (chance(g, 60)) w.statement(person + " " + pick(g, idle_verbs()) + ".");
                if (chance(g, 85)) {
                    bool truthful = chance(g, 50);
                    const std::string& asked = truthful ? place : pick(g, places());
                    w.question("Is " + person + " in the " + asked + "?",
                               asked == place ? "yes" : "no", move_line);
                }
            }
        } else {  // counting
            for (const std::string& person : people) {
                std::set<std::string> held;
                int last_act_line = 0;
                int n_acts = 1 + g() % 3;
                for (int a = 0; a < n_acts; ++a) {
                    bool take = held.empty() || (held.size() < 3 && chance(g, 65));
                    if (take) {
                        std::string obj = pick(g, objects());
                        for (int tries = 0; held.count(obj) && tries < 8; ++tries) obj = pick(g, objects());
                        if (held.count(obj)) continue;
                        held.insert(obj);
                        last_act_line = w.statement(person + " " + pick(g, take_verbs()) + " the " + obj + ".");
                    } else {
                        std::string obj = *std::next(held.begin(), static_cast<std::ptrdiff_t>(g() % held.size()));
                        held.erase(obj);
                        last_act_line = w.statement(person + " " + pick(g, drop_verbs()) + " the " + obj + ".");
                    }
                }
                if (chance(g, 50)) w.statement(person + " " + pick(g, move_verbs()) + " to the " + pick(g, places()) + ".");
                if (chance(g, 80)) w.statement(person + " is " + pick(g, state_adjectives()) + ".");
                if (chance(g, 90) && last_act_line > 0)
                    w.question("How many objects is " + person + " carrying?",
                               numerals().at(held.size()), last_act_line);
            }
        }
        out += w.out;
    }
    return out;
}

}  // namespace mfqa
