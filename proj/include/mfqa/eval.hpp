#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfqa/corpus.hpp"

// The two reported metrics, both over the top-3 predictions:
//   MAP — fraction of questions whose rank-1 prediction is the oracle
//         (the precision-at-1 reading of mean average precision)
//   MRR — mean of 1/rank of the oracle within the top 3, 0 when absent.

namespace mfqa {

struct QuestionResult {
    std::vector<DocId> top3;  // at most 3, no duplicates
    DocId oracle = 0;
};

using RunResult = std::vector<QuestionResult>;

struct Metrics {
    double map = 0.0;  // fraction in [0,1]; reported x100
    double mrr = 0.0;  // fraction in [0,1]; reported x100
    int n_questions = 0;
};

inline double map_at_1(const RunResult& run) {
    if (run.empty()) throw std::runtime_error("cannot evaluate an empty run");
    std::size_t hits = 0;
    for (const QuestionResult& q : run)
        if (!q.top3.empty() && q.top3.front() == q.oracle) ++hits;
    return static_cast<double>(hits) / static_cast<double>(run.size());
}

inline double mrr_top3(const RunResult& run) {
    if (run.empty()) throw std::runtime_error("cannot evaluate an empty run");
    double total = 0.0;
    for (const QuestionResult& q : run) {
        for (std::size_t rank = 0; rank < q.top3.size() && rank < 3; ++rank) {
            if (q.top3[rank] == q.oracle) {
                total += 1.0 / static_cast<double>(rank + 1);
                break;
            }
        }
    }
    return total / static_cast<double>(run.size());
}

inline Metrics compute_metrics(const RunResult& run) {
    return {map_at_1(run), mrr_top3(run), static_cast<int>(run.size())};
}

struct TaskMetrics {
    std::string task;
    Metrics metrics;
};

// Unweighted macro average across tasks.
inline Metrics macro_average(std::span<const TaskMetrics> tasks) {
    if (tasks.empty()) throw std::runtime_error("macro average over zero tasks");
    Metrics avg;
    for (const TaskMetrics& t : tasks) {
        avg.map += t.metrics.map;
        avg.mrr += t.metrics.mrr;
        avg.n_questions += t.metrics.n_questions;
    }
    avg.map /= static_cast<double>(tasks.size());
    avg.mrr /= static_cast<double>(tasks.size());
    return avg;
}

inline std::vector<TaskMetrics> evaluate_tasks(
    const std::vector<std::pair<std::string, RunResult>>& runs) {
    if (runs.empty()) throw std::runtime_error("no tasks to evaluate");
    std::vector<TaskMetrics> out;
    out.reserve(runs.size());
    for (const auto& [name, run] : runs) out.push_back({name, compute_metrics(run)});
    return out;
}

// Aligned text table, values x100, with the macro average on the bottom row.
inline std::string format_metrics_table(std::span<const TaskMetrics> tasks) {
    char buf[128];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-16s %8s %8s %8s\n", "Task", "MAP", "MRR", "N");
    out += buf;
    for (const TaskMetrics& t : tasks) {
        std::snprintf(buf, sizeof buf, "%-16s %8.2f %8.2f %8d\n", t.task.c_str(),
                      t.metrics.map * 100.0, t.metrics.mrr * 100.0, t.metrics.n_questions);
        out += buf;
    }
    Metrics avg = macro_average(tasks);
    std::snprintf(buf, sizeof buf, "%-16s %8.2f %8.2f %8d\n", "Avg.", avg.map * 100.0,
                  avg.mrr * 100.0, avg.n_questions);
    out += buf;
    return out;
}

// Machine-readable form: one record per task plus the average row.
inline void write_metrics_jsonl(std::span<const TaskMetrics> tasks, std::ostream& out) {
    auto emit = [&](const std::string& name, const Metrics& m) {
        nlohmann::json j;
        j["task"] = name;
        j["map"] = m.map;
        j["mrr"] = m.mrr;
        j["n"] = m.n_questions;
        out << j.dump() << '\n';
    };
    for (const TaskMetrics& t : tasks) emit(t.task, t.metrics);
    emit("avg", macro_average(tasks));
}

}  // namespace mfqa
