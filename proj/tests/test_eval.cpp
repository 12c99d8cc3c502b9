#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mfqa/eval.hpp"

using namespace mfqa;

namespace {

// ranks: 1-based oracle rank, 0 meaning absent from the top 3
RunResult run_from_ranks(const std::vector<int>& ranks) {
    RunResult run;
    DocId next = 100;
    for (int r : ranks) {
        QuestionResult q;
        q.oracle = next++;
        for (int i = 1; i <= 3; ++i) q.top3.push_back(r == i ? q.oracle : next * 10 + i);
        run.push_back(q);
    }
    return run;
}

}  // namespace

TEST_CASE("map_at_1: fraction of rank-1 hits") {
    CHECK(map_at_1(run_from_ranks({1, 1, 2, 0})) == doctest::Approx(0.5));
    CHECK(map_at_1(run_from_ranks({1, 1, 1})) == 1.0);
    CHECK(map_at_1(run_from_ranks({0, 0})) == 0.0);
    CHECK_THROWS_AS(map_at_1({}), std::runtime_error);
}

TEST_CASE("mrr_top3: mean inverse rank within the top 3") {
    double got = mrr_top3(run_from_ranks({1, 2, 3, 0}));
    CHECK(got == doctest::Approx((1.0 + 0.5 + 1.0 / 3.0) / 4.0).epsilon(1e-12));
    CHECK(mrr_top3(run_from_ranks({1, 1})) == 1.0);
    CHECK(mrr_top3(run_from_ranks({2, 2, 2})) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(mrr_top3({}), std::runtime_error);
}

TEST_CASE("metric identities hold on random runs") {
    std::mt19937 g(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> ranks;
        int n = 1 + static_cast<int>(g() % 40);
        for (int i = 0; i < n; ++i) ranks.push_back(static_cast<int>(g() % 4));  // 0..3
        RunResult run = run_from_ranks(ranks);
        double map = map_at_1(run);
        double mrr = mrr_top3(run);
        CHECK(map >= 0.0);
        CHECK(map <= mrr);
        CHECK(mrr <= 1.0);

        // permuting the questions changes nothing
        RunResult shuffled = run;
        std::shuffle(shuffled.begin(), shuffled.end(), g);
        CHECK(map_at_1(shuffled) == doctest::Approx(map).epsilon(1e-12));
        CHECK(mrr_top3(shuffled) == doctest::Approx(mrr).epsilon(1e-12));

        // brute force over explicit rank lists
        double expect = 0.0;
        for (int r : ranks) expect += r == 0 ? 0.0 : 1.0 / r;
        CHECK(mrr == doctest::Approx(expect / n).epsilon(1e-12));
    }
}

TEST_CASE("evaluate_tasks: per-task metrics with a macro average") {
    auto tasks = evaluate_tasks({{"t1", run_from_ranks({1, 1})}, {"t2", run_from_ranks({1, 0})}});
    REQUIRE(tasks.size() == 2);
    CHECK(tasks[0].metrics.map == 1.0);
    CHECK(tasks[1].metrics.map == 0.5);
    Metrics avg = macro_average(tasks);
    CHECK(avg.map == doctest::Approx(0.75));
    CHECK(avg.n_questions == 4);

    auto single = evaluate_tasks({{"only", run_from_ranks({2})}});
    Metrics savg = macro_average(single);
    CHECK(savg.map == single[0].metrics.map);
    CHECK(savg.mrr == single[0].metrics.mrr);

    CHECK_THROWS_AS(evaluate_tasks({}), std::runtime_error);
}

TEST_CASE("published learned-model MAP column averages to 85.16") {
    const std::vector<double> learned_map = {100.0, 64.10, 94.20, 89.30, 94.40, 96.90, 99.60, 42.80};
    std::vector<TaskMetrics> tasks;
    for (std::size_t i = 0; i < learned_map.size(); ++i)
        tasks.push_back({"qa" + std::to_string(i), {learned_map[i] / 100.0, learned_map[i] / 100.0, 1000}});
    Metrics avg = macro_average(tasks);
    CHECK(std::abs(avg.map * 100.0 - 85.16) < 0.005);
}

TEST_CASE("metrics table and records share the same numbers") {
    auto tasks = evaluate_tasks({{"alpha", run_from_ranks({1, 2, 0, 1})}});
    std::string table = format_metrics_table(tasks);
    CHECK(table.find("alpha") != std::string::npos);
    CHECK(table.find("Avg.") != std::string::npos);
    CHECK(table.find("50.00") != std::string::npos);  // MAP x100

    std::stringstream buf;
    write_metrics_jsonl(tasks, buf);
    std::string line;
    REQUIRE(std::getline(buf, line));
    auto j = nlohmann::json::parse(line);
    CHECK(j.at("task") == "alpha");
    CHECK(j.at("map").get<double>() == doctest::Approx(0.5));
    CHECK(j.at("n").get<int>() == 4);
    REQUIRE(std::getline(buf, line));
    CHECK(nlohmann::json::parse(line).at("task") == "avg");
}
