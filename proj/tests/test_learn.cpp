#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mfqa/learn.hpp"

using namespace mfqa;

namespace {

// 1-question, 2-field fixture: prediction (2.0, 0.0) beats the oracle
// (1.0, 1.0) on a tie broken by recency, forcing one update.
std::vector<TrainQuestion> trace_fixture() {
    TrainQuestion q;
    q.qid = 0;
    q.candidates = {1, 0};  // doc 1 is more recent
    q.oracle = 0;
    q.r = {{2.0, 0.0},   // doc 1 (predicted)
           {1.0, 1.0}};  // doc 0 (oracle)
    return {q};
}

}  // namespace

TEST_CASE("sign: strict trichotomy") {
    CHECK(sign(0.3) == 1);
    CHECK(sign(0.0) == 0);
    CHECK(sign(-1e-12) == -1);
    CHECK(sign(-0.0) == 0);
}

TEST_CASE("train: hand-traced single update yields exact weights") {
    TrainReport report = train(trace_fixture(), 2, {1, 0.002});
    REQUIRE(report.averaged.size() == 2);
    // delta = 0.002 * sign(1.0 - 2.0) on field 0, * sign(1.0 - 0.0) on field 1
    CHECK(report.averaged[0] == 1.0 - 0.002);
    CHECK(report.averaged[1] == 1.0 + 0.002);
    CHECK(report.averaged[0] == 0.998);
    CHECK(report.averaged[1] == 1.002);
    CHECK(report.iteration_accuracy == std::vector<double>{0.0});
    CHECK(report.updates_per_field == std::vector<long>{1, 1});
}

TEST_CASE("train: correct predictions leave the all-ones vector exactly") {
    TrainQuestion q;
    q.qid = 0;
    q.candidates = {5, 3};
    q.oracle = 5;
    q.r = {{2.0, 0.5}, {1.0, 0.2}};
    TrainReport report = train({q, q, q}, 2, {7, 0.002});
    CHECK(report.averaged == std::vector<double>{1.0, 1.0});
    for (double acc : report.iteration_accuracy) CHECK(acc == 1.0);
    CHECK(report.updates_per_field == std::vector<long>{0, 0});
}

TEST_CASE("train: equal relevance on a mistake leaves that field untouched") {
    TrainQuestion q;
    q.qid = 4;
    q.candidates = {1, 0};
    q.oracle = 0;
    q.r = {{2.0, 0.7}, {1.0, 0.7}};  // field 1 ties, sign(0) = 0
    TrainReport report = train({q}, 2, {1, 0.002});
    CHECK(report.averaged[1] == 1.0);
    CHECK(report.updates_per_field[1] == 0);
    CHECK(report.averaged[0] == 0.998);
}

TEST_CASE("train: determinism and the weight drift bound") {
    std::vector<TrainQuestion> qs;
    for (int i = 0; i < 6; ++i) {
        TrainQuestion q;
        q.qid = i;
        q.candidates = {2, 1, 0};
        q.oracle = i % 3;
        q.r = {{0.1 * i, 1.0}, {0.5, 0.2 * i}, {0.3, 0.4}};
        qs.push_back(q);
    }
    TrainConfig cfg{9, 0.01};
    TrainReport a = train(qs, 2, cfg);
    TrainReport b = train(qs, 2, cfg);
    CHECK(a.averaged == b.averaged);
    CHECK(a.iteration_accuracy == b.iteration_accuracy);

    // every intermediate weight lies within 1 +- M*alpha*|Q|, so the average does too
    double bound = cfg.max_iters * cfg.alpha * static_cast<double>(qs.size());
    for (double w : a.averaged) {
        CHECK(w <= 1.0 + bound + 1e-12);
        CHECK(w >= 1.0 - bound - 1e-12);
    }
}

TEST_CASE("train: a single separating field earns the top weight") {
    // field 0 is pure noise pointing the wrong way; field 1 separates the
    // oracle from every distractor
    std::vector<TrainQuestion> qs;
    for (int i = 0; i < 8; ++i) {
        TrainQuestion q;
        q.qid = i;
        q.candidates = {10, 11, 12};
        q.oracle = 12;
        q.r = {{0.9, 0.1}, {0.8, 0.1}, {0.2, 0.6}};
        qs.push_back(q);
    }
    TrainReport report = train(qs, 2, {40, 0.05});
    CHECK(report.iteration_accuracy.back() == 1.0);
    CHECK(report.averaged[1] > report.averaged[0]);
    CHECK(report.averaged[1] > 1.0);
}

TEST_CASE("train: input validation") {
    CHECK_THROWS_AS(train({}, 2, {}), std::runtime_error);

    TrainQuestion q;
    q.qid = 17;
    q.candidates = {1, 2};
    q.oracle = 9;  // not a candidate
    q.r = {{0.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_WITH_AS(train({q}, 2, {}), doctest::Contains("17"), std::runtime_error);

    TrainQuestion bad = q;
    bad.oracle = 1;
    bad.r = {{0.0}, {0.0}};
    CHECK_THROWS_AS(train({bad}, 2, {}), std::runtime_error);

    TrainQuestion ok = q;
    ok.oracle = 1;
    CHECK_THROWS_AS(train({ok}, 2, {0, 0.002}), std::runtime_error);
    CHECK_THROWS_AS(train({ok}, 2, {1, 0.0}), std::runtime_error);
}

TEST_CASE("model file round-trips weights at full precision") {
    FieldSchema schema = default_schema();
    std::vector<double> weights(schema.size(), 1.0);
    weights[0] = 0.998;
    weights[1] = 1.0 / 3.0;
    weights[2] = -0.123456789012345678;
    std::stringstream buf;
    save_model(schema, weights, {40, 0.002}, buf);

    LoadedModel model = load_model(buf);
    CHECK(model.schema_hash == schema_hash_hex(schema));
    CHECK(model.config.max_iters == 40);
    CHECK(model.config.alpha == 0.002);
    std::vector<double> restored = model_weights_for(model, schema);
    CHECK(restored == weights);  // %.17g round-trips doubles exactly

    FieldSchema other = filter_schema(schema, {FieldCategory::Lexical});
    CHECK_THROWS_AS(model_weights_for(model, other), std::runtime_error);

    std::stringstream junk("who knows\n");
    CHECK_THROWS_AS(load_model(junk), std::runtime_error);
    std::stringstream sizes("mfqa-model 1 schema=abc M=1 alpha=0.1\nword\tnot_a_number\n");
    CHECK_THROWS_AS(load_model(sizes), std::runtime_error);
}
