#include <doctest.h>

#include <sstream>

#include "mfqa/pipeline.hpp"
#include "mfqa/synth.hpp"

using namespace mfqa;

TEST_CASE("pipeline: the indefinite-knowledge sentence answers its question") {
    Corpus c = parse_babi(
        "1 Fred took the football.\n"
        "2 Julie is either in the school or the cinema.\n"
        "3 Mary smiled.\n"
        "4 Where is Julie?\tschool\t2\n");
    FieldSchema schema = default_schema();
    PipelineOptions opts;
    MultiFieldIndex idx = index_corpus(c, schema, opts);
    RunResult run = predict_corpus(c, schema, idx, WeightVector::ones(schema.size()), opts);
    REQUIRE(run.size() == 1);
    REQUIRE(!run[0].top3.empty());
    CHECK(run[0].top3.front() == 1);  // the Julie sentence
    CHECK(run[0].oracle == 1);
}

TEST_CASE("pipeline: document-side coreference joins pronoun chains") {
    Corpus c = parse_babi(
        "1 Mary moved to the bathroom.\n"
        "2 Then she went to the kitchen.\n"
        "3 Where is Mary?\tkitchen\t2\n");
    FieldSchema schema = default_schema();
    AnnotatedCorpus ann = annotate_corpus(c, {});
    auto fielded = extract_corpus_fields(c, ann, schema);
    const auto& arg = fielded[1].terms[static_cast<std::size_t>(schema.index_of("arg"))];
    CHECK(std::find(arg.begin(), arg.end(), "mary_a0") != arg.end());

    // with document coreference off the pronoun stays
    PipelineOptions raw;
    raw.coref_documents = false;
    auto fielded_raw = extract_corpus_fields(c, annotate_corpus(c, raw), schema);
    const auto& arg_raw = fielded_raw[1].terms[static_cast<std::size_t>(schema.index_of("arg"))];
    CHECK(std::find(arg_raw.begin(), arg_raw.end(), "she_a0") != arg_raw.end());
}

TEST_CASE("pipeline: training questions carry exact full-candidate scores") {
    Corpus c = parse_babi(generate_synthetic(TaskKind::location, 10, 3));
    FieldSchema schema = default_schema();
    PipelineOptions opts;
    AnnotatedCorpus ann = annotate_corpus(c, opts);
    MultiFieldIndex idx = build_index(extract_corpus_fields(c, ann, schema), schema);
    auto queries = build_corpus_queries(c, ann, schema);
    auto tqs = make_train_questions(c, queries, idx);
    REQUIRE(tqs.size() == c.questions.size());
    for (std::size_t i = 0; i < tqs.size(); ++i) {
        const TrainQuestion& tq = tqs[i];
        CHECK(tq.candidates == candidate_set(c.questions[i], c));
        REQUIRE(tq.r.size() == tq.candidates.size());
        for (std::size_t cdx = 0; cdx < tq.candidates.size(); ++cdx)
            for (std::size_t f = 0; f < schema.size(); ++f)
                CHECK(tq.r[cdx][f] ==
                      idx.relevance(f, queries[i].queries[f], tq.candidates[cdx]));
    }
}

TEST_CASE("pipeline: learned weights beat distractors on a small location task") {
    Corpus train_c = parse_babi(generate_synthetic(TaskKind::location, 40, 17));
    Corpus test_c = parse_babi(generate_synthetic(TaskKind::location, 15, 18));
    FieldSchema schema = default_schema();
    PipelineOptions opts;

    TrainedPipeline tp = train_pipeline(train_c, schema, {10, 0.002}, opts);
    CHECK(tp.report.iteration_accuracy.back() >= tp.report.iteration_accuracy.front());

    MultiFieldIndex test_idx = index_corpus(test_c, schema, opts);
    RunResult learned = predict_corpus(test_c, schema, test_idx, {tp.report.averaged}, opts);
    double learned_map = map_at_1(learned);
    CHECK(learned_map > 0.8);
}

TEST_CASE("pipeline: reruns are bit-identical") {
    Corpus c = parse_babi(generate_synthetic(TaskKind::counting, 12, 5));
    FieldSchema schema = default_schema();
    TrainedPipeline a = train_pipeline(c, schema, {5, 0.002});
    TrainedPipeline b = train_pipeline(c, schema, {5, 0.002});
    CHECK(a.report.averaged == b.report.averaged);
    std::stringstream sa, sb;
    a.index.save(sa);
    b.index.save(sb);
    CHECK(sa.str() == sb.str());
}
