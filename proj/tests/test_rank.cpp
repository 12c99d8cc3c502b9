#include <doctest.h>

#include "mfqa/rank.hpp"

using namespace mfqa;

namespace {

FieldSchema two_field_schema() {
    FieldSchema s;
    s.fields = {{"f0", FieldCategory::Lexical, Extractor::Word},
                {"f1", FieldCategory::Lexical, Extractor::Lemma}};
    return s;
}

ScoreMatrix matrix(std::vector<DocId> rows, std::vector<std::vector<double>> cells) {
    return {std::move(rows), std::move(cells)};
}

}  // namespace

TEST_CASE("rank: weighted sums order the documents") {
    ScoreMatrix m = matrix({0, 1}, {{0.5, 0.2}, {0.1, 0.9}});
    std::vector<DocId> order = {0, 1};

    auto both = rank(m, {{1.0, 1.0}}, order);
    REQUIRE(both.size() == 2);
    CHECK(both[0].doc == 1);
    CHECK(both[0].f == doctest::Approx(1.0));
    CHECK(both[1].doc == 0);
    CHECK(both[1].f == doctest::Approx(0.7));

    auto first_only = rank(m, {{1.0, 0.0}}, order);
    CHECK(first_only[0].doc == 0);
    CHECK(first_only[1].doc == 1);
}

TEST_CASE("rank: ties break toward the more recent candidate") {
    // doc 4 (line 4) ties doc 2 (line 2); recency order lists 4 first
    // (dyadic cell values keep the tie exact in floating point)
    ScoreMatrix m = matrix({4, 2}, {{0.25, 0.25}, {0.125, 0.375}});
    auto out = rank(m, {{1.0, 1.0}}, std::vector<DocId>{4, 2});
    CHECK(out[0].doc == 4);
    CHECK(out[0].f == doctest::Approx(out[1].f));
}

TEST_CASE("rank: contribution breakdown sums to f") {
    ScoreMatrix m = matrix({0}, {{0.5, 0.25}});
    auto out = rank(m, {{2.0, 4.0}}, std::vector<DocId>{0});
    REQUIRE(out.size() == 1);
    CHECK(out[0].contributions == std::vector<double>{1.0, 1.0});
    double sum = out[0].contributions[0] + out[0].contributions[1];
    CHECK(std::abs(out[0].f - sum) < 1e-12);
}

TEST_CASE("rank: dimension mismatch is an error") {
    ScoreMatrix m = matrix({0}, {{0.5, 0.25}});
    CHECK_THROWS_AS(rank(m, {{1.0}}, std::vector<DocId>{0}), std::runtime_error);
}

TEST_CASE("rank: scale invariance of the output order") {
    ScoreMatrix m = matrix({0, 1, 2}, {{0.5, 0.2}, {0.1, 0.9}, {0.4, 0.4}});
    std::vector<DocId> order = {2, 1, 0};
    auto base = rank(m, {{1.5, 0.7}}, order);
    auto scaled = rank(m, {{3.0, 1.4}}, order);
    REQUIRE(base.size() == scaled.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(base[i].doc == scaled[i].doc);
        CHECK(scaled[i].f == doctest::Approx(2.0 * base[i].f));
    }
}

TEST_CASE("score_matrix: union of per-field top-k with zero fill") {
    FieldSchema schema = two_field_schema();
    // doc 0 appears only in field f0, doc 1 only in f1
    std::vector<FieldedDoc> docs = {{0, {{"alpha"}, {}}}, {1, {{}, {"beta"}}}};
    MultiFieldIndex idx(docs, schema);
    QueryBundle qb;
    qb.queries = {{{"alpha", false}}, {{"beta", false}}};
    std::vector<DocId> cands = {1, 0};

    ScoreMatrix m = score_matrix(qb, cands, idx);
    REQUIRE(m.rows.size() == 2);
    CHECK(m.rows == std::vector<DocId>{1, 0});  // candidate order
    // two zero cells on the off-diagonal
    CHECK(m.cells[0][0] == 0.0);
    CHECK(m.cells[0][1] > 0.0);
    CHECK(m.cells[1][0] > 0.0);
    CHECK(m.cells[1][1] == 0.0);

    QueryBundle none;
    none.queries = {{{"missing", false}}, {}};
    CHECK(score_matrix(none, cands, idx).rows.empty());
}

TEST_CASE("score_matrix: the per-field cap limits the row count") {
    FieldSchema schema = two_field_schema();
    std::vector<FieldedDoc> docs;
    std::vector<DocId> cands;
    for (int i = 0; i < 25; ++i) {
        // vary a filler term so scores differ but everybody matches "hit"
        std::vector<std::string> f0 = {"hit"};
        for (int p = 0; p < i % 5; ++p) f0.push_back("pad" + std::to_string(i));
        docs.push_back({i, {f0, {}}});
        cands.push_back(i);
    }
    MultiFieldIndex idx(docs, schema);
    QueryBundle qb;
    qb.queries = {{{"hit", false}}, {}};
    ScoreMatrix m = score_matrix(qb, cands, idx, 20);
    CHECK(m.rows.size() == 20);
}

TEST_CASE("answer: top-3 truncation and zero-score fallback") {
    FieldSchema schema = two_field_schema();
    std::vector<FieldedDoc> docs;
    std::vector<DocId> cands;
    for (int i = 0; i < 5; ++i) {
        std::vector<std::string> f0 = {"hit"};
        for (int p = 0; p < i; ++p) f0.push_back("pad");
        docs.push_back({i, {f0, {}}});
        cands.push_back(4 - i);
    }
    MultiFieldIndex idx(docs, schema);
    QueryBundle qb;
    qb.queries = {{{"hit", false}}, {}};

    auto top = answer(qb, cands, idx, WeightVector::ones(2));
    CHECK(top.size() == 3);
    CHECK(top[0].doc == 0);  // shortest field, highest norm

    QueryBundle miss;
    miss.queries = {{{"absent", false}}, {}};
    auto fallback = answer(miss, std::vector<DocId>{3, 1}, idx, WeightVector::ones(2));
    REQUIRE(fallback.size() == 2);
    CHECK(fallback[0].doc == 3);
    CHECK(fallback[1].doc == 1);
    CHECK(fallback[0].f == 0.0);

    std::vector<FieldedDoc> one_doc = {{0, {{"hit"}, {}}}};
    MultiFieldIndex single(one_doc, schema);
    auto only = answer(qb, std::vector<DocId>{0}, single, WeightVector::ones(2));
    CHECK(only.size() == 1);
}

TEST_CASE("rank with a single field follows that field's top_k order") {
    FieldSchema schema = two_field_schema();
    std::vector<FieldedDoc> docs = {{0, {{"hit", "pad", "pad"}, {}}},
                                    {1, {{"hit"}, {}}},
                                    {2, {{"hit", "pad"}, {}}}};
    MultiFieldIndex idx(docs, schema);
    QueryBundle qb;
    qb.queries = {{{"hit", false}}, {}};
    std::vector<DocId> cands = {2, 1, 0};

    auto per_field = idx.top_k(0, qb.queries[0], cands, 20);
    ScoreMatrix m = score_matrix(qb, cands, idx);
    auto ranked = rank(m, WeightVector::ones(2), cands);
    REQUIRE(ranked.size() == per_field.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) CHECK(ranked[i].doc == per_field[i].doc);
    // output is a permutation of the matrix rows
    std::set<DocId> rows(m.rows.begin(), m.rows.end());
    std::set<DocId> out;
    for (const RankedAnswer& a : ranked) out.insert(a.doc);
    CHECK(rows == out);
}
