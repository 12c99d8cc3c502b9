#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfqa/annotate.hpp"
#include "mfqa/corpus.hpp"
#include "mfqa/eval.hpp"
#include "mfqa/fields.hpp"
#include "mfqa/index.hpp"
#include "mfqa/learn.hpp"
#include "mfqa/rank.hpp"

// End-to-end wiring: ingest -> annotate -> extract -> index -> train ->
// evaluate. Pronoun resolution runs over documents by default and is off for
// questions, both configurable.

namespace mfqa {

struct PipelineOptions {
    bool coref_documents = true;
    bool coref_questions = false;
    int top_k = kDefaultTopK;
};

struct AnnotatedCorpus {
    std::vector<AnnotatedSentence> docs;       // by doc_id
    std::vector<AnnotatedSentence> questions;  // by qid
};

// Documents are annotated story by story in line order, so pronoun contexts
// see every preceding sentence of the same story. Question contexts stop at
// the question line.
inline AnnotatedCorpus annotate_corpus(const Corpus& corpus, const PipelineOptions& opts = {}) {
    AnnotatedCorpus out;
    out.docs.resize(corpus.docs.size());
    out.questions.resize(corpus.questions.size());
    for (const Story& story : corpus.stories) {
        std::vector<AnnotatedSentence> context;
        for (const StoryEntry& e : story.entries) {
            if (e.is_question) {
                const QuestionRecord& q = corpus.questions[static_cast<std::size_t>(e.index)];
                out.questions[static_cast<std::size_t>(e.index)] =
                    annotate(q.text, context, opts.coref_questions);
            } else {
                const SentenceDoc& d = corpus.docs[static_cast<std::size_t>(e.index)];
                AnnotatedSentence s = annotate(d.text, context, opts.coref_documents);
                context.push_back(s);
                out.docs[static_cast<std::size_t>(e.index)] = std::move(s);
            }
        }
    }
    return out;
}

inline std::vector<FieldedDoc> extract_corpus_fields(const Corpus& corpus,
                                                     const AnnotatedCorpus& annotated,
                                                     const FieldSchema& schema) {
    std::vector<FieldedDoc> out;
    out.reserve(corpus.docs.size());
    for (std::size_t i = 0; i < corpus.docs.size(); ++i)
        out.push_back(extract_fields(annotated.docs[i], schema, corpus.docs[i].doc_id));
    return out;
}

inline std::vector<QueryBundle> build_corpus_queries(const Corpus& corpus,
                                                     const AnnotatedCorpus& annotated,
                                                     const FieldSchema& schema) {
    std::vector<QueryBundle> out;
    out.reserve(corpus.questions.size());
    for (std::size_t i = 0; i < corpus.questions.size(); ++i)
        out.push_back(build_query(annotated.questions[i], schema, corpus.questions[i].qid));
    return out;
}

inline MultiFieldIndex index_corpus(const Corpus& corpus, const FieldSchema& schema,
                                    const PipelineOptions& opts = {}) {
    AnnotatedCorpus annotated = annotate_corpus(corpus, opts);
    return build_index(extract_corpus_fields(corpus, annotated, schema), schema);
}

// Exact per-field relevance over the full candidate set for every question;
// the training view of the corpus (no top-k cap).
inline std::vector<TrainQuestion> make_train_questions(const Corpus& corpus,
                                                       const std::vector<QueryBundle>& queries,
                                                       const MultiFieldIndex& idx) {
    std::vector<TrainQuestion> out;
    out.reserve(corpus.questions.size());
    for (std::size_t qi = 0; qi < corpus.questions.size(); ++qi) {
        const QuestionRecord& q = corpus.questions[qi];
        TrainQuestion tq;
        tq.qid = q.qid;
        tq.candidates = candidate_set(q, corpus);
        tq.oracle = oracle_doc(q, corpus);
        const QueryBundle& qb = queries[qi];
        tq.r.reserve(tq.candidates.size());
        for (DocId d : tq.candidates) {
            std::vector<double> row(qb.queries.size(), 0.0);
            for (std::size_t f = 0; f < qb.queries.size(); ++f)
                row[f] = idx.relevance(f, qb.queries[f], d);
            tq.r.push_back(std::move(row));
        }
        out.push_back(std::move(tq));
    }
    return out;
}

struct TrainedPipeline {
    FieldSchema schema;
    MultiFieldIndex index;
    TrainReport report;
};

inline TrainedPipeline train_pipeline(const Corpus& corpus, const FieldSchema& schema,
                                      const TrainConfig& cfg = {}, const PipelineOptions& opts = {}) {
    TrainedPipeline tp{schema, {}, {}};
    AnnotatedCorpus annotated = annotate_corpus(corpus, opts);
    tp.index = build_index(extract_corpus_fields(corpus, annotated, schema), schema);
    std::vector<QueryBundle> queries = build_corpus_queries(corpus, annotated, schema);
    tp.report = train(make_train_questions(corpus, queries, tp.index), schema.size(), cfg);
    return tp;
}

// Answers every question of the corpus against the given index.
inline RunResult predict_corpus(const Corpus& corpus, const FieldSchema& schema,
                                const MultiFieldIndex& idx, const WeightVector& weights,
                                const PipelineOptions& opts = {}) {
    AnnotatedCorpus annotated = annotate_corpus(corpus, opts);
    std::vector<QueryBundle> queries = build_corpus_queries(corpus, annotated, schema);
    RunResult run;
    run.reserve(corpus.questions.size());
    for (std::size_t qi = 0; qi < corpus.questions.size(); ++qi) {
        const QuestionRecord& q = corpus.questions[qi];
        std::vector<DocId> candidates = candidate_set(q, corpus);
        QuestionResult qr;
        qr.oracle = oracle_doc(q, corpus);
        for (const RankedAnswer& a : answer(queries[qi], candidates, idx, weights, opts.top_k))
            qr.top3.push_back(a.doc);
        run.push_back(std::move(qr));
    }
    return run;
}

}  // namespace mfqa
