// mfqa: multi-field sentence retrieval for bAbI-style question answering.
//
// Subcommands wire the pipeline end to end:
//   gen -> ingest -> index -> train -> eval / ask
// Exit codes: 0 success, 1 input or parse error, 2 schema/model mismatch.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfqa/eval.hpp"
#include "mfqa/pipeline.hpp"
#include "mfqa/synth.hpp"

namespace {

struct MismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    return in;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

mfqa::Corpus load_corpus_file(const std::string& path) {
    std::ifstream in = open_input(path);
    return mfqa::load_corpus(in);
}

mfqa::FieldSchema resolve_schema(const std::string& schema_arg, const std::string& fields_arg) {
    mfqa::FieldSchema schema;
    if (schema_arg == "default") {
        schema = mfqa::default_schema();
    } else {
        std::ifstream in = open_input(schema_arg);
        schema = mfqa::load_schema(in);
    }
    if (!fields_arg.empty() && fields_arg != "all") {
        std::vector<mfqa::FieldCategory> keep;
        std::stringstream ss(fields_arg);
        std::string part;
        while (std::getline(ss, part, ','))
            if (!part.empty()) keep.push_back(mfqa::field_category_from_string(part));
        schema = mfqa::filter_schema(schema, keep);
    }
    return schema;
}

mfqa::MultiFieldIndex load_index_file(const std::string& path) {
    std::ifstream in = open_input(path);
    return mfqa::MultiFieldIndex::load(in);
}

void require_schema_match(const std::string& what, const std::string& got, const std::string& want) {
    if (got != want)
        throw MismatchError(what + " schema hash " + got + " does not match " + want);
}

struct TaskSpec {
    std::string name;
    std::string corpus;
    std::string index;
    std::string model;
};

TaskSpec parse_task_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 4)
        throw std::runtime_error("bad --task spec '" + spec + "', expected NAME:CORPUS:INDEX:MODEL");
    return {parts[0], parts[1], parts[2], parts[3]};
}

int cmd_gen(const std::string& kind, int stories, unsigned seed, const std::string& out_path) {
    std::string text = mfqa::generate_synthetic(mfqa::task_kind_from_string(kind), stories, seed);
    write_file(out_path, text);
    mfqa::Corpus c = mfqa::parse_babi(text);
    std::printf("generated kind=%s stories=%zu docs=%zu questions=%zu\n", kind.c_str(),
                c.stories.size(), c.docs.size(), c.questions.size());
    return 0;
}

int cmd_ingest(const std::string& in_path, const std::string& out_path) {
    std::ifstream in = open_input(in_path);
    mfqa::Corpus c = mfqa::parse_babi(in);
    std::ostringstream buf;
    mfqa::save_corpus(c, buf);
    write_file(out_path, buf.str());
    std::printf("stories=%zu docs=%zu questions=%zu\n", c.stories.size(), c.docs.size(),
                c.questions.size());
    return 0;
}

int cmd_index(const std::string& corpus_path, const std::string& out_path,
              const mfqa::FieldSchema& schema, const mfqa::PipelineOptions& opts) {
    mfqa::Corpus c = load_corpus_file(corpus_path);
    mfqa::MultiFieldIndex idx = mfqa::index_corpus(c, schema, opts);
    std::ostringstream buf;
    idx.save(buf);
    write_file(out_path, buf.str());
    for (std::size_t f = 0; f < schema.size(); ++f)
        std::printf("field %s: %zu terms\n", schema.fields[f].name.c_str(), idx.vocabulary_size(f));
    std::printf("indexed docs=%lld fields=%zu\n", static_cast<long long>(idx.doc_count()),
                schema.size());
    return 0;
}

int cmd_train(const std::string& corpus_path, const std::string& index_path,
              const std::string& out_path, const mfqa::FieldSchema& schema,
              const mfqa::TrainConfig& cfg, const mfqa::PipelineOptions& opts) {
    mfqa::Corpus c = load_corpus_file(corpus_path);
    mfqa::MultiFieldIndex idx = load_index_file(index_path);
    require_schema_match("index", idx.schema_hash(), mfqa::schema_hash_hex(schema));

    mfqa::AnnotatedCorpus ann = mfqa::annotate_corpus(c, opts);
    auto queries = mfqa::build_corpus_queries(c, ann, schema);
    mfqa::TrainReport report = mfqa::train(mfqa::make_train_questions(c, queries, idx),
                                           schema.size(), cfg);

    std::printf("training M=%d alpha=%g questions=%zu\n", cfg.max_iters, cfg.alpha,
                c.questions.size());
    for (std::size_t i = 0; i < report.iteration_accuracy.size(); ++i)
        std::printf("iter %zu: accuracy=%.4f\n", i + 1, report.iteration_accuracy[i]);
    for (std::size_t f = 0; f < schema.size(); ++f)
        std::printf("weight %s: %.6f (updates=%ld)\n", schema.fields[f].name.c_str(),
                    report.averaged[f], report.updates_per_field[f]);

    std::ostringstream buf;
    mfqa::save_model(schema, report.averaged, cfg, buf);
    write_file(out_path, buf.str());
    return 0;
}

int cmd_eval(const std::vector<TaskSpec>& tasks, const mfqa::FieldSchema& schema, bool uniform,
             const std::string& json_out, const mfqa::PipelineOptions& opts) {
    std::vector<mfqa::TaskMetrics> metrics;
    std::string schema_hash = mfqa::schema_hash_hex(schema);
    for (const TaskSpec& task : tasks) {
        mfqa::Corpus c = load_corpus_file(task.corpus);
        mfqa::MultiFieldIndex idx = load_index_file(task.index);
        require_schema_match("index", idx.schema_hash(), schema_hash);
        mfqa::WeightVector weights = mfqa::WeightVector::ones(schema.size());
        if (!uniform) {
            std::ifstream min = open_input(task.model);
            mfqa::LoadedModel model = mfqa::load_model(min);
            require_schema_match("model", model.schema_hash, idx.schema_hash());
            weights.lambda = mfqa::model_weights_for(model, schema);
        }
        mfqa::RunResult run = mfqa::predict_corpus(c, schema, idx, weights, opts);
        metrics.push_back({task.name, mfqa::compute_metrics(run)});
    }
    std::string table = mfqa::format_metrics_table(metrics);
    std::fputs(table.c_str(), stdout);
    if (!json_out.empty()) {
        std::ostringstream buf;
        mfqa::write_metrics_jsonl(metrics, buf);
        write_file(json_out, buf.str());
    }
    return 0;
}

int cmd_ask(const std::string& model_path, const std::string& index_path,
            const mfqa::FieldSchema& schema, const std::vector<std::string>& context,
            const std::string& question, const mfqa::PipelineOptions& opts) {
    std::ifstream min = open_input(model_path);
    mfqa::LoadedModel model = mfqa::load_model(min);
    mfqa::WeightVector weights{mfqa::model_weights_for(model, schema)};
    if (!index_path.empty()) {
        mfqa::MultiFieldIndex stored = load_index_file(index_path);
        require_schema_match("index", stored.schema_hash(), model.schema_hash);
    }
    if (context.empty()) {
        std::printf("no context sentences given; nothing to rank\n");
        return 0;
    }

    // the context forms a fresh story; index it in memory and ask against it
    std::string babi;
    for (std::size_t i = 0; i < context.size(); ++i)
        babi += std::to_string(i + 1) + " " + context[i] + "\n";
    mfqa::Corpus c = mfqa::parse_babi(babi);
    mfqa::AnnotatedCorpus ann = mfqa::annotate_corpus(c, opts);
    mfqa::MultiFieldIndex idx =
        mfqa::build_index(mfqa::extract_corpus_fields(c, ann, schema), schema);

    std::vector<mfqa::AnnotatedSentence> story_context = ann.docs;
    mfqa::AnnotatedSentence q =
        mfqa::annotate(question, story_context, opts.coref_questions);
    mfqa::QueryBundle qb = mfqa::build_query(q, schema);
    std::vector<mfqa::DocId> candidates;
    for (auto it = c.docs.rbegin(); it != c.docs.rend(); ++it) candidates.push_back(it->doc_id);

    auto ranked = mfqa::answer(qb, candidates, idx, weights, opts.top_k);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const mfqa::RankedAnswer& a = ranked[i];
        std::printf("%zu. f=%.6f  %s\n", i + 1, a.f,
                    c.docs[static_cast<std::size_t>(a.doc)].text.c_str());
        for (std::size_t f = 0; f < schema.size(); ++f)
            if (a.contributions[f] != 0.0)
                std::printf("     %-12s %+.6f\n", schema.fields[f].name.c_str(), a.contributions[f]);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-field sentence retrieval question answering"};
    app.require_subcommand(1);
    app.set_config("--config");

    std::string schema_arg = "default";
    std::string fields_arg = "all";
    bool coref_docs = true;
    bool coref_questions = false;
    int top_k = mfqa::kDefaultTopK;
    app.add_option("--schema", schema_arg, "field schema: 'default' or a config file");
    app.add_option("--fields", fields_arg, "categories to keep: e.g. lexical,syntactic,semantic");
    app.add_flag("--coref-docs,!--no-coref-docs", coref_docs, "resolve pronouns in documents");
    app.add_flag("--coref-questions,!--no-coref-questions", coref_questions,
                 "resolve pronouns in questions");
    app.add_option("-k,--top-k", top_k, "per-field retrieval cap")->check(CLI::PositiveNumber);

    auto* gen = app.add_subcommand("gen", "generate synthetic bAbI-style data");
    std::string gen_kind = "location", gen_out;
    int gen_stories = 100;
    unsigned gen_seed = 1;
    gen->add_option("--kind", gen_kind, "location, yes_no, or counting");
    gen->add_option("--stories", gen_stories)->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out)->required();

    auto* ingest = app.add_subcommand("ingest", "parse bAbI text into a corpus file");
    std::string ingest_in, ingest_out;
    ingest->add_option("--in", ingest_in)->required();
    ingest->add_option("--out", ingest_out)->required();

    auto* index = app.add_subcommand("index", "annotate, extract fields, build the index");
    std::string index_corpus, index_out;
    index->add_option("--corpus", index_corpus)->required();
    index->add_option("--out", index_out)->required();

    auto* train = app.add_subcommand("train", "averaged perceptron training of field weights");
    std::string train_corpus, train_index, train_out;
    int train_iters = 40;
    double train_alpha = 0.002;
    train->add_option("--corpus", train_corpus)->required();
    train->add_option("--index", train_index)->required();
    train->add_option("--out", train_out)->required();
    train->add_option("--iters", train_iters, "max iterations M")->check(CLI::PositiveNumber);
    train->add_option("--alpha", train_alpha, "learning rate");

    auto* eval = app.add_subcommand("eval", "MAP and MRR-of-top-3 over a test corpus");
    std::string eval_corpus, eval_index, eval_model, eval_json, eval_name = "task";
    std::vector<std::string> eval_tasks;
    bool eval_uniform = false;
    eval->add_option("--corpus", eval_corpus);
    eval->add_option("--index", eval_index);
    eval->add_option("--model", eval_model);
    eval->add_option("--task-name", eval_name);
    eval->add_option("--task", eval_tasks, "NAME:CORPUS:INDEX:MODEL (repeatable)");
    eval->add_flag("--uniform", eval_uniform, "use all-ones weights instead of a model");
    eval->add_option("--json", eval_json, "also write metric records to this file");

    auto* ask = app.add_subcommand("ask", "rank context sentences for one question");
    std::string ask_model, ask_index, ask_context, ask_question;
    std::vector<std::string> ask_sentences;
    ask->add_option("--model", ask_model)->required();
    ask->add_option("--index", ask_index, "optional stored index, checked against the model");
    ask->add_option("--context", ask_context, "file with one context sentence per line");
    ask->add_option("--sentence", ask_sentences, "context sentence (repeatable)");
    ask->add_option("--question", ask_question)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        mfqa::FieldSchema schema = resolve_schema(schema_arg, fields_arg);
        mfqa::PipelineOptions opts{coref_docs, coref_questions, top_k};
        mfqa::TrainConfig cfg{train_iters, train_alpha};

        if (gen->parsed()) return cmd_gen(gen_kind, gen_stories, gen_seed, gen_out);
        if (ingest->parsed()) return cmd_ingest(ingest_in, ingest_out);
        if (index->parsed()) return cmd_index(index_corpus, index_out, schema, opts);
        if (train->parsed())
            return cmd_train(train_corpus, train_index, train_out, schema, cfg, opts);
        if (eval->parsed()) {
            std::vector<TaskSpec> tasks;
            for (const std::string& spec : eval_tasks) tasks.push_back(parse_task_spec(spec));
            if (!eval_corpus.empty()) {
                if (eval_index.empty() || (eval_model.empty() && !eval_uniform))
                    throw std::runtime_error("eval needs --corpus with --index and --model (or --uniform)");
                tasks.push_back({eval_name, eval_corpus, eval_index, eval_model});
            }
            if (tasks.empty()) throw std::runtime_error("eval needs --task specs or --corpus");
            return cmd_eval(tasks, schema, eval_uniform, eval_json, opts);
        }
        if (ask->parsed()) {
            std::vector<std::string> context = ask_sentences;
            if (!ask_context.empty()) {
                std::ifstream in = open_input(ask_context);
                std::string line;
                while (std::getline(in, line))
                    if (!line.empty()) context.push_back(line);
            }
            return cmd_ask(ask_model, ask_index, schema, context, ask_question, opts);
        }
    } catch (const MismatchError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
