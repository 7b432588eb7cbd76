#include "mill/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "mill/errors.hpp"
#include "mill/util.hpp"

namespace mill {
namespace {

void require_exists(const std::string& path, const std::string& what) {
    if (path.empty()) throw argument_error(what + " path not configured");
    if (!std::filesystem::exists(path))
        throw argument_error(what + " path does not exist: " + path);
}

AnalyzerConfig analyzer_from(const ExperimentConfig& cfg) {
    return AnalyzerConfig{cfg.lowercase, cfg.stopwords, cfg.stem};
}

std::string env_api_key() {
    const char* key = std::getenv("LLM_API_KEY");
    return key ? key : "";
}

}  // namespace

Backends make_backends(const ExperimentConfig& cfg) {
    Backends b;
    RetryPolicy retry{cfg.retry_attempts, std::chrono::milliseconds(cfg.retry_backoff_ms)};
    if (cfg.backend == "mock") {
        b.generator_impl =
            std::make_unique<MockGenerator>(cfg.mock_vocabulary(), cfg.mock_items, cfg.seed);
        b.embedder_impl = std::make_unique<MockEmbedder>(static_cast<size_t>(cfg.embed_dim));
    } else if (cfg.backend == "remote") {
        RemoteGenerator::Options gen_opt;
        gen_opt.endpoint = cfg.llm_endpoint;
        gen_opt.path = cfg.llm_path;
        gen_opt.api_key = env_api_key();
        gen_opt.retry = retry;
        gen_opt.max_in_flight = cfg.max_in_flight;
        b.generator_impl = std::make_unique<RemoteGenerator>(std::move(gen_opt));

        RemoteEmbedder::Options emb_opt;
        emb_opt.endpoint = cfg.embed_endpoint;
        emb_opt.path = cfg.embed_path;
        emb_opt.model = cfg.embed_model;
        emb_opt.api_key = env_api_key();
        emb_opt.retry = retry;
        emb_opt.max_in_flight = cfg.max_in_flight;
        b.embedder_impl = std::make_unique<RemoteEmbedder>(std::move(emb_opt));
    } else {
        throw argument_error("unknown backend: " + cfg.backend);
    }

    std::filesystem::path gen_cache, emb_cache;
    if (!cfg.cache_dir.empty()) {
        std::filesystem::create_directories(cfg.cache_dir);
        gen_cache = std::filesystem::path(cfg.cache_dir) / "generations.jsonl";
        emb_cache = std::filesystem::path(cfg.cache_dir) / "embeddings.jsonl";
    }
    b.generator = std::make_unique<CachingGenerator>(*b.generator_impl, gen_cache);
    b.embedder = std::make_unique<CachingEmbedder>(*b.embedder_impl, emb_cache);
    return b;
}

void cmd_index(const ExperimentConfig& cfg, bool force, std::ostream& out) {
    require_exists(cfg.corpus, "corpus");
    if (std::filesystem::exists(cfg.index_path) && !force)
        throw argument_error("index file exists: " + cfg.index_path +
                             " (pass --force to rebuild)");

    IngestOptions options;
    options.strict = cfg.strict;
    options.on_bad_record = [](size_t line_no, const std::string& reason) {
        std::cerr << "warning: skipping corpus line " << line_no << ": " << reason << "\n";
    };

    PostingsIndex index = PostingsIndex::build(
        [&](const DocumentSink& sink) {
            if (cfg.corpus_format == "jsonl")
                ingest_jsonl(cfg.corpus, sink, options);
            else if (cfg.corpus_format == "tsv")
                ingest_tsv(cfg.corpus, sink, options);
            else
                throw argument_error("unknown corpus format: " + cfg.corpus_format);
        },
        analyzer_from(cfg));

    std::filesystem::path index_path(cfg.index_path);
    if (index_path.has_parent_path()) std::filesystem::create_directories(index_path.parent_path());
    index.save(index_path);

    out << "indexed " << index.doc_count() << " documents, " << index.term_count()
        << " terms, avg_doc_length " << format_double(index.avg_doc_length(), 2) << "\n"
        << "index written to " << cfg.index_path << "\n";
}

RunOutputs cmd_run(const ExperimentConfig& cfg, std::ostream& out) {
    require_exists(cfg.index_path, "index");
    require_exists(cfg.queries, "queries");

    PostingsIndex index = PostingsIndex::load(cfg.index_path);
    std::vector<Query> queries = read_queries(cfg.queries, cfg.queries_format);
    if (queries.empty()) throw data_error("no queries loaded from " + cfg.queries);

    Backends backends = make_backends(cfg);
    ExpansionConfig expansion = cfg.expansion();
    const std::string method_name = method_spec_name(expansion.method);

    struct PerQuery {
        RankedList ranked;
        nlohmann::json provenance;
        std::exception_ptr failure;
    };
    std::vector<PerQuery> results(queries.size());

    size_t workers = cfg.workers > 0 ? static_cast<size_t>(cfg.workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, queries.size());

    std::atomic<size_t> cursor{0};
    auto work = [&] {
        for (size_t i = cursor.fetch_add(1); i < queries.size(); i = cursor.fetch_add(1)) {
            try {
                ExpandedQuery expanded = expand(queries[i], expansion, index,
                                                *backends.generator, *backends.embedder);
                std::vector<std::string> tokens = analyze(expanded.text, index.analyzer());
                results[i].ranked =
                    index.search(tokens, cfg.search_depth, expansion.bm25);
                results[i].ranked.query_id = queries[i].query_id;
                nlohmann::json prov;
                prov["query_id"] = queries[i].query_id;
                prov["expanded_text"] = expanded.text;
                prov["provenance"] = expanded.provenance.to_json();
                results[i].provenance = std::move(prov);
            } catch (...) {
                results[i].failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();

    std::filesystem::create_directories(cfg.output_dir);
    RunOutputs paths;
    paths.run_file = std::filesystem::path(cfg.output_dir) / ("run_" + method_name + ".trec");
    paths.provenance_file =
        std::filesystem::path(cfg.output_dir) / ("provenance_" + method_name + ".jsonl");

    std::ofstream run_out(paths.run_file, std::ios::trunc);
    std::ofstream prov_out(paths.provenance_file, std::ios::trunc);
    if (!run_out || !prov_out)
        throw data_error("cannot write outputs under " + cfg.output_dir);

    size_t failures = 0;
    for (size_t i = 0; i < queries.size(); ++i) {
        if (results[i].failure) {
            ++failures;
            if (cfg.strict) std::rethrow_exception(results[i].failure);
            try {
                std::rethrow_exception(results[i].failure);
            } catch (const std::exception& e) {
                std::cerr << "warning: skipping query " << queries[i].query_id << ": "
                          << e.what() << "\n";
            }
            continue;
        }
        const RankedList& ranked = results[i].ranked;
        for (size_t r = 0; r < ranked.entries.size(); ++r) {
            run_out << ranked.query_id << " Q0 " << ranked.entries[r].doc_id << " " << (r + 1)
                    << " " << format_double(ranked.entries[r].score) << " " << method_name
                    << "\n";
        }
        prov_out << results[i].provenance.dump() << "\n";
    }
    if (!run_out || !prov_out)
        throw data_error("short write to outputs under " + cfg.output_dir);
    run_out.close();
    prov_out.close();

    out << "method " << method_name << ": " << (queries.size() - failures) << "/"
        << queries.size() << " queries -> " << paths.run_file.string() << "\n";
    return paths;
}

MetricReport cmd_eval(const std::filesystem::path& run_path,
                      const std::filesystem::path& qrels_path,
                      const std::vector<size_t>& cutoffs, int rel_threshold,
                      const std::filesystem::path& out_dir, std::ostream& out) {
    if (!std::filesystem::exists(run_path))
        throw argument_error("run path does not exist: " + run_path.string());
    if (!std::filesystem::exists(qrels_path))
        throw argument_error("qrels path does not exist: " + qrels_path.string());

    Run run = parse_run(run_path);
    QrelSet qrels = parse_qrels(qrels_path);
    if (qrels.grades.empty()) throw data_error("no judgments in " + qrels_path.string());
    MetricReport report = evaluate(run, qrels, cutoffs, rel_threshold);

    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "report.tsv", report.to_tsv());
    write_file(out_dir / "report.json", report.to_json().dump(2) + "\n");

    for (Metric m : kAllMetrics) {
        for (size_t c = 0; c < report.cutoffs.size(); ++c) {
            out << metric_name(m) << "@" << report.cutoffs[c] << "\t"
                << format_double(report.mean.at(m)[c]) << "\n";
        }
    }
    return report;
}

CompareOutcome cmd_compare(const std::filesystem::path& run_a,
                           const std::filesystem::path& run_b,
                           const std::filesystem::path& qrels_path, Metric metric,
                           size_t cutoff, int rel_threshold, std::ostream& out) {
    Run a = parse_run(run_a);
    Run b = parse_run(run_b);
    QrelSet qrels = parse_qrels(qrels_path);
    if (qrels.grades.empty()) throw data_error("no judgments in " + qrels_path.string());

    std::set<std::string> only_a, only_b;
    for (const auto& [qid, record] : a)
        if (!b.contains(qid)) only_a.insert(qid);
    for (const auto& [qid, record] : b)
        if (!a.contains(qid)) only_b.insert(qid);
    if (!only_a.empty() || !only_b.empty()) {
        std::string msg = "query sets differ between runs;";
        if (!only_a.empty()) {
            msg += " only in run A:";
            for (const std::string& q : only_a) msg += " " + q;
        }
        if (!only_b.empty()) {
            msg += " only in run B:";
            for (const std::string& q : only_b) msg += " " + q;
        }
        throw data_error(msg);
    }

    std::vector<double> per_a = metric_per_query(a, qrels, metric, cutoff, rel_threshold);
    std::vector<double> per_b = metric_per_query(b, qrels, metric, cutoff, rel_threshold);

    CompareOutcome outcome;
    bool all_zero = true;
    for (size_t i = 0; i < per_a.size(); ++i)
        if (per_a[i] != per_b[i]) {
            all_zero = false;
            break;
        }
    if (all_zero) {
        outcome.verdict = "identical";
        outcome.t = 0.0;
        outcome.p = 1.0;
    } else {
        try {
            TTestResult tt = paired_ttest(per_a, per_b);
            outcome.t = tt.t;
            outcome.p = tt.p;
            outcome.verdict = tt.p < 0.05 ? "significant" : "not-significant";
        } catch (const degenerate_variance_error&) {
            // Every query moved by exactly the same amount; the statistic is
            // undefined rather than insignificant.
            throw data_error("constant non-zero differences; paired t-test undefined");
        }
    }
    out << metric_name(metric) << "@" << cutoff << " t=" << format_double(outcome.t) << " p="
        << format_double(outcome.p) << " verdict=" << outcome.verdict << "\n";
    return outcome;
}

ExpandedQuery cmd_case(const ExperimentConfig& cfg, const std::string& query_id,
                       std::ostream& out) {
    require_exists(cfg.index_path, "index");
    require_exists(cfg.queries, "queries");

    std::vector<Query> queries = read_queries(cfg.queries, cfg.queries_format);
    auto it = std::find_if(queries.begin(), queries.end(),
                           [&](const Query& q) { return q.query_id == query_id; });
    if (it == queries.end()) throw data_error("query id not found: " + query_id);

    PostingsIndex index = PostingsIndex::load(cfg.index_path);
    Backends backends = make_backends(cfg);
    ExpansionConfig expansion = cfg.expansion();

    ExpandedQuery expanded =
        expand(*it, expansion, index, *backends.generator, *backends.embedder);
    const Provenance& prov = expanded.provenance;

    out << "query " << query_id << ": " << it->text << "\n";
    out << "method: " << prov.method << "\n\n";

    auto print_candidates = [&](const char* heading,
                                const std::vector<CandidateRecord>& candidates) {
        out << heading << " (" << candidates.size() << " candidates):\n";
        for (const CandidateRecord& c : candidates) {
            out << "  [" << (c.selected ? "selected" : "filtered") << "] rank "
                << c.origin_rank << " " << c.id;
            if (c.score) out << " score=" << format_double(*c.score);
            std::string preview = c.text.substr(0, 110);
            for (char& ch : preview)
                if (ch == '\n') ch = ' ';
            out << "\n      " << preview << (c.text.size() > 110 ? "..." : "") << "\n";
        }
        out << "\n";
    };
    print_candidates("PRF documents", prov.prf_candidates);
    print_candidates("generated documents", prov.llm_candidates);

    for (const ProvenanceComponent& c : prov.components) {
        if (c.source != "llm") continue;
        auto pairs = parse_qqd(c.text);
        if (pairs.empty()) continue;
        out << "sub-queries of " << c.id << ":\n";
        for (const auto& [sub_query, passage] : pairs)
            if (!sub_query.empty()) out << "  - " << sub_query << "\n";
    }

    out << "\nexpanded query (" << expanded.text.size() << " chars):\n";
    out << expanded.text.substr(0, 400) << (expanded.text.size() > 400 ? "..." : "") << "\n";
    return expanded;
}

}  // namespace mill
