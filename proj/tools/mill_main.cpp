#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mill/driver.hpp"
#include "mill/errors.hpp"
#include "mill/util.hpp"

namespace {

using mill::ExperimentConfig;

// Shared --config / --set handling: the file loads first, flags win.
struct ConfigArgs {
    std::string config_file;
    std::vector<std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("-c,--config", config_file, "key = value config file");
        cmd->add_option("--set", overrides, "override a config key (key=value, repeatable)");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_file.empty()) cfg = ExperimentConfig::from_file(config_file);
        for (const std::string& kv : overrides) {
            size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw mill::argument_error("--set expects key=value, got '" + kv + "'");
            cfg.apply_kv(mill::trim(kv.substr(0, eq)), mill::trim(kv.substr(eq + 1)));
        }
        return cfg;
    }
};

std::vector<size_t> parse_cutoffs(const std::string& csv) {
    std::vector<size_t> cutoffs;
    for (const std::string& part : mill::split(csv, ',')) {
        std::string t = mill::trim(part);
        if (t.empty()) continue;
        try {
            long v = std::stol(t);
            if (v < 1) throw std::invalid_argument("cutoff");
            cutoffs.push_back(static_cast<size_t>(v));
        } catch (const std::exception&) {
            throw mill::argument_error("bad cutoff: '" + t + "'");
        }
    }
    if (cutoffs.empty()) throw mill::argument_error("no cutoffs given");
    return cutoffs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-shot query expansion with mutual verification"};
    app.require_subcommand(1);

    ConfigArgs index_cfg, run_cfg, case_cfg;
    bool force = false;

    CLI::App* cmd_index = app.add_subcommand("index", "build and serialize the inverted index");
    index_cfg.attach(cmd_index);
    std::string index_corpus, index_format, index_out;
    cmd_index->add_option("--corpus", index_corpus, "corpus path");
    cmd_index->add_option("--format", index_format, "corpus format: jsonl or tsv");
    cmd_index->add_option("--index", index_out, "output index path");
    cmd_index->add_flag("--force", force, "overwrite an existing index file");
    bool index_strict = false;
    cmd_index->add_flag("--strict", index_strict, "abort on malformed corpus records");

    CLI::App* cmd_run = app.add_subcommand("run", "expand queries and produce a TREC run");
    run_cfg.attach(cmd_run);
    std::string run_method, run_outdir;
    cmd_run->add_option("--method", run_method,
                        "expansion method (mill, no-expansion, wo-prf, wo-mv, wo-qqd, a "
                        "prompt kind, or <kind>-ens)");
    cmd_run->add_option("--output-dir", run_outdir, "output directory");
    bool run_strict = false;
    cmd_run->add_flag("--strict", run_strict, "abort on the first failed query");

    CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a run against qrels");
    std::string eval_run, eval_qrels, eval_cutoffs = "10,100,1000", eval_out = "out";
    int eval_threshold = 1;
    cmd_eval->add_option("--run", eval_run, "TREC run file")->required();
    cmd_eval->add_option("--qrels", eval_qrels, "TREC qrels file")->required();
    cmd_eval->add_option("--cutoffs", eval_cutoffs, "comma-separated cutoffs");
    cmd_eval->add_option("--rel-threshold", eval_threshold,
                         "binary relevance threshold for AP/Recall/MRR");
    cmd_eval->add_option("--out", eval_out, "report output directory");

    CLI::App* cmd_compare =
        app.add_subcommand("compare", "paired t-test between two runs on one metric");
    std::string cmp_a, cmp_b, cmp_qrels, cmp_metric = "ndcg";
    size_t cmp_cutoff = 1000;
    int cmp_threshold = 1;
    cmd_compare->add_option("--run-a", cmp_a)->required();
    cmd_compare->add_option("--run-b", cmp_b)->required();
    cmd_compare->add_option("--qrels", cmp_qrels)->required();
    cmd_compare->add_option("--metric", cmp_metric, "ndcg, ap, recall or mrr");
    cmd_compare->add_option("--cutoff", cmp_cutoff);
    cmd_compare->add_option("--rel-threshold", cmp_threshold);

    CLI::App* cmd_case =
        app.add_subcommand("case", "render the expansion pipeline for one query");
    case_cfg.attach(cmd_case);
    std::string case_query;
    cmd_case->add_option("--query-id", case_query)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_index->parsed()) {
            ExperimentConfig cfg = index_cfg.resolve();
            if (!index_corpus.empty()) cfg.corpus = index_corpus;
            if (!index_format.empty()) cfg.corpus_format = index_format;
            if (!index_out.empty()) cfg.index_path = index_out;
            if (index_strict) cfg.strict = true;
            mill::cmd_index(cfg, force, std::cout);
        } else if (cmd_run->parsed()) {
            ExperimentConfig cfg = run_cfg.resolve();
            if (!run_method.empty()) cfg.method = run_method;
            if (!run_outdir.empty()) cfg.output_dir = run_outdir;
            if (run_strict) cfg.strict = true;
            mill::cmd_run(cfg, std::cout);
        } else if (cmd_eval->parsed()) {
            mill::cmd_eval(eval_run, eval_qrels, parse_cutoffs(eval_cutoffs), eval_threshold,
                           eval_out, std::cout);
        } else if (cmd_compare->parsed()) {
            mill::cmd_compare(cmp_a, cmp_b, cmp_qrels, mill::metric_from_name(cmp_metric),
                              cmp_cutoff, cmp_threshold, std::cout);
        } else if (cmd_case->parsed()) {
            mill::cmd_case(case_cfg.resolve(), case_query, std::cout);
        }
    } catch (const mill::argument_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const mill::backend_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const mill::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
