#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

#include "mill/config.hpp"
#include "mill/evalkit.hpp"

namespace mill {

/// Owns the configured generation/embedding backends plus their caches.
struct Backends {
    std::unique_ptr<Generator> generator_impl;
    std::unique_ptr<CachingGenerator> generator;
    std::unique_ptr<Embedder> embedder_impl;
    std::unique_ptr<CachingEmbedder> embedder;
};

Backends make_backends(const ExperimentConfig& cfg);

/// Builds and serializes the index; prints corpus statistics.
/// Refuses to overwrite an existing index file unless `force`.
void cmd_index(const ExperimentConfig& cfg, bool force, std::ostream& out);

struct RunOutputs {
    std::filesystem::path run_file;
    std::filesystem::path provenance_file;
};

/// Expands every query with the configured method, retrieves the top
/// `search_depth` documents, and writes a TREC run plus a provenance JSONL.
RunOutputs cmd_run(const ExperimentConfig& cfg, std::ostream& out);

/// Evaluates a run against qrels and writes report.tsv / report.json under
/// `out_dir`.
MetricReport cmd_eval(const std::filesystem::path& run_path,
                      const std::filesystem::path& qrels_path,
                      const std::vector<size_t>& cutoffs, int rel_threshold,
                      const std::filesystem::path& out_dir, std::ostream& out);

struct CompareOutcome {
    double t = 0.0;
    double p = 1.0;
    std::string verdict;  // "identical", "significant", "not-significant"
};

CompareOutcome cmd_compare(const std::filesystem::path& run_a,
                           const std::filesystem::path& run_b,
                           const std::filesystem::path& qrels_path, Metric metric,
                           size_t cutoff, int rel_threshold, std::ostream& out);

/// Renders the expansion pipeline for one query: candidate pools with
/// verification scores, selected and filtered-out documents, parsed
/// sub-queries, and the final expanded text.
ExpandedQuery cmd_case(const ExperimentConfig& cfg, const std::string& query_id,
                       std::ostream& out);

}  // namespace mill
