#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "mill/errors.hpp"

namespace mill {

/// Graded relevance judgments keyed by (query_id, doc_id).
struct QrelSet {
    std::map<std::string, std::unordered_map<std::string, int>> grades;

    const std::unordered_map<std::string, int>* for_query(const std::string& query_id) const {
        auto it = grades.find(query_id);
        return it == grades.end() ? nullptr : &it->second;
    }
};

struct RunEntry {
    std::string doc_id;
    double score = 0.0;
};

/// Per-query ranked output; entries are in rank order 1..n.
struct RunRecord {
    std::string query_id;
    std::vector<RunEntry> entries;
};

using Run = std::map<std::string, RunRecord>;

/// TREC 4-column qrels: `qid iter docid grade` (whitespace-separated).
QrelSet parse_qrels(const std::filesystem::path& path);

/// TREC 6-column run: `qid Q0 docid rank score tag`. Lines may arrive in any
/// order; ranks are normalized and must be contiguous per query.
Run parse_run(const std::filesystem::path& path);

void write_run(const std::filesystem::path& path, const Run& run, const std::string& tag);

inline constexpr std::array<size_t, 3> kDefaultCutoffs = {10, 100, 1000};

enum class Metric { NDCG, AP, Recall, MRR };
inline constexpr std::array<Metric, 4> kAllMetrics = {Metric::NDCG, Metric::AP, Metric::Recall,
                                                      Metric::MRR};
std::string_view metric_name(Metric m);
Metric metric_from_name(std::string_view name);

/// NDCG with linear gain grade/log2(rank+1); the ideal ranking uses all
/// judged grades for the query. 0 when the query has no relevant docs.
double ndcg_at(const RunRecord& run, const QrelSet& qrels, size_t n);

/// AP normalized by the total number of relevant docs (grade >=
/// rel_threshold) in the qrels, not by min(R, n).
double ap_at(const RunRecord& run, const QrelSet& qrels, size_t n, int rel_threshold = 1);

double recall_at(const RunRecord& run, const QrelSet& qrels, size_t n, int rel_threshold = 1);

double mrr_at(const RunRecord& run, const QrelSet& qrels, size_t n, int rel_threshold = 1);

double compute_metric(Metric m, const RunRecord& run, const QrelSet& qrels, size_t n,
                      int rel_threshold);

struct MetricReport {
    std::vector<size_t> cutoffs;
    int rel_threshold = 1;
    /// per_query[qid][metric][cutoff-index]; every qrels query is present.
    std::map<std::string, std::map<Metric, std::vector<double>>> per_query;
    std::map<Metric, std::vector<double>> mean;  // macro-average over qrels queries

    std::string to_tsv() const;
    nlohmann::json to_json() const;
};

/// Per-query metrics for every query in the qrels (queries missing from the
/// run score 0), macro-averaged.
MetricReport evaluate(const Run& run, const QrelSet& qrels,
                      const std::vector<size_t>& cutoffs = {10, 100, 1000},
                      int rel_threshold = 1);

/// Per-query values of one metric over qrels queries, sorted by query id.
std::vector<double> metric_per_query(const Run& run, const QrelSet& qrels, Metric m, size_t n,
                                     int rel_threshold = 1);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
};

/// Raised when the paired differences have zero variance (the t statistic is
/// undefined); callers report "identical runs" when the diffs are all zero.
struct degenerate_variance_error : error {
    using error::error;
};

/// Two-sided paired t-test; p-value from Student's t with n-1 degrees of
/// freedom.
TTestResult paired_ttest(const std::vector<double>& per_query_a,
                         const std::vector<double>& per_query_b);

}  // namespace mill
