#include "mill/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "mill/util.hpp"

namespace mill {
namespace {

std::vector<std::string> whitespace_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) fields.push_back(std::move(f));
    return fields;
}

int relevant_count(const std::unordered_map<std::string, int>* grades, int rel_threshold) {
    if (!grades) return 0;
    int r = 0;
    for (const auto& [doc, grade] : *grades)
        if (grade >= rel_threshold) ++r;
    return r;
}

}  // namespace

QrelSet parse_qrels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open qrels file: " + path.string());
    QrelSet qrels;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = whitespace_fields(line);
        if (fields.size() != 4)
            throw data_error("qrels line " + std::to_string(line_no) + ": expected 4 columns");
        int grade = 0;
        try {
            size_t used = 0;
            grade = std::stoi(fields[3], &used);
            if (used != fields[3].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw data_error("qrels line " + std::to_string(line_no) + ": bad grade '" +
                             fields[3] + "'");
        }
        if (grade < 0)
            throw data_error("qrels line " + std::to_string(line_no) +
                             ": negative grade");
        auto& per_query = qrels.grades[fields[0]];
        auto [it, inserted] = per_query.emplace(fields[2], grade);
        if (!inserted) {
            std::cerr << "warning: duplicate qrels pair (" << fields[0] << "," << fields[2]
                      << ") at line " << line_no << "; keeping the later grade\n";
            it->second = grade;
        }
    }
    return qrels;
}

Run parse_run(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open run file: " + path.string());
    struct Raw {
        long rank;
        std::string doc_id;
        double score;
    };
    std::map<std::string, std::vector<Raw>> raw;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = whitespace_fields(line);
        if (fields.size() != 6)
            throw data_error("run line " + std::to_string(line_no) + ": expected 6 columns");
        long rank = 0;
        double score = 0;
        try {
            rank = std::stol(fields[3]);
            score = std::stod(fields[4]);
        } catch (const std::exception&) {
            throw data_error("run line " + std::to_string(line_no) + ": bad rank or score");
        }
        raw[fields[0]].push_back(Raw{rank, fields[2], score});
    }

    Run run;
    for (auto& [qid, entries] : raw) {
        std::sort(entries.begin(), entries.end(),
                  [](const Raw& a, const Raw& b) { return a.rank < b.rank; });
        RunRecord record;
        record.query_id = qid;
        std::unordered_map<std::string, bool> seen;
        for (size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].rank != static_cast<long>(i + 1))
                throw data_error("run: ranks for query " + qid + " are not contiguous 1..n");
            if (!seen.emplace(entries[i].doc_id, true).second)
                throw data_error("run: duplicate doc " + entries[i].doc_id + " for query " + qid);
            record.entries.push_back(RunEntry{entries[i].doc_id, entries[i].score});
        }
        if (record.entries.size() > 1000) {
            std::cerr << "warning: truncating run for query " << qid << " to depth 1000\n";
            record.entries.resize(1000);
        }
        run.emplace(qid, std::move(record));
    }
    return run;
}

void write_run(const std::filesystem::path& path, const Run& run, const std::string& tag) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw data_error("cannot write run file: " + path.string());
    for (const auto& [qid, record] : run) {
        for (size_t i = 0; i < record.entries.size(); ++i) {
            out << qid << " Q0 " << record.entries[i].doc_id << " " << (i + 1) << " "
                << format_double(record.entries[i].score) << " " << tag << "\n";
        }
    }
    if (!out) throw data_error("short write to run file: " + path.string());
}

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::NDCG: return "ndcg";
        case Metric::AP: return "ap";
        case Metric::Recall: return "recall";
        case Metric::MRR: return "mrr";
    }
    return "?";
}

Metric metric_from_name(std::string_view name) {
    for (Metric m : kAllMetrics)
        if (metric_name(m) == name) return m;
    if (name == "map") return Metric::AP;  // common alias
    throw argument_error("unknown metric: " + std::string(name));
}

double ndcg_at(const RunRecord& run, const QrelSet& qrels, size_t n) {
    const auto* grades = qrels.for_query(run.query_id);
    if (!grades) return 0.0;

    std::vector<int> ideal;
    ideal.reserve(grades->size());
    for (const auto& [doc, grade] : *grades)
        if (grade > 0) ideal.push_back(grade);
    if (ideal.empty()) return 0.0;
    std::sort(ideal.begin(), ideal.end(), std::greater<>());

    double dcg = 0.0;
    const size_t depth = std::min(n, run.entries.size());
    for (size_t i = 0; i < depth; ++i) {
        auto it = grades->find(run.entries[i].doc_id);
        if (it != grades->end() && it->second > 0)
            dcg += it->second / std::log2(static_cast<double>(i) + 2.0);
    }
    double idcg = 0.0;
    for (size_t i = 0; i < std::min(n, ideal.size()); ++i)
        idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
    return dcg / idcg;
}

double ap_at(const RunRecord& run, const QrelSet& qrels, size_t n, int rel_threshold) {
    const auto* grades = qrels.for_query(run.query_id);
    const int total_relevant = relevant_count(grades, rel_threshold);
    if (total_relevant == 0) return 0.0;

    double sum = 0.0;
    int hits = 0;
    const size_t depth = std::min(n, run.entries.size());
    for (size_t i = 0; i < depth; ++i) {
        auto it = grades->find(run.entries[i].doc_id);
        if (it != grades->end() && it->second >= rel_threshold) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / total_relevant;
}

double recall_at(const RunRecord& run, const QrelSet& qrels, size_t n, int rel_threshold) {
    const auto* grades = qrels.for_query(run.query_id);
    const int total_relevant = relevant_count(grades, rel_threshold);
    if (total_relevant == 0) return 0.0;

    int hits = 0;
    const size_t depth = std::min(n, run.entries.size());
    for (size_t i = 0; i < depth; ++i) {
        auto it = grades->find(run.entries[i].doc_id);
        if (it != grades->end() && it->second >= rel_threshold) ++hits;
    }
    return static_cast<double>(hits) / total_relevant;
}

double mrr_at(const RunRecord& run, const QrelSet& qrels, size_t n, int rel_threshold) {
    const auto* grades = qrels.for_query(run.query_id);
    if (!grades) return 0.0;
    const size_t depth = std::min(n, run.entries.size());
    for (size_t i = 0; i < depth; ++i) {
        auto it = grades->find(run.entries[i].doc_id);
        if (it != grades->end() && it->second >= rel_threshold)
            return 1.0 / static_cast<double>(i + 1);
    }
    return 0.0;
}

double compute_metric(Metric m, const RunRecord& run, const QrelSet& qrels, size_t n,
                      int rel_threshold) {
    switch (m) {
        case Metric::NDCG: return ndcg_at(run, qrels, n);
        case Metric::AP: return ap_at(run, qrels, n, rel_threshold);
        case Metric::Recall: return recall_at(run, qrels, n, rel_threshold);
        case Metric::MRR: return mrr_at(run, qrels, n, rel_threshold);
    }
    return 0.0;
}

MetricReport evaluate(const Run& run, const QrelSet& qrels, const std::vector<size_t>& cutoffs,
                      int rel_threshold) {
    MetricReport report;
    report.cutoffs = cutoffs;
    report.rel_threshold = rel_threshold;

    static const RunRecord kEmpty{};
    for (const auto& [qid, grades] : qrels.grades) {
        auto run_it = run.find(qid);
        RunRecord record = run_it == run.end() ? kEmpty : run_it->second;
        record.query_id = qid;
        auto& per_metric = report.per_query[qid];
        for (Metric m : kAllMetrics) {
            auto& values = per_metric[m];
            values.reserve(cutoffs.size());
            for (size_t n : cutoffs)
                values.push_back(compute_metric(m, record, qrels, n, rel_threshold));
        }
    }

    const double n_queries = static_cast<double>(qrels.grades.size());
    for (Metric m : kAllMetrics) {
        report.mean[m].assign(cutoffs.size(), 0.0);
        for (const auto& [qid, per_metric] : report.per_query)
            for (size_t c = 0; c < cutoffs.size(); ++c)
                report.mean[m][c] += per_metric.at(m)[c];
        for (double& v : report.mean[m]) v /= n_queries;
    }
    return report;
}

std::vector<double> metric_per_query(const Run& run, const QrelSet& qrels, Metric m, size_t n,
                                     int rel_threshold) {
    static const RunRecord kEmpty{};
    std::vector<double> values;
    values.reserve(qrels.grades.size());
    for (const auto& [qid, grades] : qrels.grades) {
        auto run_it = run.find(qid);
        RunRecord record = run_it == run.end() ? kEmpty : run_it->second;
        record.query_id = qid;
        values.push_back(compute_metric(m, record, qrels, n, rel_threshold));
    }
    return values;
}

std::string MetricReport::to_tsv() const {
    std::string out = "metric\tcutoff\tquery_id\tvalue\n";
    for (Metric m : kAllMetrics) {
        for (size_t c = 0; c < cutoffs.size(); ++c) {
            for (const auto& [qid, per_metric] : per_query) {
                out += std::string(metric_name(m)) + "\t" + std::to_string(cutoffs[c]) + "\t" +
                       qid + "\t" + format_double(per_metric.at(m)[c]) + "\n";
            }
            out += std::string(metric_name(m)) + "\t" + std::to_string(cutoffs[c]) +
                   "\tall\t" + format_double(mean.at(m)[c]) + "\n";
        }
    }
    return out;
}

nlohmann::json MetricReport::to_json() const {
    nlohmann::json j;
    j["rel_threshold"] = rel_threshold;
    auto label = [&](Metric m, size_t c) {
        return std::string(metric_name(m)) + "@" + std::to_string(cutoffs[c]);
    };
    for (const auto& [qid, per_metric] : per_query)
        for (Metric m : kAllMetrics)
            for (size_t c = 0; c < cutoffs.size(); ++c)
                j["per_query"][qid][label(m, c)] = per_metric.at(m)[c];
    for (Metric m : kAllMetrics)
        for (size_t c = 0; c < cutoffs.size(); ++c) j["mean"][label(m, c)] = mean.at(m)[c];
    return j;
}

TTestResult paired_ttest(const std::vector<double>& per_query_a,
                         const std::vector<double>& per_query_b) {
    if (per_query_a.size() != per_query_b.size())
        throw argument_error("paired_ttest: unequal sample sizes");
    const size_t n = per_query_a.size();
    if (n < 2) throw argument_error("paired_ttest: need at least 2 paired samples");

    std::vector<double> diffs(n);
    for (size_t i = 0; i < n; ++i) diffs[i] = per_query_a[i] - per_query_b[i];

    double mean = 0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(n);
    double var = 0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    var /= static_cast<double>(n - 1);

    if (var == 0.0)
        throw degenerate_variance_error("paired_ttest: zero variance in differences");

    TTestResult result;
    result.t = mean / std::sqrt(var / static_cast<double>(n));
    boost::math::students_t_distribution<double> dist(static_cast<double>(n - 1));
    result.p = 2.0 * boost::math::cdf(dist, -std::abs(result.t));
    return result;
}

}  // namespace mill
