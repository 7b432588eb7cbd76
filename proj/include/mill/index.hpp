#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "mill/analyzer.hpp"
#include "mill/corpus.hpp"

namespace mill {

struct BM25Params {
    double k1 = 1.2;
    double b = 0.75;
    double k3 = 8.0;

    void validate() const;
};

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
};

/// Per-query retrieval result, descending score, ties broken by ascending
/// doc_id.
struct RankedList {
    std::string query_id;
    std::vector<ScoredDoc> entries;
};

/// Immutable in-memory inverted index with stored document text.
/// Build once, then share freely across threads: searches are pure reads.
class PostingsIndex {
public:
    struct Posting {
        std::uint32_t doc = 0;  // ordinal in insertion order
        std::uint32_t tf = 0;
    };

    /// Consumes documents from `source` (a callable invoked with a sink).
    /// Throws data_error on duplicate doc_id or an empty corpus.
    template <typename Source>
    static PostingsIndex build(Source&& source, const AnalyzerConfig& analyzer) {
        PostingsIndex index(analyzer);
        source([&](Document&& doc) { index.add_document(doc); });
        index.finalize();
        return index;
    }

    static PostingsIndex build_from(const std::vector<Document>& docs,
                                    const AnalyzerConfig& analyzer);

    RankedList search(const std::vector<std::string>& query_tokens, long k,
                      const BM25Params& params = {}) const;

    size_t doc_count() const { return doc_ids_.size(); }
    size_t term_count() const { return postings_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    const AnalyzerConfig& analyzer() const { return analyzer_; }

    bool has_doc(const std::string& doc_id) const { return doc_ordinals_.contains(doc_id); }
    const std::string& doc_text(const std::string& doc_id) const;
    std::uint32_t doc_length(const std::string& doc_id) const;
    size_t document_frequency(const std::string& term) const;
    const std::vector<Posting>* postings(const std::string& term) const;

    void save(const std::filesystem::path& path) const;
    static PostingsIndex load(const std::filesystem::path& path);

private:
    explicit PostingsIndex(const AnalyzerConfig& analyzer) : analyzer_(analyzer) {}

    void add_document(const Document& doc);
    void finalize();
    std::uint32_t ordinal_or_throw(const std::string& doc_id) const;

    AnalyzerConfig analyzer_;
    std::vector<std::string> doc_ids_;
    std::vector<std::string> doc_texts_;
    std::vector<std::uint32_t> doc_lengths_;
    std::unordered_map<std::string, std::uint32_t> doc_ordinals_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    double avg_doc_length_ = 0.0;
};

}  // namespace mill
