#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace mill {

/// A corpus passage: the unit of indexing and retrieval.
struct Document {
    std::string doc_id;
    std::string title;  // raw title; already folded into `text` when present
    std::string text;
};

struct Query {
    std::string query_id;
    std::string text;
};

using DocumentSink = std::function<void(Document&&)>;

struct IngestOptions {
    /// When true, the first malformed record aborts ingestion with data_error.
    /// Otherwise malformed records are skipped and reported to `on_bad_record`.
    bool strict = false;
    /// Callback for skipped records: (1-based line number, reason).
    std::function<void(size_t, const std::string&)> on_bad_record;
};

/// Reads a JSONL corpus: one object per line with `_id` and `text` fields,
/// `title` optional. Title and text are joined with a single space.
/// Returns the number of documents yielded.
size_t ingest_jsonl(const std::filesystem::path& path, const DocumentSink& sink,
                    const IngestOptions& options = {});

/// Reads a 2-column TSV corpus: `doc_id<TAB>text`.
size_t ingest_tsv(const std::filesystem::path& path, const DocumentSink& sink,
                  const IngestOptions& options = {});

std::vector<Document> read_corpus(const std::filesystem::path& path, const std::string& format,
                                  const IngestOptions& options = {});

/// Queries as TSV `qid<TAB>text` or JSONL with `_id` and `text`.
/// `format` is "tsv", "jsonl", or "auto" (by file extension).
std::vector<Query> read_queries(const std::filesystem::path& path,
                                const std::string& format = "auto",
                                const IngestOptions& options = {});

}  // namespace mill
