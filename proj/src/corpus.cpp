#include "mill/corpus.hpp"

#include <fstream>
#include <iostream>

#include <json.hpp>

#include "mill/errors.hpp"
#include "mill/util.hpp"

namespace mill {
namespace {

using nlohmann::json;

void report(const IngestOptions& options, size_t line_no, const std::string& reason) {
    if (options.strict)
        throw data_error("line " + std::to_string(line_no) + ": " + reason);
    if (options.on_bad_record)
        options.on_bad_record(line_no, reason);
    else
        std::cerr << "warning: skipping line " << line_no << ": " << reason << "\n";
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file: " + path.string());
    return in;
}

}  // namespace

size_t ingest_jsonl(const std::filesystem::path& path, const DocumentSink& sink,
                    const IngestOptions& options) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    size_t line_no = 0;
    size_t yielded = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            report(options, line_no, "malformed JSON object");
            continue;
        }
        if (!record.contains("_id") || record["_id"].is_null()) {
            report(options, line_no, "missing _id field");
            continue;
        }
        if (!record.contains("text") || !record["text"].is_string()) {
            report(options, line_no, "missing text field");
            continue;
        }
        Document doc;
        doc.doc_id = record["_id"].is_string() ? record["_id"].get<std::string>()
                                               : record["_id"].dump();
        doc.text = record["text"].get<std::string>();
        if (record.contains("title") && record["title"].is_string())
            doc.title = record["title"].get<std::string>();
        if (doc.doc_id.empty()) {
            report(options, line_no, "empty _id");
            continue;
        }
        if (!doc.title.empty()) doc.text = doc.title + " " + doc.text;
        if (trim(doc.text).empty()) {
            report(options, line_no, "empty text");
            continue;
        }
        sink(std::move(doc));
        ++yielded;
    }
    return yielded;
}

size_t ingest_tsv(const std::filesystem::path& path, const DocumentSink& sink,
                  const IngestOptions& options) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    size_t line_no = 0;
    size_t yielded = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto cols = split(line, '\t');
        if (cols.size() != 2) {
            report(options, line_no,
                   "expected 2 tab-separated columns, got " + std::to_string(cols.size()));
            continue;
        }
        if (cols[0].empty() || trim(cols[1]).empty()) {
            report(options, line_no, "empty doc_id or text");
            continue;
        }
        sink(Document{cols[0], "", cols[1]});
        ++yielded;
    }
    return yielded;
}

std::vector<Document> read_corpus(const std::filesystem::path& path, const std::string& format,
                                  const IngestOptions& options) {
    std::vector<Document> docs;
    auto sink = [&](Document&& d) { docs.push_back(std::move(d)); };
    if (format == "jsonl")
        ingest_jsonl(path, sink, options);
    else if (format == "tsv")
        ingest_tsv(path, sink, options);
    else
        throw argument_error("unknown corpus format: " + format);
    return docs;
}

std::vector<Query> read_queries(const std::filesystem::path& path, const std::string& format,
                                const IngestOptions& options) {
    std::string fmt = format;
    if (fmt == "auto")
        fmt = path.extension() == ".jsonl" || path.extension() == ".json" ? "jsonl" : "tsv";

    std::vector<Query> queries;
    auto push = [&](std::string id, std::string text, size_t line_no) {
        if (id.empty() || trim(text).empty()) {
            report(options, line_no, "empty query id or text");
            return;
        }
        queries.push_back(Query{std::move(id), std::move(text)});
    };

    if (fmt == "jsonl") {
        std::ifstream in = open_or_throw(path);
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
            if (record.is_discarded() || !record.is_object() || !record.contains("_id") ||
                !record.contains("text") || !record["text"].is_string()) {
                report(options, line_no, "malformed query record");
                continue;
            }
            std::string id = record["_id"].is_string() ? record["_id"].get<std::string>()
                                                       : record["_id"].dump();
            push(std::move(id), record["text"].get<std::string>(), line_no);
        }
    } else if (fmt == "tsv") {
        std::ifstream in = open_or_throw(path);
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            if (line.back() == '\r') line.pop_back();
            auto cols = split(line, '\t');
            if (cols.size() != 2) {
                report(options, line_no, "expected qid<TAB>text");
                continue;
            }
            push(cols[0], cols[1], line_no);
        }
    } else {
        throw argument_error("unknown query format: " + fmt);
    }
    return queries;
}

}  // namespace mill
