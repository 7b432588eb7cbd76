#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mill/expander.hpp"

namespace mill {

/// Everything a batch experiment needs: data paths, analyzer toggles,
/// expansion knobs, backend settings. Loaded from a key=value config file;
/// command-line flags override individual keys afterwards.
struct ExperimentConfig {
    // data
    std::string corpus;
    std::string corpus_format = "jsonl";  // jsonl | tsv
    std::string queries;
    std::string queries_format = "auto";  // auto | tsv | jsonl
    std::string qrels;
    std::string index_path = "index.bin";
    std::string output_dir = "out";

    // analyzer (fixed at index build; query analysis follows the index header)
    bool lowercase = true;
    bool stopwords = true;
    bool stem = true;

    bool strict = false;  // abort on malformed records / failed queries

    // expansion
    std::string method = "mill";
    int n_candidates = 5;
    int k_candidates = 5;
    int n_select = 3;
    int k_select = 3;
    int query_repeats = 5;
    int baseline_samples = 3;
    int ensembled_prf = 3;
    double temperature = 0.7;
    double top_p = 1.0;
    int max_tokens = 512;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;
    double bm25_k3 = 8.0;
    std::uint64_t embed_truncate_chars = 8000;
    std::string shots_file;

    int search_depth = 1000;

    // backends
    std::string backend = "mock";  // mock | remote
    std::string llm_endpoint;
    std::string llm_model = "gpt-3.5-turbo-instruct";
    std::string llm_path = "/v1/completions";
    std::string embed_endpoint;
    std::string embed_model = "text-embedding-ada-002";
    std::string embed_path = "/v1/embeddings";
    int embed_dim = 256;  // mock embedding dimension
    std::string cache_dir;
    int retry_attempts = 3;
    int retry_backoff_ms = 100;
    int max_in_flight = 4;

    // mock backend behavior; all mock randomness flows from `seed`
    std::string mock_vocab;  // comma-separated words
    std::string mock_vocab_file;
    int mock_items = 4;
    std::uint64_t seed = 0;

    // evaluation
    int rel_threshold = 1;

    int workers = 0;  // 0 = hardware concurrency

    /// Applies one key=value pair; throws argument_error on unknown keys or
    /// unparseable values.
    void apply_kv(const std::string& key, const std::string& value);

    static ExperimentConfig from_file(const std::filesystem::path& path);

    ExpansionConfig expansion() const;
    std::vector<std::string> mock_vocabulary() const;
};

bool parse_bool(const std::string& value);

}  // namespace mill
