#include "mill/config.hpp"

#include <fstream>

#include "mill/errors.hpp"
#include "mill/util.hpp"

namespace mill {
namespace {

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw argument_error("config: bad integer for " + key + ": '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw argument_error("config: bad number for " + key + ": '" + value + "'");
    }
}

}  // namespace

bool parse_bool(const std::string& value) {
    std::string v = lowercase(value);
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw argument_error("config: bad boolean '" + value + "'");
}

void ExperimentConfig::apply_kv(const std::string& key, const std::string& value) {
    if (key == "corpus") corpus = value;
    else if (key == "corpus_format") corpus_format = value;
    else if (key == "queries") queries = value;
    else if (key == "queries_format") queries_format = value;
    else if (key == "qrels") qrels = value;
    else if (key == "index") index_path = value;
    else if (key == "output_dir") output_dir = value;
    else if (key == "lowercase") lowercase = parse_bool(value);
    else if (key == "stopwords") stopwords = parse_bool(value);
    else if (key == "stem") stem = parse_bool(value);
    else if (key == "strict") strict = parse_bool(value);
    else if (key == "method") method = value;
    else if (key == "n_candidates") n_candidates = static_cast<int>(parse_int(key, value));
    else if (key == "k_candidates") k_candidates = static_cast<int>(parse_int(key, value));
    else if (key == "n_select") n_select = static_cast<int>(parse_int(key, value));
    else if (key == "k_select") k_select = static_cast<int>(parse_int(key, value));
    else if (key == "query_repeats") query_repeats = static_cast<int>(parse_int(key, value));
    else if (key == "baseline_samples")
        baseline_samples = static_cast<int>(parse_int(key, value));
    else if (key == "ensembled_prf") ensembled_prf = static_cast<int>(parse_int(key, value));
    else if (key == "temperature") temperature = parse_real(key, value);
    else if (key == "top_p") top_p = parse_real(key, value);
    else if (key == "max_tokens") max_tokens = static_cast<int>(parse_int(key, value));
    else if (key == "bm25_k1") bm25_k1 = parse_real(key, value);
    else if (key == "bm25_b") bm25_b = parse_real(key, value);
    else if (key == "bm25_k3") bm25_k3 = parse_real(key, value);
    else if (key == "embed_truncate_chars")
        embed_truncate_chars = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "shots_file") shots_file = value;
    else if (key == "search_depth") search_depth = static_cast<int>(parse_int(key, value));
    else if (key == "backend") backend = value;
    else if (key == "llm_endpoint") llm_endpoint = value;
    else if (key == "llm_model") llm_model = value;
    else if (key == "llm_path") llm_path = value;
    else if (key == "embed_endpoint") embed_endpoint = value;
    else if (key == "embed_model") embed_model = value;
    else if (key == "embed_path") embed_path = value;
    else if (key == "embed_dim") embed_dim = static_cast<int>(parse_int(key, value));
    else if (key == "cache_dir") cache_dir = value;
    else if (key == "retry_attempts") retry_attempts = static_cast<int>(parse_int(key, value));
    else if (key == "retry_backoff_ms")
        retry_backoff_ms = static_cast<int>(parse_int(key, value));
    else if (key == "max_in_flight") max_in_flight = static_cast<int>(parse_int(key, value));
    else if (key == "mock_vocab") mock_vocab = value;
    else if (key == "mock_vocab_file") mock_vocab_file = value;
    else if (key == "mock_items") mock_items = static_cast<int>(parse_int(key, value));
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "rel_threshold") rel_threshold = static_cast<int>(parse_int(key, value));
    else if (key == "workers") workers = static_cast<int>(parse_int(key, value));
    else throw argument_error("config: unknown key '" + key + "'");
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw argument_error("cannot open config file: " + path.string());
    ExperimentConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw argument_error("config line " + std::to_string(line_no) +
                                 ": expected key = value");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        try {
            cfg.apply_kv(key, value);
        } catch (const argument_error& e) {
            throw argument_error("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

ExpansionConfig ExperimentConfig::expansion() const {
    ExpansionConfig cfg;
    cfg.method = method_spec_from_name(method);
    cfg.n_candidates = n_candidates;
    cfg.k_candidates = k_candidates;
    cfg.n_select = n_select;
    cfg.k_select = k_select;
    cfg.query_repeats = query_repeats;
    cfg.baseline_samples = baseline_samples;
    cfg.ensembled_prf = ensembled_prf;
    cfg.generation.model = llm_model;
    cfg.generation.temperature = temperature;
    cfg.generation.top_p = top_p;
    cfg.generation.max_tokens = max_tokens;
    cfg.bm25 = BM25Params{bm25_k1, bm25_b, bm25_k3};
    cfg.embed_truncate_chars = embed_truncate_chars;
    if (!shots_file.empty()) cfg.shots = load_shots(shots_file);
    return cfg;
}

std::vector<std::string> ExperimentConfig::mock_vocabulary() const {
    std::vector<std::string> vocab;
    if (!mock_vocab_file.empty()) {
        std::ifstream in(mock_vocab_file);
        if (!in) throw argument_error("cannot open mock vocab file: " + mock_vocab_file);
        std::string word;
        while (std::getline(in, word)) {
            word = trim(word);
            if (!word.empty()) vocab.push_back(word);
        }
    } else if (!mock_vocab.empty()) {
        for (const std::string& w : split(mock_vocab, ',')) {
            std::string t = trim(w);
            if (!t.empty()) vocab.push_back(t);
        }
    }
    if (vocab.empty())
        vocab = {"context", "information", "document", "relevant", "search", "answer"};
    return vocab;
}

}  // namespace mill
