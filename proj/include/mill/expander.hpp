#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mill/corpus.hpp"
#include "mill/embedder.hpp"
#include "mill/index.hpp"
#include "mill/llm.hpp"
#include "mill/prompts.hpp"
#include "mill/verifier.hpp"

namespace mill {

enum class Method {
    NoExpansion,  // control: the query itself, unrepeated
    Mill,         // generation + PRF + mutual verification
    WithoutPrf,   // ablation: generated documents only
    WithoutMv,    // ablation: top-retrieved PRF + generated, no verification
    WithoutQqd,   // ablation: mutual verification over plain passage prompts
    Baseline,     // a single prompt kind, sampled and concatenated
    Ensembled,    // baseline plus top PRF documents appended
};

struct MethodSpec {
    Method method = Method::Mill;
    PromptKind kind = PromptKind::Query2Doc;  // for Baseline/Ensembled
};

std::string method_spec_name(const MethodSpec& spec);
MethodSpec method_spec_from_name(std::string_view name);

struct GenerationParams {
    std::string model = "gpt-3.5-turbo-instruct";
    double temperature = 0.7;
    double top_p = 1.0;
    int max_tokens = 512;
};

/// Every knob of the expansion pipeline.
struct ExpansionConfig {
    MethodSpec method;
    int n_candidates = 5;      // generated candidates N
    int k_candidates = 5;      // PRF candidates K
    int n_select = 3;          // selected generated documents N'
    int k_select = 3;          // selected PRF documents K'
    int query_repeats = 5;
    int baseline_samples = 3;  // completions per baseline expansion
    int ensembled_prf = 3;     // PRF documents appended by ensembled variants
    GenerationParams generation;
    BM25Params bm25;
    size_t embed_truncate_chars = 8000;
    std::vector<FewShotExample> shots;  // few-shot kinds; bundled defaults if empty

    void validate() const;
};

struct CandidateRecord {
    std::string id;  // doc_id or sample tag
    size_t origin_rank = 0;
    std::optional<double> score;  // verification score, when computed
    bool selected = false;
    std::string text;
};

struct ProvenanceComponent {
    std::string source;  // "prf" or "llm"
    std::string id;
    size_t origin_rank = 0;
    std::optional<double> score;
    std::string text;
};

/// Full account of how an expanded query was assembled: every component of
/// the final text plus the candidate pools it was selected from.
struct Provenance {
    std::string method;
    std::string original;
    int repeats = 1;
    std::vector<ProvenanceComponent> components;  // in text order, after the repeats
    std::vector<CandidateRecord> llm_candidates;
    std::vector<CandidateRecord> prf_candidates;

    nlohmann::json to_json() const;
};

struct ExpandedQuery {
    std::string query_id;
    std::string text;
    Provenance provenance;
};

/// Space-joins `repeats` copies of the query, then the selected PRF texts,
/// then the selected generated texts.
ExpandedQuery compose(const Query& q, const std::vector<ContextualDocument>& prf_sel,
                      const std::vector<ContextualDocument>& llm_sel, int repeats);

/// Runs the configured per-query pipeline end to end.
ExpandedQuery expand(const Query& q, const ExpansionConfig& cfg, const PostingsIndex& index,
                     Generator& generator, Embedder& embedder);

}  // namespace mill
