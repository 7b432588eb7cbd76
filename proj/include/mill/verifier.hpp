#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mill/embedder.hpp"

namespace mill {

enum class Source { LLM, PRF };

std::string_view source_name(Source s);

/// One expansion candidate: either a generated completion or a retrieved
/// pseudo-relevance document.
struct ContextualDocument {
    std::string text;
    Source source = Source::LLM;
    /// Sample index for generated docs, retrieval rank for PRF docs (0-based).
    size_t origin_rank = 0;
    /// doc_id for PRF docs, sample tag ("s0"...) for generated docs.
    std::string label;
    std::optional<EmbeddingVector> embedding;
    std::optional<double> score;
};

struct VerificationResult {
    std::vector<ContextualDocument> selected_llm;  // descending score
    std::vector<ContextualDocument> selected_prf;  // descending score
    std::vector<double> llm_scores;                // indexed by sample order
    std::vector<double> prf_scores;                // indexed by retrieval rank
};

/// Scores each generated vector by its summed cosine similarity against all
/// PRF vectors, order-preserving.
std::vector<double> score_generated(const std::vector<EmbeddingVector>& llm_vecs,
                                    const std::vector<EmbeddingVector>& prf_vecs);

/// Symmetric: scores each PRF vector against all generated vectors.
std::vector<double> score_prf(const std::vector<EmbeddingVector>& prf_vecs,
                              const std::vector<EmbeddingVector>& llm_vecs);

/// Top-m documents by descending score; ties break toward the lower
/// origin_rank. Returns min(m, |docs|) entries with scores filled in.
std::vector<ContextualDocument> select_top(const std::vector<ContextualDocument>& docs,
                                           const std::vector<double>& scores, size_t m);

/// Full reciprocal selection: embeds every candidate, scores both sides,
/// keeps the top n_select generated and top k_select PRF documents.
VerificationResult mutual_verify(const std::vector<ContextualDocument>& llm_docs,
                                 const std::vector<ContextualDocument>& prf_docs,
                                 size_t n_select, size_t k_select, Embedder& embedder,
                                 size_t truncate_chars = 8000);

}  // namespace mill
