#include "mill/verifier.hpp"

#include <algorithm>
#include <numeric>

#include "mill/errors.hpp"

namespace mill {

std::string_view source_name(Source s) { return s == Source::LLM ? "llm" : "prf"; }

std::vector<double> score_generated(const std::vector<EmbeddingVector>& llm_vecs,
                                    const std::vector<EmbeddingVector>& prf_vecs) {
    if (prf_vecs.empty())
        throw argument_error("score_generated: no PRF vectors to verify against");
    std::vector<double> scores;
    scores.reserve(llm_vecs.size());
    for (const EmbeddingVector& lv : llm_vecs) {
        double s = 0;
        for (const EmbeddingVector& pv : prf_vecs) s += cosine_sim(lv, pv);
        scores.push_back(s);
    }
    return scores;
}

std::vector<double> score_prf(const std::vector<EmbeddingVector>& prf_vecs,
                              const std::vector<EmbeddingVector>& llm_vecs) {
    if (llm_vecs.empty())
        throw argument_error("score_prf: no generated vectors to verify against");
    std::vector<double> scores;
    scores.reserve(prf_vecs.size());
    for (const EmbeddingVector& pv : prf_vecs) {
        double s = 0;
        for (const EmbeddingVector& lv : llm_vecs) s += cosine_sim(pv, lv);
        scores.push_back(s);
    }
    return scores;
}

std::vector<ContextualDocument> select_top(const std::vector<ContextualDocument>& docs,
                                           const std::vector<double>& scores, size_t m) {
    if (docs.size() != scores.size())
        throw argument_error("select_top: " + std::to_string(docs.size()) + " docs vs " +
                             std::to_string(scores.size()) + " scores");
    if (m < 1) throw argument_error("select_top: m must be >= 1");

    std::vector<size_t> order(docs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return docs[a].origin_rank < docs[b].origin_rank;
    });
    order.resize(std::min(m, order.size()));

    std::vector<ContextualDocument> selected;
    selected.reserve(order.size());
    for (size_t i : order) {
        ContextualDocument doc = docs[i];
        doc.score = scores[i];
        selected.push_back(std::move(doc));
    }
    return selected;
}

VerificationResult mutual_verify(const std::vector<ContextualDocument>& llm_docs,
                                 const std::vector<ContextualDocument>& prf_docs,
                                 size_t n_select, size_t k_select, Embedder& embedder,
                                 size_t truncate_chars) {
    if (llm_docs.empty()) throw argument_error("mutual_verify: no generated candidates");
    if (prf_docs.empty()) throw argument_error("mutual_verify: no PRF candidates");
    if (n_select < 1 || k_select < 1)
        throw argument_error("mutual_verify: selection sizes must be >= 1");

    auto embed_all = [&](const std::vector<ContextualDocument>& docs) {
        std::vector<EmbeddingVector> vecs;
        vecs.reserve(docs.size());
        for (const ContextualDocument& d : docs) {
            if (d.embedding) {
                vecs.push_back(*d.embedding);
            } else {
                // Whole-document embedding, truncated from the front to the
                // backend input limit.
                vecs.push_back(embedder.embed(d.text.size() > truncate_chars
                                                  ? d.text.substr(0, truncate_chars)
                                                  : d.text));
            }
        }
        return vecs;
    };

    std::vector<EmbeddingVector> llm_vecs = embed_all(llm_docs);
    std::vector<EmbeddingVector> prf_vecs = embed_all(prf_docs);

    VerificationResult result;
    result.llm_scores = score_generated(llm_vecs, prf_vecs);
    result.prf_scores = score_prf(prf_vecs, llm_vecs);
    result.selected_llm = select_top(llm_docs, result.llm_scores, n_select);
    result.selected_prf = select_top(prf_docs, result.prf_scores, k_select);
    return result;
}

}  // namespace mill
