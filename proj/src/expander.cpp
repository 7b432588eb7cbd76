#include "mill/expander.hpp"

#include <algorithm>
#include <iostream>

#include "mill/errors.hpp"
#include "mill/util.hpp"

namespace mill {
namespace {

std::string normalize_method_name(std::string_view name) {
    std::string s = lowercase(name);
    for (char& c : s)
        if (c == '_' || c == ' ') c = '-';
    // Accept the "w/o" spelling used in ablation write-ups.
    size_t pos;
    while ((pos = s.find("w/o-")) != std::string::npos) s.replace(pos, 4, "wo-");
    while ((pos = s.find("w/o")) != std::string::npos) s.replace(pos, 3, "wo-");
    return s;
}

std::vector<ContextualDocument> generated_candidates(const std::string& prompt,
                                                     const GenerationParams& params,
                                                     int count, Generator& generator) {
    std::vector<ContextualDocument> docs;
    docs.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        GenerationRequest req;
        req.prompt = prompt;
        req.model = params.model;
        req.temperature = params.temperature;
        req.top_p = params.top_p;
        req.max_tokens = params.max_tokens;
        req.seed_tag = "s" + std::to_string(i);
        GenerationResponse resp = generator.generate(req);
        if (resp.text.empty())
            throw backend_error("empty completion for sample " + req.seed_tag);
        docs.push_back(ContextualDocument{std::move(resp.text), Source::LLM,
                                          static_cast<size_t>(i), req.seed_tag, {}, {}});
    }
    return docs;
}

std::vector<ContextualDocument> prf_candidates(const Query& q, const ExpansionConfig& cfg,
                                               const PostingsIndex& index, int count) {
    std::vector<std::string> tokens = analyze(q.text, index.analyzer());
    RankedList ranked = index.search(tokens, std::max(count, 1), cfg.bm25);
    std::vector<ContextualDocument> docs;
    docs.reserve(ranked.entries.size());
    for (size_t rank = 0; rank < ranked.entries.size(); ++rank) {
        const std::string& id = ranked.entries[rank].doc_id;
        docs.push_back(
            ContextualDocument{index.doc_text(id), Source::PRF, rank, id, {}, {}});
    }
    return docs;
}

CandidateRecord to_candidate(const ContextualDocument& doc, std::optional<double> score,
                             bool selected) {
    return CandidateRecord{doc.label, doc.origin_rank, score, selected, doc.text};
}

void record_candidates(Provenance& prov, const std::vector<ContextualDocument>& llm,
                       const std::vector<double>* llm_scores,
                       const std::vector<ContextualDocument>& prf,
                       const std::vector<double>* prf_scores) {
    auto selected_ids = [&](const std::vector<ProvenanceComponent>& comps,
                            std::string_view source) {
        std::vector<std::string> ids;
        for (const ProvenanceComponent& c : comps)
            if (c.source == source) ids.push_back(c.id);
        return ids;
    };
    std::vector<std::string> llm_sel = selected_ids(prov.components, "llm");
    std::vector<std::string> prf_sel = selected_ids(prov.components, "prf");
    for (size_t i = 0; i < llm.size(); ++i) {
        std::optional<double> s;
        if (llm_scores) s = (*llm_scores)[i];
        bool sel = std::find(llm_sel.begin(), llm_sel.end(), llm[i].label) != llm_sel.end();
        prov.llm_candidates.push_back(to_candidate(llm[i], s, sel));
    }
    for (size_t i = 0; i < prf.size(); ++i) {
        std::optional<double> s;
        if (prf_scores) s = (*prf_scores)[i];
        bool sel = std::find(prf_sel.begin(), prf_sel.end(), prf[i].label) != prf_sel.end();
        prov.prf_candidates.push_back(to_candidate(prf[i], s, sel));
    }
}

template <typename Fn>
auto with_query_context(const std::string& query_id, Fn&& fn) {
    try {
        return fn();
    } catch (const argument_error& e) {
        throw argument_error("query " + query_id + ": " + e.what());
    } catch (const data_error& e) {
        throw data_error("query " + query_id + ": " + e.what());
    } catch (const backend_error& e) {
        throw backend_error("query " + query_id + ": " + e.what());
    }
}

}  // namespace

std::string method_spec_name(const MethodSpec& spec) {
    switch (spec.method) {
        case Method::NoExpansion: return "no-expansion";
        case Method::Mill: return "mill";
        case Method::WithoutPrf: return "wo-prf";
        case Method::WithoutMv: return "wo-mv";
        case Method::WithoutQqd: return "wo-qqd";
        case Method::Baseline: return std::string(prompt_kind_name(spec.kind));
        case Method::Ensembled: return std::string(prompt_kind_name(spec.kind)) + "-ens";
    }
    return "?";
}

MethodSpec method_spec_from_name(std::string_view name) {
    std::string s = normalize_method_name(name);
    if (s == "no-expansion" || s == "none") return {Method::NoExpansion, {}};
    if (s == "mill") return {Method::Mill, {}};
    if (s == "wo-prf") return {Method::WithoutPrf, {}};
    if (s == "wo-mv") return {Method::WithoutMv, {}};
    if (s == "wo-qqd") return {Method::WithoutQqd, {}};
    if (s.size() > 4 && s.ends_with("-ens"))
        return {Method::Ensembled, prompt_kind_from_name(s.substr(0, s.size() - 4))};
    return {Method::Baseline, prompt_kind_from_name(s)};
}

void ExpansionConfig::validate() const {
    if (n_candidates < 1 || k_candidates < 1)
        throw argument_error("expansion: candidate counts must be >= 1");
    if (n_select < 1 || k_select < 1)
        throw argument_error("expansion: selection counts must be >= 1");
    if (n_select > n_candidates)
        throw argument_error("expansion: n_select exceeds n_candidates");
    if (k_select > k_candidates)
        throw argument_error("expansion: k_select exceeds k_candidates");
    if (query_repeats < 1) throw argument_error("expansion: query_repeats must be >= 1");
    if (baseline_samples < 1)
        throw argument_error("expansion: baseline_samples must be >= 1");
    if (ensembled_prf < 1) throw argument_error("expansion: ensembled_prf must be >= 1");
    bm25.validate();
}

nlohmann::json Provenance::to_json() const {
    nlohmann::json j;
    j["method"] = method;
    j["original"] = original;
    j["repeats"] = repeats;
    auto comp_json = [](const ProvenanceComponent& c) {
        nlohmann::json cj{{"source", c.source},
                          {"id", c.id},
                          {"origin_rank", c.origin_rank},
                          {"text", c.text}};
        if (c.score) cj["score"] = *c.score;
        return cj;
    };
    auto cand_json = [](const CandidateRecord& c) {
        nlohmann::json cj{{"id", c.id},
                          {"origin_rank", c.origin_rank},
                          {"selected", c.selected},
                          {"text", c.text}};
        if (c.score) cj["score"] = *c.score;
        return cj;
    };
    j["components"] = nlohmann::json::array();
    for (const auto& c : components) j["components"].push_back(comp_json(c));
    j["llm_candidates"] = nlohmann::json::array();
    for (const auto& c : llm_candidates) j["llm_candidates"].push_back(cand_json(c));
    j["prf_candidates"] = nlohmann::json::array();
    for (const auto& c : prf_candidates) j["prf_candidates"].push_back(cand_json(c));
    return j;
}

ExpandedQuery compose(const Query& q, const std::vector<ContextualDocument>& prf_sel,
                      const std::vector<ContextualDocument>& llm_sel, int repeats) {
    if (repeats < 1) throw argument_error("compose: repeats must be >= 1");

    ExpandedQuery out;
    out.query_id = q.query_id;
    out.provenance.original = q.text;
    out.provenance.repeats = repeats;

    std::string text;
    for (int i = 0; i < repeats; ++i) {
        if (i) text += " ";
        text += q.text;
    }
    auto append = [&](const ContextualDocument& doc) {
        text += " ";
        text += doc.text;
        out.provenance.components.push_back(ProvenanceComponent{
            std::string(source_name(doc.source)), doc.label, doc.origin_rank, doc.score,
            doc.text});
    };
    for (const ContextualDocument& doc : prf_sel) append(doc);
    for (const ContextualDocument& doc : llm_sel) append(doc);
    out.text = std::move(text);
    return out;
}

ExpandedQuery expand(const Query& q, const ExpansionConfig& cfg, const PostingsIndex& index,
                     Generator& generator, Embedder& embedder) {
    return with_query_context(q.query_id, [&]() -> ExpandedQuery {
        cfg.validate();
        const Method method = cfg.method.method;

        if (method == Method::NoExpansion) {
            ExpandedQuery out = compose(q, {}, {}, 1);
            out.provenance.method = method_spec_name(cfg.method);
            return out;
        }

        auto shots_for = [&](PromptKind kind) -> std::vector<FewShotExample> {
            if (!prompt_kind_needs_shots(kind)) return {};
            return cfg.shots.empty() ? default_shots(kind) : cfg.shots;
        };
        auto prf_texts_for_prompt = [&](PromptKind kind) -> std::vector<std::string> {
            if (!prompt_kind_needs_prf(kind)) return {};
            std::vector<ContextualDocument> docs = prf_candidates(q, cfg, index, 3);
            std::vector<std::string> texts;
            for (const ContextualDocument& d : docs) texts.push_back(d.text);
            return texts;
        };
        auto qqd_like_prompt = [&](PromptKind kind) {
            return build_prompt(kind, q.text, shots_for(kind), prf_texts_for_prompt(kind));
        };

        ExpandedQuery out;
        switch (method) {
            case Method::Mill:
            case Method::WithoutQqd: {
                const PromptKind kind =
                    method == Method::Mill ? PromptKind::QQD : PromptKind::Query2Doc;
                std::vector<ContextualDocument> samples = generated_candidates(
                    qqd_like_prompt(kind), cfg.generation, cfg.n_candidates, generator);
                std::vector<ContextualDocument> prf =
                    prf_candidates(q, cfg, index, cfg.k_candidates);
                if (prf.empty()) {
                    std::cerr << "warning: query " << q.query_id
                              << ": no PRF documents retrieved; expanding without PRF\n";
                    std::vector<ContextualDocument> first(
                        samples.begin(),
                        samples.begin() +
                            std::min<size_t>(samples.size(),
                                             static_cast<size_t>(cfg.n_select)));
                    out = compose(q, {}, first, cfg.query_repeats);
                    record_candidates(out.provenance, samples, nullptr, prf, nullptr);
                    break;
                }
                VerificationResult mv = mutual_verify(
                    samples, prf, static_cast<size_t>(cfg.n_select),
                    static_cast<size_t>(cfg.k_select), embedder, cfg.embed_truncate_chars);
                out = compose(q, mv.selected_prf, mv.selected_llm, cfg.query_repeats);
                record_candidates(out.provenance, samples, &mv.llm_scores, prf,
                                  &mv.prf_scores);
                break;
            }
            case Method::WithoutPrf: {
                std::vector<ContextualDocument> samples =
                    generated_candidates(qqd_like_prompt(PromptKind::QQD), cfg.generation,
                                         cfg.n_candidates, generator);
                // No scores exist here, so the first n_select samples are used.
                std::vector<ContextualDocument> first(
                    samples.begin(),
                    samples.begin() + std::min<size_t>(samples.size(),
                                                       static_cast<size_t>(cfg.n_select)));
                out = compose(q, {}, first, cfg.query_repeats);
                record_candidates(out.provenance, samples, nullptr, {}, nullptr);
                break;
            }
            case Method::WithoutMv: {
                std::vector<ContextualDocument> samples =
                    generated_candidates(qqd_like_prompt(PromptKind::QQD), cfg.generation,
                                         cfg.n_select, generator);
                std::vector<ContextualDocument> prf =
                    prf_candidates(q, cfg, index, cfg.k_select);
                out = compose(q, prf, samples, cfg.query_repeats);
                record_candidates(out.provenance, samples, nullptr, prf, nullptr);
                break;
            }
            case Method::Baseline:
            case Method::Ensembled: {
                const PromptKind kind = cfg.method.kind;
                std::vector<ContextualDocument> samples = generated_candidates(
                    qqd_like_prompt(kind), cfg.generation, cfg.baseline_samples, generator);
                std::vector<ContextualDocument> prf;
                if (method == Method::Ensembled)
                    prf = prf_candidates(q, cfg, index, cfg.ensembled_prf);
                // Baselines put completions before any appended PRF documents.
                out = compose(q, {}, samples, cfg.query_repeats);
                for (const ContextualDocument& doc : prf) {
                    out.text += " ";
                    out.text += doc.text;
                    out.provenance.components.push_back(ProvenanceComponent{
                        std::string(source_name(doc.source)), doc.label, doc.origin_rank,
                        doc.score, doc.text});
                }
                record_candidates(out.provenance, samples, nullptr, prf, nullptr);
                break;
            }
            case Method::NoExpansion:
                break;  // handled above
        }
        out.provenance.method = method_spec_name(cfg.method);
        return out;
    });
}

}  // namespace mill
