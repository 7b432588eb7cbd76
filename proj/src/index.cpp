#include "mill/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "mill/errors.hpp"
#include "mill/util.hpp"

namespace mill {
namespace {

constexpr char kMagic[8] = {'M', 'I', 'L', 'L', 'I', 'D', 'X', '\1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw data_error("truncated index file");
    return v;
}

void put_str(std::ostream& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& in) {
    auto len = get<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw data_error("truncated index file");
    return s;
}

}  // namespace

void BM25Params::validate() const {
    if (k1 < 0) throw argument_error("bm25: k1 must be >= 0");
    if (k3 < 0) throw argument_error("bm25: k3 must be >= 0");
    if (b < 0 || b > 1) throw argument_error("bm25: b must be in [0,1]");
}

PostingsIndex PostingsIndex::build_from(const std::vector<Document>& docs,
                                        const AnalyzerConfig& analyzer) {
    return build(
        [&](const DocumentSink& sink) {
            for (const Document& d : docs) sink(Document(d));
        },
        analyzer);
}

void PostingsIndex::add_document(const Document& doc) {
    if (doc_ordinals_.contains(doc.doc_id))
        throw data_error("duplicate doc_id: " + doc.doc_id);
    auto ordinal = static_cast<std::uint32_t>(doc_ids_.size());
    doc_ordinals_.emplace(doc.doc_id, ordinal);
    doc_ids_.push_back(doc.doc_id);
    doc_texts_.push_back(doc.text);

    std::vector<std::string> tokens = analyze(doc.text, analyzer_);
    doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));

    std::unordered_map<std::string, std::uint32_t> tf;
    for (std::string& t : tokens) ++tf[std::move(t)];
    for (auto& [term, freq] : tf) postings_[term].push_back(Posting{ordinal, freq});
}

void PostingsIndex::finalize() {
    if (doc_ids_.empty()) throw data_error("empty corpus");
    // Documents arrive in order, so postings are already sorted by ordinal;
    // enforce it anyway so the invariant survives refactors.
    std::uint64_t total = 0;
    for (std::uint32_t len : doc_lengths_) total += len;
    avg_doc_length_ = static_cast<double>(total) / static_cast<double>(doc_ids_.size());
    for (auto& [term, plist] : postings_)
        std::sort(plist.begin(), plist.end(),
                  [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
}

std::uint32_t PostingsIndex::ordinal_or_throw(const std::string& doc_id) const {
    auto it = doc_ordinals_.find(doc_id);
    if (it == doc_ordinals_.end()) throw argument_error("unknown doc_id: " + doc_id);
    return it->second;
}

const std::string& PostingsIndex::doc_text(const std::string& doc_id) const {
    return doc_texts_[ordinal_or_throw(doc_id)];
}

std::uint32_t PostingsIndex::doc_length(const std::string& doc_id) const {
    return doc_lengths_[ordinal_or_throw(doc_id)];
}

size_t PostingsIndex::document_frequency(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

const std::vector<PostingsIndex::Posting>* PostingsIndex::postings(
    const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

RankedList PostingsIndex::search(const std::vector<std::string>& query_tokens, long k,
                                 const BM25Params& params) const {
    if (k < 1) throw argument_error("bm25_search: k must be >= 1");
    params.validate();

    // Query term frequencies feed the k3 saturation term; repeated query
    // terms raise a term's weight without changing single-term rankings.
    std::unordered_map<std::string, std::uint32_t> qtf;
    for (const std::string& t : query_tokens) ++qtf[t];

    const double n_docs = static_cast<double>(doc_count());
    std::unordered_map<std::uint32_t, double> accum;
    for (const auto& [term, freq] : qtf) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& plist = it->second;
        const double df = static_cast<double>(plist.size());
        const double idf = std::log1p((n_docs - df + 0.5) / (df + 0.5));
        const double query_weight =
            ((params.k3 + 1.0) * freq) / (params.k3 + static_cast<double>(freq));
        for (const Posting& p : plist) {
            const double tf = static_cast<double>(p.tf);
            const double norm =
                params.k1 * (1.0 - params.b +
                             params.b * doc_lengths_[p.doc] / avg_doc_length_);
            accum[p.doc] += idf * ((params.k1 + 1.0) * tf) / (norm + tf) * query_weight;
        }
    }

    std::vector<std::pair<std::uint32_t, double>> hits(accum.begin(), accum.end());
    auto better = [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return doc_ids_[a.first] < doc_ids_[b.first];
    };
    size_t keep = std::min(static_cast<size_t>(k), hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep),
                      hits.end(), better);
    hits.resize(keep);

    RankedList out;
    out.entries.reserve(hits.size());
    for (const auto& [ordinal, score] : hits)
        out.entries.push_back(ScoredDoc{doc_ids_[ordinal], score});
    return out;
}

void PostingsIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot write index file: " + path.string());

    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kVersion);
    put<std::uint8_t>(out, analyzer_.lowercase);
    put<std::uint8_t>(out, analyzer_.remove_stopwords);
    put<std::uint8_t>(out, analyzer_.stem);
    put<std::uint64_t>(out, analyzer_hash(analyzer_));
    put<std::uint64_t>(out, doc_ids_.size());
    put<double>(out, avg_doc_length_);
    for (size_t i = 0; i < doc_ids_.size(); ++i) {
        put_str(out, doc_ids_[i]);
        put_str(out, doc_texts_[i]);
        put<std::uint32_t>(out, doc_lengths_[i]);
    }
    // Terms in sorted order: the file is byte-deterministic for a corpus.
    std::map<std::string_view, const std::vector<Posting>*> sorted;
    for (const auto& [term, plist] : postings_) sorted.emplace(term, &plist);
    put<std::uint64_t>(out, sorted.size());
    for (const auto& [term, plist] : sorted) {
        put_str(out, std::string(term));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(plist->size()));
        for (const Posting& p : *plist) {
            put<std::uint32_t>(out, p.doc);
            put<std::uint32_t>(out, p.tf);
        }
    }
    if (!out) throw data_error("short write to index file: " + path.string());
}

PostingsIndex PostingsIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open index file: " + path.string());

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw data_error("not an index file: " + path.string());
    auto version = get<std::uint32_t>(in);
    if (version != kVersion)
        throw data_error("unsupported index version " + std::to_string(version));

    AnalyzerConfig analyzer;
    analyzer.lowercase = get<std::uint8_t>(in) != 0;
    analyzer.remove_stopwords = get<std::uint8_t>(in) != 0;
    analyzer.stem = get<std::uint8_t>(in) != 0;
    auto stored_hash = get<std::uint64_t>(in);
    if (stored_hash != analyzer_hash(analyzer))
        throw data_error("index analyzer hash mismatch (stopword list or stemmer changed?)");

    PostingsIndex index(analyzer);
    auto n_docs = get<std::uint64_t>(in);
    index.avg_doc_length_ = get<double>(in);
    index.doc_ids_.reserve(n_docs);
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        std::string id = get_str(in);
        std::string text = get_str(in);
        auto len = get<std::uint32_t>(in);
        index.doc_ordinals_.emplace(id, static_cast<std::uint32_t>(i));
        index.doc_ids_.push_back(std::move(id));
        index.doc_texts_.push_back(std::move(text));
        index.doc_lengths_.push_back(len);
    }
    auto n_terms = get<std::uint64_t>(in);
    for (std::uint64_t t = 0; t < n_terms; ++t) {
        std::string term = get_str(in);
        auto df = get<std::uint32_t>(in);
        std::vector<Posting> plist(df);
        for (auto& p : plist) {
            p.doc = get<std::uint32_t>(in);
            p.tf = get<std::uint32_t>(in);
        }
        index.postings_.emplace(std::move(term), std::move(plist));
    }
    if (index.doc_ids_.empty()) throw data_error("empty corpus");
    return index;
}

}  // namespace mill
