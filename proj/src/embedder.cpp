#include "mill/embedder.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mill/analyzer.hpp"
#include "mill/errors.hpp"
#include "mill/util.hpp"

namespace mill {

using nlohmann::json;

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size())
        throw argument_error("cosine_sim: dimension mismatch (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + ")");
    if (a.empty()) throw argument_error("cosine_sim: empty vectors");
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) throw argument_error("cosine_sim: zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::string embedding_cache_key(Backend backend, const std::string& model,
                                const std::string& text) {
    return DigestBuilder().field(backend_name(backend)).field(model).field(text).hex();
}

EmbeddingVector mock_embed(const std::string& text, size_t dim) {
    if (dim < 2) throw argument_error("mock_embed: dim must be >= 2");
    AnalyzerConfig plain{.lowercase = true, .remove_stopwords = false, .stem = false};
    std::vector<std::string> tokens = analyze(text, plain);
    if (tokens.empty()) throw argument_error("mock_embed: text has no tokens");

    EmbeddingVector v(dim, 0.0);
    for (const std::string& t : tokens) v[fnv1a64(t) % dim] += 1.0;
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

MockEmbedder::MockEmbedder(size_t dim) : dim_(dim) {
    if (dim_ < 2) throw argument_error("mock embedder: dim must be >= 2");
}

EmbeddingVector MockEmbedder::embed(const std::string& text) {
    if (text.empty()) throw argument_error("embed: empty text");
    return mock_embed(text, dim_);
}

std::string MockEmbedder::model() const { return "hashed-bow-" + std::to_string(dim_); }

struct RemoteEmbedder::Impl {
    Options opt;
    std::counting_semaphore<> slots;

    explicit Impl(Options o) : opt(std::move(o)), slots(std::max(1, opt.max_in_flight)) {}
};

RemoteEmbedder::RemoteEmbedder(Options options)
    : impl_(std::make_unique<Impl>(std::move(options))) {
    if (impl_->opt.endpoint.empty())
        throw argument_error("remote embedder: endpoint not configured");
}

RemoteEmbedder::~RemoteEmbedder() = default;

std::string RemoteEmbedder::model() const { return impl_->opt.model; }

EmbeddingVector RemoteEmbedder::embed(const std::string& text) {
    if (text.empty()) throw argument_error("embed: empty text");
    impl_->slots.acquire();
    struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
    } release{impl_->slots};

    json body = {{"model", impl_->opt.model}, {"input", text}};
    httplib::Headers headers;
    if (!impl_->opt.api_key.empty())
        headers.emplace("Authorization", "Bearer " + impl_->opt.api_key);

    const RetryPolicy& retry = impl_->opt.retry;
    std::string last_error;
    for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
        httplib::Client client(impl_->opt.endpoint);
        client.set_read_timeout(120, 0);
        auto res = client.Post(impl_->opt.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            std::cerr << "warning: embedding attempt " << attempt << "/" << retry.max_attempts
                      << " failed: " << last_error << "\n";
            if (attempt < retry.max_attempts)
                std::this_thread::sleep_for(retry.initial_backoff * (1 << (attempt - 1)));
            continue;
        }
        if (res->status < 200 || res->status >= 300)
            throw backend_error("embeddings endpoint returned HTTP " +
                                std::to_string(res->status) + ": " + res->body);
        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("data") || !reply["data"].is_array() ||
            reply["data"].empty() || !reply["data"][0].contains("embedding"))
            throw backend_error("malformed embeddings response: " + res->body);
        EmbeddingVector v = reply["data"][0]["embedding"].get<EmbeddingVector>();
        if (v.empty()) throw backend_error("empty embedding vector in response");
        return v;
    }
    throw backend_error("transport error after " + std::to_string(retry.max_attempts) +
                        " attempts: " + last_error);
}

CachingEmbedder::CachingEmbedder(Embedder& inner, std::filesystem::path cache_file)
    : inner_(inner), cache_(std::move(cache_file)) {}

EmbeddingVector CachingEmbedder::embed(const std::string& text) {
    if (text.empty()) throw argument_error("embed: empty text");
    const std::string key = embedding_cache_key(inner_.backend(), inner_.model(), text);
    if (auto hit = cache_.get(key)) return (*hit)["embedding"].get<EmbeddingVector>();
    EmbeddingVector v = inner_.embed(text);
    json entry = {
        {"request", {{"model", inner_.model()}, {"input", text}}},
        {"embedding", v},
        {"backend", std::string(backend_name(inner_.backend()))},
    };
    cache_.put(key, std::move(entry));
    return v;
}

}  // namespace mill
