#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mill/cache.hpp"
#include "mill/llm.hpp"

namespace mill {

using EmbeddingVector = std::vector<double>;

/// Cosine similarity in [-1, 1]. Throws argument_error on dimension mismatch
/// or a zero vector.
double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b);

/// Text-embedding backend; thread-safe like Generator.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual EmbeddingVector embed(const std::string& text) = 0;
    virtual Backend backend() const = 0;
    virtual std::string model() const = 0;
};

std::string embedding_cache_key(Backend backend, const std::string& model,
                                const std::string& text);

/// Hashed bag-of-words embedding: each token (lowercased, split on
/// non-alphanumerics) lands in FNV-1a-64 mod dim; counts are L2-normalized.
EmbeddingVector mock_embed(const std::string& text, size_t dim);

class MockEmbedder : public Embedder {
public:
    explicit MockEmbedder(size_t dim = 256);
    EmbeddingVector embed(const std::string& text) override;
    Backend backend() const override { return Backend::mock; }
    std::string model() const override;
    size_t dimension() const { return dim_; }

private:
    size_t dim_;
};

/// OpenAI-compatible embeddings client. Request: {model, input};
/// response: {data:[{embedding}]}. Vectors are used exactly as returned.
class RemoteEmbedder : public Embedder {
public:
    struct Options {
        std::string endpoint;
        std::string path = "/v1/embeddings";
        std::string model;
        std::string api_key;
        RetryPolicy retry;
        int max_in_flight = 4;
    };

    explicit RemoteEmbedder(Options options);
    ~RemoteEmbedder() override;
    EmbeddingVector embed(const std::string& text) override;
    Backend backend() const override { return Backend::remote; }
    std::string model() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class CachingEmbedder : public Embedder {
public:
    CachingEmbedder(Embedder& inner, std::filesystem::path cache_file);
    EmbeddingVector embed(const std::string& text) override;
    Backend backend() const override { return inner_.backend(); }
    std::string model() const override { return inner_.model(); }

private:
    Embedder& inner_;
    JsonlKvCache cache_;
};

}  // namespace mill
