#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mill/cache.hpp"

namespace mill {

enum class Backend { remote, mock };

std::string_view backend_name(Backend b);

struct GenerationRequest {
    std::string prompt;
    std::string model;
    double temperature = 0.7;
    double top_p = 1.0;
    int max_tokens = 512;
    /// Distinguishes the n-th of N samples of one prompt for caching.
    std::string seed_tag;
};

struct GenerationResponse {
    std::string text;
    bool cached = false;
    Backend backend = Backend::mock;
};

/// Text-generation backend. Implementations must be safe to call from
/// several threads at once.
class Generator {
public:
    virtual ~Generator() = default;
    virtual GenerationResponse generate(const GenerationRequest& req) = 0;
    virtual Backend backend() const = 0;
};

/// Cache key for a generation: digest of everything that can change the
/// completion.
std::string generation_cache_key(Backend backend, const GenerationRequest& req);

/// Deterministic offline completion with the shape of a sub-query/passage
/// generation: `items` numbered lines, each a sub-query followed by a short
/// passage. Content words are drawn by a seeded choice from
/// vocab U tokens(prompt); every passage includes at least one vocab word.
std::string mock_generate(const GenerationRequest& req, const std::vector<std::string>& vocab,
                          int items = 4, std::uint64_t seed = 0);

class MockGenerator : public Generator {
public:
    explicit MockGenerator(std::vector<std::string> vocab, int items = 4, std::uint64_t seed = 0);
    GenerationResponse generate(const GenerationRequest& req) override;
    Backend backend() const override { return Backend::mock; }

private:
    std::vector<std::string> vocab_;
    int items_;
    std::uint64_t seed_;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{100};
};

/// OpenAI-compatible completions client (JSON over HTTP).
/// Request: {model, prompt, temperature, top_p, max_tokens};
/// response: {choices:[{text}]}.
class RemoteGenerator : public Generator {
public:
    struct Options {
        std::string endpoint;  // scheme://host[:port]
        std::string path = "/v1/completions";
        std::string api_key;   // usually from $LLM_API_KEY
        RetryPolicy retry;
        int max_in_flight = 4;
    };

    explicit RemoteGenerator(Options options);
    ~RemoteGenerator() override;
    GenerationResponse generate(const GenerationRequest& req) override;
    Backend backend() const override { return Backend::remote; }

    /// Attempts used by the most recent call (retry observability).
    int last_attempts() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Write-through cache wrapper: hits bypass the inner backend entirely.
class CachingGenerator : public Generator {
public:
    CachingGenerator(Generator& inner, std::filesystem::path cache_file);
    GenerationResponse generate(const GenerationRequest& req) override;
    Backend backend() const override { return inner_.backend(); }

private:
    Generator& inner_;
    JsonlKvCache cache_;
};

}  // namespace mill
