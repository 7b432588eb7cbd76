#include "mill/llm.hpp"

#include <atomic>
#include <iostream>
#include <random>
#include <semaphore>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "mill/analyzer.hpp"
#include "mill/errors.hpp"
#include "mill/util.hpp"

namespace mill {
namespace {

using nlohmann::json;

// Union of vocab and prompt tokens, dedup'd, in a stable order.
std::vector<std::string> word_pool(const std::string& prompt,
                                   const std::vector<std::string>& vocab) {
    AnalyzerConfig plain{.lowercase = true, .remove_stopwords = false, .stem = false};
    std::vector<std::string> pool;
    std::unordered_set<std::string> seen;
    for (const std::string& w : vocab)
        if (seen.insert(w).second) pool.push_back(w);
    for (std::string& t : analyze(prompt, plain))
        if (seen.insert(t).second) pool.push_back(std::move(t));
    return pool;
}

}  // namespace

std::string_view backend_name(Backend b) {
    return b == Backend::remote ? "remote" : "mock";
}

std::string generation_cache_key(Backend backend, const GenerationRequest& req) {
    return DigestBuilder()
        .field(backend_name(backend))
        .field(req.model)
        .field(req.prompt)
        .field(req.temperature)
        .field(req.top_p)
        .field(static_cast<std::int64_t>(req.max_tokens))
        .field(req.seed_tag)
        .hex();
}

std::string mock_generate(const GenerationRequest& req, const std::vector<std::string>& vocab,
                          int items, std::uint64_t seed) {
    if (vocab.empty()) throw argument_error("mock_generate: vocab must be non-empty");
    if (items < 1) throw argument_error("mock_generate: items must be >= 1");

    std::vector<std::string> pool = word_pool(req.prompt, vocab);
    std::uint64_t digest = DigestBuilder()
                               .field(static_cast<std::int64_t>(seed))
                               .field(req.prompt)
                               .field(req.seed_tag)
                               .value();
    // mt19937_64 output is standard-defined, so completions are byte-identical
    // across processes and platforms.
    std::mt19937_64 rng(digest);
    auto pick = [&](const std::vector<std::string>& from) -> const std::string& {
        return from[rng() % from.size()];
    };

    std::string out;
    for (int i = 1; i <= items; ++i) {
        out += std::to_string(i);
        out += ". What should be searched about ";
        out += pick(pool);
        out += " ";
        out += pick(pool);
        out += "? One answer involves ";
        out += pick(vocab);  // every passage carries at least one vocab word
        for (int w = 0; w < 9; ++w) {
            out += " ";
            out += pick(pool);
        }
        out += ".";
        if (i != items) out += "\n";
    }
    return out;
}

MockGenerator::MockGenerator(std::vector<std::string> vocab, int items, std::uint64_t seed)
    : vocab_(std::move(vocab)), items_(items), seed_(seed) {
    if (vocab_.empty()) throw argument_error("mock generator: vocab must be non-empty");
}

GenerationResponse MockGenerator::generate(const GenerationRequest& req) {
    return GenerationResponse{mock_generate(req, vocab_, items_, seed_), false, Backend::mock};
}

struct RemoteGenerator::Impl {
    Options opt;
    std::counting_semaphore<> slots;
    std::atomic<int> last_attempts{0};

    explicit Impl(Options o) : opt(std::move(o)), slots(std::max(1, opt.max_in_flight)) {}
};

RemoteGenerator::RemoteGenerator(Options options)
    : impl_(std::make_unique<Impl>(std::move(options))) {
    if (impl_->opt.endpoint.empty())
        throw argument_error("remote generator: endpoint not configured");
}

RemoteGenerator::~RemoteGenerator() = default;

int RemoteGenerator::last_attempts() const { return impl_->last_attempts.load(); }

GenerationResponse RemoteGenerator::generate(const GenerationRequest& req) {
    impl_->slots.acquire();
    struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
    } release{impl_->slots};

    json body = {
        {"model", req.model},         {"prompt", req.prompt},
        {"temperature", req.temperature}, {"top_p", req.top_p},
        {"max_tokens", req.max_tokens},
    };
    httplib::Headers headers;
    if (!impl_->opt.api_key.empty())
        headers.emplace("Authorization", "Bearer " + impl_->opt.api_key);

    const RetryPolicy& retry = impl_->opt.retry;
    std::string last_error;
    for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
        impl_->last_attempts.store(attempt);
        httplib::Client client(impl_->opt.endpoint);
        client.set_read_timeout(120, 0);
        auto res = client.Post(impl_->opt.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            std::cerr << "warning: generation attempt " << attempt << "/" << retry.max_attempts
                      << " failed: " << last_error << "\n";
            if (attempt < retry.max_attempts)
                std::this_thread::sleep_for(retry.initial_backoff * (1 << (attempt - 1)));
            continue;
        }
        if (res->status < 200 || res->status >= 300)
            throw backend_error("completions endpoint returned HTTP " +
                                std::to_string(res->status) + ": " + res->body);
        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
            reply["choices"].empty() || !reply["choices"][0].contains("text"))
            throw backend_error("malformed completions response: " + res->body);
        std::string text = reply["choices"][0]["text"].get<std::string>();
        if (text.empty()) throw backend_error("empty completion for prompt");
        return GenerationResponse{std::move(text), false, Backend::remote};
    }
    throw backend_error("transport error after " + std::to_string(retry.max_attempts) +
                        " attempts: " + last_error);
}

CachingGenerator::CachingGenerator(Generator& inner, std::filesystem::path cache_file)
    : inner_(inner), cache_(std::move(cache_file)) {}

GenerationResponse CachingGenerator::generate(const GenerationRequest& req) {
    const std::string key = generation_cache_key(inner_.backend(), req);
    if (auto hit = cache_.get(key)) {
        return GenerationResponse{(*hit)["text"].get<std::string>(), true, inner_.backend()};
    }
    GenerationResponse fresh = inner_.generate(req);
    json entry = {
        {"request",
         {{"model", req.model},
          {"prompt", req.prompt},
          {"temperature", req.temperature},
          {"top_p", req.top_p},
          {"max_tokens", req.max_tokens},
          {"seed_tag", req.seed_tag}}},
        {"text", fresh.text},
        {"backend", std::string(backend_name(fresh.backend))},
    };
    cache_.put(key, std::move(entry));
    return fresh;
}

}  // namespace mill
