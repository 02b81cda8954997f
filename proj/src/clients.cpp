#include "scalex/clients.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"
#include "scalex/errors.hpp"
#include "scalex/util.hpp"

namespace scalex {

using nlohmann::json;

namespace {

bool is_http_url(const std::string& s) {
    return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

[[noreturn]] void raise_http(const httplib::Result& res, const std::string& what) {
    if (res && res->status != 0) {
        raise(ErrorCode::EndpointUnavailable,
              what + ": HTTP " + std::to_string(res->status));
    }
    if (res.error() == httplib::Error::ConnectionTimeout ||
        res.error() == httplib::Error::Read) {
        raise(ErrorCode::Timeout, what + ": " + httplib::to_string(res.error()));
    }
    raise(ErrorCode::EndpointUnavailable, what + ": " + httplib::to_string(res.error()));
}

}  // namespace

ReplaySummarizer::ReplaySummarizer(std::filesystem::path dir, SummarizerClient* record_from)
    : dir_(std::move(dir)), record_from_(record_from) {}

std::string ReplaySummarizer::complete(const std::string& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto path = dir_ / (util::sha256_hex(request) + ".txt");
    if (std::filesystem::exists(path)) {
        return util::read_file(path);
    }
    if (record_from_) {
        const std::string response = record_from_->complete(request);
        std::filesystem::create_directories(dir_);
        util::write_file(path, response);
        return response;
    }
    raise(ErrorCode::EndpointUnavailable,
          "no recorded response for request hash " + util::sha256_hex(request));
}

HttpSummarizer::HttpSummarizer(std::string endpoint) : endpoint_(std::move(endpoint)) {}

std::string HttpSummarizer::complete(const std::string& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    httplib::Client client(endpoint_);
    client.set_read_timeout(120, 0);
    json body = {{"prompt", request}};
    auto res = client.Post("/v1/complete", body.dump(), "application/json");
    if (!res || res->status != 200) raise_http(res, "summarizer request failed");
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("text")) {
        raise(ErrorCode::EndpointUnavailable, "malformed summarizer reply");
    }
    return reply["text"].get<std::string>();
}

std::unique_ptr<SummarizerClient> make_summarizer(const std::string& endpoint_spec) {
    std::string spec = endpoint_spec;
    if (spec.empty()) {
        if (const char* env = std::getenv("SCALEX_LLM_ENDPOINT")) spec = env;
    }
    if (spec.empty()) {
        raise(ErrorCode::EndpointUnavailable,
              "no summarizer endpoint configured (SCALEX_LLM_ENDPOINT)");
    }
    if (spec == "echo:" || spec == "echo") return std::make_unique<EchoSummarizer>();
    if (spec.rfind("replay:", 0) == 0) {
        return std::make_unique<ReplaySummarizer>(spec.substr(7));
    }
    if (is_http_url(spec)) return std::make_unique<HttpSummarizer>(spec);
    raise(ErrorCode::ConfigError, "unrecognized summarizer endpoint: " + spec);
}

StubClassifier::StubClassifier(std::vector<double> fallback)
    : fallback_(std::move(fallback)) {}

void StubClassifier::set_response(const std::string& image_sha256,
                                  std::vector<double> sims) {
    by_hash_[image_sha256] = std::move(sims);
}

std::vector<double> StubClassifier::similarities(
    std::span<const std::uint8_t> image_png, std::span<const std::string> class_prompts) {
    const std::string key = util::sha256_hex(image_png);
    const auto it = by_hash_.find(key);
    std::vector<double> sims = it != by_hash_.end() ? it->second : fallback_;
    sims.resize(class_prompts.size(), sims.empty() ? 0.0 : sims.back());
    return sims;
}

ReplayClassifier::ReplayClassifier(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::vector<double> ReplayClassifier::similarities(
    std::span<const std::uint8_t> image_png, std::span<const std::string> class_prompts) {
    const auto path = dir_ / (util::sha256_hex(image_png) + ".json");
    if (!std::filesystem::exists(path)) {
        raise(ErrorCode::EndpointUnavailable,
              "no recorded similarities for image " + util::sha256_hex(image_png));
    }
    json rec = json::parse(util::read_file(path), nullptr, false);
    if (rec.is_discarded() || !rec.contains("similarities")) {
        raise(ErrorCode::EndpointUnavailable, "malformed recorded similarity file");
    }
    auto sims = rec["similarities"].get<std::vector<double>>();
    if (sims.size() != class_prompts.size()) {
        raise(ErrorCode::LengthMismatch,
              "recorded similarity count does not match class prompts");
    }
    return sims;
}

HttpClassifier::HttpClassifier(std::string endpoint) : endpoint_(std::move(endpoint)) {}

std::vector<double> HttpClassifier::similarities(
    std::span<const std::uint8_t> image_png, std::span<const std::string> class_prompts) {
    std::lock_guard<std::mutex> lock(mutex_);
    httplib::Client client(endpoint_);
    client.set_read_timeout(120, 0);
    json body = {
        {"image_b64", util::base64_encode(image_png)},
        {"class_prompts", std::vector<std::string>(class_prompts.begin(),
                                                   class_prompts.end())},
    };
    auto res = client.Post("/v1/similarity", body.dump(), "application/json");
    if (!res || res->status != 200) raise_http(res, "classifier request failed");
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("similarities")) {
        raise(ErrorCode::EndpointUnavailable, "malformed classifier reply");
    }
    auto sims = reply["similarities"].get<std::vector<double>>();
    if (sims.size() != class_prompts.size()) {
        raise(ErrorCode::LengthMismatch, "classifier returned wrong similarity count");
    }
    return sims;
}

std::unique_ptr<ClassifierClient> make_classifier(const std::string& endpoint_spec) {
    std::string spec = endpoint_spec;
    if (spec.empty()) {
        if (const char* env = std::getenv("SCALEX_CLIP_ENDPOINT")) spec = env;
    }
    if (spec.empty()) {
        raise(ErrorCode::EndpointUnavailable,
              "no classifier endpoint configured (SCALEX_CLIP_ENDPOINT)");
    }
    if (spec.rfind("replay:", 0) == 0) {
        return std::make_unique<ReplayClassifier>(spec.substr(7));
    }
    if (is_http_url(spec)) return std::make_unique<HttpClassifier>(spec);
    raise(ErrorCode::ConfigError, "unrecognized classifier endpoint: " + spec);
}

}  // namespace scalex
