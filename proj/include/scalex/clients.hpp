#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace scalex {

struct LlmExchange {
    std::string request;   // exact payload sent
    std::string response;  // verbatim reply
};

// Text summarization endpoint. Implementations serialize internally; a retry
// never mutates the prompt.
class SummarizerClient {
  public:
    virtual ~SummarizerClient() = default;
    // Throws EndpointUnavailable / Timeout.
    virtual std::string complete(const std::string& request) = 0;
    virtual std::string name() const = 0;
};

// Echoes the request back; used by tests and --dry-run summaries.
class EchoSummarizer final : public SummarizerClient {
  public:
    std::string complete(const std::string& request) override { return request; }
    std::string name() const override { return "echo"; }
};

// Replays recorded responses keyed by request hash from a directory of
// `<sha256>.txt` files. Unknown requests raise EndpointUnavailable; with
// record mode enabled, an inner client is consulted and its reply persisted.
class ReplaySummarizer final : public SummarizerClient {
  public:
    explicit ReplaySummarizer(std::filesystem::path dir,
                              SummarizerClient* record_from = nullptr);
    std::string complete(const std::string& request) override;
    std::string name() const override { return "replay"; }

  private:
    std::filesystem::path dir_;
    SummarizerClient* record_from_;
    std::mutex mutex_;
};

// POSTs {"prompt": ...} to `<endpoint>/v1/complete`; expects {"text": ...}.
class HttpSummarizer final : public SummarizerClient {
  public:
    explicit HttpSummarizer(std::string endpoint);
    std::string complete(const std::string& request) override;
    std::string name() const override { return "http"; }

  private:
    std::string endpoint_;
    std::mutex mutex_;
};

// Builds a client from an endpoint spec: "echo:", "replay:<dir>", or an
// http(s) URL (default: SCALEX_LLM_ENDPOINT).
std::unique_ptr<SummarizerClient> make_summarizer(const std::string& endpoint_spec);

// Zero-shot image/text similarity endpoint.
class ClassifierClient {
  public:
    virtual ~ClassifierClient() = default;
    // One similarity per class prompt, higher = more similar.
    virtual std::vector<double> similarities(std::span<const std::uint8_t> image_png,
                                             std::span<const std::string> class_prompts) = 0;
    virtual std::string name() const = 0;
};

// Fixed similarity table keyed by image content hash; unknown images get the
// fallback row. Construction-time data makes tests deterministic.
class StubClassifier final : public ClassifierClient {
  public:
    explicit StubClassifier(std::vector<double> fallback);
    void set_response(const std::string& image_sha256, std::vector<double> sims);
    std::vector<double> similarities(std::span<const std::uint8_t> image_png,
                                     std::span<const std::string> class_prompts) override;
    std::string name() const override { return "stub"; }

  private:
    std::vector<double> fallback_;
    std::map<std::string, std::vector<double>> by_hash_;
};

// Replays recorded similarity rows from `<dir>/<sha256>.json`.
class ReplayClassifier final : public ClassifierClient {
  public:
    explicit ReplayClassifier(std::filesystem::path dir);
    std::vector<double> similarities(std::span<const std::uint8_t> image_png,
                                     std::span<const std::string> class_prompts) override;
    std::string name() const override { return "replay"; }

  private:
    std::filesystem::path dir_;
};

// POSTs image + prompts to `<endpoint>/v1/similarity`.
class HttpClassifier final : public ClassifierClient {
  public:
    explicit HttpClassifier(std::string endpoint);
    std::vector<double> similarities(std::span<const std::uint8_t> image_png,
                                     std::span<const std::string> class_prompts) override;
    std::string name() const override { return "http"; }

  private:
    std::string endpoint_;
    std::mutex mutex_;
};

// "replay:<dir>" or an http(s) URL (default: SCALEX_CLIP_ENDPOINT).
std::unique_ptr<ClassifierClient> make_classifier(const std::string& endpoint_spec);

}  // namespace scalex
