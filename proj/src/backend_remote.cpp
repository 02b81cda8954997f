#include <chrono>

#include "httplib.h"
#include "json.hpp"
#include "scalex/backend.hpp"
#include "scalex/png.hpp"
#include "scalex/util.hpp"

// HTTP adapter for real diffusion backends. The inference service owns the
// sampler and the capture hook; this side owns the contract: declared shape,
// finiteness, and single-capture semantics are re-validated on every reply.

namespace scalex {

namespace {

using nlohmann::json;

httplib::Client make_client(const std::string& endpoint) {
    httplib::Client client(endpoint);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(300, 0);
    return client;
}

[[noreturn]] void raise_transport(const httplib::Result& res, const std::string& what) {
    if (res.error() == httplib::Error::ConnectionTimeout ||
        res.error() == httplib::Error::Read || res.error() == httplib::Error::Write) {
        raise(ErrorCode::Timeout, what + ": " + httplib::to_string(res.error()));
    }
    raise(ErrorCode::BackendUnavailable, what + ": " + httplib::to_string(res.error()));
}

}  // namespace

RemoteBackend::RemoteBackend(std::string model_id, BackendMode mode, TensorShape shape,
                             double latency_budget_s, std::string endpoint,
                             std::string capture_layer)
    : model_id_(std::move(model_id)),
      mode_(mode),
      shape_(shape),
      latency_budget_s_(latency_budget_s),
      endpoint_(std::move(endpoint)),
      capture_layer_(std::move(capture_layer)) {}

HVector RemoteBackend::extract(const PromptSpec& prompt, const ExtractionConfig& config) {
    std::lock_guard<std::mutex> lock(device_mutex_);
    if (endpoint_.empty()) {
        raise(ErrorCode::BackendUnavailable,
              model_id_ + " has no inference endpoint (set SCALEX_BACKEND_ENDPOINT)");
    }
    json req = {
        {"model", model_id_},
        {"mode", backend_mode_name(mode_)},
        {"prompt", prompt.text},
        {"negative_prompt", prompt.negative_text},
        {"guidance_scale", prompt.guidance_scale},
        {"seed", prompt.seed},
        {"capture_layer", capture_layer_},
        {"refinement_steps", config.num_refinement_steps_discarded},
    };
    auto client = make_client(endpoint_);
    auto res = client.Post("/v1/extract", req.dump(), "application/json");
    if (!res) raise_transport(res, "extract request failed");
    if (res->status != 200) {
        raise(ErrorCode::BackendUnavailable,
              "extract returned HTTP " + std::to_string(res->status) + ": " + res->body);
    }

    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("shape") || !reply.contains("data_b64")) {
        raise(ErrorCode::BackendUnavailable, "malformed extract reply");
    }
    const auto dims = reply["shape"].get<std::vector<int>>();
    if (dims.size() != 3) raise(ErrorCode::ShapeMismatch, "reply shape is not rank 3");

    HVector h;
    h.shape = {dims[0], dims[1], dims[2]};
    const auto bytes = util::base64_decode(reply["data_b64"].get<std::string>());
    h.values = util::unpack_f32le(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    h.prompt = prompt;
    h.model_id = model_id_;
    h.timestep_mode = mode_ == BackendMode::lcm ? TimestepMode::lcm_single_step
                                                : TimestepMode::ldm_step;
    if (reply.contains("timestep")) h.ldm_timestep = reply["timestep"].get<int>();
    h.created_at = std::chrono::system_clock::now();
    return h;
}

GeneratedImage RemoteBackend::generate(const PromptSpec& prompt, int num_steps,
                                       const InjectionPlan* inject) {
    std::lock_guard<std::mutex> lock(device_mutex_);
    if (endpoint_.empty()) {
        raise(ErrorCode::BackendUnavailable,
              model_id_ + " has no inference endpoint (set SCALEX_BACKEND_ENDPOINT)");
    }
    json req = {
        {"model", model_id_},
        {"mode", backend_mode_name(mode_)},
        {"prompt", prompt.text},
        {"negative_prompt", prompt.negative_text},
        {"guidance_scale", prompt.guidance_scale},
        {"seed", prompt.seed},
        {"steps", num_steps},
        {"capture_layer", capture_layer_},
    };
    if (inject) {
        if (inject->offset.size() != shape_.size()) {
            raise(ErrorCode::ShapeMismatch, "injection offset does not match middle block");
        }
        const std::string packed = util::pack_f32le(inject->offset);
        req["offset_b64"] = util::base64_encode(std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(packed.data()), packed.size()));
        req["scale"] = inject->scale;
        req["inject_steps"] = inject->steps;
    }
    auto client = make_client(endpoint_);
    auto res = client.Post("/v1/generate", req.dump(), "application/json");
    if (!res) raise_transport(res, "generate request failed");
    if (res->status == 501) {
        raise(ErrorCode::InjectionUnsupported, "backend cannot inject at " + capture_layer_);
    }
    if (res->status != 200) {
        raise(ErrorCode::BackendUnavailable,
              "generate returned HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    GeneratedImage image;
    image.png.assign(res->body.begin(), res->body.end());
    png::read_dimensions(image.png, image.width, image.height);
    return image;
}

}  // namespace scalex
