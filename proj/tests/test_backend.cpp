#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <thread>

#include "doctest.h"
#include "helpers.hpp"
#include "httplib.h"
#include "json.hpp"
#include "scalex/backend.hpp"
#include "scalex/util.hpp"

using namespace scalex;

namespace {

PromptSpec prompt_of(const std::string& text, std::uint64_t seed = 7) {
    PromptSpec p;
    p.text = text;
    p.seed = seed;
    return p;
}

ExtractionConfig config_with_seeds(std::vector<std::uint64_t> seeds = {0}) {
    ExtractionConfig c;
    c.seeds = std::move(seeds);
    return c;
}

}  // namespace

TEST_CASE("declare_backend registry shapes and latency budgets") {
    auto sd15 = declare_backend("sd15", BackendMode::lcm);
    CHECK(sd15->middle_block_shape() == TensorShape{1280, 8, 8});
    CHECK(sd15->latency_budget_seconds() == doctest::Approx(1.1));

    auto sdxl = declare_backend("sdxl", BackendMode::lcm);
    CHECK(sdxl->middle_block_shape() == TensorShape{1280, 32, 32});

    auto mock8 = declare_backend("mock-8d", BackendMode::lcm);
    CHECK(mock8->middle_block_shape() == TensorShape{8, 1, 1});

    try {
        declare_backend("sd99", BackendMode::lcm);
        FAIL("expected UnknownModel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownModel);
        CHECK(std::string(e.what()).find("sd99") != std::string::npos);
    }
}

TEST_CASE("extraction is deterministic and pure in the prompt tuple") {
    auto backend = declare_backend("mock", BackendMode::lcm);
    const auto cfg = config_with_seeds();

    const HVector a = extract_hvector(prompt_of("a doctor"), cfg, backend);
    const HVector b = extract_hvector(prompt_of("a doctor"), cfg, backend);
    CHECK(a.values == b.values);  // bitwise
    CHECK(a.shape == TensorShape{16, 4, 4});

    const HVector c = extract_hvector(prompt_of("a doctor", 8), cfg, backend);
    CHECK(a.values != c.values);
    const HVector d = extract_hvector(prompt_of("a nurse"), cfg, backend);
    CHECK(a.values != d.values);
}

TEST_CASE("constant-unit mock passes through 1/sqrt(C*H*W) untouched") {
    MockBackendOptions options;
    options.shape = {8, 2, 2};
    options.activation = MockBackendOptions::Activation::constant_unit;
    auto backend = std::make_shared<MockBackend>(options);

    const HVector h = extract_hvector(prompt_of("anything"), config_with_seeds(),
                                      backend);
    const double expected = 1.0 / std::sqrt(8.0 * 2.0 * 2.0);
    REQUIRE(h.values.size() == 32);
    for (float v : h.values) {
        CHECK(v == doctest::Approx(expected).epsilon(1e-7));
    }
}

TEST_CASE("exactly one capture event regardless of refinement steps") {
    auto mock = std::make_shared<MockBackend>();
    ExtractionConfig cfg = config_with_seeds();
    cfg.num_refinement_steps_discarded = 5;

    extract_hvector(prompt_of("a pilot"), cfg, std::static_pointer_cast<ModelBackend>(mock));
    CHECK(mock->capture_events() == 1);
    // CFG on: one conditional + one unconditional pass per prediction.
    CHECK(mock->forward_passes() == 2 * (1 + 5));

    mock->reset_instrumentation();
    cfg.num_refinement_steps_discarded = 0;
    PromptSpec no_cfg = prompt_of("a pilot");
    no_cfg.guidance_scale = 0.0;
    extract_hvector(no_cfg, cfg, std::static_pointer_cast<ModelBackend>(mock));
    CHECK(mock->capture_events() == 1);
    CHECK(mock->forward_passes() == 1);
}

TEST_CASE("captured vector does not depend on guidance or negative prompt") {
    auto backend = declare_backend("mock", BackendMode::lcm);
    const auto cfg = config_with_seeds();
    PromptSpec base = prompt_of("a farmer");
    PromptSpec guided = base;
    guided.guidance_scale = 12.0;
    guided.negative_text = "blurry";
    const HVector a = extract_hvector(base, cfg, backend);
    const HVector b = extract_hvector(guided, cfg, backend);
    CHECK(a.values == b.values);
}

TEST_CASE("error paths: NaN capture, wrong shape, bad prompt, bad layer") {
    MockBackendOptions options;
    options.activation = MockBackendOptions::Activation::nan_poison;
    auto nan_backend = std::make_shared<MockBackend>(options);
    try {
        extract_hvector(prompt_of("x"), config_with_seeds(),
                        std::static_pointer_cast<ModelBackend>(nan_backend));
        FAIL("expected NonFiniteActivation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteActivation);
    }

    options.activation = MockBackendOptions::Activation::wrong_shape;
    auto short_backend = std::make_shared<MockBackend>(options);
    try {
        extract_hvector(prompt_of("x"), config_with_seeds(),
                        std::static_pointer_cast<ModelBackend>(short_backend));
        FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ShapeMismatch);
    }

    auto backend = declare_backend("mock", BackendMode::lcm);
    try {
        extract_hvector(prompt_of("   "), config_with_seeds(), backend);
        FAIL("expected InvalidPrompt");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidPrompt);
    }

    ExtractionConfig bad_layer = config_with_seeds();
    bad_layer.capture_layer = "encoder.block0";
    try {
        extract_hvector(prompt_of("x"), bad_layer, backend);
        FAIL("expected IncompatibleArchitecture");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncompatibleArchitecture);
    }
}

TEST_CASE("batch extraction preserves order and reports indexed failures") {
    auto backend = declare_backend("mock", BackendMode::lcm);
    const auto cfg = config_with_seeds();

    std::vector<PromptSpec> prompts{prompt_of("p1"), prompt_of("p2")};
    const auto batch = extract_batch(prompts, cfg, backend);
    REQUIRE(batch.size() == 2);
    CHECK(batch[0].values == extract_hvector(prompts[0], cfg, backend).values);
    CHECK(batch[1].values == extract_hvector(prompts[1], cfg, backend).values);

    try {
        extract_batch(std::vector<PromptSpec>{}, cfg, backend);
        FAIL("expected EmptyBatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyBatch);
    }

    std::vector<PromptSpec> with_bad{prompt_of("fine"), prompt_of(" ")};
    try {
        extract_batch(with_bad, cfg, backend);
        FAIL("expected failure with index");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("element 1") != std::string::npos);
    }
}

TEST_CASE("seed expansion is prompt-major: 10 prompts x 3 seeds = 30 vectors") {
    auto backend = declare_backend("mock-8d", BackendMode::lcm);
    std::vector<PromptSpec> prompts;
    for (int i = 0; i < 10; ++i) prompts.push_back(prompt_of("prompt " + std::to_string(i)));
    const std::vector<std::uint64_t> seeds{0, 1, 2};

    const auto expanded = expand_over_seeds(prompts, seeds);
    REQUIRE(expanded.size() == 30);
    const auto cfg = config_with_seeds(seeds);
    const auto batch = extract_batch(expanded, cfg, backend);
    REQUIRE(batch.size() == 30);
    // Expected cartesian order enumerated independently.
    std::size_t k = 0;
    for (int i = 0; i < 10; ++i) {
        for (std::uint64_t s : seeds) {
            CHECK(batch[k].prompt.text == "prompt " + std::to_string(i));
            CHECK(batch[k].prompt.seed == s);
            PromptSpec single = prompts[i];
            single.seed = s;
            CHECK(batch[k].values == extract_hvector(single, cfg, backend).values);
            ++k;
        }
    }
}

TEST_CASE("concurrent extraction equals sequential results") {
    auto backend = declare_backend("mock", BackendMode::lcm);
    const auto cfg = config_with_seeds();
    std::vector<PromptSpec> prompts;
    for (int i = 0; i < 8; ++i) prompts.push_back(prompt_of("thread prompt " + std::to_string(i)));

    std::vector<HVector> sequential;
    for (const auto& p : prompts) sequential.push_back(extract_hvector(p, cfg, backend));

    std::vector<HVector> concurrent(prompts.size());
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        threads.emplace_back([&, i] { concurrent[i] = extract_hvector(prompts[i], cfg, backend); });
    }
    for (auto& t : threads) t.join();
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        CHECK(concurrent[i].values == sequential[i].values);
    }
}

TEST_CASE("remote backend without endpoint raises BackendUnavailable") {
    BackendOptions options;
    options.endpoint = "";
    ::unsetenv("SCALEX_BACKEND_ENDPOINT");
    auto backend = declare_backend("sd15", BackendMode::lcm, options);
    try {
        extract_hvector(prompt_of("a doctor"), config_with_seeds(), backend);
        FAIL("expected BackendUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BackendUnavailable);
    }
}

TEST_CASE("remote backend round-trips the wire protocol") {
    using nlohmann::json;
    httplib::Server server;

    server.Post("/v1/extract", [](const httplib::Request& req, httplib::Response& res) {
        const json body = json::parse(req.body);
        // Serve a deterministic ramp so the client-side unpacking is checked.
        std::vector<float> values(1280 * 8 * 8);
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] = static_cast<float>(i % 97) * 0.25f +
                        static_cast<float>(body["seed"].get<std::uint64_t>());
        }
        const std::string packed = scalex::util::pack_f32le(values);
        const json reply = {
            {"shape", {1280, 8, 8}},
            {"data_b64", scalex::util::base64_encode(std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(packed.data()),
                             packed.size()))},
        };
        res.set_content(reply.dump(), "application/json");
    });

    int port = 0;
    std::thread server_thread([&] {
        port = server.bind_to_any_port("127.0.0.1");
        server.listen_after_bind();
    });
    while (port == 0) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    server.wait_until_ready();

    BackendOptions options;
    options.endpoint = "http://127.0.0.1:" + std::to_string(port);
    auto backend = declare_backend("sd15", BackendMode::lcm, options);
    const HVector h = extract_hvector(prompt_of("a doctor", 3), config_with_seeds(),
                                      backend);
    CHECK(h.shape == TensorShape{1280, 8, 8});
    CHECK(h.values[0] == doctest::Approx(3.0f));
    CHECK(h.values[1] == doctest::Approx(3.25f));
    CHECK(h.model_id == "sd15");

    server.stop();
    server_thread.join();
}
