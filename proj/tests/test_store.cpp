#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "scalex/store.hpp"
#include "scalex/util.hpp"

using namespace scalex;

namespace {

VectorRecord record_of(std::vector<float> values, TagMap tags = {},
                       std::uint64_t seed = 0) {
    VectorRecord r;
    r.hvector = testutil::make_hvector(std::move(values), {}, seed);
    r.tags = std::move(tags);
    return r;
}

}  // namespace

TEST_CASE("put/get round-trips bit-exactly across a reopen") {
    testutil::TempDir dir("store_roundtrip");
    std::mt19937_64 rng(11);
    std::vector<VectorRecord> originals;
    std::vector<std::string> ids;
    {
        VectorStore store(dir.path());
        for (int i = 0; i < 3; ++i) {
            auto r = record_of(testutil::random_f32(rng, 64), {{"k", std::to_string(i)}});
            ids.push_back(store.put(r));
            originals.push_back(std::move(r));
        }
    }
    VectorStore reopened(dir.path());
    CHECK(reopened.size() == 3);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto got = reopened.get(ids[i]);
        REQUIRE(got.has_value());
        // Byte-level oracle: compare packed little-endian forms.
        CHECK(util::pack_f32le(got->hvector.values) ==
              util::pack_f32le(originals[i].hvector.values));
        CHECK(got->tags == originals[i].tags);
    }
}

TEST_CASE("re-put of an identical record is a no-op with the same id") {
    testutil::TempDir dir("store_idempotent");
    VectorStore store(dir.path());
    auto r = record_of({1.0f, 2.0f, 3.0f, 4.0f});
    const std::string id1 = store.put(r);
    const std::string id2 = store.put(r);
    CHECK(id1 == id2);
    CHECK(store.size() == 1);

    // Same values, different tags: a distinct record.
    auto r2 = r;
    r2.tags["extra"] = "tag";
    r2.id.clear();
    CHECK(store.put(r2) != id1);
    CHECK(store.size() == 2);
}

TEST_CASE("non-finite vectors are rejected at put") {
    testutil::TempDir dir("store_nan");
    VectorStore store(dir.path());
    auto r = record_of({1.0f, std::nanf(""), 3.0f, 4.0f});
    try {
        store.put(r);
        FAIL("expected NonFiniteActivation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteActivation);
    }
}

TEST_CASE("query uses superset tag matching ordered by id") {
    testutil::TempDir dir("store_query");
    VectorStore store(dir.path());
    std::mt19937_64 rng(3);
    std::vector<VectorRecord> all;
    for (int i = 0; i < 5; ++i) {
        auto r = record_of(testutil::random_f32(rng, 8),
                           {{"profession", "doctor"}, {"n", std::to_string(i)}});
        store.put(r);
        r.id = compute_record_id(r.hvector, r.tags);
        all.push_back(r);
    }
    for (int i = 0; i < 5; ++i) {
        auto r = record_of(testutil::random_f32(rng, 8),
                           {{"profession", "pilot"}, {"n", std::to_string(i)}});
        store.put(r);
        r.id = compute_record_id(r.hvector, r.tags);
        all.push_back(r);
    }

    CHECK(store.query({{"profession", "doctor"}}).size() == 5);
    CHECK(store.query({}).size() == 10);
    CHECK(store.query({{"profession", "chef"}}).empty());

    // Intersection semantics against a brute-force filter.
    const TagMap filter{{"profession", "pilot"}, {"n", "3"}};
    std::vector<std::string> expected;
    for (const auto& r : all) {
        bool match = true;
        for (const auto& [k, v] : filter) {
            const auto it = r.tags.find(k);
            if (it == r.tags.end() || it->second != v) match = false;
        }
        if (match) expected.push_back(r.id);
    }
    std::sort(expected.begin(), expected.end());
    const auto got = store.query(filter);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].id == expected[i]);

    // Results come back ordered by id.
    const auto everything = store.query({});
    for (std::size_t i = 1; i < everything.size(); ++i) {
        CHECK(everything[i - 1].id < everything[i].id);
    }
}

TEST_CASE("manifest validation rejects truncated record files") {
    testutil::TempDir dir("store_truncated");
    std::string id;
    {
        VectorStore store(dir.path());
        id = store.put(record_of({1.0f, 2.0f, 3.0f, 4.0f}));
    }
    // Truncate the binary behind the manifest's back.
    const auto file = dir.path() / (id + ".f32");
    REQUIRE(std::filesystem::exists(file));
    std::filesystem::resize_file(file, 7);
    try {
        VectorStore reopened(dir.path());
        FAIL("expected ManifestCorrupt");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ManifestCorrupt);
    }
}

TEST_CASE("average: singleton, cancellation, and a scalar-loop oracle") {
    std::mt19937_64 rng(5);
    const auto v = testutil::random_f32(rng, 16);
    auto rv = record_of(v);
    rv.id = "a";

    const HVector single = average_records(std::vector<VectorRecord>{rv});
    CHECK(single.values == v);

    auto neg = v;
    for (float& x : neg) x = -x;
    auto rneg = record_of(neg);
    rneg.id = "b";
    const HVector zero = average_records(std::vector<VectorRecord>{rv, rneg});
    for (float x : zero.values) CHECK(x == 0.0f);

    // 4-vector elementwise mean against an independent loop.
    std::vector<VectorRecord> four;
    for (int i = 0; i < 4; ++i) four.push_back(record_of(testutil::random_f32(rng, 16)));
    const HVector mean = average_records(four);
    for (std::size_t i = 0; i < 16; ++i) {
        double acc = 0.0;
        for (const auto& r : four) acc += double(r.hvector.values[i]);
        CHECK(mean.values[i] == doctest::Approx(float(acc / 4.0)).epsilon(1e-7));
    }
}

TEST_CASE("average is permutation-invariant and rejects mixed shapes") {
    std::mt19937_64 rng(9);
    std::vector<VectorRecord> records;
    for (int i = 0; i < 5; ++i) records.push_back(record_of(testutil::random_f32(rng, 12)));
    const HVector forward = average_records(records);
    std::reverse(records.begin(), records.end());
    const HVector backward = average_records(records);
    CHECK(forward.values == backward.values);
    CHECK(forward.shape == backward.shape);

    records.push_back(record_of(testutil::random_f32(rng, 8)));
    try {
        average_records(records);
        FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ShapeMismatch);
    }
    try {
        average_records(std::vector<VectorRecord>{});
        FAIL("expected EmptyInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInput);
    }
}
