#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "scalex/hvector.hpp"

namespace scalex {

using TagMap = std::map<std::string, std::string>;

struct VectorRecord {
    std::string id;  // content hash; empty until put/compute_record_id
    HVector hvector;
    TagMap tags;
};

// id = sha256(values || canonical metadata). created_at is deliberately
// excluded so identical extractions hash identically across runs.
std::string compute_record_id(const HVector& hvector, const TagMap& tags);

// Directory-backed store: manifest.json + one little-endian float32 binary
// per record, row-major (channel, height, width). format_version=1 is the
// compatibility contract. Single writer (exclusive lock file), many readers.
class VectorStore {
  public:
    static constexpr int kFormatVersion = 1;

    // Opens or creates the store; validates every manifest entry's byte
    // length before any query answers.
    explicit VectorStore(std::filesystem::path dir);

    // Durable write. Re-put of an identical record is a no-op returning the
    // same id. Throws NonFiniteActivation / ShapeMismatch / StorageFull.
    std::string put(const VectorRecord& record);

    // All records whose tags superset-match the filter, ordered by id.
    std::vector<VectorRecord> query(const TagMap& tag_filter) const;

    std::optional<VectorRecord> get(const std::string& id) const;

    std::size_t size() const;

    const std::filesystem::path& dir() const { return dir_; }

  private:
    struct Entry {
        std::string path;
        TensorShape shape;
        TagMap tags;
        PromptSpec prompt;
        std::string model_id;
        TimestepMode timestep_mode;
        int ldm_timestep;
    };

    void load_manifest();
    void save_manifest() const;
    VectorRecord materialize(const std::string& id, const Entry& entry) const;

    std::filesystem::path dir_;
    std::map<std::string, Entry> entries_;  // id -> entry, naturally ordered
    mutable std::shared_mutex mutex_;
    int lock_fd_ = -1;
};

// Element-wise arithmetic mean in 64-bit accumulation, cast to float32.
// Provenance: result prompt text lists contributing ids.
HVector average_records(std::span<const VectorRecord> records);
HVector average_vectors(std::span<const HVector> vectors);

}  // namespace scalex
