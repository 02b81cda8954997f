#include "scalex/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "json.hpp"
#include "scalex/kernels.hpp"
#include "scalex/util.hpp"

namespace scalex {

using nlohmann::json;

std::string compute_record_id(const HVector& hvector, const TagMap& tags) {
    std::string canon = util::pack_f32le(hvector.values);
    canon += '\n';
    canon += "model=" + hvector.model_id;
    canon += ";mode=" + std::string(timestep_mode_name(hvector.timestep_mode));
    if (hvector.timestep_mode == TimestepMode::ldm_step) {
        canon += ";t=" + std::to_string(hvector.ldm_timestep);
    }
    canon += ";shape=" + hvector.shape.str();
    canon += ";text=" + hvector.prompt.text;
    canon += ";neg=" + hvector.prompt.negative_text;
    {
        char buf[64];
        std::snprintf(buf, sizeof(buf), ";g=%.17g", hvector.prompt.guidance_scale);
        canon += buf;
    }
    canon += ";seed=" + std::to_string(hvector.prompt.seed);
    for (const auto& [k, v] : tags) {  // std::map: already sorted
        canon += ";tag:" + k + "=" + v;
    }
    return util::sha256_hex(canon);
}

VectorStore::VectorStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    const std::string lock_path = (dir_ / ".lock").string();
    lock_fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
    if (lock_fd_ < 0) {
        raise(ErrorCode::IoError, "cannot open store lock: " + std::string(strerror(errno)));
    }
    load_manifest();
}

void VectorStore::load_manifest() {
    const auto manifest_path = dir_ / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) {
        entries_.clear();
        return;
    }
    json m = json::parse(util::read_file(manifest_path), nullptr, false);
    if (m.is_discarded()) {
        raise(ErrorCode::ManifestCorrupt, "manifest.json is not valid JSON");
    }
    if (!m.contains("format_version") || m["format_version"].get<int>() != kFormatVersion) {
        raise(ErrorCode::ManifestCorrupt, "unsupported manifest format_version");
    }
    entries_.clear();
    for (const auto& rec : m.at("records")) {
        Entry e;
        const std::string id = rec.at("id").get<std::string>();
        e.path = rec.at("path").get<std::string>();
        const auto dims = rec.at("shape").get<std::vector<int>>();
        if (dims.size() != 3) raise(ErrorCode::ManifestCorrupt, "record shape not rank 3");
        e.shape = {dims[0], dims[1], dims[2]};
        e.tags = rec.at("tags").get<TagMap>();
        e.prompt.text = rec.at("prompt").get<std::string>();
        e.prompt.negative_text = rec.value("negative_prompt", std::string());
        e.prompt.guidance_scale = rec.value("guidance_scale", 0.0);
        e.prompt.seed = rec.at("seed").get<std::uint64_t>();
        e.model_id = rec.at("model").get<std::string>();
        e.timestep_mode = timestep_mode_from_name(rec.at("timestep_mode").get<std::string>());
        e.ldm_timestep = rec.value("ldm_timestep", 0);

        const auto file = dir_ / e.path;
        std::error_code ec;
        const auto bytes = std::filesystem::file_size(file, ec);
        if (ec) {
            raise(ErrorCode::ManifestCorrupt, "missing record file: " + e.path);
        }
        if (bytes != 4 * e.shape.size()) {
            raise(ErrorCode::ManifestCorrupt,
                  "record " + id + " has " + std::to_string(bytes) + " bytes, expected " +
                      std::to_string(4 * e.shape.size()));
        }
        entries_.emplace(id, std::move(e));
    }
}

void VectorStore::save_manifest() const {
    json records = json::array();
    for (const auto& [id, e] : entries_) {
        json rec = {
            {"id", id},
            {"path", e.path},
            {"shape", {e.shape.channels, e.shape.height, e.shape.width}},
            {"tags", e.tags},
            {"prompt", e.prompt.text},
            {"negative_prompt", e.prompt.negative_text},
            {"guidance_scale", e.prompt.guidance_scale},
            {"seed", e.prompt.seed},
            {"model", e.model_id},
            {"timestep_mode", timestep_mode_name(e.timestep_mode)},
            {"ldm_timestep", e.ldm_timestep},
        };
        records.push_back(std::move(rec));
    }
    json m = {{"format_version", kFormatVersion}, {"records", std::move(records)}};
    util::write_file_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
}

std::string VectorStore::put(const VectorRecord& record) {
    record.hvector.validate();
    const std::string id = record.id.empty()
                               ? compute_record_id(record.hvector, record.tags)
                               : record.id;

    std::unique_lock<std::shared_mutex> lock(mutex_);
    if (::flock(lock_fd_, LOCK_EX) != 0) {
        raise(ErrorCode::IoError, "store lock failed: " + std::string(strerror(errno)));
    }
    struct Unlock {
        int fd;
        ~Unlock() { ::flock(fd, LOCK_UN); }
    } unlock{lock_fd_};

    if (entries_.count(id)) {
        return id;  // idempotent
    }

    Entry e;
    e.path = id + ".f32";
    e.shape = record.hvector.shape;
    e.tags = record.tags;
    e.prompt = record.hvector.prompt;
    e.model_id = record.hvector.model_id;
    e.timestep_mode = record.hvector.timestep_mode;
    e.ldm_timestep = record.hvector.ldm_timestep;

    try {
        util::write_file_atomic(dir_ / e.path, util::pack_f32le(record.hvector.values));
    } catch (const Error& err) {
        if (err.code() == ErrorCode::IoError && errno == ENOSPC) {
            raise(ErrorCode::StorageFull, "no space left writing " + e.path);
        }
        throw;
    }
    entries_.emplace(id, std::move(e));
    save_manifest();
    return id;
}

VectorRecord VectorStore::materialize(const std::string& id, const Entry& entry) const {
    VectorRecord record;
    record.id = id;
    record.tags = entry.tags;
    record.hvector.shape = entry.shape;
    record.hvector.prompt = entry.prompt;
    record.hvector.model_id = entry.model_id;
    record.hvector.timestep_mode = entry.timestep_mode;
    record.hvector.ldm_timestep = entry.ldm_timestep;
    record.hvector.values = util::unpack_f32le(util::read_file(dir_ / entry.path));
    if (record.hvector.values.size() != entry.shape.size()) {
        raise(ErrorCode::ManifestCorrupt, "record file truncated: " + entry.path);
    }
    return record;
}

std::vector<VectorRecord> VectorStore::query(const TagMap& tag_filter) const {
    std::shared_lock<std::shared_mutex> lock(mutex_);
    std::vector<VectorRecord> out;
    for (const auto& [id, entry] : entries_) {
        bool match = true;
        for (const auto& [k, v] : tag_filter) {
            const auto it = entry.tags.find(k);
            if (it == entry.tags.end() || it->second != v) {
                match = false;
                break;
            }
        }
        if (match) out.push_back(materialize(id, entry));
    }
    return out;  // entries_ iteration is id-ordered
}

std::optional<VectorRecord> VectorStore::get(const std::string& id) const {
    std::shared_lock<std::shared_mutex> lock(mutex_);
    const auto it = entries_.find(id);
    if (it == entries_.end()) return std::nullopt;
    return materialize(id, it->second);
}

std::size_t VectorStore::size() const {
    std::shared_lock<std::shared_mutex> lock(mutex_);
    return entries_.size();
}

HVector average_vectors(std::span<const HVector> vectors) {
    if (vectors.empty()) raise(ErrorCode::EmptyInput, "cannot average zero vectors");
    const TensorShape shape = vectors.front().shape;
    for (const HVector& v : vectors) {
        if (v.shape != shape) {
            raise(ErrorCode::ShapeMismatch,
                  "averaging " + v.shape.str() + " with " + shape.str());
        }
    }
    const std::size_t n = shape.size();
    std::vector<double> acc(n, 0.0);
    const auto& ops = kernels::active();
    for (const HVector& v : vectors) {
        ops.axpy_f32_acc(acc.data(), v.values.data(), n, 1.0);
    }
    const double inv = 1.0 / static_cast<double>(vectors.size());

    HVector mean;
    mean.shape = shape;
    mean.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        mean.values[i] = static_cast<float>(acc[i] * inv);
    }
    mean.model_id = vectors.front().model_id;
    mean.timestep_mode = vectors.front().timestep_mode;
    mean.prompt.text = "average of " + std::to_string(vectors.size()) + " vectors";
    mean.prompt.guidance_scale = 0.0;
    return mean;
}

HVector average_records(std::span<const VectorRecord> records) {
    if (records.empty()) raise(ErrorCode::EmptyInput, "cannot average zero records");
    std::vector<HVector> vectors;
    vectors.reserve(records.size());
    std::string provenance = "mean of:";
    for (const VectorRecord& r : records) {
        vectors.push_back(r.hvector);
        provenance += " " + r.id;
    }
    HVector mean = average_vectors(vectors);
    mean.prompt.text = provenance;
    return mean;
}

}  // namespace scalex
