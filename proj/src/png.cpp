#include "scalex/png.hpp"

#include <zlib.h>

#include <cstring>

#include "scalex/errors.hpp"

namespace scalex::png {

namespace {

const std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  std::span<const std::uint8_t> data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const auto crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(4 + data.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::vector<std::uint8_t> encode_rgb8(std::span<const std::uint8_t> rgb,
                                      int width, int height) {
    if (width <= 0 || height <= 0 ||
        rgb.size() != static_cast<std::size_t>(width) * height * 3) {
        raise(ErrorCode::UndecodableImage, "pixel buffer does not match dimensions");
    }

    // Scanlines with filter byte 0 (None).
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (1 + 3 * width));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        const std::uint8_t* row = rgb.data() + static_cast<std::size_t>(y) * width * 3;
        raw.insert(raw.end(), row, row + 3 * width);
    }

    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(compressed_size);
    if (compress2(compressed.data(), &compressed_size, raw.data(),
                  static_cast<uLong>(raw.size()), Z_BEST_SPEED) != Z_OK) {
        raise(ErrorCode::IoError, "zlib compression failed");
    }
    compressed.resize(compressed_size);

    std::vector<std::uint8_t> out;
    out.insert(out.end(), kSignature, kSignature + 8);

    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width));
    put_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // color type: truecolor
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", compressed);
    append_chunk(out, "IEND", {});
    return out;
}

bool looks_like_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 + 25) return false;  // signature + IHDR chunk
    if (std::memcmp(bytes.data(), kSignature, 8) != 0) return false;
    return std::memcmp(bytes.data() + 12, "IHDR", 4) == 0;
}

void read_dimensions(std::span<const std::uint8_t> bytes, int& width, int& height) {
    if (!looks_like_png(bytes)) {
        raise(ErrorCode::UndecodableImage, "not a PNG stream");
    }
    auto u32 = [&](std::size_t off) {
        return (static_cast<std::uint32_t>(bytes[off]) << 24) |
               (static_cast<std::uint32_t>(bytes[off + 1]) << 16) |
               (static_cast<std::uint32_t>(bytes[off + 2]) << 8) |
               static_cast<std::uint32_t>(bytes[off + 3]);
    };
    width = static_cast<int>(u32(16));
    height = static_cast<int>(u32(20));
    if (width <= 0 || height <= 0) {
        raise(ErrorCode::UndecodableImage, "invalid PNG dimensions");
    }
}

}  // namespace scalex::png
