#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace scalex::png {

// Encode 8-bit RGB pixels (row-major, no padding) as a PNG byte stream.
// Deterministic for fixed input.
std::vector<std::uint8_t> encode_rgb8(std::span<const std::uint8_t> rgb,
                                      int width, int height);

// True when the buffer starts with a PNG signature and a plausible IHDR.
bool looks_like_png(std::span<const std::uint8_t> bytes);

// Parse width/height from the IHDR chunk; throws UndecodableImage.
void read_dimensions(std::span<const std::uint8_t> bytes, int& width, int& height);

}  // namespace scalex::png
