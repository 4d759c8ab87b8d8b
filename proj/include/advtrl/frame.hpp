#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace advtrl {

/// 2-D grayscale pixel grid, row-major, values in [0,1].
struct Frame {
    int height = 0;
    int width = 0;
    std::vector<float> pixels;

    Frame() = default;
    Frame(int h, int w, float fill = 0.0f)
        : height(h), width(w), pixels(static_cast<size_t>(h) * w, fill) {}

    float& at(int r, int c) { return pixels[static_cast<size_t>(r) * width + c]; }
    float at(int r, int c) const { return pixels[static_cast<size_t>(r) * width + c]; }

    bool same_shape(const Frame& o) const { return height == o.height && width == o.width; }
    size_t size() const { return pixels.size(); }

    friend bool operator==(const Frame& a, const Frame& b) {
        return a.height == b.height && a.width == b.width && a.pixels == b.pixels;
    }
};

/// Binary PGM (P5) output for frame debugging. Pixels quantized to 8 bits.
void write_pgm(const Frame& frame, const std::filesystem::path& path);

/// Reads a binary PGM (P5) file written by write_pgm (maxval 255).
Frame read_pgm(const std::filesystem::path& path);

inline uint8_t quantize_pixel(float p) {
    float v = p * 255.0f + 0.5f;
    if (v < 0.0f) v = 0.0f;
    if (v > 255.0f) v = 255.0f;
    return static_cast<uint8_t>(v);
}

inline float dequantize_pixel(uint8_t v) { return static_cast<float>(v) / 255.0f; }

}  // namespace advtrl
