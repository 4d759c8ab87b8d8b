#include "advtrl/frame.hpp"

#include <fstream>
#include <string>

#include "advtrl/errors.hpp"

namespace advtrl {

void write_pgm(const Frame& frame, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    std::vector<uint8_t> row(static_cast<size_t>(frame.width));
    for (int r = 0; r < frame.height; ++r) {
        for (int c = 0; c < frame.width; ++c) row[static_cast<size_t>(c)] = quantize_pixel(frame.at(r, c));
        out.write(reinterpret_cast<const char*>(row.data()), frame.width);
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Frame read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255)
        throw IoError("not a supported PGM file: " + path.string());
    in.get();  // single whitespace after header
    Frame frame(h, w);
    std::vector<uint8_t> row(static_cast<size_t>(w));
    for (int r = 0; r < h; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), w);
        if (!in) throw IoError("truncated PGM file: " + path.string());
        for (int c = 0; c < w; ++c) frame.at(r, c) = dequantize_pixel(row[static_cast<size_t>(c)]);
    }
    return frame;
}

}  // namespace advtrl
