#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace deepvat {

/// Grayscale reordered dissimilarity image; 0 is black (low dissimilarity).
struct RdiImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t operator()(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
};

/// Linear min-max normalisation to 0..255; a constant matrix is all black.
inline RdiImage rdi_image(const Matrix& m, std::size_t scale_factor = 1) {
    if (m.empty()) throw Error("render: empty matrix");
    if (scale_factor < 1) throw Error("render: scale factor must be >= 1");
    const auto [lo_it, hi_it] = std::minmax_element(m.values().begin(), m.values().end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;

    RdiImage img{m.cols() * scale_factor, m.rows() * scale_factor, {}};
    img.pixels.resize(img.width * img.height);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const auto px =
                range > 0.0 ? static_cast<std::uint8_t>(std::lround(255.0 * (m(r, c) - lo) / range)) : std::uint8_t{0};
            for (std::size_t dr = 0; dr < scale_factor; ++dr) {
                auto* out = &img.pixels[(r * scale_factor + dr) * img.width + c * scale_factor];
                std::fill(out, out + scale_factor, px);
            }
        }
    }
    return img;
}

/// Binary PGM: "P5\n<width> <height>\n255\n" followed by the raster.
inline std::string encode_pgm(const RdiImage& img) {
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

inline void render_rdi(const Matrix& m, const std::filesystem::path& path, std::size_t scale_factor = 1) {
    const auto bytes = encode_pgm(rdi_image(m, scale_factor));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("render: cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("render: write failed for '" + path.string() + "'");
}

/// Reads a P5 graymap with maxval 255 (comments allowed in the header).
inline RdiImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("pgm: cannot open '" + path.string() + "'");
    auto token = [&in]() {
        std::string t;
        char ch;
        while (in.get(ch)) {
            if (ch == '#') {
                std::string skip;
                std::getline(in, skip);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(ch))) {
                if (!t.empty()) break;
                continue;
            }
            t.push_back(ch);
        }
        return t;
    };
    if (token() != "P5") throw Error("pgm: not a P5 file");
    RdiImage img;
    img.width = std::stoul(token());
    img.height = std::stoul(token());
    if (token() != "255") throw Error("pgm: maxval must be 255");
    img.pixels.resize(img.width * img.height);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) throw Error("pgm: truncated raster");
    return img;
}

}  // namespace deepvat
