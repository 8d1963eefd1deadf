#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "matrix.hpp"
#include "rng.hpp"

namespace deepvat {

enum class Format { csv, dvm };

/// Eight-byte header of the binary matrix format. The header is followed by
/// rows and cols as little-endian uint64, then rows*cols little-endian IEEE
/// doubles in row-major order.
inline constexpr std::array<char, 8> kDvmMagic = {'D', 'V', 'A', 'T', 'M', 'A', 'T', '1'};

inline Format format_from_name(std::string_view name) {
    if (name == "csv") return Format::csv;
    if (name == "dvm") return Format::dvm;
    throw Error("unknown matrix format '" + std::string(name) + "' (expected csv or dvm)");
}

inline Format format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".dvm" ? Format::dvm : Format::csv;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline bool parse_double(std::string_view token, double& out) {
    token = trim(token);
    if (token.empty()) return false;
    if (token.front() == '+') token.remove_prefix(1);
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::uint64_t to_little(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
    return v;
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline std::uint64_t get_u64(const char* p) {
    std::uint64_t v;
    std::memcpy(&v, p, sizeof v);
    return to_little(v);
}

}  // namespace detail

/// Parse CSV text: one object per line, comma separated. A first line that
/// contains any non-numeric token is treated as a header. Positions in error
/// messages are 1-based line and column numbers of the source text.
inline Matrix parse_csv(std::string_view text) {
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    bool first_content_line = true;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = detail::trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;

        const auto tokens = detail::split_commas(line);
        std::vector<double> row(tokens.size());
        std::size_t bad = tokens.size();
        for (std::size_t c = 0; c < tokens.size(); ++c) {
            if (!detail::parse_double(tokens[c], row[c])) {
                bad = c;
                break;
            }
        }
        if (first_content_line) {
            first_content_line = false;
            if (bad != tokens.size()) continue;  // header
        }
        if (bad != tokens.size()) {
            throw Error("csv: non-numeric token '" + std::string(detail::trim(tokens[bad])) + "' at row " +
                        std::to_string(line_no) + ", column " + std::to_string(bad + 1));
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!std::isfinite(row[c])) {
                throw Error("csv: non-finite value at row " + std::to_string(line_no) + ", column " +
                            std::to_string(c + 1));
            }
        }
        if (rows == 0) {
            cols = row.size();
        } else if (row.size() != cols) {
            throw Error("csv: row " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                        " columns, expected " + std::to_string(cols));
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw Error("csv: no data rows");
    return Matrix(rows, cols, std::move(values));
}

inline Matrix parse_dvm(std::string_view bytes) {
    constexpr std::size_t header = kDvmMagic.size() + 16;
    if (bytes.size() < header || std::memcmp(bytes.data(), kDvmMagic.data(), kDvmMagic.size()) != 0) {
        throw Error("dvm: missing or corrupt header");
    }
    const auto rows = detail::get_u64(bytes.data() + 8);
    const auto cols = detail::get_u64(bytes.data() + 16);
    if (rows == 0 || cols == 0) throw Error("dvm: empty matrix");
    if ((bytes.size() - header) / sizeof(double) / cols < rows || (bytes.size() - header) != rows * cols * 8) {
        throw Error("dvm: payload size does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    std::vector<double> values(rows * cols);
    const char* p = bytes.data() + header;
    for (std::size_t i = 0; i < values.size(); ++i, p += 8) {
        values[i] = std::bit_cast<double>(detail::get_u64(p));
        if (!std::isfinite(values[i])) {
            throw Error("dvm: non-finite value at row " + std::to_string(i / cols + 1) + ", column " +
                        std::to_string(i % cols + 1));
        }
    }
    return Matrix(rows, cols, std::move(values));
}

inline Matrix load_matrix(const std::filesystem::path& path, Format format) {
    const auto bytes = detail::read_file(path);
    try {
        return format == Format::dvm ? parse_dvm(bytes) : parse_csv(bytes);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

inline void save_matrix(const std::filesystem::path& path, const Matrix& m, Format format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    if (format == Format::dvm) {
        out.write(kDvmMagic.data(), kDvmMagic.size());
        detail::put_u64(out, m.rows());
        detail::put_u64(out, m.cols());
        for (double v : m.values()) detail::put_u64(out, std::bit_cast<std::uint64_t>(v));
    } else {
        char buf[32];
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
                if (c) out << ',';
                out << buf;
            }
            out << '\n';
        }
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline Labels parse_labels(std::string_view text) {
    std::vector<long long> raw;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = detail::trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size()) {
            throw Error("labels: non-integer token '" + std::string(line) + "' at line " + std::to_string(line_no));
        }
        if (v < 0) throw Error("labels: negative label at line " + std::to_string(line_no));
        raw.push_back(v);
    }
    if (raw.empty()) throw Error("labels: empty file");
    return relabel_contiguous(std::span<const long long>(raw));
}

inline Labels load_labels(const std::filesystem::path& path) {
    try {
        return parse_labels(detail::read_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

/// One integer per line. Used for label files and for index lists.
template <typename Int>
void save_integers(const std::filesystem::path& path, std::span<const Int> values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    for (auto v : values) out << v << '\n';
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline void save_labels(const std::filesystem::path& path, const Labels& labels) {
    save_integers<int>(path, labels);
}

inline std::vector<std::size_t> load_indices(const std::filesystem::path& path) {
    const auto text = detail::read_file(path);
    std::vector<std::size_t> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty()) continue;
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size()) {
            throw Error(path.string() + ": bad index at line " + std::to_string(line_no));
        }
        out.push_back(v);
    }
    return out;
}

inline EmbeddingSet load_embeddings(const std::filesystem::path& path, Format format) {
    return EmbeddingSet{load_matrix(path, format), std::nullopt};
}

/// Isotropic Gaussian mixture with well separated centers.
struct MixtureSpec {
    std::size_t k = 3;
    std::size_t dims = 2;
    std::size_t n_per = 100;
    double separation = 20.0;
    std::uint64_t seed = 0;
};

/// Center of component c: separation * (1 + c / dims) along axis c % dims.
inline std::vector<double> mixture_center(const MixtureSpec& spec, std::size_t c) {
    std::vector<double> center(spec.dims, 0.0);
    center[c % spec.dims] = spec.separation * static_cast<double>(1 + c / spec.dims);
    return center;
}

/// Rows are grouped by component; within a row, coordinates consume the
/// generator's normal stream in order.
inline EmbeddingSet generate_gaussian_mixture(const MixtureSpec& spec) {
    if (spec.k < 1 || spec.dims < 1 || spec.n_per < 1) throw Error("mixture: k, dims and n_per must be >= 1");
    if (!(spec.separation > 0.0)) throw Error("mixture: separation must be positive");
    SplitMix64 rng(spec.seed);
    Matrix data(spec.k * spec.n_per, spec.dims);
    Labels labels(data.rows());
    for (std::size_t c = 0; c < spec.k; ++c) {
        const auto center = mixture_center(spec, c);
        for (std::size_t i = 0; i < spec.n_per; ++i) {
            const std::size_t r = c * spec.n_per + i;
            for (std::size_t d = 0; d < spec.dims; ++d) data(r, d) = center[d] + rng.normal();
            labels[r] = static_cast<int>(c);
        }
    }
    return EmbeddingSet{std::move(data), std::move(labels)};
}

}  // namespace deepvat
