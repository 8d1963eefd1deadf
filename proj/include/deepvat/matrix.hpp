#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace deepvat {

/// Thrown for every contract violation and malformed input in the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_) throw Error("matrix: value count does not match shape");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

using Labels = std::vector<int>;

/// N objects described by p-dimensional feature vectors, optionally labelled.
struct EmbeddingSet {
    Matrix data;
    std::optional<Labels> labels;

    std::size_t n_objects() const { return data.rows(); }
    std::size_t dims() const { return data.cols(); }
};

/// Remap arbitrary integer labels onto 0..k-1 in ascending value order.
inline Labels relabel_contiguous(std::span<const long long> raw) {
    std::vector<long long> distinct(raw.begin(), raw.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    Labels out;
    out.reserve(raw.size());
    for (auto v : raw) {
        out.push_back(static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), v) - distinct.begin()));
    }
    return out;
}

inline Labels relabel_contiguous(std::span<const int> raw) {
    std::vector<long long> wide(raw.begin(), raw.end());
    return relabel_contiguous(std::span<const long long>(wide));
}

/// Copy the listed rows (and their labels, if any) into a new set.
inline EmbeddingSet select_rows(const EmbeddingSet& set, std::span<const std::size_t> indices) {
    EmbeddingSet out{Matrix(indices.size(), set.dims()), std::nullopt};
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const auto src = set.data.row(indices[k]);
        auto dst = out.data.row(k);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    if (set.labels) {
        Labels sub;
        sub.reserve(indices.size());
        for (auto i : indices) sub.push_back((*set.labels)[i]);
        out.labels = std::move(sub);
    }
    return out;
}

}  // namespace deepvat
