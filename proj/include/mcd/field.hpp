#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcd/error.hpp"

namespace mcd {

struct Cell {
    int row = 0;
    int col = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Row-major 2D field with fixed shape. Used for observations, trials,
/// statistic and variability fields, and masks.
template <typename T>
class Field {
public:
    Field() = default;

    Field(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols) {
        if (rows <= 0 || cols <= 0)
            throw InvalidInput("field dimensions must be positive, got " +
                               std::to_string(rows) + "x" + std::to_string(cols));
        data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
    }

    Field(int rows, int cols, std::vector<T> values)
        : rows_(rows), cols_(cols), data_(std::move(values)) {
        if (rows <= 0 || cols <= 0)
            throw InvalidInput("field dimensions must be positive, got " +
                               std::to_string(rows) + "x" + std::to_string(cols));
        if (data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
            throw InvalidInput("field has " + std::to_string(data_.size()) +
                               " values, expected " + std::to_string(rows * cols));
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int r, int c) const noexcept {
        return r >= 0 && r < rows_ && c >= 0 && c < cols_;
    }
    bool contains(Cell cell) const noexcept { return contains(cell.row, cell.col); }

    std::size_t index(int r, int c) const noexcept {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c);
    }

    T& operator()(int r, int c) noexcept { return data_[index(r, c)]; }
    const T& operator()(int r, int c) const noexcept { return data_[index(r, c)]; }
    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    template <typename U>
    bool same_shape(const Field<U>& other) const noexcept {
        return rows_ == other.rows() && cols_ == other.cols();
    }

    friend bool operator==(const Field&, const Field&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

/// Observations Y(s). Counts are stored as doubles holding integral values.
using Grid = Field<double>;
/// Per-cell Binomial trial counts N(s).
using TrialsMap = Field<std::int64_t>;
/// Binary mask; 0 = off, 1 = on.
using Mask = Field<std::uint8_t>;

inline std::size_t count_on(const Mask& mask) {
    std::size_t n = 0;
    for (auto v : mask.values()) n += v != 0;
    return n;
}

template <typename T, typename U>
void require_same_shape(const Field<T>& a, const Field<U>& b, const char* what) {
    if (!a.same_shape(b))
        throw InvalidInput(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) +
                           "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                           "x" + std::to_string(b.cols()) + ")");
}

}  // namespace mcd
