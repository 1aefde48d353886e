#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <type_traits>
#include <vector>

#include "mcd/field.hpp"
#include "mcd/window.hpp"

namespace mcd {

/// (rows+1) x (cols+1) prefix-sum table. Rectangle sums are four lookups.
/// Integer accumulators are exact; the floating-point build uses
/// compensated summation along rows and columns.
template <typename T>
class SummedAreaTable {
    static_assert(std::is_arithmetic_v<T>);

public:
    SummedAreaTable() = default;

    template <typename U>
    explicit SummedAreaTable(const Field<U>& grid)
        : rows_(grid.rows()), cols_(grid.cols()) {
        if (grid.empty()) throw InvalidInput("cannot build a summed-area table of an empty grid");
        const std::size_t stride = static_cast<std::size_t>(cols_) + 1;
        table_.assign((static_cast<std::size_t>(rows_) + 1) * stride, T{});
        if constexpr (std::is_floating_point_v<T>) {
            std::vector<T> col_sum(stride, T{}), col_comp(stride, T{});
            for (int i = 0; i < rows_; ++i) {
                T row_sum{}, row_comp{};
                for (int j = 0; j < cols_; ++j) {
                    neumaier_add(row_sum, row_comp, static_cast<T>(grid(i, j)));
                    neumaier_add(col_sum[j + 1], col_comp[j + 1], row_sum + row_comp);
                    table_[(static_cast<std::size_t>(i) + 1) * stride + j + 1] =
                        col_sum[j + 1] + col_comp[j + 1];
                }
            }
        } else {
            for (int i = 0; i < rows_; ++i) {
                T row_sum{};
                for (int j = 0; j < cols_; ++j) {
                    row_sum += static_cast<T>(grid(i, j));
                    const std::size_t up = static_cast<std::size_t>(i) * stride + j + 1;
                    table_[up + stride] = table_[up] + row_sum;
                }
            }
        }
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    /// Prefix sum over [0, r) x [0, c).
    T prefix(int r, int c) const noexcept {
        return table_[static_cast<std::size_t>(r) * (static_cast<std::size_t>(cols_) + 1) +
                      static_cast<std::size_t>(c)];
    }

    /// Sum over the inclusive rectangle [r0, r1] x [c0, c1]; bounds must lie inside the grid.
    T rect_sum(int r0, int c0, int r1, int c1) const noexcept {
        return prefix(r1 + 1, c1 + 1) - prefix(r0, c1 + 1) - prefix(r1 + 1, c0) + prefix(r0, c0);
    }

    T total() const noexcept { return prefix(rows_, cols_); }

private:
    static void neumaier_add(T& sum, T& comp, T value) noexcept {
        const T t = sum + value;
        if (std::abs(sum) >= std::abs(value))
            comp += (sum - t) + value;
        else
            comp += (value - t) + sum;
        sum = t;
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> table_;
};

template <typename T, typename U>
SummedAreaTable<T> build_sat(const Field<U>& grid) {
    return SummedAreaTable<T>(grid);
}

template <typename T>
struct WindowSum {
    T sum{};
    std::int64_t count = 0;
};

/// Sum and clipped cell count of `window` centered at `center`. Circles are
/// evaluated as a stack of one-row rectangles.
template <typename T>
WindowSum<T> window_sum(const SummedAreaTable<T>& sat, Cell center, const WindowSpec& window) {
    if (center.row < 0 || center.row >= sat.rows() || center.col < 0 || center.col >= sat.cols())
        throw InvalidInput("window center (" + std::to_string(center.row) + "," +
                           std::to_string(center.col) + ") is outside the grid");
    WindowSum<T> out;
    const int r = window.radius;
    if (window.shape == WindowShape::Square) {
        const int r0 = std::max(0, center.row - r), r1 = std::min(sat.rows() - 1, center.row + r);
        const int c0 = std::max(0, center.col - r), c1 = std::min(sat.cols() - 1, center.col + r);
        out.sum = sat.rect_sum(r0, c0, r1, c1);
        out.count = static_cast<std::int64_t>(r1 - r0 + 1) * (c1 - c0 + 1);
        return out;
    }
    const int lo = std::max(-r, -center.row);
    const int hi = std::min(r, sat.rows() - 1 - center.row);
    for (int di = lo; di <= hi; ++di) {
        const int w = window.half_width(di);
        const int row = center.row + di;
        const int c0 = std::max(0, center.col - w), c1 = std::min(sat.cols() - 1, center.col + w);
        out.sum += sat.rect_sum(row, c0, row, c1);
        out.count += c1 - c0 + 1;
    }
    return out;
}

/// Enumerates in-grid cells of a window, in row-major order.
template <typename F>
void for_each_window_cell(int rows, int cols, Cell center, const WindowSpec& window, F&& f) {
    const int r = window.radius;
    const int lo = std::max(-r, -center.row);
    const int hi = std::min(r, rows - 1 - center.row);
    for (int di = lo; di <= hi; ++di) {
        const int w = window.half_width(di);
        const int c0 = std::max(0, center.col - w), c1 = std::min(cols - 1, center.col + w);
        for (int c = c0; c <= c1; ++c) f(Cell{center.row + di, c});
    }
}

}  // namespace mcd
