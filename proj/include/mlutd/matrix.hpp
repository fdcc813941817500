#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace mlutd {

/// Dense rows x cols matrix stored column by column: node-major rows, one column per layer.
template <typename T>
class ColumnMatrix {
public:
    ColumnMatrix() = default;
    ColumnMatrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T& operator()(std::size_t row, std::size_t col) {
        assert(row < rows_ && col < cols_);
        return data_[col * rows_ + row];
    }
    const T& operator()(std::size_t row, std::size_t col) const {
        assert(row < rows_ && col < cols_);
        return data_[col * rows_ + row];
    }

    std::span<T> column(std::size_t col) { return {data_.data() + col * rows_, rows_}; }
    std::span<const T> column(std::size_t col) const { return {data_.data() + col * rows_, rows_}; }

    const std::vector<T>& data() const noexcept { return data_; }

    friend bool operator==(const ColumnMatrix&, const ColumnMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

}  // namespace mlutd
