#pragma once

#include <cluster/errors.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace cluster {

namespace checked {

inline std::int64_t add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw overflow_error("integer overflow in addition: " + std::to_string(a) + " + " +
                             std::to_string(b));
    }
    return r;
}

inline std::int64_t sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) {
        throw overflow_error("integer overflow in subtraction: " + std::to_string(a) + " - " +
                             std::to_string(b));
    }
    return r;
}

inline std::int64_t mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw overflow_error("integer overflow in multiplication: " + std::to_string(a) + " * " +
                             std::to_string(b));
    }
    return r;
}

inline std::int64_t neg(std::int64_t a) { return sub(0, a); }

}  // namespace checked

// A mutation direction. Stored 0-based; the 1-based form is what users see.
class Direction {
public:
    constexpr Direction() = default;

    static constexpr Direction from_zero_based(std::size_t index) { return Direction(index); }

    static Direction from_one_based(long long k) {
        if (k < 1) {
            throw index_error("direction " + std::to_string(k) + " is not positive");
        }
        return Direction(static_cast<std::size_t>(k - 1));
    }

    constexpr std::size_t index() const noexcept { return index_; }
    constexpr int one_based() const noexcept { return static_cast<int>(index_) + 1; }

    friend constexpr bool operator==(Direction, Direction) = default;

private:
    constexpr explicit Direction(std::size_t index) : index_(index) {}
    std::size_t index_ = 0;
};

// [a]_+ = max(a, 0)
constexpr std::int64_t positive_part(std::int64_t a) noexcept { return a > 0 ? a : 0; }

// Dense row-major matrix of exact 64-bit integers. All arithmetic that can
// grow entries goes through the checked:: helpers; overflow throws.
class IntMatrix {
public:
    using value_type = std::int64_t;

    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {
        if (rows == 0 || cols == 0) {
            throw dimension_error("matrix must have at least one row and one column");
        }
    }

    IntMatrix(std::initializer_list<std::initializer_list<value_type>> rows)
        : IntMatrix(from_rows(std::vector<std::vector<value_type>>(rows.begin(), rows.end()))) {}

    static IntMatrix from_rows(const std::vector<std::vector<value_type>>& rows) {
        if (rows.empty() || rows.front().empty()) {
            throw dimension_error("matrix must have at least one row and one column");
        }
        IntMatrix m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) {
                throw dimension_error("ragged matrix literal: row " + std::to_string(i + 1) +
                                      " has " + std::to_string(rows[i].size()) +
                                      " entries, expected " + std::to_string(m.cols_));
            }
            std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * m.cols_);
        }
        return m;
    }

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    value_type& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    value_type operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    value_type at(std::size_t i, std::size_t j) const {
        if (i >= rows_ || j >= cols_) {
            throw index_error("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                              ") outside " + shape_string());
        }
        return (*this)(i, j);
    }

    std::span<const value_type> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<const value_type> data() const noexcept { return data_; }

    std::vector<value_type> column(std::size_t j) const {
        std::vector<value_type> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    std::vector<std::vector<value_type>> to_rows() const {
        std::vector<std::vector<value_type>> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
        return out;
    }

    // Rows [first, first + count) as a new matrix.
    IntMatrix block_rows(std::size_t first, std::size_t count) const {
        if (first + count > rows_) {
            throw dimension_error("row block out of range for " + shape_string());
        }
        IntMatrix out(count, cols_);
        std::copy(data_.begin() + first * cols_, data_.begin() + (first + count) * cols_,
                  out.data_.begin());
        return out;
    }

    IntMatrix transpose() const {
        IntMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    std::string shape_string() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
        if (a.cols_ != b.rows_) {
            throw dimension_error("cannot multiply " + a.shape_string() + " by " +
                                  b.shape_string());
        }
        IntMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t l = 0; l < a.cols_; ++l) {
                const auto ail = a(i, l);
                if (ail == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    out(i, j) = checked::add(out(i, j), checked::mul(ail, b(l, j)));
            }
        return out;
    }

    friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) {
            throw dimension_error("cannot subtract " + b.shape_string() + " from " +
                                  a.shape_string());
        }
        IntMatrix out(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            out.data_[i] = checked::sub(a.data_[i], b.data_[i]);
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
        os << '[';
        for (std::size_t i = 0; i < m.rows_; ++i) {
            os << (i ? ",[" : "[");
            for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? "," : "") << m(i, j);
            os << ']';
        }
        return os << ']';
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<value_type> data_;
};

// Vertical concatenation [top; bottom].
inline IntMatrix stack(const IntMatrix& top, const IntMatrix& bottom) {
    if (top.cols() != bottom.cols()) {
        throw dimension_error("cannot stack " + top.shape_string() + " over " +
                              bottom.shape_string());
    }
    IntMatrix out(top.rows() + bottom.rows(), top.cols());
    for (std::size_t i = 0; i < top.rows(); ++i)
        for (std::size_t j = 0; j < top.cols(); ++j) out(i, j) = top(i, j);
    for (std::size_t i = 0; i < bottom.rows(); ++i)
        for (std::size_t j = 0; j < bottom.cols(); ++j) out(top.rows() + i, j) = bottom(i, j);
    return out;
}

// Matrix mutation in direction k of an (m+n) x n matrix:
//   a'_ij = -a_ij                                  if i = k or j = k
//   a'_ij = a_ij + a_ik [-a_kj]_+ + [a_ik]_+ a_kj   otherwise
inline IntMatrix mutate_matrix(const IntMatrix& a, Direction k) {
    const std::size_t n = a.cols();
    const std::size_t kk = k.index();
    if (kk >= n) {
        throw index_error("mutation direction " + std::to_string(k.one_based()) +
                          " out of range 1.." + std::to_string(n));
    }
    if (a.rows() < n) {
        throw dimension_error("matrix " + a.shape_string() + " has fewer rows than columns");
    }
    IntMatrix out(a.rows(), n);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == kk || j == kk) {
                out(i, j) = checked::neg(a(i, j));
                continue;
            }
            const auto aik = a(i, kk);
            const auto akj = a(kk, j);
            auto v = checked::add(a(i, j), checked::mul(aik, positive_part(checked::neg(akj))));
            out(i, j) = checked::add(v, checked::mul(positive_part(aik), akj));
        }
    }
    return out;
}

inline void require_square(const IntMatrix& b, const char* what) {
    if (!b.is_square()) {
        throw dimension_error(std::string(what) + " requires a square matrix, got " +
                              b.shape_string());
    }
}

// b_ij b_ji < 0 or b_ij = b_ji = 0, for every pair (i, j).
inline bool is_sign_skew_symmetric(const IntMatrix& b) {
    require_square(b, "is_sign_skew_symmetric");
    for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = i; j < b.cols(); ++j) {
            const auto x = b(i, j);
            const auto y = b(j, i);
            if (x == 0 && y == 0) continue;
            if ((x > 0 && y < 0) || (x < 0 && y > 0)) continue;
            return false;
        }
    }
    return true;
}

inline bool is_skew_symmetric(const IntMatrix& b) {
    require_square(b, "is_skew_symmetric");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = i; j < b.cols(); ++j)
            if (b(i, j) != -b(j, i)) return false;
    return true;
}

// Gamma(B) has an edge i -> j whenever b_ij > 0. True iff that graph is a DAG.
inline bool is_acyclic(const IntMatrix& b) {
    if (!is_sign_skew_symmetric(b)) {
        throw sign_pattern_error("is_acyclic requires a sign-skew-symmetric matrix");
    }
    const std::size_t n = b.rows();
    enum class Mark : unsigned char { fresh, open, done };
    std::vector<Mark> mark(n, Mark::fresh);
    // iterative DFS; stack holds (vertex, next neighbour to try)
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t root = 0; root < n; ++root) {
        if (mark[root] != Mark::fresh) continue;
        stack.emplace_back(root, 0);
        mark[root] = Mark::open;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next == n) {
                mark[v] = Mark::done;
                stack.pop_back();
                continue;
            }
            const std::size_t w = next++;
            if (b(v, w) <= 0) continue;
            if (mark[w] == Mark::open) return false;
            if (mark[w] == Mark::fresh) {
                mark[w] = Mark::open;
                stack.emplace_back(w, 0);
            }
        }
    }
    return true;
}

}  // namespace cluster
