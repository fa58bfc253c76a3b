#pragma once

#include <cluster/int_matrix.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <numeric>
#include <optional>
#include <queue>
#include <sstream>

namespace cluster {

// B-tilde = [B; C]: an (m+n) x n integer matrix whose top n x n block is
// sign-skew-symmetric. The sign pattern is checked on construction and on
// every mutation, which is how non-totally-sign-skew-symmetric inputs show up.
class ExtendedExchangeMatrix {
public:
    ExtendedExchangeMatrix(std::size_t n, std::size_t m, IntMatrix full)
        : n_(n), m_(m), full_(std::move(full)) {
        if (full_.cols() != n_ || full_.rows() != n_ + m_) {
            throw dimension_error("extended exchange matrix must be " +
                                  std::to_string(n_ + m_) + "x" + std::to_string(n_) + ", got " +
                                  full_.shape_string());
        }
        if (!is_sign_skew_symmetric(exchange())) {
            throw sign_pattern_error("exchange matrix is not sign-skew-symmetric: " +
                                     to_string(exchange()));
        }
    }

    static ExtendedExchangeMatrix principal(const IntMatrix& b) {
        require_square(b, "principal coefficients");
        return {b.rows(), b.rows(), stack(b, IntMatrix::identity(b.rows()))};
    }

    std::size_t rank() const noexcept { return n_; }
    std::size_t frozen() const noexcept { return m_; }
    const IntMatrix& full() const noexcept { return full_; }

    IntMatrix exchange() const { return full_.block_rows(0, n_); }
    IntMatrix coefficients() const {
        if (m_ == 0) throw dimension_error("extended exchange matrix has no coefficient rows");
        return full_.block_rows(n_, m_);
    }

    ExtendedExchangeMatrix mutate(Direction k) const {
        auto next = mutate_matrix(full_, k);
        if (!is_sign_skew_symmetric(next.block_rows(0, n_))) {
            throw sign_pattern_error(
                "mutation in direction " + std::to_string(k.one_based()) +
                " produced an exchange matrix that is not sign-skew-symmetric: the input is not "
                "totally sign-skew-symmetric");
        }
        return {n_, m_, std::move(next)};
    }

    friend bool operator==(const ExtendedExchangeMatrix&, const ExtendedExchangeMatrix&) = default;

private:
    static std::string to_string(const IntMatrix& m) {
        std::ostringstream os;
        os << m;
        return os.str();
    }

    std::size_t n_;
    std::size_t m_;
    IntMatrix full_;
};

// Positive diagonal S with S*B skew-symmetric, normalized so that the
// entries on every connected component of B have gcd 1.
class SkewSymmetrizer {
public:
    explicit SkewSymmetrizer(std::vector<std::int64_t> diag) : diag_(std::move(diag)) {
        if (diag_.empty()) throw dimension_error("empty skew-symmetrizer");
        for (auto s : diag_) {
            if (s <= 0) throw cluster_error("skew-symmetrizer entries must be positive");
        }
    }

    std::size_t size() const noexcept { return diag_.size(); }
    std::int64_t operator[](std::size_t i) const { return diag_[i]; }
    const std::vector<std::int64_t>& diag() const noexcept { return diag_; }

    // lcm(s_1..s_n); L * S^-1 is an integer matrix.
    std::int64_t lcm() const {
        std::int64_t l = 1;
        for (auto s : diag_) l = checked::mul(l / std::gcd(l, s), s);
        return l;
    }

    IntMatrix matrix() const {
        IntMatrix m(diag_.size(), diag_.size());
        for (std::size_t i = 0; i < diag_.size(); ++i) m(i, i) = diag_[i];
        return m;
    }

    // L * S^-1 with L = lcm().
    IntMatrix scaled_inverse() const {
        const auto l = lcm();
        IntMatrix m(diag_.size(), diag_.size());
        for (std::size_t i = 0; i < diag_.size(); ++i) m(i, i) = l / diag_[i];
        return m;
    }

    // s_i b_ij = -s_j b_ji for all i, j
    bool symmetrizes(const IntMatrix& b) const {
        if (!b.is_square() || b.rows() != diag_.size()) return false;
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j)
                if (checked::mul(diag_[i], b(i, j)) != checked::neg(checked::mul(diag_[j], b(j, i))))
                    return false;
        return true;
    }

    friend bool operator==(const SkewSymmetrizer&, const SkewSymmetrizer&) = default;

private:
    std::vector<std::int64_t> diag_;
};

// Propagates the ratios s_j / s_i = -b_ij / b_ji along each connected
// component of the underlying graph with exact rationals, clears
// denominators per component, and verifies every constraint globally.
inline std::optional<SkewSymmetrizer> find_skew_symmetrizer(const IntMatrix& b) {
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::cpp_rational;

    if (!is_sign_skew_symmetric(b)) {
        throw sign_pattern_error("find_skew_symmetrizer requires a sign-skew-symmetric matrix");
    }
    const std::size_t n = b.rows();
    std::vector<std::optional<cpp_rational>> ratio(n);
    std::vector<std::int64_t> diag(n, 0);

    for (std::size_t root = 0; root < n; ++root) {
        if (ratio[root]) continue;
        std::vector<std::size_t> component;
        std::queue<std::size_t> pending;
        ratio[root] = cpp_rational(1);
        pending.push(root);
        while (!pending.empty()) {
            const auto i = pending.front();
            pending.pop();
            component.push_back(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || b(i, j) == 0) continue;
                const cpp_rational sj = *ratio[i] * cpp_rational(cpp_int(-b(i, j))) / cpp_rational(cpp_int(b(j, i)));
                if (!ratio[j]) {
                    ratio[j] = sj;
                    pending.push(j);
                } else if (*ratio[j] != sj) {
                    return std::nullopt;
                }
            }
        }
        cpp_int denominators = 1;
        for (auto i : component) {
            const cpp_int d = boost::multiprecision::denominator(*ratio[i]);
            denominators = denominators / boost::multiprecision::gcd(denominators, d) * d;
        }
        cpp_int g = 0;
        std::vector<cpp_int> scaled;
        for (auto i : component) {
            scaled.push_back(boost::multiprecision::numerator(cpp_rational(*ratio[i] * denominators)));
            g = boost::multiprecision::gcd(g, scaled.back());
        }
        for (std::size_t c = 0; c < component.size(); ++c) {
            const cpp_int v = scaled[c] / g;
            if (v > std::numeric_limits<std::int64_t>::max()) {
                throw overflow_error("skew-symmetrizer entry does not fit in 64 bits");
            }
            diag[component[c]] = static_cast<std::int64_t>(v);
        }
    }
    SkewSymmetrizer s(std::move(diag));
    if (!s.symmetrizes(b)) return std::nullopt;
    return s;
}

// C-matrix recurrence: the bottom block of mutate_matrix applied to [B; C].
inline IntMatrix c_mutate(const IntMatrix& b, const IntMatrix& c, Direction k) {
    require_square(b, "c_mutate");
    if (c.cols() != b.cols()) {
        throw dimension_error("c_mutate: C is " + c.shape_string() + " but B is " +
                              b.shape_string());
    }
    const std::size_t n = b.cols();
    const std::size_t kk = k.index();
    if (kk >= n) {
        throw index_error("mutation direction " + std::to_string(k.one_based()) +
                          " out of range 1.." + std::to_string(n));
    }
    IntMatrix out(c.rows(), n);
    for (std::size_t i = 0; i < c.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == kk) {
                out(i, j) = checked::neg(c(i, j));
                continue;
            }
            const auto cik = c(i, kk);
            const auto bkj = b(kk, j);
            auto v = checked::add(c(i, j), checked::mul(cik, positive_part(checked::neg(bkj))));
            out(i, j) = checked::add(v, checked::mul(positive_part(cik), bkj));
        }
    }
    return out;
}

// G-matrix recurrence. Column k becomes
//   -g_k + sum_l [b_lk]_+ g_l - sum_l [c_lk]_+ b0_l
// (g_l, b0_l the l-th columns of G and B0); other columns are unchanged.
inline IntMatrix g_mutate(const IntMatrix& g, const IntMatrix& b, const IntMatrix& c,
                          const IntMatrix& b0, Direction k) {
    const std::size_t n = g.rows();
    for (const IntMatrix* m : {&g, &b, &c, &b0}) {
        if (m->rows() != n || m->cols() != n) {
            throw dimension_error("g_mutate expects four " + std::to_string(n) + "x" +
                                  std::to_string(n) + " matrices, got " + m->shape_string());
        }
    }
    const std::size_t kk = k.index();
    if (kk >= n) {
        throw index_error("mutation direction " + std::to_string(k.one_based()) +
                          " out of range 1.." + std::to_string(n));
    }
    IntMatrix out = g;
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t v = checked::neg(g(i, kk));
        for (std::size_t l = 0; l < n; ++l) {
            v = checked::add(v, checked::mul(g(i, l), positive_part(b(l, kk))));
            v = checked::sub(v, checked::mul(b0(i, l), positive_part(c(l, kk))));
        }
        out(i, kk) = v;
    }
    return out;
}

// Exact determinant by fraction-free (Bareiss) elimination.
inline boost::multiprecision::cpp_int determinant(const IntMatrix& a) {
    using boost::multiprecision::cpp_int;
    require_square(a, "determinant");
    const std::size_t n = a.rows();
    std::vector<std::vector<cpp_int>> m(n, std::vector<cpp_int>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = a(i, j);
    cpp_int sign = 1;
    cpp_int prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && m[p][k] == 0) ++p;
            if (p == n) return 0;
            std::swap(m[k], m[p]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

}  // namespace cluster
