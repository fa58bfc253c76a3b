#pragma once

#include <cluster/errors.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cluster {

using Integer = boost::multiprecision::cpp_int;

// Variable layout shared by a family of polynomials: x_1..x_n (Laurent)
// followed by y_1..y_m (polynomial, never inverted).
struct Signature {
    std::size_t n = 0;
    std::size_t m = 0;

    std::size_t variables() const noexcept { return n + m; }
    friend bool operator==(Signature, Signature) = default;
};

// Exponent vector over the concatenated variables (x's then y's).
class Monomial {
public:
    using exponent_type = std::int32_t;

    Monomial() = default;
    explicit Monomial(std::size_t variables) : exps_(variables, 0) {}
    explicit Monomial(std::vector<exponent_type> exps) : exps_(std::move(exps)) {}

    std::size_t size() const noexcept { return exps_.size(); }
    exponent_type operator[](std::size_t v) const { return exps_[v]; }
    exponent_type& operator[](std::size_t v) { return exps_[v]; }
    const std::vector<exponent_type>& exponents() const noexcept { return exps_; }

    std::int64_t total_degree() const noexcept {
        std::int64_t d = 0;
        for (auto e : exps_) d += e;
        return d;
    }

    bool is_one() const noexcept {
        return std::all_of(exps_.begin(), exps_.end(), [](auto e) { return e == 0; });
    }

    // Componentwise a <= b: a divides b in the polynomial sense.
    bool divides(const Monomial& other) const {
        for (std::size_t v = 0; v < exps_.size(); ++v)
            if (exps_[v] > other.exps_[v]) return false;
        return true;
    }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial r(a.size());
        for (std::size_t v = 0; v < a.size(); ++v) r.exps_[v] = add_exp(a.exps_[v], b.exps_[v]);
        return r;
    }

    friend Monomial operator/(const Monomial& a, const Monomial& b) {
        Monomial r(a.size());
        for (std::size_t v = 0; v < a.size(); ++v) r.exps_[v] = add_exp(a.exps_[v], -b.exps_[v]);
        return r;
    }

    friend bool operator==(const Monomial&, const Monomial&) = default;

private:
    static exponent_type add_exp(exponent_type a, exponent_type b) {
        exponent_type r;
        if (__builtin_add_overflow(a, b, &r)) throw overflow_error("monomial exponent overflow");
        return r;
    }

    std::vector<exponent_type> exps_;
};

// Graded lexicographic order on the concatenated exponent vector: compare
// total degree first, then the exponents of x_1, x_2, ..., y_1, ... in turn.
struct GradedLex {
    bool operator()(const Monomial& a, const Monomial& b) const {
        const auto da = a.total_degree();
        const auto db = b.total_degree();
        if (da != db) return da < db;
        return a.exponents() < b.exponents();
    }
};

class LaurentPoly {
public:
    using term_map = std::map<Monomial, Integer, GradedLex>;

    LaurentPoly() = default;
    explicit LaurentPoly(Signature sig) : sig_(sig) {}

    static LaurentPoly constant(Signature sig, const Integer& c) {
        LaurentPoly p(sig);
        if (c != 0) p.terms_.emplace(Monomial(sig.variables()), c);
        return p;
    }
    static LaurentPoly one(Signature sig) { return constant(sig, 1); }

    static LaurentPoly monomial(Signature sig, Monomial mono, const Integer& c = 1) {
        if (mono.size() != sig.variables()) {
            throw signature_error("monomial has " + std::to_string(mono.size()) +
                                  " exponents, signature expects " +
                                  std::to_string(sig.variables()));
        }
        for (std::size_t v = sig.n; v < sig.variables(); ++v) {
            if (mono[v] < 0) {
                throw signature_error("y" + std::to_string(v - sig.n + 1) +
                                      " may not carry a negative exponent");
            }
        }
        LaurentPoly p(sig);
        if (c != 0) p.terms_.emplace(std::move(mono), c);
        return p;
    }

    // x_i, 0-based i
    static LaurentPoly x(Signature sig, std::size_t i, Monomial::exponent_type e = 1) {
        Monomial mono(sig.variables());
        mono[i] = e;
        return monomial(sig, std::move(mono));
    }

    // y_j, 0-based j
    static LaurentPoly y(Signature sig, std::size_t j, Monomial::exponent_type e = 1) {
        Monomial mono(sig.variables());
        mono[sig.n + j] = e;
        return monomial(sig, std::move(mono));
    }

    Signature signature() const noexcept { return sig_; }
    const term_map& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_monomial() const noexcept { return terms_.size() == 1; }

    // Highest term in graded-lex order.
    const term_map::value_type& leading() const {
        if (terms_.empty()) throw cluster_error("zero polynomial has no leading term");
        return *terms_.rbegin();
    }

    Integer coefficient(const Monomial& mono) const {
        auto it = terms_.find(mono);
        return it == terms_.end() ? Integer(0) : it->second;
    }

    Integer constant_term() const { return coefficient(Monomial(sig_.variables())); }

    // True iff no x-exponent is nonzero in any term.
    bool is_x_free() const {
        for (const auto& [mono, c] : terms_)
            for (std::size_t v = 0; v < sig_.n; ++v)
                if (mono[v] != 0) return false;
        return true;
    }

    // Adds c * mono, dropping the term if it cancels.
    void add_term(const Monomial& mono, const Integer& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(mono, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    LaurentPoly& operator+=(const LaurentPoly& q) {
        require_same_signature(q);
        for (const auto& [mono, c] : q.terms_) add_term(mono, c);
        return *this;
    }

    LaurentPoly& operator-=(const LaurentPoly& q) {
        require_same_signature(q);
        for (const auto& [mono, c] : q.terms_) add_term(mono, -c);
        return *this;
    }

    friend LaurentPoly operator+(LaurentPoly p, const LaurentPoly& q) { return p += q; }
    friend LaurentPoly operator-(LaurentPoly p, const LaurentPoly& q) { return p -= q; }

    LaurentPoly operator-() const {
        LaurentPoly r = *this;
        for (auto& [mono, c] : r.terms_) c = -c;
        return r;
    }

    friend LaurentPoly operator*(const LaurentPoly& p, const LaurentPoly& q) {
        p.require_same_signature(q);
        LaurentPoly r(p.sig_);
        if (p.terms_.size() * q.terms_.size() >= 64) {
            if (auto packed = multiply_packed(p.terms_, q.terms_, p.sig_.variables())) {
                r.terms_ = std::move(*packed);
                return r;
            }
        }
        for (const auto& [pm, pc] : p.terms_)
            for (const auto& [qm, qc] : q.terms_) r.add_term(pm * qm, pc * qc);
        return r;
    }

    LaurentPoly& operator*=(const LaurentPoly& q) { return *this = *this * q; }

    // Exponent must be nonnegative unless the polynomial is an invertible
    // monomial (coefficient +-1, no y's).
    //
    // Repeated multiplication by the base rather than squaring: for sparse
    // multivariate operands the cost is dominated by the last product, and
    // |f^(e-1)| * |f| is far below |f^(e/2)|^2.
    LaurentPoly pow(std::int64_t e) const {
        if (e < 0) return inverse().pow(-e);
        if (e == 0) return one(sig_);
        LaurentPoly result = *this;
        for (std::int64_t i = 1; i < e; ++i) result *= *this;
        return result;
    }

    // Inverse of a unit: a single term with coefficient +-1 and no y's.
    LaurentPoly inverse() const {
        if (!is_monomial()) {
            throw signature_error("cannot invert a polynomial with " + std::to_string(size()) +
                                  " terms");
        }
        const auto& [mono, c] = *terms_.begin();
        if (c != 1 && c != -1) throw signature_error("cannot invert a non-unit coefficient");
        for (std::size_t v = sig_.n; v < sig_.variables(); ++v) {
            if (mono[v] != 0) throw signature_error("cannot invert a monomial containing y's");
        }
        return monomial(sig_, Monomial(sig_.variables()) / mono, c);
    }

    friend bool operator==(const LaurentPoly&, const LaurentPoly&) = default;

    void require_same_signature(const LaurentPoly& q) const {
        if (sig_ != q.sig_) {
            throw signature_error("signature mismatch: (n=" + std::to_string(sig_.n) +
                                  ",m=" + std::to_string(sig_.m) + ") vs (n=" +
                                  std::to_string(q.sig_.n) + ",m=" + std::to_string(q.sig_.m) +
                                  ")");
        }
    }

private:
    // Product kernel for larger operands. Exponents of the product are
    // offset into [0, range] per variable and packed into one 64-bit key,
    // so monomial multiplication becomes integer addition and the partial
    // sums collect in a hash table. Returns nullopt when the exponent box
    // does not fit in 64 bits.
    static std::optional<term_map> multiply_packed(const term_map& a, const term_map& b,
                                                   std::size_t vars) {
        using bounds_t = std::vector<std::int64_t>;
        const auto bounds = [vars](const term_map& t) {
            bounds_t lo(vars, std::numeric_limits<std::int64_t>::max());
            bounds_t hi(vars, std::numeric_limits<std::int64_t>::min());
            for (const auto& [mono, c] : t) {
                for (std::size_t v = 0; v < vars; ++v) {
                    lo[v] = std::min<std::int64_t>(lo[v], mono[v]);
                    hi[v] = std::max<std::int64_t>(hi[v], mono[v]);
                }
            }
            return std::pair{lo, hi};
        };
        const auto [alo, ahi] = bounds(a);
        const auto [blo, bhi] = bounds(b);

        std::vector<unsigned> shift(vars), width(vars);
        unsigned used = 0;
        for (std::size_t v = 0; v < vars; ++v) {
            const auto range = static_cast<std::uint64_t>((ahi[v] + bhi[v]) - (alo[v] + blo[v]));
            width[v] = static_cast<unsigned>(std::bit_width(range));
            shift[v] = used;
            used += width[v];
            if (used > 64) return std::nullopt;
        }

        using packed_terms = std::vector<std::pair<std::uint64_t, const Integer*>>;
        const auto pack = [&](const term_map& t, const bounds_t& lo) {
            packed_terms out;
            out.reserve(t.size());
            for (const auto& [mono, c] : t) {
                std::uint64_t key = 0;
                for (std::size_t v = 0; v < vars; ++v) {
                    if (width[v]) key |= static_cast<std::uint64_t>(mono[v] - lo[v]) << shift[v];
                }
                out.emplace_back(key, &c);
            }
            return out;
        };
        const packed_terms pa = pack(a, alo);
        const packed_terms pb = pack(b, blo);

        std::unordered_map<std::uint64_t, Integer> acc;
        acc.reserve(std::min<std::size_t>(pa.size() * pb.size(), std::size_t{1} << 22));
        Integer prod;
        for (const auto& [ka, ca] : pa) {
            for (const auto& [kb, cb] : pb) {
                prod = *ca;
                prod *= *cb;
                acc[ka + kb] += prod;
            }
        }

        term_map out;
        for (auto& [key, c] : acc) {
            if (c == 0) continue;
            Monomial mono(vars);
            for (std::size_t v = 0; v < vars; ++v) {
                const std::uint64_t field =
                    width[v] ? (key >> shift[v]) & (width[v] == 64 ? ~std::uint64_t{0}
                                                                   : (std::uint64_t{1} << width[v]) - 1)
                             : 0;
                const std::int64_t e = alo[v] + blo[v] + static_cast<std::int64_t>(field);
                if (e > std::numeric_limits<Monomial::exponent_type>::max() ||
                    e < std::numeric_limits<Monomial::exponent_type>::min()) {
                    throw overflow_error("monomial exponent overflow");
                }
                mono[v] = static_cast<Monomial::exponent_type>(e);
            }
            out.emplace_hint(out.end(), std::move(mono), std::move(c));
        }
        return out;
    }

    Signature sig_;
    term_map terms_;
};

inline bool is_nonnegative(const LaurentPoly& p) {
    return std::all_of(p.terms().begin(), p.terms().end(),
                       [](const auto& t) { return t.second > 0; });
}

// Exact quotient p / d in the Laurent ring.
//
// A monomial divisor is handled by exponent subtraction. Otherwise the
// leading term of the remainder is repeatedly divided by the leading term of
// d. Any quotient monomial must lie in the box
//   min_v(p) - min_v(d) <= e_v <= max_v(p) - max_v(d)
// (extreme exponents add under multiplication), so the search is finite and
// a step leaving the box, or a non-divisible coefficient, is a failure.
inline LaurentPoly exact_div(const LaurentPoly& p, const LaurentPoly& d) {
    p.require_same_signature(d);
    if (d.is_zero()) throw division_failure("division by zero polynomial");
    const Signature sig = p.signature();
    if (p.is_zero()) return LaurentPoly(sig);

    const auto quotient_monomial_ok = [&](const Monomial& m) {
        for (std::size_t v = sig.n; v < sig.variables(); ++v)
            if (m[v] < 0) return false;
        return true;
    };

    if (d.is_monomial()) {
        const auto& [dm, dc] = *d.terms().begin();
        LaurentPoly q(sig);
        for (const auto& [pm, pc] : p.terms()) {
            if (pc % dc != 0) throw division_failure("coefficient not divisible");
            Monomial qm = pm / dm;
            if (!quotient_monomial_ok(qm)) throw division_failure("quotient needs a negative y exponent");
            q.add_term(qm, pc / dc);
        }
        return q;
    }

    const std::size_t vars = sig.variables();
    const auto bounds = [vars](const LaurentPoly& f) {
        std::vector<std::int64_t> lo(vars, std::numeric_limits<std::int64_t>::max());
        std::vector<std::int64_t> hi(vars, std::numeric_limits<std::int64_t>::min());
        for (const auto& [mono, c] : f.terms()) {
            for (std::size_t v = 0; v < vars; ++v) {
                lo[v] = std::min<std::int64_t>(lo[v], mono[v]);
                hi[v] = std::max<std::int64_t>(hi[v], mono[v]);
            }
        }
        return std::pair{lo, hi};
    };
    const auto [plo, phi] = bounds(p);
    const auto [dlo, dhi] = bounds(d);
    std::vector<std::int64_t> qlo(vars), qhi(vars);
    for (std::size_t v = 0; v < vars; ++v) {
        qlo[v] = plo[v] - dlo[v];
        qhi[v] = phi[v] - dhi[v];
        if (v >= sig.n) qlo[v] = std::max<std::int64_t>(qlo[v], 0);
        if (qlo[v] > qhi[v]) throw division_failure("exponent ranges admit no quotient");
    }

    const auto& [dm, dc] = d.leading();
    LaurentPoly q(sig);
    LaurentPoly r = p;
    while (!r.is_zero()) {
        const auto& [rm, rc] = r.leading();
        if (rc % dc != 0) throw division_failure("leading coefficient not divisible");
        Monomial qm = rm / dm;
        for (std::size_t v = 0; v < vars; ++v) {
            if (qm[v] < qlo[v] || qm[v] > qhi[v]) {
                throw division_failure("leading term not divisible within the quotient box");
            }
        }
        const Integer qc = rc / dc;
        for (const auto& [tm, tc] : d.terms()) r.add_term(tm * qm, -(tc * qc));
        q.add_term(qm, qc);
    }
    return q;
}

// Per-variable assignment for substitute(): index v (x's first, then y's)
// maps to a replacement value; unset entries map each variable to itself.
class Assignment {
public:
    Assignment(Signature source, Signature target)
        : source_(source), target_(target), values_(source.variables()) {}

    Assignment& set(std::size_t variable, LaurentPoly value) {
        if (variable >= values_.size()) throw signature_error("assignment variable out of range");
        if (value.signature() != target_) throw signature_error("assignment value has the wrong signature");
        values_[variable] = std::move(value);
        return *this;
    }
    Assignment& set_x(std::size_t i, LaurentPoly value) { return set(i, std::move(value)); }
    Assignment& set_y(std::size_t j, LaurentPoly value) { return set(source_.n + j, std::move(value)); }

    Signature source() const noexcept { return source_; }
    Signature target() const noexcept { return target_; }

    LaurentPoly value(std::size_t variable) const {
        if (values_[variable]) return *values_[variable];
        if (source_ != target_) {
            throw signature_error("unassigned variable in a signature-changing substitution");
        }
        Monomial mono(target_.variables());
        mono[variable] = 1;
        return LaurentPoly::monomial(target_, std::move(mono));
    }

private:
    Signature source_;
    Signature target_;
    std::vector<std::optional<LaurentPoly>> values_;
};

// Image of p under the assignment. Negative exponents need unit monomial values.
inline LaurentPoly substitute(const LaurentPoly& p, const Assignment& assignment) {
    if (p.signature() != assignment.source()) {
        throw signature_error("substitution source signature does not match polynomial");
    }
    const Signature target = assignment.target();
    const std::size_t vars = p.signature().variables();
    std::map<std::pair<std::size_t, std::int64_t>, LaurentPoly> powers;
    std::vector<std::optional<LaurentPoly>> base(vars);

    LaurentPoly result(target);
    for (const auto& [mono, c] : p.terms()) {
        LaurentPoly term = LaurentPoly::constant(target, c);
        for (std::size_t v = 0; v < vars; ++v) {
            const auto e = mono[v];
            if (e == 0) continue;
            auto it = powers.find({v, e});
            if (it == powers.end()) {
                if (!base[v]) base[v] = assignment.value(v);
                if (e < 0 && !base[v]->is_monomial()) {
                    throw signature_error("cannot invert the non-monomial value assigned to variable " +
                                          std::to_string(v + 1));
                }
                it = powers.emplace(std::pair{v, std::int64_t{e}}, base[v]->pow(e)).first;
            }
            term *= it->second;
        }
        result += term;
    }
    return result;
}

// Grading: one integer vector per variable (x's first, then y's), all of
// the same length. Returns the common degree of every term, or nullopt when
// the terms disagree.
using Grading = std::vector<std::vector<std::int64_t>>;

inline std::optional<std::vector<std::int64_t>> multidegree(const LaurentPoly& p,
                                                            const Grading& grading) {
    if (p.is_zero()) throw cluster_error("multidegree of the zero polynomial");
    const std::size_t vars = p.signature().variables();
    if (grading.size() != vars) throw signature_error("grading does not cover every variable");
    const std::size_t dim = grading.front().size();
    std::optional<std::vector<std::int64_t>> common;
    for (const auto& [mono, c] : p.terms()) {
        std::vector<std::int64_t> deg(dim, 0);
        for (std::size_t v = 0; v < vars; ++v) {
            if (mono[v] == 0) continue;
            for (std::size_t r = 0; r < dim; ++r) deg[r] += std::int64_t{mono[v]} * grading[v][r];
        }
        if (!common) {
            common = std::move(deg);
        } else if (*common != deg) {
            return std::nullopt;
        }
    }
    return common;
}

}  // namespace cluster
