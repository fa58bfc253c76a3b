#pragma once

#include <cluster/exchange_matrix.hpp>
#include <cluster/kronecker.hpp>
#include <cluster/laurent.hpp>
#include <cluster/laurent_text.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cluster {

struct EngineOptions {
    // Re-check positivity and principal-grading homogeneity on every new
    // cluster variable. Off only for performance runs.
    bool assertions = true;
    // Compute new cluster variables through their F-polynomials when every
    // input is homogeneous with nonnegative coefficients (see
    // detail::graded_exchange). The generic Laurent division is used
    // otherwise, or always when this is off.
    bool graded_kernel = true;
};

struct GVector {
    std::vector<std::int64_t> entries;
    friend bool operator==(const GVector&, const GVector&) = default;
};

// Degrees of the principal grading: deg(x_i) = e_i, deg(y_j) = -(column j of B0).
inline Grading principal_grading(const IntMatrix& b0) {
    require_square(b0, "principal grading");
    const std::size_t n = b0.rows();
    Grading grading(2 * n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) grading[i][i] = 1;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t r = 0; r < n; ++r) grading[n + j][r] = checked::neg(b0(r, j));
    return grading;
}

inline GVector g_vector_of(const LaurentPoly& v, const IntMatrix& b0) {
    auto deg = multidegree(v, principal_grading(b0));
    if (!deg) {
        throw not_homogeneous("cluster variable " + to_string(v) +
                              " is not homogeneous under the principal grading");
    }
    return {std::move(*deg)};
}

// A cluster variable's F-polynomial: the y-polynomial left after setting every x to 1.
class FPolynomial {
public:
    explicit FPolynomial(LaurentPoly poly) : poly_(std::move(poly)) {
        if (!poly_.is_x_free()) throw cluster_error("F-polynomial must not involve x variables");
    }

    const LaurentPoly& poly() const noexcept { return poly_; }
    bool has_constant_term_one() const { return poly_.constant_term() == 1; }

    // A term with coefficient 1 whose monomial is divisible by every other
    // occurring monomial. Such a monomial has the largest total degree, so
    // it can only be the graded-lex leading term.
    bool has_unique_maximal_monomial() const {
        if (poly_.is_zero()) return false;
        const auto& [top, coeff] = poly_.leading();
        if (coeff != 1) return false;
        for (const auto& [mono, c] : poly_.terms())
            if (!mono.divides(top)) return false;
        return true;
    }

    friend bool operator==(const FPolynomial&, const FPolynomial&) = default;

private:
    LaurentPoly poly_;
};

// Sets x_1 = ... = x_n = 1 without validating the constant term.
inline LaurentPoly evaluate_x_at_one(const LaurentPoly& v) {
    const Signature sig = v.signature();
    Assignment ones(sig, sig);
    for (std::size_t i = 0; i < sig.n; ++i) ones.set_x(i, LaurentPoly::one(sig));
    return substitute(v, ones);
}

inline FPolynomial f_polynomial_of(const LaurentPoly& v) {
    FPolynomial f(evaluate_x_at_one(v));
    if (!f.has_constant_term_one()) {
        throw assertion_failure("F-polynomial " + to_string(f.poly()) + " of " + to_string(v) +
                                " does not have constant term 1");
    }
    return f;
}

// y-hat_k = y_k * prod_i x_i^{b0_ik}
inline std::vector<LaurentPoly> hat_y(const IntMatrix& b0) {
    require_square(b0, "hat_y");
    const std::size_t n = b0.rows();
    const Signature sig{n, n};
    std::vector<LaurentPoly> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        Monomial mono(sig.variables());
        for (std::size_t i = 0; i < n; ++i) {
            if (b0(i, k) > std::numeric_limits<Monomial::exponent_type>::max() ||
                b0(i, k) < std::numeric_limits<Monomial::exponent_type>::min()) {
                throw overflow_error("exchange matrix entry too large for an exponent");
            }
            mono[i] = static_cast<Monomial::exponent_type>(b0(i, k));
        }
        mono[n + k] = 1;
        out.push_back(LaurentPoly::monomial(sig, std::move(mono)));
    }
    return out;
}

// (prod_j x_j^{g_j}) * F(y-hat_1, ..., y-hat_n)
inline LaurentPoly reconstruct_separation(const GVector& g, const FPolynomial& f,
                                          const IntMatrix& b0) {
    const std::size_t n = b0.rows();
    const Signature sig{n, n};
    if (g.entries.size() != n || f.poly().signature() != sig) {
        throw dimension_error("separation formula inputs do not match rank " + std::to_string(n));
    }
    const auto hats = hat_y(b0);
    Assignment to_hat(sig, sig);
    for (std::size_t k = 0; k < n; ++k) to_hat.set_y(k, hats[k]);
    Monomial xg(sig.variables());
    for (std::size_t j = 0; j < n; ++j) xg[j] = static_cast<Monomial::exponent_type>(g.entries[j]);
    return LaurentPoly::monomial(sig, std::move(xg)) * substitute(f.poly(), to_hat);
}

// A labeled seed of the cluster pattern with principal coefficients at the
// initial exchange matrix B0. Cluster variables are stored expanded in the
// initial cluster x_1..x_n and the frozen y_1..y_n.
class Seed {
public:
    Seed(IntMatrix initial, std::vector<LaurentPoly> vars, ExtendedExchangeMatrix ext)
        : initial_(std::move(initial)), vars_(std::move(vars)), ext_(std::move(ext)) {
        const std::size_t n = ext_.rank();
        if (initial_.rows() != n || initial_.cols() != n || vars_.size() != n ||
            ext_.frozen() != n) {
            throw dimension_error("seed components disagree on the rank");
        }
        for (const auto& v : vars_) {
            if (v.signature() != Signature{n, n}) throw signature_error("cluster variable has the wrong signature");
        }
    }

    std::size_t rank() const noexcept { return ext_.rank(); }
    const std::vector<LaurentPoly>& variables() const noexcept { return vars_; }
    const LaurentPoly& variable(std::size_t i) const { return vars_.at(i); }
    const ExtendedExchangeMatrix& extended() const noexcept { return ext_; }
    const IntMatrix& initial_matrix() const noexcept { return initial_; }
    Signature signature() const noexcept { return {rank(), rank()}; }

    IntMatrix exchange() const { return ext_.exchange(); }
    IntMatrix c_matrix() const { return ext_.coefficients(); }

    // Columns are the g-vectors of the cluster variables.
    IntMatrix g_matrix() const {
        const std::size_t n = rank();
        IntMatrix g(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            const auto col = g_vector_of(vars_[j], initial_);
            for (std::size_t i = 0; i < n; ++i) g(i, j) = col.entries[i];
        }
        return g;
    }

    // Seeds compare by cluster and extended matrix; B0 is pattern context.
    friend bool operator==(const Seed& a, const Seed& b) {
        return a.ext_ == b.ext_ && a.vars_ == b.vars_;
    }

private:
    IntMatrix initial_;
    std::vector<LaurentPoly> vars_;
    ExtendedExchangeMatrix ext_;
};

inline Seed new_principal_seed(const IntMatrix& b) {
    require_square(b, "new_principal_seed");
    if (!is_sign_skew_symmetric(b)) {
        std::ostringstream os;
        os << b;
        throw sign_pattern_error("initial exchange matrix is not sign-skew-symmetric: " + os.str());
    }
    const std::size_t n = b.rows();
    const Signature sig{n, n};
    std::vector<LaurentPoly> vars;
    for (std::size_t i = 0; i < n; ++i) vars.push_back(LaurentPoly::x(sig, i));
    return Seed(b, std::move(vars), ExtendedExchangeMatrix::principal(b));
}

// Checks a cluster variable against the positivity and homogeneity guarantees.
inline void assert_cluster_variable(const LaurentPoly& v, const IntMatrix& b0) {
    if (!is_nonnegative(v)) {
        throw assertion_failure("cluster variable " + to_string(v) + " has a negative coefficient");
    }
    if (!multidegree(v, principal_grading(b0))) {
        throw assertion_failure("cluster variable " + to_string(v) +
                                " is not homogeneous under the principal grading");
    }
}

// Right-hand side of the exchange relation in direction k:
//   prod x_i^{[b_ik]_+} + prod x_i^{[-b_ik]_+}
// over the extended cluster (x's, then the frozen y's).
inline LaurentPoly exchange_binomial(const Seed& s, Direction k) {
    const std::size_t n = s.rank();
    if (k.index() >= n) {
        throw index_error("mutation direction " + std::to_string(k.one_based()) +
                          " out of range 1.." + std::to_string(n));
    }
    const Signature sig = s.signature();
    const IntMatrix& bt = s.extended().full();
    const std::size_t kk = k.index();

    LaurentPoly plus = LaurentPoly::one(sig);
    LaurentPoly minus = LaurentPoly::one(sig);
    Monomial plus_y(sig.variables());
    Monomial minus_y(sig.variables());
    for (std::size_t i = 0; i < n; ++i) {
        const auto b = bt(i, kk);
        if (b > 0) plus *= s.variable(i).pow(b);
        if (b < 0) minus *= s.variable(i).pow(-b);
        const auto c = bt(n + i, kk);
        if (c > 0) plus_y[n + i] = static_cast<Monomial::exponent_type>(c);
        if (c < 0) minus_y[n + i] = static_cast<Monomial::exponent_type>(-c);
    }
    plus *= LaurentPoly::monomial(sig, plus_y);
    minus *= LaurentPoly::monomial(sig, minus_y);
    return plus + minus;
}

namespace detail {

// Principal-grading degree, F-polynomial (signature (0, n)) and F(1,...,1)
// of one cluster variable.
struct GradedPart {
    std::vector<std::int64_t> degree;
    LaurentPoly f;
    Integer at_one = 0;
    std::vector<std::size_t> top;  // largest exponent of each y
};

inline std::optional<GradedPart> graded_part(const LaurentPoly& v, const Grading& grading, std::size_t n) {
    if (v.is_zero() || !is_nonnegative(v)) return std::nullopt;
    auto degree = multidegree(v, grading);
    if (!degree) return std::nullopt;
    GradedPart part{std::move(*degree), LaurentPoly(Signature{0, n}), 0, std::vector<std::size_t>(n, 0)};
    for (const auto& [mono, c] : v.terms()) {
        Monomial ym(n);
        for (std::size_t j = 0; j < n; ++j) {
            ym[j] = mono[n + j];
            part.top[j] = std::max<std::size_t>(part.top[j], static_cast<std::size_t>(ym[j]));
        }
        part.f.add_term(ym, c);
        part.at_one += c;
    }
    return part;
}

// Largest packed integer (in bits) the graded kernel will build. Several
// of these are alive at once, so this caps its memory at a few GB.
inline constexpr std::size_t max_packed_bits = std::size_t{1} << 31;

// A homogeneous v equals x^deg(v) * F(y-hat) with F = v at x = 1, and
// v -> (deg v, F) turns products into (sum, product). The exchange
// relation is therefore solved on F-polynomials, packed by Kronecker
// substitution, and mapped back. The quotient is confirmed by multiplying
// it out again. Returns nullopt whenever a precondition fails, leaving the
// caller to take the generic route.
inline std::optional<LaurentPoly> graded_exchange(const Seed& s, Direction k) {
    const std::size_t n = s.rank();
    const std::size_t kk = k.index();
    const IntMatrix& b0 = s.initial_matrix();
    const IntMatrix& bt = s.extended().full();
    const Grading grading = principal_grading(b0);

    std::vector<std::optional<GradedPart>> parts(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i != kk && bt(i, kk) == 0) continue;
        parts[i] = graded_part(s.variable(i), grading, n);
        if (!parts[i]) return std::nullopt;
    }

    struct Side {
        std::vector<std::int64_t> degree;
        std::vector<std::size_t> top;
        Monomial y;
        Integer at_one;  // value at y = 1, which bounds every coefficient
    };
    const auto side = [&](std::int64_t sign) {
        Side out{std::vector<std::int64_t>(n, 0), std::vector<std::size_t>(n, 0), Monomial(n), 1};
        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t e = sign * bt(i, kk);
            if (e <= 0) continue;
            for (std::size_t r = 0; r < n; ++r) {
                out.degree[r] = checked::add(out.degree[r], checked::mul(e, parts[i]->degree[r]));
                out.top[r] += static_cast<std::size_t>(e) * parts[i]->top[r];
            }
            out.at_one *= boost::multiprecision::pow(parts[i]->at_one, static_cast<unsigned>(e));
        }
        for (std::size_t j = 0; j < n; ++j) {
            const std::int64_t c = sign * bt(n + j, kk);
            if (c <= 0) continue;
            for (std::size_t r = 0; r < n; ++r) {
                out.degree[r] = checked::add(out.degree[r], checked::mul(c, grading[n + j][r]));
            }
            out.y[j] = static_cast<Monomial::exponent_type>(c);
            out.top[j] += static_cast<std::size_t>(c);
        }
        return out;
    };
    const Side plus = side(1);
    const Side minus = side(-1);
    if (plus.degree != minus.degree) return std::nullopt;

    const GradedPart& xk = *parts[kk];
    std::vector<std::size_t> box(n), qbox(n);
    for (std::size_t j = 0; j < n; ++j) {
        box[j] = std::max(plus.top[j], minus.top[j]) + 1;
        if (xk.top[j] >= box[j]) return std::nullopt;
        qbox[j] = box[j] - xk.top[j];
    }
    // Every coefficient met below (partial products, the binomial, F_k and
    // a correct quotient times F_k) is at most binomial(1) or F_k(1).
    const std::size_t bits =
        std::max(kronecker::bit_length(plus.at_one + minus.at_one) + 1, kronecker::bit_length(xk.at_one));
    const kronecker::Layout layout(box, bits);
    if (layout.slots > max_packed_bits / bits) return std::nullopt;

    const auto packed_side = [&](const Side& side_, std::int64_t sign, kronecker::Natural& out) {
        mpz_set_ui(out.get(), 1);
        kronecker::Natural t;
        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t e = sign * bt(i, kk);
            if (e <= 0) continue;
            kronecker::pack(parts[i]->f, layout, t);
            mpz_pow_ui(t.get(), t.get(), static_cast<unsigned long>(e));
            mpz_mul(out.get(), out.get(), t.get());
        }
        mpz_mul_2exp(out.get(), out.get(), layout.index(side_.y) * bits);
    };
    kronecker::Natural binomial, other, divisor;
    packed_side(plus, 1, binomial);
    packed_side(minus, -1, other);
    mpz_add(binomial.get(), binomial.get(), other.get());
    kronecker::pack(xk.f, layout, divisor);

    // An inexact division yields garbage here, which the product check
    // below rejects.
    kronecker::Natural quotient;
    mpz_divexact(quotient.get(), binomial.get(), divisor.get());
    const LaurentPoly f = kronecker::unpack(quotient, layout, qbox);

    // Q * F_k has its exponents inside the box by construction; with the
    // coefficient bound below its packed digits are unique, so equal
    // integers mean equal polynomials.
    Integer f_at_one = 0;
    for (const auto& [mono, c] : f.terms()) f_at_one += c;
    if (kronecker::bit_length(f_at_one) + kronecker::bit_length(xk.at_one) > bits) return std::nullopt;
    kronecker::pack(f, layout, other);
    mpz_mul(other.get(), other.get(), divisor.get());
    if (mpz_cmp(other.get(), binomial.get()) != 0) return std::nullopt;

    const Signature sig = s.signature();
    LaurentPoly out(sig);
    for (const auto& [ym, c] : f.terms()) {
        Monomial mono(sig.variables());
        for (std::size_t i = 0; i < n; ++i) {
            std::int64_t e = plus.degree[i] - xk.degree[i];
            for (std::size_t j = 0; j < n; ++j) e = checked::add(e, checked::mul(b0(i, j), ym[j]));
            if (e > std::numeric_limits<Monomial::exponent_type>::max() ||
                e < std::numeric_limits<Monomial::exponent_type>::min()) {
                throw overflow_error("monomial exponent overflow");
            }
            mono[i] = static_cast<Monomial::exponent_type>(e);
        }
        for (std::size_t j = 0; j < n; ++j) mono[n + j] = ym[j];
        out.add_term(mono, c);
    }
    return out;
}

}  // namespace detail

// x_k' = exchange_binomial / x_k, an exact quotient in the Laurent ring.
inline Seed mutate_seed(const Seed& s, Direction k, const EngineOptions& options = {}) {
    if (k.index() >= s.rank()) {
        throw index_error("mutation direction " + std::to_string(k.one_based()) +
                          " out of range 1.." + std::to_string(s.rank()));
    }
    auto ext = s.extended().mutate(k);
    std::vector<LaurentPoly> vars = s.variables();
    const std::size_t kk = k.index();
    std::optional<LaurentPoly> graded;
    if (options.graded_kernel) graded = detail::graded_exchange(s, k);
    if (graded) {
        vars[kk] = std::move(*graded);
    } else {
        try {
            vars[kk] = exact_div(exchange_binomial(s, k), s.variable(kk));
        } catch (const division_failure& e) {
            throw division_failure(std::string("exchange relation in direction ") +
                                   std::to_string(k.one_based()) + " is not exactly divisible: " +
                                   e.what());
        }
    }
    if (options.assertions) assert_cluster_variable(vars[kk], s.initial_matrix());
    return Seed(s.initial_matrix(), std::move(vars), std::move(ext));
}

// Deterministic text form of the whole seed, used for fingerprints and
// structural keys.
inline std::string canonical_form(const Seed& s) {
    std::ostringstream os;
    os << "n=" << s.rank() << ";Bt=" << s.extended().full();
    for (std::size_t i = 0; i < s.rank(); ++i) os << ";x" << (i + 1) << '=' << to_string(s.variable(i));
    return os.str();
}

}  // namespace cluster
