#pragma once

#include <cluster/laurent.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cluster {

// Canonical text: terms from highest to lowest in graded-lex order, e.g.
//   "2*x1^-1*x2*y1 + 1"
// Unit coefficients are omitted on non-constant terms, exponent 1 is
// omitted, and the zero polynomial prints as "0".
inline std::string to_string(const LaurentPoly& p) {
    if (p.is_zero()) return "0";
    const Signature sig = p.signature();
    std::string out;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [mono, coeff] = *it;
        const bool negative = coeff < 0;
        const Integer magnitude = negative ? Integer(-coeff) : coeff;
        if (first) {
            if (negative) out += '-';
        } else {
            out += negative ? " - " : " + ";
        }
        first = false;

        std::string factors;
        for (std::size_t v = 0; v < sig.variables(); ++v) {
            const auto e = mono[v];
            if (e == 0) continue;
            if (!factors.empty()) factors += '*';
            factors += v < sig.n ? 'x' : 'y';
            factors += std::to_string(v < sig.n ? v + 1 : v - sig.n + 1);
            if (e != 1) factors += '^' + std::to_string(e);
        }
        if (factors.empty()) {
            out += magnitude.str();
        } else if (magnitude == 1) {
            out += factors;
        } else {
            out += magnitude.str() + '*' + factors;
        }
    }
    return out;
}

namespace detail {

class PolyParser {
public:
    PolyParser(std::string_view text, Signature sig) : text_(text), sig_(sig) {}

    LaurentPoly parse() {
        LaurentPoly result(sig_);
        skip_space();
        if (at_end()) fail("empty polynomial");
        bool negative = false;
        if (peek() == '-' || peek() == '+') {
            negative = next() == '-';
            skip_space();
        }
        for (;;) {
            auto [mono, coeff] = parse_term();
            result.add_term(mono, negative ? Integer(-coeff) : coeff);
            skip_space();
            if (at_end()) break;
            const char op = next();
            if (op != '+' && op != '-') fail(std::string("expected '+' or '-', found '") + op + "'");
            negative = op == '-';
            skip_space();
        }
        return result;
    }

private:
    std::pair<Monomial, Integer> parse_term() {
        Monomial mono(sig_.variables());
        Integer coeff = 1;
        for (;;) {
            skip_space();
            if (at_end()) fail("unexpected end of input");
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                coeff *= Integer(parse_digits());
            } else if (c == 'x' || c == 'y') {
                ++pos_;
                const std::string digits = parse_digits();
                const std::size_t idx = std::stoul(digits);
                const std::size_t limit = c == 'x' ? sig_.n : sig_.m;
                if (idx < 1 || idx > limit) {
                    fail(std::string(1, c) + digits + " is outside the signature (n=" +
                         std::to_string(sig_.n) + ", m=" + std::to_string(sig_.m) + ")");
                }
                std::int64_t e = 1;
                skip_space();
                if (!at_end() && peek() == '^') {
                    ++pos_;
                    skip_space();
                    bool neg = false;
                    if (!at_end() && peek() == '-') {
                        neg = true;
                        ++pos_;
                    }
                    e = std::stoll(parse_digits());
                    if (neg) e = -e;
                }
                const std::size_t v = c == 'x' ? idx - 1 : sig_.n + idx - 1;
                const std::int64_t total = std::int64_t{mono[v]} + e;
                if (total > std::numeric_limits<Monomial::exponent_type>::max() ||
                    total < std::numeric_limits<Monomial::exponent_type>::min()) {
                    fail("exponent out of range");
                }
                mono[v] = static_cast<Monomial::exponent_type>(total);
                if (v >= sig_.n && mono[v] < 0) fail("negative exponent on y" + std::to_string(idx));
            } else {
                fail(std::string("unexpected character '") + c + "'");
            }
            skip_space();
            if (at_end() || peek() != '*') break;
            ++pos_;
        }
        return {std::move(mono), std::move(coeff)};
    }

    std::string parse_digits() {
        const std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (start == pos_) fail("expected digits");
        return std::string(text_.substr(start, pos_ - start));
    }

    void skip_space() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char next() { return text_[pos_++]; }

    [[noreturn]] void fail(const std::string& what) const {
        throw parse_error("polynomial parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    Signature sig_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline LaurentPoly parse_laurent(std::string_view text, Signature sig) {
    try {
        return detail::PolyParser(text, sig).parse();
    } catch (const std::out_of_range&) {
        throw parse_error("polynomial parse error: number out of range");
    }
}

}  // namespace cluster
