#include <cluster/laurent.hpp>
#include <cluster/laurent_text.hpp>

#include <gtest/gtest.h>

#include "oracle.hpp"

#include <random>

using namespace cluster;

namespace {

const Signature S22{2, 2};

LaurentPoly P(std::string_view text, Signature sig = S22) { return parse_laurent(text, sig); }

LaurentPoly random_poly(std::mt19937& rng, Signature sig, int terms, bool laurent = true) {
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<int> xexp(laurent ? -2 : 0, 3);
    std::uniform_int_distribution<int> yexp(0, 2);
    LaurentPoly p(sig);
    for (int t = 0; t < terms; ++t) {
        Monomial m(sig.variables());
        for (std::size_t v = 0; v < sig.variables(); ++v) m[v] = v < sig.n ? xexp(rng) : yexp(rng);
        p.add_term(m, coeff(rng));
    }
    return p;
}

std::vector<oracle::Q> random_point(std::mt19937& rng, std::size_t size) {
    std::uniform_int_distribution<int> num(1, 97);
    std::vector<oracle::Q> out;
    for (std::size_t i = 0; i < size; ++i) out.emplace_back(num(rng), num(rng) + 1);
    return out;
}

}  // namespace

TEST(Laurent, AdditionCancelsTerms) {
    const auto p = P("x1 + y1") + P("-x1 + 2");
    EXPECT_EQ(p, P("y1 + 2"));
    EXPECT_TRUE((P("x1") - P("x1")).is_zero());
}

TEST(Laurent, MultiplicationExample) {
    EXPECT_EQ(P("x1^-1 + y1") * P("x1 + 1"), P("1 + x1^-1 + x1*y1 + y1"));
}

TEST(Laurent, SignatureMismatchRejected) {
    EXPECT_THROW(P("x1") + P("x1", {1, 1}), signature_error);
    EXPECT_THROW(LaurentPoly::monomial(S22, Monomial({0, 0, -1, 0})), signature_error);
}

TEST(Laurent, InverseOnlyForUnits) {
    EXPECT_EQ(P("-x1^2*x2^-1").inverse(), P("-x1^-2*x2"));
    EXPECT_THROW(P("2*x1").inverse(), signature_error);
    EXPECT_THROW(P("x1*y1").inverse(), signature_error);
    EXPECT_THROW(P("x1 + 1").inverse(), signature_error);
    EXPECT_EQ(P("x1").pow(-3), P("x1^-3"));
}

TEST(ExactDiv, ExchangeRelationExample) {
    // (x2 + y1) / x1
    EXPECT_EQ(exact_div(P("x2 + y1"), P("x1")), P("x1^-1*x2 + x1^-1*y1"));
}

TEST(ExactDiv, GeneralDivisor) {
    EXPECT_EQ(exact_div(P("x1^2 - 1"), P("x1 - 1")), P("x1 + 1"));
    EXPECT_EQ(exact_div(P("x1^-1*y1*y2 + x1^-1*y1 + 2*y2 + 2"), P("y2 + 1")), P("x1^-1*y1 + 2"));
}

TEST(ExactDiv, Failures) {
    EXPECT_THROW(exact_div(P("x1 + 1"), P("x1 - 1")), division_failure);
    EXPECT_THROW(exact_div(P("x1 + 1"), P("0")), division_failure);
    EXPECT_THROW(exact_div(P("3*x1"), P("2")), division_failure);
    // a y in the denominator is not allowed in the quotient
    EXPECT_THROW(exact_div(P("x1"), P("y1")), division_failure);
    EXPECT_THROW(exact_div(P("x1 + 1"), P("y1 + 1")), division_failure);
    EXPECT_TRUE(exact_div(P("0"), P("x1 + 1")).is_zero());
}

TEST(Substitute, ReplacesVariables) {
    Assignment a(S22, S22);
    a.set_x(0, P("x1 + y1")).set_y(1, P("x2^2"));
    EXPECT_EQ(substitute(P("x1^2*y2 + x2"), a), P("x1^2*x2^2 + 2*x1*x2^2*y1 + x2^2*y1^2 + x2"));
    // negative powers need a unit value
    EXPECT_THROW(substitute(P("x1^-1"), a), signature_error);
    Assignment units(S22, S22);
    units.set_x(0, P("x2"));
    EXPECT_EQ(substitute(P("x1^-2 + 1"), units), P("x2^-2 + 1"));
}

TEST(Substitute, SignatureChange) {
    Assignment a(S22, {1, 0});
    EXPECT_THROW(substitute(P("x1"), a), signature_error);
    a.set_x(0, P("x1", {1, 0})).set_x(1, P("1", {1, 0})).set_y(0, P("2", {1, 0})).set_y(1, P("x1^-1", {1, 0}));
    EXPECT_EQ(substitute(P("x1*y1 + x2*y2"), a), P("2*x1 + x1^-1", {1, 0}));
}

TEST(Multidegree, PrincipalGradingExamples) {
    // deg x1 = e1, deg x2 = e2, deg y1 = (0,1), deg y2 = (-1,0) for B = [[0,1],[-1,0]]
    const Grading g{{1, 0}, {0, 1}, {0, 1}, {-1, 0}};
    EXPECT_EQ(multidegree(P("x1^-1*x2 + x1^-1*y1"), g), (std::vector<std::int64_t>{-1, 1}));
    EXPECT_FALSE(multidegree(P("x1 + x2"), g).has_value());
    EXPECT_THROW(multidegree(P("0"), g), cluster_error);
    EXPECT_THROW(multidegree(P("x1"), Grading{{1}}), signature_error);
}

TEST(Multidegree, AdditiveUnderProducts) {
    std::mt19937 rng(5);
    const Grading g{{1, 0}, {0, 1}, {0, 1}, {-1, 0}};
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_poly(rng, S22, 1);
        const auto q = random_poly(rng, S22, 1);
        if (p.is_zero() || q.is_zero()) continue;
        const auto dp = multidegree(p, g);
        const auto dq = multidegree(q, g);
        const auto dpq = multidegree(p * q, g);
        ASSERT_TRUE(dp && dq && dpq);
        for (std::size_t r = 0; r < 2; ++r) EXPECT_EQ((*dpq)[r], (*dp)[r] + (*dq)[r]);
    }
}

TEST(Laurent, NonnegativeCoefficients) {
    EXPECT_TRUE(is_nonnegative(P("x1 + 2*y1")));
    EXPECT_FALSE(is_nonnegative(P("x1 - y1")));
    EXPECT_TRUE(is_nonnegative(P("0")));
}

TEST(LaurentText, CanonicalForm) {
    EXPECT_EQ(to_string(P("1 + 2*y1*x2*x1^-1")), "2*x1^-1*x2*y1 + 1");
    EXPECT_EQ(to_string(P("-x1 + 3")), "-x1 + 3");
    EXPECT_EQ(to_string(P("x1 - x1")), "0");
    EXPECT_EQ(to_string(P("-1")), "-1");
    EXPECT_EQ(to_string(P("x1*x1*x1^-2")), "1");
}

TEST(LaurentText, ParseErrors) {
    EXPECT_THROW(P(""), parse_error);
    EXPECT_THROW(P("x3"), parse_error);
    EXPECT_THROW(P("y1^-1"), parse_error);
    EXPECT_THROW(P("x1 +"), parse_error);
    EXPECT_THROW(P("x1 ? 2"), parse_error);
    EXPECT_THROW(P("z1"), parse_error);
    EXPECT_THROW(P("x99999999999999999999999"), parse_error);
}

TEST(LaurentText, RoundTripOnRandomPolynomials) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_poly(rng, S22, 1 + trial % 6);
        EXPECT_EQ(parse_laurent(to_string(p), S22), p) << to_string(p);
    }
}

TEST(LaurentProperty, RingOperationsMatchEvaluation) {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_poly(rng, S22, 4);
        const auto q = random_poly(rng, S22, 4);
        const auto r = random_poly(rng, S22, 3);
        const auto pt = random_point(rng, 4);
        EXPECT_EQ(oracle::evaluate(p + q, pt), oracle::evaluate(p, pt) + oracle::evaluate(q, pt));
        EXPECT_EQ(oracle::evaluate(p - q, pt), oracle::evaluate(p, pt) - oracle::evaluate(q, pt));
        EXPECT_EQ(oracle::evaluate(p * q, pt), oracle::evaluate(p, pt) * oracle::evaluate(q, pt));
        EXPECT_EQ(p * q, q * p);
        EXPECT_EQ((p * q) * r, p * (q * r));
        EXPECT_EQ(p * (q + r), p * q + p * r);
        EXPECT_EQ(p + (-p), LaurentPoly(S22));
    }
}

TEST(LaurentProperty, DivisionRoundTrip) {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const auto q = random_poly(rng, S22, 1 + trial % 5);
        auto d = random_poly(rng, S22, 1 + trial % 4);
        if (d.is_zero()) continue;
        EXPECT_EQ(exact_div(q * d, d), q);
        if (d.size() > 1) {
            // d is not a unit, so it cannot divide q*d + 1
            EXPECT_THROW(exact_div(q * d + LaurentPoly::one(S22), d), division_failure);
        }
    }
}
