#pragma once

// Kronecker substitution for polynomials with nonnegative coefficients in
// y_1..y_m: the coefficient of y^e is stored in a fixed-width bit slot of
// one GMP integer, at slot index sum_j e_j * stride_j. Multiplying packed
// integers multiplies the polynomials as long as every exponent of the
// result stays inside the box and every coefficient fits in its slot.

#include <cluster/errors.hpp>
#include <cluster/laurent.hpp>

#include <gmp.h>

#include <cstdint>
#include <iterator>
#include <vector>

namespace cluster::kronecker {

class Natural {
public:
    Natural() { mpz_init(z_); }
    ~Natural() { mpz_clear(z_); }
    Natural(const Natural&) = delete;
    Natural& operator=(const Natural&) = delete;

    mpz_ptr get() noexcept { return z_; }
    mpz_srcptr get() const noexcept { return z_; }

private:
    mpz_t z_;
};

inline std::size_t bit_length(const Integer& x) {
    return x == 0 ? 0 : boost::multiprecision::msb(x) + 1;
}

struct Layout {
    std::vector<std::size_t> extent;
    std::vector<std::size_t> stride;
    std::size_t bits = 0;
    std::size_t slots = 1;

    Layout(std::vector<std::size_t> ext, std::size_t slot_bits)
        : extent(std::move(ext)), stride(extent.size()), bits(slot_bits) {
        for (std::size_t j = 0; j < extent.size(); ++j) {
            stride[j] = slots;
            slots *= extent[j];
        }
    }

    std::size_t index(const Monomial& mono) const {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < extent.size(); ++j) idx += static_cast<std::size_t>(mono[j]) * stride[j];
        return idx;
    }
};

// f has signature (0, m), nonnegative coefficients below 2^bits and
// exponents inside the layout's box.
inline void pack(const LaurentPoly& f, const Layout& layout, Natural& out) {
    std::vector<std::uint64_t> buf(layout.slots * layout.bits / 64 + 2, 0);
    std::vector<std::uint64_t> words;
    for (const auto& [mono, c] : f.terms()) {
        words.clear();
        boost::multiprecision::export_bits(c, std::back_inserter(words), 64, false);
        const std::size_t pos = layout.index(mono) * layout.bits;
        const std::size_t limb = pos / 64;
        const unsigned off = pos % 64;
        for (std::size_t w = 0; w < words.size(); ++w) {
            buf[limb + w] |= words[w] << off;
            if (off) buf[limb + w + 1] |= words[w] >> (64 - off);
        }
    }
    mpz_import(out.get(), buf.size(), -1, sizeof(std::uint64_t), 0, 0, buf.data());
}

// Reads the slots of the sub-box [0, box_j) as a polynomial of signature (0, m).
inline LaurentPoly unpack(const Natural& z, const Layout& layout, const std::vector<std::size_t>& box) {
    const std::size_t m = layout.extent.size();
    std::vector<std::uint64_t> limbs((mpz_sizeinbase(z.get(), 2) + 63) / 64 + 1, 0);
    std::size_t written = 0;
    mpz_export(limbs.data(), &written, -1, sizeof(std::uint64_t), 0, 0, z.get());

    const std::size_t nwords = (layout.bits + 63) / 64;
    std::vector<std::uint64_t> words(nwords);
    LaurentPoly out(Signature{0, m});
    Monomial mono(m);
    for (;;) {
        const std::size_t pos = layout.index(mono) * layout.bits;
        const std::size_t limb = pos / 64;
        const unsigned off = pos % 64;
        bool nonzero = false;
        for (std::size_t w = 0; w < nwords; ++w) {
            const std::size_t i = limb + w;
            std::uint64_t v = i < written ? limbs[i] >> off : 0;
            if (off && i + 1 < written) v |= limbs[i + 1] << (64 - off);
            words[w] = v;
        }
        if (layout.bits % 64) words.back() &= (std::uint64_t{1} << (layout.bits % 64)) - 1;
        for (auto w : words) nonzero |= w != 0;
        if (nonzero) {
            Integer c;
            boost::multiprecision::import_bits(c, words.begin(), words.end(), 64, false);
            out.add_term(mono, c);
        }
        // odometer over the box
        std::size_t j = 0;
        while (j < m && static_cast<std::size_t>(++mono[j]) == box[j]) mono[j++] = 0;
        if (j == m) break;
    }
    return out;
}

}  // namespace cluster::kronecker
