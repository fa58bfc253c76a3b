#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cluster {

// SHA-256 digest of a canonical serialization.
class Fingerprint {
public:
    using bytes = std::array<std::uint8_t, 32>;

    Fingerprint() = default;
    explicit Fingerprint(const bytes& b) : bytes_(b) {}

    static Fingerprint of(std::string_view data) {
        std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                    &EVP_MD_CTX_free);
        bytes out{};
        unsigned int len = 0;
        if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
            EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
            EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
            throw std::runtime_error("SHA-256 digest failed");
        }
        return Fingerprint(out);
    }

    const bytes& raw() const noexcept { return bytes_; }

    std::string hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s;
        s.reserve(64);
        for (auto b : bytes_) {
            s += digits[b >> 4];
            s += digits[b & 0xf];
        }
        return s;
    }

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
    friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;

private:
    bytes bytes_{};
};

struct FingerprintHash {
    std::size_t operator()(const Fingerprint& f) const noexcept {
        std::size_t h = 0;
        for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | f.raw()[i];
        return h;
    }
};

}  // namespace cluster
