#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace fanopol {

/// 64-bit FNV-1a, used to tag outputs with the parameter set that produced them.
class Fingerprint {
public:
    constexpr Fingerprint& add_bytes(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    constexpr Fingerprint& add(std::uint64_t v) noexcept {
        for (int i = 0; i < 8; ++i) {
            state_ ^= (v >> (8 * i)) & 0xffU;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    constexpr Fingerprint& add(double v) noexcept {
        // +0 and -0 hash alike
        return add(std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v));
    }

    constexpr std::uint64_t value() const noexcept { return state_; }

    std::string hex() const { return to_hex(state_); }

    static std::string to_hex(std::uint64_t v) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace fanopol
