#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace graphvar {

/// 64-bit FNV-1a; identifies inputs in run manifests, not a security hash.
class Fnv1a {
public:
    void update(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
    }
    std::uint64_t value() const noexcept { return state_; }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

} // namespace graphvar
