#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

namespace rcbench {

/// FNV-1a over raw bytes; used for model fingerprints in the leakage audit.
class Fingerprint {
public:
    void add_bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void add(std::span<const double> v) { add_bytes(v.data(), v.size_bytes()); }
    void add(double v) { add_bytes(&v, sizeof v); }
    void add(std::uint64_t v) { add_bytes(&v, sizeof v); }
    void add(std::string_view s) { add_bytes(s.data(), s.size()); }

    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace rcbench
