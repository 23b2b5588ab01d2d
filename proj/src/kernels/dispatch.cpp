#include "rcbench/error.hpp"
#include "rcbench/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace rcbench::kernels {

#if !defined(RCBENCH_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !defined(RCBENCH_HAVE_NEON)
const KernelTable* neon_table() { return nullptr; }
#endif

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

namespace {

const KernelTable* table_for(Isa isa) {
    switch (isa) {
        case Isa::scalar: return &scalar_table();
        case Isa::avx2: return avx2_table();
        case Isa::neon: return neon_table();
    }
    return nullptr;
}

Isa initial_isa() {
    if (const char* env = std::getenv("RCBENCH_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return Isa::scalar;
        if (want == "avx2" && avx2_table()) return Isa::avx2;
        if (want == "neon" && neon_table()) return Isa::neon;
    }
    return detected_isa();
}

struct State {
    std::atomic<Isa> isa{initial_isa()};
};

State& state() {
    static State s;
    return s;
}

}  // namespace

Isa detected_isa() {
    if (avx2_table()) return Isa::avx2;
    if (neon_table()) return Isa::neon;
    return Isa::scalar;
}

Isa active_isa() { return state().isa.load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    require(table_for(isa) != nullptr, ErrorKind::argument,
            "SIMD variant '" + std::string(to_string(isa)) + "' is not available on this CPU");
    state().isa.store(isa, std::memory_order_relaxed);
}

const KernelTable& active() { return *table_for(active_isa()); }

}  // namespace rcbench::kernels
