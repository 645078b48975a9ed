#include "tripmode/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace tripmode::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(TRIPMODE_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa initial_isa() {
    if (const char* env = std::getenv("TRIPMODE_ISA"); env && std::string_view(env) == "scalar") {
        return Isa::scalar;
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() { return initial_isa(); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa set_isa(Isa isa) {
    if (isa == Isa::avx2 && !cpu_has_avx2()) isa = Isa::scalar;
    current().store(isa, std::memory_order_relaxed);
    return isa;
}

#if defined(TRIPMODE_HAVE_AVX2_KERNELS)
#define TRIPMODE_DISPATCH(fn, ...)                                          \
    (active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define TRIPMODE_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void chord2(UnitSoA pts, std::size_t n, double qx, double qy, double qz, double* out) {
    TRIPMODE_DISPATCH(chord2, pts, n, qx, qy, qz, out);
}

double min_segment_dist2(const SegmentSoA& segs, double px, double py, double kx, double ky) {
    return TRIPMODE_DISPATCH(min_segment_dist2, segs, px, py, kx, ky);
}

void l1_rows(const ColumnMatrix& m, const double* q, double* out) { TRIPMODE_DISPATCH(l1_rows, m, q, out); }

void l2sq_rows(const ColumnMatrix& m, const double* q, double* out) {
    TRIPMODE_DISPATCH(l2sq_rows, m, q, out);
}

}  // namespace tripmode::kernels
