#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and, on x86-64,
// an AVX2 variant chosen at runtime. Variants perform the same IEEE operations
// in the same order, so their results are bit-identical; the equivalence tests
// hold them to that.

#include <cstddef>
#include <span>
#include <string_view>

namespace tripmode::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Best instruction set this CPU supports (honors TRIPMODE_ISA=scalar).
Isa detected_isa();

/// Currently selected variant.
Isa active_isa();

/// Selects a variant. Requests the CPU cannot run fall back to scalar.
/// Returns the variant actually selected.
Isa set_isa(Isa isa);

/// Structure-of-arrays view over unit-sphere positions.
struct UnitSoA {
    const double* x;
    const double* y;
    const double* z;
};

/// Structure-of-arrays view over segments in lon/lat degrees. Points are
/// segments with a == b.
struct SegmentSoA {
    const double* ax;
    const double* ay;
    const double* bx;
    const double* by;
    std::size_t size;
};

/// out[i] = |p_i - q|^2 for unit vectors p_i, i in [0, n).
void chord2(UnitSoA pts, std::size_t n, double qx, double qy, double qz, double* out);

/// Minimum squared distance (m^2) from (px, py) to any segment, each segment
/// projected to a local equirectangular frame centered at the query with
/// scales kx (m per degree lon) and ky (m per degree lat). Returns +inf when
/// the view is empty.
double min_segment_dist2(const SegmentSoA& segs, double px, double py, double kx, double ky);

/// Squared distance from the origin-centered query to one projected segment.
/// This is the scalar reference the batch kernel must reproduce.
inline double segment_dist2(double ax, double ay, double bx, double by, double px, double py,
                            double kx, double ky) {
    const double x0 = (ax - px) * kx;
    const double y0 = (ay - py) * ky;
    const double x1 = (bx - px) * kx;
    const double y1 = (by - py) * ky;
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = -(x0 * dx + y0 * dy) / len2;
        t = t < 0.0 ? 0.0 : t;
        t = t > 1.0 ? 1.0 : t;
    }
    const double fx = x0 + t * dx;
    const double fy = y0 + t * dy;
    return fx * fx + fy * fy;
}

/// Column-major feature matrix: cols[f][r] is feature f of row r.
struct ColumnMatrix {
    std::span<const double* const> cols;
    std::size_t rows;
};

/// out[r] = sum_f |cols[f][r] - q[f]|, accumulated in feature order.
void l1_rows(const ColumnMatrix& m, const double* q, double* out);

/// out[r] = sum_f (cols[f][r] - q[f])^2, accumulated in feature order.
void l2sq_rows(const ColumnMatrix& m, const double* q, double* out);

namespace scalar {
void chord2(UnitSoA pts, std::size_t n, double qx, double qy, double qz, double* out);
double min_segment_dist2(const SegmentSoA& segs, double px, double py, double kx, double ky);
void l1_rows(const ColumnMatrix& m, const double* q, double* out);
void l2sq_rows(const ColumnMatrix& m, const double* q, double* out);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define TRIPMODE_HAVE_AVX2_KERNELS 1
namespace avx2 {
void chord2(UnitSoA pts, std::size_t n, double qx, double qy, double qz, double* out);
double min_segment_dist2(const SegmentSoA& segs, double px, double py, double kx, double ky);
void l1_rows(const ColumnMatrix& m, const double* q, double* out);
void l2sq_rows(const ColumnMatrix& m, const double* q, double* out);
}  // namespace avx2
#endif

}  // namespace tripmode::kernels
