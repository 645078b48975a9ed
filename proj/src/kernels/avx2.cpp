// Compiled with -mavx2 (and without -mfma). Only reached after a runtime CPU check.

#include "tripmode/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace tripmode::kernels::avx2 {

namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

}  // namespace

void chord2(UnitSoA pts, std::size_t n, double qx, double qy, double qz, double* out) {
    const __m256d vqx = _mm256_set1_pd(qx);
    const __m256d vqy = _mm256_set1_pd(qy);
    const __m256d vqz = _mm256_set1_pd(qz);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(pts.x + i), vqx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(pts.y + i), vqy);
        const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(pts.z + i), vqz);
        __m256d acc = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(dz, dz));
        _mm256_storeu_pd(out + i, acc);
    }
    if (i < n) scalar::chord2({pts.x + i, pts.y + i, pts.z + i}, n - i, qx, qy, qz, out + i);
}

double min_segment_dist2(const SegmentSoA& segs, double px, double py, double kx, double ky) {
    const __m256d vpx = _mm256_set1_pd(px);
    const __m256d vpy = _mm256_set1_pd(py);
    const __m256d vkx = _mm256_set1_pd(kx);
    const __m256d vky = _mm256_set1_pd(ky);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());

    std::size_t i = 0;
    for (; i + 4 <= segs.size; i += 4) {
        const __m256d x0 = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(segs.ax + i), vpx), vkx);
        const __m256d y0 = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(segs.ay + i), vpy), vky);
        const __m256d x1 = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(segs.bx + i), vpx), vkx);
        const __m256d y1 = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(segs.by + i), vpy), vky);
        const __m256d dx = _mm256_sub_pd(x1, x0);
        const __m256d dy = _mm256_sub_pd(y1, y0);
        const __m256d len2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        const __m256d dot = _mm256_add_pd(_mm256_mul_pd(x0, dx), _mm256_mul_pd(y0, dy));
        __m256d t = _mm256_div_pd(_mm256_xor_pd(dot, sign), len2);
        t = _mm256_blendv_pd(t, zero, _mm256_cmp_pd(t, zero, _CMP_LT_OQ));
        t = _mm256_blendv_pd(t, one, _mm256_cmp_pd(t, one, _CMP_GT_OQ));
        t = _mm256_blendv_pd(zero, t, _mm256_cmp_pd(len2, zero, _CMP_GT_OQ));
        const __m256d fx = _mm256_add_pd(x0, _mm256_mul_pd(t, dx));
        const __m256d fy = _mm256_add_pd(y0, _mm256_mul_pd(t, dy));
        const __m256d d = _mm256_add_pd(_mm256_mul_pd(fx, fx), _mm256_mul_pd(fy, fy));
        best = _mm256_min_pd(d, best);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double result = lanes[0];
    for (int k = 1; k < 4; ++k) result = lanes[k] < result ? lanes[k] : result;
    if (i < segs.size) {
        const SegmentSoA tail{segs.ax + i, segs.ay + i, segs.bx + i, segs.by + i, segs.size - i};
        const double rest = scalar::min_segment_dist2(tail, px, py, kx, ky);
        result = rest < result ? rest : result;
    }
    return result;
}

void l1_rows(const ColumnMatrix& m, const double* q, double* out) {
    const std::size_t nf = m.cols.size();
    std::size_t r = 0;
    for (; r + 4 <= m.rows; r += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t f = 0; f < nf; ++f) {
            const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(m.cols[f] + r), _mm256_set1_pd(q[f]));
            acc = _mm256_add_pd(acc, abs_pd(d));
        }
        _mm256_storeu_pd(out + r, acc);
    }
    for (; r < m.rows; ++r) {
        double acc = 0.0;
        for (std::size_t f = 0; f < nf; ++f) acc += std::fabs(m.cols[f][r] - q[f]);
        out[r] = acc;
    }
}

void l2sq_rows(const ColumnMatrix& m, const double* q, double* out) {
    const std::size_t nf = m.cols.size();
    std::size_t r = 0;
    for (; r + 4 <= m.rows; r += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t f = 0; f < nf; ++f) {
            const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(m.cols[f] + r), _mm256_set1_pd(q[f]));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
        }
        _mm256_storeu_pd(out + r, acc);
    }
    for (; r < m.rows; ++r) {
        double acc = 0.0;
        for (std::size_t f = 0; f < nf; ++f) {
            const double d = m.cols[f][r] - q[f];
            acc += d * d;
        }
        out[r] = acc;
    }
}

}  // namespace tripmode::kernels::avx2
