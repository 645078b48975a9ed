#include "tripmode/kernels.hpp"

#include <cmath>
#include <limits>

namespace tripmode::kernels::scalar {

void chord2(UnitSoA pts, std::size_t n, double qx, double qy, double qz, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = pts.x[i] - qx;
        const double dy = pts.y[i] - qy;
        const double dz = pts.z[i] - qz;
        out[i] = dx * dx + dy * dy + dz * dz;
    }
}

double min_segment_dist2(const SegmentSoA& segs, double px, double py, double kx, double ky) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < segs.size; ++i) {
        const double d = segment_dist2(segs.ax[i], segs.ay[i], segs.bx[i], segs.by[i], px, py, kx, ky);
        best = d < best ? d : best;
    }
    return best;
}

void l1_rows(const ColumnMatrix& m, const double* q, double* out) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        double acc = 0.0;
        for (std::size_t f = 0; f < m.cols.size(); ++f) acc += std::fabs(m.cols[f][r] - q[f]);
        out[r] = acc;
    }
}

void l2sq_rows(const ColumnMatrix& m, const double* q, double* out) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        double acc = 0.0;
        for (std::size_t f = 0; f < m.cols.size(); ++f) {
            const double d = m.cols[f][r] - q[f];
            acc += d * d;
        }
        out[r] = acc;
    }
}

}  // namespace tripmode::kernels::scalar
