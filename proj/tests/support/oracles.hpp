#pragma once

// Independent reference implementations. Each is the slow, obvious version
// of something the library does fast; tests compare the two.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tripmode/aggregate.hpp"
#include "tripmode/geo.hpp"
#include "tripmode/ingest.hpp"
#include "tripmode/network.hpp"
#include "tripmode/stops.hpp"

namespace oracle {

/// Sequential textbook DBSCAN with the dual (distance, time) neighborhood.
/// Clusters are grown from unvisited core pings in index order; a border
/// ping stays with the first cluster that reaches it. Returns member lists
/// ordered by the cluster's first member time.
inline std::vector<std::vector<std::size_t>> dbscan(const tripmode::Trajectory& traj, const tripmode::StopParams& p) {
    const auto& pts = traj.pings;
    const std::size_t n = pts.size();
    auto neighbors = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j) {
            const bool near_t = std::llabs(pts[i].t - pts[j].t) <= static_cast<long long>(p.t);
            if (near_t && tripmode::geo::haversine_m(pts[i].lat, pts[i].lon, pts[j].lat, pts[j].lon) <= p.s) {
                out.push_back(j);
            }
        }
        return out;
    };
    std::vector<std::vector<std::size_t>> nbr(n);
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) {
        nbr[i] = neighbors(i);
        core[i] = nbr[i].size() >= static_cast<std::size_t>(p.n);
    }
    constexpr long kNone = -1;
    std::vector<long> label(n, kNone);
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (!core[seed] || label[seed] != kNone) continue;
        const long id = static_cast<long>(clusters.size());
        clusters.emplace_back();
        std::vector<std::size_t> stack{seed};
        label[seed] = id;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j : nbr[i]) {
                if (label[j] != kNone) continue;
                label[j] = id;
                if (core[j]) stack.push_back(j);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != kNone) clusters[static_cast<std::size_t>(label[i])].push_back(i);
    }
    std::stable_sort(clusters.begin(), clusters.end(), [&](const auto& a, const auto& b) {
        auto first_t = [&](const std::vector<std::size_t>& c) {
            std::int64_t t = std::numeric_limits<std::int64_t>::max();
            for (auto k : c) t = std::min(t, pts[k].t);
            return t;
        };
        return first_t(a) < first_t(b);
    });
    return clusters;
}

/// Haversine sum over consecutive points.
inline double path_length(const std::vector<tripmode::Ping>& pings) {
    double d = 0.0;
    for (std::size_t i = 1; i < pings.size(); ++i) {
        d += tripmode::geo::haversine_m(pings[i - 1].lat, pings[i - 1].lon, pings[i].lat, pings[i].lon);
    }
    return d;
}

/// Per-segment distance with the projection written out from scratch.
inline double point_segment(tripmode::geo::LatLon p, tripmode::LonLat a, tripmode::LonLat b) {
    const auto sc = tripmode::geo::local_scale(p.lat);
    const double ax = (a.lon - p.lon) * sc.kx, ay = (a.lat - p.lat) * sc.ky;
    const double bx = (b.lon - p.lon) * sc.kx, by = (b.lat - p.lat) * sc.ky;
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? -(ax * dx + ay * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double fx = ax + t * dx, fy = ay + t * dy;
    return std::sqrt(fx * fx + fy * fy);
}

inline double point_polyline(tripmode::geo::LatLon p, const tripmode::Polyline& line) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < line.size(); ++i) best = std::min(best, point_segment(p, line[i - 1], line[i]));
    return best;
}

/// Linear scan over every geometry of a layer.
inline bool within(const tripmode::Network& net, tripmode::Layer layer, tripmode::geo::LatLon p, double r) {
    const auto& l = net[layer];
    for (const auto& pt : l.points) {
        if (point_segment(p, pt, pt) <= r) return true;
    }
    for (const auto& line : l.lines) {
        if (line.size() == 1 && point_segment(p, line[0], line[0]) <= r) return true;
        if (point_polyline(p, line) <= r) return true;
    }
    return false;
}

/// Point-in-polygon in exact rational arithmetic, using the crossing
/// abscissa of each edge with the horizontal line through the point.
inline tripmode::Location locate(const tripmode::Zone& z, double lon, double lat) {
    using Q = boost::multiprecision::cpp_rational;
    const Q px(lon), py(lat);
    bool inside = false;
    const std::size_t n = z.ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = z.ring[i];
        const auto& b = z.ring[(i + 1) % n];
        const Q ax(a.lon), ay(a.lat), bx(b.lon), by(b.lat);
        // On the segment: collinear and inside the closed box.
        const Q cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
        if (cross == 0 && px >= std::min(ax, bx) && px <= std::max(ax, bx) && py >= std::min(ay, by) &&
            py <= std::max(ay, by)) {
            return tripmode::Location::boundary;
        }
        if ((ay > py) != (by > py)) {
            const Q x_at = ax + (py - ay) * (bx - ax) / (by - ay);
            if (px < x_at) inside = !inside;
        }
    }
    return inside ? tripmode::Location::inside : tripmode::Location::outside;
}

/// Minimum within-class SSD over every way to cut sorted values into k
/// contiguous non-empty classes, never separating equal values.
inline double jenks_min_ssd(std::vector<double> v, int k) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    auto ssd = [&](std::size_t lo, std::size_t hi) {
        double mean = 0.0;
        for (std::size_t i = lo; i < hi; ++i) mean += v[i];
        mean /= static_cast<double>(hi - lo);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += (v[i] - mean) * (v[i] - mean);
        return s;
    };
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> cuts;
    auto rec = [&](auto&& self, std::size_t start, int left) -> void {
        if (left == 1) {
            double total = ssd(start, n);
            std::size_t lo = 0;
            for (std::size_t c : cuts) {
                total += ssd(lo, c);
                lo = c;
            }
            best = std::min(best, total);
            return;
        }
        for (std::size_t c = start + 1; c + static_cast<std::size_t>(left - 1) <= n; ++c) {
            if (v[c] == v[c - 1]) continue;
            cuts.push_back(c);
            self(self, c, left - 1);
            cuts.pop_back();
        }
    };
    rec(rec, 0, k);
    return best;
}

}  // namespace oracle
