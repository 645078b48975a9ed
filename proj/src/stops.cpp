#include "tripmode/stops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

#include "tripmode/error.hpp"
#include "tripmode/geo.hpp"
#include "tripmode/kernels.hpp"

namespace tripmode {

std::string_view describe(StopConstraint c) {
    switch (c) {
        case StopConstraint::temporal_covers_neighbors: return "t >= n*f";
        case StopConstraint::dwell_covers_neighbors: return "t_act >= n*f";
        case StopConstraint::activity_range_covers_s: return "s_act >= s";
        case StopConstraint::neighbors_outlast_walker: return "n*f >= s/v";
    }
    return "?";
}

std::vector<StopConstraint> validate_params(const StopParams& p) {
    const std::array<std::pair<const char*, double>, 7> fields{{{"s", p.s},
                                                                {"t", p.t},
                                                                {"n", static_cast<double>(p.n)},
                                                                {"s_act", p.s_act},
                                                                {"t_act", p.t_act},
                                                                {"f", p.f},
                                                                {"v", p.v}}};
    for (const auto& [name, value] : fields) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw ValidationError(std::string("stop parameter '") + name + "' must be a positive finite number");
        }
    }
    const double nf = static_cast<double>(p.n) * p.f;
    std::vector<StopConstraint> failed;
    if (!(p.t >= nf)) failed.push_back(StopConstraint::temporal_covers_neighbors);
    if (!(p.t_act >= nf)) failed.push_back(StopConstraint::dwell_covers_neighbors);
    if (!(p.s_act >= p.s)) failed.push_back(StopConstraint::activity_range_covers_s);
    if (!(nf >= p.s / p.v)) failed.push_back(StopConstraint::neighbors_outlast_walker);
    return failed;
}

namespace {

struct NamedPreset {
    std::string_view name;
    StopParams params;
};

constexpr std::array<NamedPreset, 5> kPresets{{
    {"lri1", {50.0, 100.0, 50, 100.0, 300.0, 1.0, 1.0}},
    {"lri2", {50.0, 200.0, 25, 100.0, 300.0, 2.0, 1.0}},
    {"lri5", {50.0, 500.0, 15, 100.0, 300.0, 5.0, 1.0}},
    {"lri15", {50.0, 600.0, 10, 100.0, 300.0, 15.0, 1.0}},
    {"lbs-relaxed", {50.0, 1800.0, 5, 100.0, 300.0, 15.0, 1.0}},
}};

}  // namespace

std::optional<StopParams> preset(std::string_view name) {
    for (const auto& p : kPresets) {
        if (p.name == name) return p.params;
    }
    return std::nullopt;
}

std::vector<std::string_view> preset_names() {
    std::vector<std::string_view> names;
    for (const auto& p : kPresets) names.push_back(p.name);
    return names;
}

void refresh_cluster(StopCluster& c, const Trajectory& traj) {
    double lat = 0.0;
    double lon = 0.0;
    for (std::size_t m : c.members) {
        lat += traj.pings[m].lat;
        lon += traj.pings[m].lon;
    }
    const auto count = static_cast<double>(c.members.size());
    c.lat = lat / count;
    c.lon = lon / count;
    c.t_first = traj.pings[c.members.front()].t;
    c.t_last = traj.pings[c.members.back()].t;
}

namespace {

// Pairwise neighbor test over a forward time window. A vector kernel screens
// squared chords; only pairs inside a thin band around the threshold are
// settled with the haversine formula, so the predicate is exactly
// haversine(i, j) <= s.
class NeighborScan {
public:
    NeighborScan(const Trajectory& traj, const StopParams& p) : traj_(traj), p_(p) {
        const std::size_t n = traj.pings.size();
        x_.resize(n);
        y_.resize(n);
        z_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto u = geo::to_unit(traj.pings[i].lat, traj.pings[i].lon);
            x_[i] = u.x;
            y_[i] = u.y;
            z_[i] = u.z;
        }
        const double thr = geo::chord2_for_distance(p.s);
        const double band = 1e-6 * thr + 1e-14 * std::sqrt(thr) + 1e-28;
        sure_in_ = thr - band;
        sure_out_ = thr + band;
    }

    /// Calls visit(i, j) for every neighbor pair with i < j.
    template <typename Visit>
    void for_each_pair(Visit&& visit) {
        const auto& pings = traj_.pings;
        const std::size_t n = pings.size();
        std::size_t hi = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (hi < i) hi = i;
            while (hi + 1 < n && static_cast<double>(pings[hi + 1].t - pings[i].t) <= p_.t) ++hi;
            const std::size_t width = hi - i;
            if (width == 0) continue;
            buf_.resize(width);
            kernels::chord2({x_.data() + i + 1, y_.data() + i + 1, z_.data() + i + 1}, width, x_[i], y_[i], z_[i],
                            buf_.data());
            for (std::size_t k = 0; k < width; ++k) {
                const double c2 = buf_[k];
                if (c2 > sure_out_) continue;
                const std::size_t j = i + 1 + k;
                if (c2 >= sure_in_ &&
                    geo::haversine_m(pings[i].lat, pings[i].lon, pings[j].lat, pings[j].lon) > p_.s) {
                    continue;
                }
                visit(i, j);
            }
        }
    }

private:
    const Trajectory& traj_;
    const StopParams& p_;
    std::vector<double> x_, y_, z_, buf_;
    double sure_in_ = 0.0;
    double sure_out_ = 0.0;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t a) {
    while (parent[a] != a) {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    return a;
}

}  // namespace

std::vector<StopCluster> st_dbscan(const Trajectory& traj, const StopParams& p) {
    const std::size_t n = traj.pings.size();
    if (n == 0) return {};

    NeighborScan scan(traj, p);
    std::vector<std::uint32_t> count(n, 1);
    scan.for_each_pair([&](std::size_t i, std::size_t j) {
        ++count[i];
        ++count[j];
    });
    std::vector<char> core(n);
    bool any_core = false;
    for (std::size_t i = 0; i < n; ++i) {
        core[i] = count[i] >= static_cast<std::uint32_t>(p.n);
        any_core = any_core || core[i];
    }
    if (!any_core) return {};

    // Union-find keyed so the root is always the smallest index.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::vector<std::pair<std::size_t, std::size_t>> border_links;  // (border, core)
    scan.for_each_pair([&](std::size_t i, std::size_t j) {
        if (core[i] && core[j]) {
            const std::size_t a = find_root(parent, i);
            const std::size_t b = find_root(parent, j);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        } else if (core[i]) {
            border_links.emplace_back(j, i);
        } else if (core[j]) {
            border_links.emplace_back(i, j);
        }
    });

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(n, kNone);
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) label[i] = find_root(parent, i);
    }
    for (const auto& [b, c] : border_links) {
        const std::size_t root = label[c];
        if (label[b] == kNone || root < label[b]) label[b] = root;
    }

    std::vector<std::size_t> slot(n, kNone);
    std::vector<StopCluster> clusters;
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = label[i];
        if (root == kNone) continue;
        if (slot[root] == kNone) {
            slot[root] = clusters.size();
            clusters.emplace_back();
            roots.push_back(root);
        }
        clusters[slot[root]].members.push_back(i);
    }
    for (auto& c : clusters) refresh_cluster(c, traj);

    std::vector<std::size_t> order(clusters.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (clusters[a].t_first != clusters[b].t_first) return clusters[a].t_first < clusters[b].t_first;
        return roots[a] < roots[b];
    });
    std::vector<StopCluster> sorted;
    sorted.reserve(clusters.size());
    for (std::size_t k : order) sorted.push_back(std::move(clusters[k]));
    return sorted;
}

std::vector<StopCluster> merge_clusters(std::vector<StopCluster> clusters, double s_act, const Trajectory& traj) {
    bool changed = true;
    while (changed && clusters.size() > 1) {
        changed = false;
        std::vector<StopCluster> out;
        StopCluster current = clusters.front();
        for (std::size_t k = 1; k < clusters.size(); ++k) {
            const auto& prev = clusters[k - 1];
            const auto& next = clusters[k];
            if (geo::haversine_m(prev.lat, prev.lon, next.lat, next.lon) <= s_act) {
                std::vector<std::size_t> joined;
                joined.reserve(current.members.size() + next.members.size());
                std::merge(current.members.begin(), current.members.end(), next.members.begin(),
                           next.members.end(), std::back_inserter(joined));
                current.members = std::move(joined);
                changed = true;
            } else {
                refresh_cluster(current, traj);
                out.push_back(std::move(current));
                current = next;
            }
        }
        refresh_cluster(current, traj);
        out.push_back(std::move(current));
        clusters = std::move(out);
    }
    return clusters;
}

std::vector<Activity> classify_activities(const std::vector<StopCluster>& merged, double t_act) {
    std::vector<Activity> acts;
    for (const auto& c : merged) {
        if (static_cast<double>(c.t_last - c.t_first) >= t_act) acts.push_back({c});
    }
    return acts;
}

}  // namespace tripmode
