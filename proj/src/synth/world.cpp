#include <algorithm>
#include <cmath>
#include <map>

#include "tripmode/error.hpp"
#include "tripmode/synth.hpp"

namespace tripmode::synth {

namespace {

double dist(Vec2 a, Vec2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

Vec2 lerp(Vec2 a, Vec2 b, double u) { return {a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u}; }

struct Builder {
    World& w;
    Rng& rng;
    double jitter;

    int add_vertex(Vec2 p, bool node) {
        w.vertices.push_back(p);
        w.intersection.push_back(node);
        return static_cast<int>(w.vertices.size()) - 1;
    }

    Vec2 jittered(Vec2 p) { return {p.x + rng.uniform(-jitter, jitter), p.y + rng.uniform(-jitter, jitter)}; }

    // Polyline through the given nodes with jittered intermediate vertices.
    std::vector<int> chain(const std::vector<int>& nodes, int sub) {
        std::vector<int> line;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            line.push_back(nodes[k]);
            if (k + 1 == nodes.size()) break;
            const Vec2 a = w.vertices[static_cast<std::size_t>(nodes[k])];
            const Vec2 b = w.vertices[static_cast<std::size_t>(nodes[k + 1])];
            for (int s = 1; s < sub; ++s) line.push_back(add_vertex(jittered(lerp(a, b, double(s) / sub)), false));
        }
        return line;
    }
};

std::vector<double> arc_lengths(const std::vector<Vec2>& pts) {
    std::vector<double> cum(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + dist(pts[i - 1], pts[i]);
    return cum;
}

}  // namespace

geo::LatLon World::to_latlon(Vec2 p) const {
    const double kx = geo::kMetersPerDegree * std::cos(config.origin_lat * geo::kDegToRad);
    return {config.origin_lat + p.y / geo::kMetersPerDegree, config.origin_lon + p.x / kx};
}

Vec2 World::from_latlon(double lat, double lon) const {
    const double kx = geo::kMetersPerDegree * std::cos(config.origin_lat * geo::kDegToRad);
    return {(lon - config.origin_lon) * kx, (lat - config.origin_lat) * geo::kMetersPerDegree};
}

World generate_world(std::uint64_t seed, const NetworkConfig& config) {
    config.validate();
    World w;
    w.config = config;
    Rng rng(derive_seed(seed, 0x3e7));
    Builder b{w, rng, config.jitter_m};

    const double spacing = config.spacing_km * 1000.0;
    const int m = std::max(1, static_cast<int>(std::floor(config.extent_km / config.spacing_km + 1e-9)));
    const int sub = std::max(1, static_cast<int>(std::lround(spacing / config.vertex_step_m)));

    std::vector<int> node((m + 1) * (m + 1));
    auto node_at = [&](int i, int j) { return node[static_cast<std::size_t>(i * (m + 1) + j)]; };
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= m; ++j) {
            node[static_cast<std::size_t>(i * (m + 1) + j)] = b.add_vertex(b.jittered({j * spacing, i * spacing}), true);
        }
    }

    std::vector<std::vector<int>> lines;
    for (int i = 0; i <= m; ++i) {
        std::vector<int> nodes;
        for (int j = 0; j <= m; ++j) nodes.push_back(node_at(i, j));
        lines.push_back(b.chain(nodes, sub));
    }
    for (int j = 0; j <= m; ++j) {
        std::vector<int> nodes;
        for (int i = 0; i <= m; ++i) nodes.push_back(node_at(i, j));
        lines.push_back(b.chain(nodes, sub));
    }

    // Bus routes reuse whole lattice lines; stops are spliced into the line so
    // the drive graph passes through them.
    std::vector<std::size_t> order(lines.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order.begin(), order.end());
    const auto n_routes = std::min<std::size_t>(static_cast<std::size_t>(config.bus_routes), lines.size());
    for (std::size_t r = 0; r < n_routes; ++r) {
        auto& line = lines[order[r]];
        std::vector<Vec2> pts;
        for (int v : line) pts.push_back(w.vertices[static_cast<std::size_t>(v)]);
        const auto cum = arc_lengths(pts);
        std::vector<double> stop_arcs;
        for (double s = 0.0; s <= cum.back(); s += rng.uniform(300.0, 600.0)) stop_arcs.push_back(s);

        World::Line route;
        std::size_t next = 0;
        for (std::size_t k = 0; k < line.size(); ++k) {
            if (next < stop_arcs.size() && std::fabs(stop_arcs[next] - cum[k]) < 1.0) {
                route.stops.push_back(static_cast<int>(route.vertices.size()));
                ++next;
            }
            route.vertices.push_back(line[k]);
            if (k + 1 == line.size()) break;
            while (next < stop_arcs.size() && stop_arcs[next] < cum[k + 1] - 1.0) {
                if (stop_arcs[next] <= cum[k] + 1.0) {
                    ++next;  // already served by vertex k
                    continue;
                }
                const double u = (stop_arcs[next] - cum[k]) / (cum[k + 1] - cum[k]);
                const int v = b.add_vertex(lerp(pts[k], pts[k + 1], u), false);
                route.stops.push_back(static_cast<int>(route.vertices.size()));
                route.vertices.push_back(v);
                ++next;
            }
        }
        if (next < stop_arcs.size()) {
            route.stops.push_back(static_cast<int>(route.vertices.size()) - 1);
        }
        route.stops.erase(std::unique(route.stops.begin(), route.stops.end()), route.stops.end());
        line = route.vertices;
        if (route.stops.size() >= 2) w.bus_routes.push_back(std::move(route));
    }

    std::vector<bool> arterial(lines.size(), false);
    for (std::size_t r = 0; r < n_routes; ++r) arterial[order[r]] = true;
    w.adjacency.assign(w.vertices.size(), {});
    for (std::size_t l = 0; l < lines.size(); ++l) {
        const auto& line = lines[l];
        for (std::size_t k = 1; k < line.size(); ++k) {
            const int a = line[k - 1];
            const int c = line[k];
            const double d = dist(w.vertices[static_cast<std::size_t>(a)], w.vertices[static_cast<std::size_t>(c)]);
            w.adjacency[static_cast<std::size_t>(a)].push_back({c, d, arterial[l]});
            w.adjacency[static_cast<std::size_t>(c)].push_back({a, d, arterial[l]});
        }
    }

    // Rail lines hop between lattice nodes two or three blocks apart.
    std::vector<std::vector<int>> station_vertices;
    for (int r = 0; r < config.rail_lines; ++r) {
        const bool horizontal = r % 2 == 0;
        int along = 0;
        int across = m >= 2 ? static_cast<int>(rng.between(1, m - 1)) : 0;
        std::vector<int> stations;
        for (;;) {
            stations.push_back(horizontal ? node_at(across, along) : node_at(along, across));
            along += static_cast<int>(rng.between(2, 3));
            if (along > m) break;
            across = std::clamp(across + static_cast<int>(rng.between(-1, 1)), 0, m);
        }
        if (stations.size() < 2) continue;
        World::RailLine rail;
        for (std::size_t k = 0; k < stations.size(); ++k) {
            const Vec2 a = w.vertices[static_cast<std::size_t>(stations[k])];
            rail.stations.push_back(static_cast<int>(rail.points.size()));
            rail.points.push_back(a);
            if (k + 1 == stations.size()) break;
            const Vec2 c = w.vertices[static_cast<std::size_t>(stations[k + 1])];
            const int pieces = std::max(1, static_cast<int>(std::lround(dist(a, c) / 500.0)));
            for (int s = 1; s < pieces; ++s) rail.points.push_back(b.jittered(lerp(a, c, double(s) / pieces)));
        }
        w.rail_lines.push_back(std::move(rail));
        station_vertices.push_back(std::move(stations));
    }

    // Places: lattice nodes plus bus stops.
    std::map<int, std::size_t> place_of;
    auto place_for = [&](int v) -> Place& {
        auto [it, fresh] = place_of.try_emplace(v, w.places.size());
        if (fresh) w.places.push_back(Place{w.vertices[static_cast<std::size_t>(v)], v, {}, {}});
        return w.places[it->second];
    };
    for (int v : node) place_for(v);
    for (std::size_t r = 0; r < w.bus_routes.size(); ++r) {
        const auto& route = w.bus_routes[r];
        for (std::size_t s = 0; s < route.stops.size(); ++s) {
            place_for(route.vertices[static_cast<std::size_t>(route.stops[s])])
                .bus.emplace_back(static_cast<int>(r), static_cast<int>(s));
        }
    }
    for (std::size_t r = 0; r < station_vertices.size(); ++r) {
        for (std::size_t s = 0; s < station_vertices[r].size(); ++s) {
            place_for(station_vertices[r][s]).rail.emplace_back(static_cast<int>(r), static_cast<int>(s));
        }
    }

    auto to_poly = [&](const std::vector<Vec2>& pts) {
        Polyline poly;
        for (const auto& p : pts) {
            const auto ll = w.to_latlon(p);
            poly.push_back({ll.lon, ll.lat});
        }
        return poly;
    };
    auto vertex_points = [&](const std::vector<int>& ids) {
        std::vector<Vec2> pts;
        for (int v : ids) pts.push_back(w.vertices[static_cast<std::size_t>(v)]);
        return pts;
    };
    for (const auto& line : lines) w.network[Layer::drive].lines.push_back(to_poly(vertex_points(line)));
    for (const auto& route : w.bus_routes) {
        w.network[Layer::bus].lines.push_back(to_poly(vertex_points(route.vertices)));
        for (int s : route.stops) {
            const auto ll = w.to_latlon(w.vertices[static_cast<std::size_t>(route.vertices[static_cast<std::size_t>(s)])]);
            w.network[Layer::bus_stop].points.push_back({ll.lon, ll.lat});
        }
    }
    for (const auto& rail : w.rail_lines) w.network[Layer::rail].lines.push_back(to_poly(rail.points));
    return w;
}

}  // namespace tripmode::synth
