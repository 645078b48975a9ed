#pragma once

// Seeded random inputs for the property tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tripmode/aggregate.hpp"
#include "tripmode/classifier.hpp"
#include "tripmode/geo.hpp"
#include "tripmode/ingest.hpp"
#include "tripmode/network.hpp"
#include "tripmode/rng.hpp"
#include "tripmode/trips.hpp"

namespace gen {

inline constexpr double kLat0 = 38.9;
inline constexpr double kLon0 = -77.0;

/// Local meters around (kLat0, kLon0) to degrees.
inline tripmode::geo::LatLon at(double east_m, double north_m, double lat0 = kLat0, double lon0 = kLon0) {
    const auto sc = tripmode::geo::local_scale(lat0);
    return {lat0 + north_m / sc.ky, lon0 + east_m / sc.kx};
}

inline tripmode::Ping ping(std::int64_t t, double east_m, double north_m, double acc = 5.0) {
    const auto p = at(east_m, north_m);
    return {t, p.lat, p.lon, acc};
}

/// Stationary episodes separated by moves, with jitter and irregular gaps.
inline tripmode::Trajectory stop_and_go(tripmode::Rng& rng, std::size_t max_points) {
    tripmode::Trajectory tr;
    tr.device_id = "d";
    std::int64_t t = 1'700'000'000;
    double x = 0.0, y = 0.0;
    const double jitter = rng.uniform(2.0, 30.0);
    while (tr.pings.size() < max_points) {
        const bool stay = rng.uniform() < 0.5;
        const std::size_t len = static_cast<std::size_t>(rng.between(3, 60));
        const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double speed = stay ? 0.0 : rng.uniform(1.0, 20.0);
        for (std::size_t k = 0; k < len && tr.pings.size() < max_points; ++k) {
            const auto dt = rng.between(1, 40);
            t += dt;
            x += std::cos(heading) * speed * static_cast<double>(dt);
            y += std::sin(heading) * speed * static_cast<double>(dt);
            tr.pings.push_back(ping(t, x + rng.normal() * jitter, y + rng.normal() * jitter));
        }
    }
    return tr;
}

/// Random polyline of `segments` segments inside a box of `extent_m`.
inline tripmode::Polyline polyline(tripmode::Rng& rng, int segments, double extent_m) {
    tripmode::Polyline line;
    double x = rng.uniform(-extent_m, extent_m);
    double y = rng.uniform(-extent_m, extent_m);
    for (int i = 0; i <= segments; ++i) {
        const auto p = at(x, y);
        line.push_back({p.lon, p.lat});
        x += rng.uniform(-extent_m / 4, extent_m / 4);
        y += rng.uniform(-extent_m / 4, extent_m / 4);
    }
    return line;
}

/// Small network with every layer populated.
inline tripmode::Network network(tripmode::Rng& rng, double extent_m) {
    tripmode::Network net;
    for (auto layer : {tripmode::Layer::rail, tripmode::Layer::bus, tripmode::Layer::drive}) {
        const int lines = static_cast<int>(rng.between(3, 12));
        for (int i = 0; i < lines; ++i) {
            net[layer].lines.push_back(polyline(rng, static_cast<int>(rng.between(1, 15)), extent_m));
        }
    }
    for (int i = 0; i < 40; ++i) {
        const auto p = at(rng.uniform(-extent_m, extent_m), rng.uniform(-extent_m, extent_m));
        net[tripmode::Layer::bus_stop].points.push_back({p.lon, p.lat});
    }
    return net;
}

/// Random trip: a wandering path with irregular gaps, duplicate
/// timestamps, and mixed accuracy.
inline tripmode::Trip trip(tripmode::Rng& rng, double extent_m) {
    tripmode::Trip tr;
    tr.device_id = "d";
    const std::size_t n = static_cast<std::size_t>(rng.between(2, 80));
    std::int64_t t = 1'700'000'000;
    double x = rng.uniform(-extent_m, extent_m), y = rng.uniform(-extent_m, extent_m);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const std::int64_t dt = rng.uniform() < 0.1 ? 0 : rng.between(1, 120);
            t += dt;
            x += rng.uniform(-1.0, 1.0) * 25.0 * static_cast<double>(dt);
            y += rng.uniform(-1.0, 1.0) * 25.0 * static_cast<double>(dt);
        }
        tr.pings.push_back(ping(t, x, y, rng.uniform(0.0, 100.0)));
    }
    // A trip needs elapsed time and one usable pair.
    if (tr.pings.back().t == tr.pings.front().t) tr.pings.back().t += 5;
    tripmode::summarize_trip(tr);
    return tr;
}

inline tripmode::Zone square(std::string id, double lon0, double lat0, double lon1, double lat1) {
    return tripmode::make_zone(std::move(id), {{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}});
}

/// Random star-shaped polygon (never self-intersecting).
inline tripmode::Zone star(tripmode::Rng& rng, std::string id, int vertices) {
    std::vector<double> angles;
    for (int i = 0; i < vertices; ++i) angles.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    std::vector<tripmode::LonLat> ring;
    for (double a : angles) {
        const double r = rng.uniform(0.2, 1.0);
        ring.push_back({kLon0 + r * std::cos(a), kLat0 + r * std::sin(a)});
    }
    return tripmode::make_zone(std::move(id), std::move(ring));
}

/// Gaussian blobs, one per class, in all 16 features.
inline tripmode::LabeledDataset blobs(tripmode::Rng& rng, std::vector<std::size_t> counts, double spread,
                                      tripmode::ModeSet set = tripmode::ModeSet::five) {
    tripmode::LabeledDataset ds;
    ds.mode_set = set;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        for (std::size_t i = 0; i < counts[c]; ++i) {
            tripmode::FeatureVector fv{};
            for (std::size_t f = 0; f < fv.size(); ++f) fv[f] = static_cast<double>(c) * 3.0 + rng.normal() * spread;
            ds.rows.push_back(fv);
            ds.labels.push_back(static_cast<int>(c));
        }
    }
    return ds;
}

}  // namespace gen
