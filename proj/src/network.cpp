#include "tripmode/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "tripmode/error.hpp"
#include "tripmode/kernels.hpp"
#include "tripmode/text.hpp"

namespace tripmode {

using nlohmann::json;

std::string_view layer_name(Layer l) {
    switch (l) {
        case Layer::rail: return "rail";
        case Layer::bus: return "bus";
        case Layer::drive: return "drive";
        case Layer::bus_stop: return "bus_stop";
    }
    return "?";
}

Layer parse_layer(std::string_view tag) {
    if (tag == "rail") return Layer::rail;
    if (tag == "bus") return Layer::bus;
    if (tag == "drive") return Layer::drive;
    if (tag == "bus_stop") return Layer::bus_stop;
    throw SchemaError("unknown network layer '" + std::string(tag) + "'");
}

namespace {

LonLat read_vertex(const json& v, std::size_t lineno) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw SchemaError("network line " + std::to_string(lineno) + ": vertex must be [lon, lat]");
    }
    const LonLat p{v[0].get<double>(), v[1].get<double>()};
    if (!(p.lon >= -180.0 && p.lon <= 180.0 && p.lat >= -90.0 && p.lat <= 90.0)) {
        throw DataError("network line " + std::to_string(lineno) + ": vertex outside WGS84 bounds");
    }
    return p;
}

bool has_positive_segment(const Polyline& line) {
    for (std::size_t i = 1; i < line.size(); ++i) {
        if (!(line[i] == line[i - 1])) return true;
    }
    return false;
}

}  // namespace

void read_network(std::istream& in, Network& net) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError("network line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!rec.is_object() || !rec.contains("layer") || !rec.contains("coords") || !rec["layer"].is_string()) {
            throw SchemaError("network line " + std::to_string(lineno) + ": expected {layer, kind, coords}");
        }
        const Layer layer = parse_layer(rec["layer"].get<std::string>());
        const std::string kind = rec.value("kind", layer == Layer::bus_stop ? "point" : "polyline");
        const json& coords = rec["coords"];
        if (layer == Layer::bus_stop) {
            if (kind != "point") throw SchemaError("network line " + std::to_string(lineno) + ": bus_stop must be a point");
            net[layer].points.push_back(read_vertex(coords, lineno));
            continue;
        }
        if (kind != "polyline" || !coords.is_array()) {
            throw SchemaError("network line " + std::to_string(lineno) + ": " + std::string(layer_name(layer)) +
                              " must be a polyline");
        }
        Polyline poly;
        poly.reserve(coords.size());
        for (const auto& v : coords) poly.push_back(read_vertex(v, lineno));
        if (poly.size() < 2 || !has_positive_segment(poly)) {
            ++net.warnings;
            continue;
        }
        net[layer].lines.push_back(std::move(poly));
    }
}

Network load_network(std::span<const std::string> paths) {
    Network net;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open network file '" + path + "'");
        read_network(in, net);
    }
    return net;
}

void write_network(std::ostream& out, const Network& net) {
    for (const auto& layer : net.layers) {
        const std::string name(layer_name(layer.layer));
        if (layer.layer == Layer::bus_stop) {
            for (const auto& p : layer.points) {
                out << R"({"layer":")" << name << R"(","kind":"point","coords":[)" << text::fmt(p.lon) << ','
                    << text::fmt(p.lat) << "]}\n";
            }
            continue;
        }
        for (const auto& line : layer.lines) {
            out << R"({"layer":")" << name << R"(","kind":"polyline","coords":[)";
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (i) out << ',';
                out << '[' << text::fmt(line[i].lon) << ',' << text::fmt(line[i].lat) << ']';
            }
            out << "]}\n";
        }
    }
}

double point_to_polyline_distance(geo::LatLon p, const Polyline& line) {
    const auto scale = geo::local_scale(p.lat);
    double best = std::numeric_limits<double>::infinity();
    if (line.size() == 1) {
        best = kernels::segment_dist2(line[0].lon, line[0].lat, line[0].lon, line[0].lat, p.lon, p.lat, scale.kx,
                                      scale.ky);
    }
    for (std::size_t i = 1; i < line.size(); ++i) {
        const double d = kernels::segment_dist2(line[i - 1].lon, line[i - 1].lat, line[i].lon, line[i].lat, p.lon,
                                                p.lat, scale.kx, scale.ky);
        best = d < best ? d : best;
    }
    return std::sqrt(best);
}

double point_to_point_distance(geo::LatLon p, LonLat q) {
    const auto scale = geo::local_scale(p.lat);
    return std::sqrt(kernels::segment_dist2(q.lon, q.lat, q.lon, q.lat, p.lon, p.lat, scale.kx, scale.ky));
}

void LayerIndex::Soa::push(double a_x, double a_y, double b_x, double b_y) {
    ax.push_back(a_x);
    ay.push_back(a_y);
    bx.push_back(b_x);
    by.push_back(b_y);
}

std::uint64_t LayerIndex::key(std::int64_t cx, std::int64_t cy) const {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::uint32_t>(cy);
}

std::int64_t LayerIndex::cell_x(double lon) const {
    return static_cast<std::int64_t>(std::floor((lon + 180.0) / cell_deg_));
}

std::int64_t LayerIndex::cell_y(double lat) const {
    return static_cast<std::int64_t>(std::floor((lat + 90.0) / cell_deg_));
}

LayerIndex::LayerIndex(const NetworkLayer& layer, double radius_m, double cell_m) : radius_m_(radius_m) {
    if (!(radius_m > 0.0) || !(cell_m > 0.0)) throw ValidationError("index radius and cell size must be positive");
    cell_deg_ = cell_m / geo::kMetersPerDegree;

    if (layer.layer == Layer::bus_stop) {
        for (const auto& p : layer.points) flat_.push(p.lon, p.lat, p.lon, p.lat);
    } else {
        for (const auto& line : layer.lines) {
            for (std::size_t i = 1; i < line.size(); ++i) {
                flat_.push(line[i - 1].lon, line[i - 1].lat, line[i].lon, line[i].lat);
            }
        }
    }

    // Dilate each fragment's box by the radius. The lon margin uses the
    // smallest cos(lat) the box can see, so it is never too narrow.
    constexpr double kSlack = 1.001;
    const double dlat = kSlack * radius_m / geo::kMetersPerDegree;
    std::vector<std::pair<std::uint64_t, std::size_t>> entries;
    for (std::size_t f = 0; f < flat_.ax.size(); ++f) {
        const double lat_lo = std::min(flat_.ay[f], flat_.by[f]) - dlat;
        const double lat_hi = std::max(flat_.ay[f], flat_.by[f]) + dlat;
        const double worst = std::min(89.9, std::max(std::abs(lat_lo), std::abs(lat_hi)));
        const double dlon = kSlack * radius_m / (geo::kMetersPerDegree * std::cos(worst * geo::kDegToRad));
        const double lon_lo = std::min(flat_.ax[f], flat_.bx[f]) - dlon;
        const double lon_hi = std::max(flat_.ax[f], flat_.bx[f]) + dlon;
        for (std::int64_t cx = cell_x(lon_lo); cx <= cell_x(lon_hi); ++cx) {
            for (std::int64_t cy = cell_y(lat_lo); cy <= cell_y(lat_hi); ++cy) entries.emplace_back(key(cx, cy), f);
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i;
        View view{packed_.ax.size(), 0};
        while (j < entries.size() && entries[j].first == entries[i].first) {
            const std::size_t f = entries[j].second;
            packed_.push(flat_.ax[f], flat_.ay[f], flat_.bx[f], flat_.by[f]);
            ++view.size;
            ++j;
        }
        cells_.emplace(entries[i].first, view);
        i = j;
    }
}

bool LayerIndex::within(geo::LatLon p, double radius_m) const {
    if (radius_m > radius_m_) throw ValidationError("query radius exceeds the index build radius");
    const auto it = cells_.find(key(cell_x(p.lon), cell_y(p.lat)));
    if (it == cells_.end()) return false;
    const View v = it->second;
    const kernels::SegmentSoA segs{packed_.ax.data() + v.begin, packed_.ay.data() + v.begin,
                                   packed_.bx.data() + v.begin, packed_.by.data() + v.begin, v.size};
    const auto scale = geo::local_scale(p.lat);
    return std::sqrt(kernels::min_segment_dist2(segs, p.lon, p.lat, scale.kx, scale.ky)) <= radius_m;
}

bool LayerIndex::within_linear(geo::LatLon p, double radius_m) const {
    const auto scale = geo::local_scale(p.lat);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < flat_.ax.size(); ++f) {
        const double d =
            kernels::segment_dist2(flat_.ax[f], flat_.ay[f], flat_.bx[f], flat_.by[f], p.lon, p.lat, scale.kx, scale.ky);
        best = d < best ? d : best;
    }
    return std::sqrt(best) <= radius_m;
}

NetworkIndex::NetworkIndex(const Network& net, double radius_m, double cell_m) {
    for (std::size_t l = 0; l < kLayerCount; ++l) layers_[l] = LayerIndex(net.layers[l], radius_m, cell_m);
}

bool within_buffer(geo::LatLon p, Layer layer, const NetworkIndex& index, double radius_m) {
    return index[layer].within(p, radius_m);
}

}  // namespace tripmode
