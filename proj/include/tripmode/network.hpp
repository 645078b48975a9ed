#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tripmode/geo.hpp"

namespace tripmode {

enum class Layer : std::uint8_t { rail = 0, bus = 1, drive = 2, bus_stop = 3 };
inline constexpr std::size_t kLayerCount = 4;

std::string_view layer_name(Layer l);
/// Throws SchemaError on an unknown tag.
Layer parse_layer(std::string_view tag);

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
    friend bool operator==(const LonLat&, const LonLat&) = default;
};

using Polyline = std::vector<LonLat>;

/// Geometry of one layer: polylines for rail/bus/drive, points for bus stops.
struct NetworkLayer {
    Layer layer = Layer::rail;
    std::vector<Polyline> lines;
    std::vector<LonLat> points;
    std::size_t size() const { return layer == Layer::bus_stop ? points.size() : lines.size(); }
};

struct Network {
    std::array<NetworkLayer, kLayerCount> layers{
        NetworkLayer{Layer::rail, {}, {}}, NetworkLayer{Layer::bus, {}, {}}, NetworkLayer{Layer::drive, {}, {}},
        NetworkLayer{Layer::bus_stop, {}, {}}};
    std::size_t warnings = 0;  ///< degenerate geometries skipped at load

    NetworkLayer& operator[](Layer l) { return layers[static_cast<std::size_t>(l)]; }
    const NetworkLayer& operator[](Layer l) const { return layers[static_cast<std::size_t>(l)]; }
};

/// Reads network NDJSON records into `net`. Unknown layers throw SchemaError;
/// polylines without a positive-length segment are skipped and counted.
void read_network(std::istream& in, Network& net);
Network load_network(std::span<const std::string> paths);
void write_network(std::ostream& out, const Network& net);

/// Distance in meters from a point to a polyline, measured in a local
/// equirectangular frame centered at the point.
double point_to_polyline_distance(geo::LatLon p, const Polyline& line);

/// Distance in meters from a point to another point, same local frame.
double point_to_point_distance(geo::LatLon p, LonLat q);

/// Uniform lon/lat grid over one layer. Every segment (or point) is stored
/// in each cell touched by its bounding box dilated by the build radius, so
/// a query cell holds every fragment that can lie within that radius.
class LayerIndex {
public:
    LayerIndex() = default;
    LayerIndex(const NetworkLayer& layer, double radius_m, double cell_m);

    /// Minimum distance (m) to the layer is <= radius_m. Requires
    /// radius_m <= build radius.
    bool within(geo::LatLon p, double radius_m) const;

    /// Exhaustive scan over every fragment (reference path).
    bool within_linear(geo::LatLon p, double radius_m) const;

    double build_radius() const { return radius_m_; }
    std::size_t fragment_count() const { return flat_.ax.size(); }
    std::size_t cell_count() const { return cells_.size(); }

private:
    struct Soa {
        std::vector<double> ax, ay, bx, by;
        void push(double a_x, double a_y, double b_x, double b_y);
    };
    struct View {
        std::size_t begin = 0;
        std::size_t size = 0;
    };

    std::uint64_t key(std::int64_t cx, std::int64_t cy) const;
    std::int64_t cell_x(double lon) const;
    std::int64_t cell_y(double lat) const;

    double radius_m_ = 0.0;
    double cell_deg_ = 1.0;
    Soa packed_;                                 ///< cell-major fragment copies
    std::unordered_map<std::uint64_t, View> cells_;
    Soa flat_;                                   ///< each fragment once, input order
};

/// Buffer-membership index over all four layers.
class NetworkIndex {
public:
    static constexpr double kDefaultRadiusM = 50.0;
    static constexpr double kDefaultCellM = 500.0;

    explicit NetworkIndex(const Network& net, double radius_m = kDefaultRadiusM, double cell_m = kDefaultCellM);

    const LayerIndex& operator[](Layer l) const { return layers_[static_cast<std::size_t>(l)]; }

private:
    std::array<LayerIndex, kLayerCount> layers_;
};

/// True iff the point lies within radius_m of any geometry in the layer.
bool within_buffer(geo::LatLon p, Layer layer, const NetworkIndex& index, double radius_m);

}  // namespace tripmode
