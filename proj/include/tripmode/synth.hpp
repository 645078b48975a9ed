#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tripmode/aggregate.hpp"
#include "tripmode/ingest.hpp"
#include "tripmode/modes.hpp"
#include "tripmode/rng.hpp"
#include "tripmode/network.hpp"
#include "tripmode/trips.hpp"

namespace tripmode::synth {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Piecewise-uniform distribution: bins (edges[i], edges[i+1]] with the last
/// bin running from edges.back() to `cap`.
struct BinDistribution {
    std::vector<double> edges;
    std::vector<double> weights;  ///< one per bin, summing to 1
    double cap = 0.0;

    void validate(const char* what) const;
    double sample(Rng& rng) const;

    /// Accuracy shapes of a location-service feed and of app-collected GPS (meters).
    static BinDistribution accuracy_lbs();
    static BinDistribution accuracy_app();
    /// Recording-interval shape of a location-service feed (seconds).
    static BinDistribution lri_lbs();
};

/// Modes indexed drive, rail, bus, bike, walk.
inline constexpr std::array<Mode, 5> kSynthModes{Mode::drive, Mode::rail, Mode::bus, Mode::bike, Mode::walk};

struct PersonaConfig {
    std::array<Range, 5> speed_mps{{{8, 30}, {10, 35}, {4, 15}, {3, 7}, {0.8, 2.0}}};
    std::array<Range, 5> trip_length_m{{{2000, 20000}, {3000, 20000}, {1500, 8000}, {1000, 6000}, {300, 2000}}};
    std::array<double, 5> mode_weights{0.40, 0.12, 0.14, 0.14, 0.20};
    Range bus_stop_wait_s{20, 40};
    Range rail_stop_wait_s{30, 60};
    Range light_wait_s{10, 40};
    double light_probability = 0.3;
    /// Share of drive trips stuck in traffic: cruise drawn from `congested_mps`.
    double congestion_probability = 0.3;
    Range congested_mps{8, 12};
    /// Buses skip a stop nobody asked for.
    double bus_stop_probability = 0.7;
    /// Drivers favor arterials (lattice lines that carry buses): edge cost factor.
    double arterial_cost = 0.6;
    Range dwell_s{600, 7200};
    int trips_min = 2;
    int trips_max = 6;
    bool noise = true;  ///< Gaussian offset with sigma = accuracy / 2 per axis
    BinDistribution accuracy = BinDistribution::accuracy_lbs();
    BinDistribution lri = BinDistribution::lri_lbs();
    std::optional<double> fixed_lri_s;  ///< overrides `lri` when set

    /// Throws ValidationError on empty or unordered bands and bad distributions.
    void validate() const;
};

struct NetworkConfig {
    double extent_km = 12.0;
    double spacing_km = 1.0;  ///< drive lattice spacing
    int rail_lines = 2;
    int bus_routes = 6;
    double jitter_m = 20.0;
    double vertex_step_m = 250.0;
    double origin_lat = 38.85;
    double origin_lon = -77.10;

    void validate() const;
};

struct CorpusConfig {
    std::uint64_t seed = 1;
    int devices = 200;
    int days = 1;
    std::int64_t start_epoch = 1678078800;  ///< local midnight of the first day, as UTC epoch
    std::int64_t utc_offset_s = -18000;
    int zones_per_side = 3;
    NetworkConfig network;
    PersonaConfig persona;

    void validate() const;
};

std::string to_json(const CorpusConfig& c);
/// Missing keys keep their defaults. Throws SchemaError on malformed input.
CorpusConfig corpus_config_from_json(const std::string& text);

struct Vec2 {
    double x = 0.0;  ///< meters east of the world origin
    double y = 0.0;  ///< meters north
};

/// A place where an activity can happen.
struct Place {
    Vec2 pos;
    int vertex = -1;  ///< drive graph vertex
    std::vector<std::pair<int, int>> bus;   ///< (route, stop index)
    std::vector<std::pair<int, int>> rail;  ///< (line, station index)
};

/// Generated network plus the routing structures used to move devices on it.
struct World {
    NetworkConfig config;
    Network network;
    std::vector<Vec2> vertices;
    struct Edge {
        int to = 0;
        double length = 0.0;
        bool arterial = false;
    };
    std::vector<std::vector<Edge>> adjacency;
    std::vector<bool> intersection;
    struct Line {
        std::vector<int> vertices;  ///< drive-graph vertex ids along the route
        std::vector<int> stops;     ///< positions in `vertices`
    };
    std::vector<Line> bus_routes;
    struct RailLine {
        std::vector<Vec2> points;
        std::vector<int> stations;  ///< positions in `points`
    };
    std::vector<RailLine> rail_lines;
    std::vector<Place> places;

    geo::LatLon to_latlon(Vec2 p) const;
    Vec2 from_latlon(double lat, double lon) const;
};

/// Deterministic in (seed, config). Throws ValidationError on a zero extent.
World generate_world(std::uint64_t seed, const NetworkConfig& config);

struct TruthTrip {
    std::string device_id;
    int trip_id = 0;
    std::int64_t t_start = 0;  ///< departure, whole seconds
    std::int64_t t_end = 0;    ///< arrival
    Vec2 origin;
    Vec2 destination;
    Mode mode = Mode::walk;
    double path_m = 0.0;
};

struct DeviceDay {
    Trajectory trajectory;
    std::vector<TruthTrip> trips;
};

/// One device-day: alternating activities and trips, sampled pings. Trip
/// ids continue from `first_trip_id`.
DeviceDay generate_day(std::uint64_t seed, const PersonaConfig& persona, const World& world,
                       const std::string& device_id, std::int64_t day_start, int first_trip_id = 0);

struct Corpus {
    World world;
    std::vector<Trajectory> trajectories;
    std::vector<TruthTrip> truth;
    std::vector<DiaryEntry> diary;
    std::vector<Zone> zones;
    std::vector<ShareEntry> survey;  ///< truth shares by origin zone
};

Corpus generate_corpus(const CorpusConfig& config, unsigned threads = 1);

/// Truth trips as roster rows with modes filled; n_pings counts the pings
/// inside [t_start, t_end].
std::vector<RosterRow> truth_roster(const Corpus& corpus);

std::string device_name(int index);

}  // namespace tripmode::synth
