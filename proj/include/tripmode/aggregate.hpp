#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tripmode/geo.hpp"
#include "tripmode/ingest.hpp"
#include "tripmode/modes.hpp"
#include "tripmode/network.hpp"
#include "tripmode/trips.hpp"

namespace tripmode {

// ------------------------------------------------------------- air trips

struct AirRule {
    double min_avg_speed_mps = 100.0 * geo::kMpsPerMph;
    double min_duration_s = 3600.0;
    double min_distance_m = 100.0 * geo::kMeterPerMile;

    /// Throws ValidationError unless all three thresholds are positive.
    void validate() const;
};

/// All three thresholds must be exceeded (strictly).
bool is_air(double distance_m, double duration_s, const AirRule& rule);

struct AirSplit {
    std::vector<std::size_t> air;
    std::vector<std::size_t> ground;
};

AirSplit flag_air_trips(std::span<const RosterRow> trips, const AirRule& rule);

struct HeatCell {
    double lat = 0.0;  ///< cell center
    double lon = 0.0;
    std::size_t count = 0;
};

/// Air-trip origins counted on a regular lon/lat grid; cells sorted by (lat, lon).
std::vector<HeatCell> origin_heatmap(std::span<const RosterRow> trips, std::span<const std::size_t> which,
                                     double cell_deg);
void write_heatmap_csv(std::ostream& out, std::span<const HeatCell> cells);

// ----------------------------------------------------------------- zones

struct Zone {
    std::string id;
    std::vector<LonLat> ring;  ///< open ring: the closing vertex is not repeated
    double min_lon = 0.0, min_lat = 0.0, max_lon = 0.0, max_lat = 0.0;
};

/// Validates and normalizes a ring. Throws DataError on fewer than three
/// distinct vertices or a self-intersecting ring.
Zone make_zone(std::string id, std::vector<LonLat> ring);

std::vector<Zone> read_zones(std::istream& in);
std::vector<Zone> load_zones(const std::string& path);
void write_zones(std::ostream& out, std::span<const Zone> zones);

enum class Location { outside, inside, boundary };

/// Even-odd ray casting with exact orientation tests.
Location locate(const Zone& z, double lon, double lat);

/// Index of the zone holding the point. A point on the boundary of several
/// zones goes to the lexicographically smallest id.
std::optional<std::size_t> assign_zone(double lat, double lon, std::span<const Zone> zones);

// ------------------------------------------------------------ mode share

inline constexpr std::string_view kNoZone = "_none";
inline constexpr std::string_view kAllZones = "_all";

struct ShareRow {
    std::string zone_id;
    std::size_t trips = 0;
    std::vector<std::size_t> counts;  ///< per mode, in modes_of(mode_set) order
    std::vector<double> share;
};

struct ShareTable {
    ModeSet mode_set = ModeSet::five;
    std::vector<ShareRow> rows;  ///< zone ids ascending, `_none` last
};

/// Shares of ground trips with a mode. With zones, trips are placed by
/// origin and unplaced trips are pooled under `_none`; without zones a
/// single `_all` row is produced. Zones without trips are omitted.
ShareTable mode_share(std::span<const RosterRow> trips, const std::vector<Zone>* zones, ModeSet mode_set);

/// Long format: zone_id,mode,count,zone_trips,share.
void write_share_csv(std::ostream& out, const ShareTable& t);

/// Wide per-zone table for choropleths: one share column per mode plus a
/// natural-breaks class column per mode (blank when too few distinct values).
void write_choropleth_csv(std::ostream& out, const ShareTable& t, int classes);

/// Reads `zone_id,mode,share` rows (extra columns ignored).
struct ShareEntry {
    std::string zone_id;
    std::string mode;
    double share = 0.0;
};
std::vector<ShareEntry> read_share_entries(std::istream& in);

// --------------------------------------------------------- distributions

struct DistributionConfig {
    std::vector<double> short_distance_edges_m;
    std::vector<double> long_distance_edges_m;
    std::vector<double> time_edges_min;
    std::int64_t utc_offset_s = 0;

    static DistributionConfig defaults();
};

inline constexpr double kShortTripLimitM = 50.0 * geo::kMeterPerMile;

struct DistributionPanel {
    std::string name;
    std::vector<std::string> labels;
    std::vector<std::size_t> counts;
    std::size_t total() const;
    std::vector<double> proportions() const;
};

/// Panels: distance_short, distance_long, travel_time, trips_per_day,
/// hour_of_day, day_of_week.
std::vector<DistributionPanel> trip_distributions(std::span<const RosterRow> trips, const DistributionConfig& cfg);
void write_distributions_csv(std::ostream& out, std::span<const DistributionPanel> panels);

/// Local calendar day number and weekday (0 = Monday) of an epoch second.
std::int64_t local_day(std::int64_t t, std::int64_t utc_offset_s);
int local_weekday(std::int64_t t, std::int64_t utc_offset_s);
int local_hour(std::int64_t t, std::int64_t utc_offset_s);

// ------------------------------------------------------------ statistics

/// Product-moment correlation. Throws DataError on mismatched lengths, fewer
/// than two values or a series without variance.
double pearson(std::span<const double> x, std::span<const double> y);

struct JenksResult {
    std::vector<double> breaks;  ///< upper bound of each of the first k-1 classes
    std::vector<std::size_t> class_sizes;
    double ssd = 0.0;  ///< total within-class sum of squared deviations
};

/// Exact Fisher-Jenks optimization. Equal values never straddle a break.
/// Ties prefer a smaller first class, then a smaller second, and so on.
/// Throws DataError if k < 2 or there are fewer than k distinct values.
JenksResult jenks(std::span<const double> values, int k);
inline std::vector<double> jenks_breaks(std::span<const double> values, int k) { return jenks(values, k).breaks; }

/// Class of a value given ascending breaks: first class whose break is >= v.
int jenks_class(double v, std::span<const double> breaks);

// ------------------------------------------------------------ comparison

struct CorrelationRow {
    std::string scope;  ///< overall, mode or zone
    std::string key;
    std::size_t n = 0;
    std::optional<double> r;  ///< empty when undefined (constant series, n < 2)
};

/// Pairs estimated and reference shares over zones present in both and
/// every mode of the set (a missing pair counts as share 0). Emits the
/// flattened zone-by-mode correlation, one row per mode across zones, and
/// one row per zone across modes.
std::vector<CorrelationRow> compare_shares(const ShareTable& estimated, std::span<const ShareEntry> reference);
void write_correlation_csv(std::ostream& out, std::span<const CorrelationRow> rows);

}  // namespace tripmode
