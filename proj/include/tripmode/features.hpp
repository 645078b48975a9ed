#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tripmode/network.hpp"
#include "tripmode/trips.hpp"

namespace tripmode {

inline constexpr std::size_t kFeatureCount = 16;

/// Frozen column order. Bump kFeatureOrderVersion whenever this changes.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "records_per_min", "trip_distance_m", "od_distance_m", "trip_time_min",
    "speed_max",       "speed_min",       "speed_avg",     "speed_median",
    "speed_p5",        "speed_p25",       "speed_p75",     "speed_p95",
    "pct_rail",        "pct_bus",         "pct_drive",     "pct_busstop"};
inline constexpr int kFeatureOrderVersion = 1;

enum Feature : std::size_t {
    kRecordsPerMin,
    kTripDistance,
    kOdDistance,
    kTripTimeMin,
    kSpeedMax,
    kSpeedMin,
    kSpeedAvg,
    kSpeedMedian,
    kSpeedP5,
    kSpeedP25,
    kSpeedP75,
    kSpeedP95,
    kPctRail,
    kPctBus,
    kPctDrive,
    kPctBusStop,
};

using FeatureVector = std::array<double, kFeatureCount>;

/// Buffer radius and accuracy cut used by the network-share features.
inline constexpr double kNetworkBufferM = 50.0;
inline constexpr double kNetworkAccuracyCutM = 50.0;

/// Speeds (m/s) between consecutive pings; pairs with zero elapsed time are
/// skipped. Throws DataError for fewer than two pings.
std::vector<double> segment_speeds(std::span<const Ping> pings);

/// Linear interpolation between closest ranks, q in [0, 100]. The input need
/// not be sorted. Throws DataError on an empty series.
double percentile(std::span<const double> values, double q);

/// Same, on an already ascending series.
double percentile_sorted(std::span<const double> sorted, double q);

struct TripFeatures {
    FeatureVector values{};
    /// No ping met the accuracy cut, so the network shares default to 0.
    bool low_confidence = false;
};

/// Throws DataError when the trip has no usable speed pair or no duration.
TripFeatures extract_features(const Trip& trip, const NetworkIndex& index);

struct FeatureRow {
    std::string device_id;
    int trip_id = 0;
    FeatureVector values{};
    bool low_confidence = false;
    std::string mode;  ///< label, blank when unknown
};

void write_features(std::ostream& out, std::span<const FeatureRow> rows);
/// Reads a features CSV: optional key columns, the 16 named columns, optional mode.
std::vector<FeatureRow> read_features(std::istream& in);

}  // namespace tripmode
