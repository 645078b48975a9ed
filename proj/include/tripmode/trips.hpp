#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tripmode/ingest.hpp"
#include "tripmode/stops.hpp"

namespace tripmode {

/// Movement between two consecutive activities.
struct Trip {
    std::string device_id;
    int trip_id = 0;
    std::vector<Ping> pings;  ///< boundary ping of each activity included
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    double o_lat = 0.0, o_lon = 0.0;
    double d_lat = 0.0, d_lon = 0.0;
    double distance_m = 0.0;  ///< haversine sum over consecutive pings
    std::int64_t duration_s() const { return t_end - t_start; }
    std::size_t n_pings() const { return pings.size(); }
};

/// Fills t_start/t_end, origin/destination and distance from `pings`.
void summarize_trip(Trip& trip);

struct TripBuildResult {
    std::vector<Trip> trips;
    /// Activity pairs skipped because the next activity starts no later
    /// than the previous one ends.
    std::size_t overlapping = 0;
};

/// One trip per consecutive activity pair, spanning the last ping of the
/// earlier activity to the first ping of the later one.
TripBuildResult build_trips(const Trajectory& traj, const std::vector<Activity>& acts);

/// Stop detection, merge, classification and trip assembly for one device.
struct DetectionCounts {
    std::size_t clusters = 0;
    std::size_t activities = 0;
    std::size_t overlapping = 0;
};
std::vector<Trip> detect_trips(const Trajectory& traj, const StopParams& p, DetectionCounts* counts = nullptr);

/// A reported trip from a travel diary.
struct DiaryEntry {
    std::string device_id;
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    double o_lat = 0.0, o_lon = 0.0;
    double d_lat = 0.0, d_lon = 0.0;
    std::string mode;
};

struct HitRatioReport {
    std::size_t reported = 0;
    std::size_t matched = 0;
    std::size_t identified = 0;
    std::optional<double> hit_ratio;  ///< empty when nothing was reported
    std::size_t underreported() const { return identified - matched; }
};

struct MatchTolerance {
    double t_s = 300.0;
    double d_m = 200.0;
};

struct DiaryMatch {
    HitRatioReport report;
    /// For each diary entry (input order): index into the trip list, or -1.
    std::vector<long> trip_for_entry;
};

/// An entry matches a trip of the same device when both endpoints agree in
/// time within tol.t_s and in space within tol.d_m. Each trip serves at most
/// one entry; entries are visited in time order and the assignment is
/// maximal (augmenting paths), so enlarging a tolerance never loses matches.
DiaryMatch match_diary(std::span<const Trip> trips, std::span<const DiaryEntry> diary, const MatchTolerance& tol);

/// Trip roster row: trip summary plus optional imputation columns.
struct RosterRow {
    std::string device_id;
    int trip_id = 0;
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    double o_lat = 0.0, o_lon = 0.0;
    double d_lat = 0.0, d_lon = 0.0;
    double distance_m = 0.0;
    std::int64_t duration_s = 0;
    std::size_t n_pings = 0;
    std::string mode;           ///< blank before imputation
    std::optional<bool> is_air; ///< blank before imputation
};

RosterRow to_roster_row(const Trip& trip);
void write_roster(std::ostream& out, std::span<const RosterRow> rows);
std::vector<RosterRow> read_roster(std::istream& in);

void write_diary(std::ostream& out, std::span<const DiaryEntry> diary);
std::vector<DiaryEntry> read_diary(std::istream& in);

}  // namespace tripmode
