#include "tripmode/trips.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "tripmode/error.hpp"
#include "tripmode/geo.hpp"
#include "tripmode/text.hpp"

namespace tripmode {

void summarize_trip(Trip& trip) {
    if (trip.pings.empty()) throw DataError("trip has no pings");
    const Ping& first = trip.pings.front();
    const Ping& last = trip.pings.back();
    trip.t_start = first.t;
    trip.t_end = last.t;
    trip.o_lat = first.lat;
    trip.o_lon = first.lon;
    trip.d_lat = last.lat;
    trip.d_lon = last.lon;
    double dist = 0.0;
    for (std::size_t i = 1; i < trip.pings.size(); ++i) {
        const Ping& a = trip.pings[i - 1];
        const Ping& b = trip.pings[i];
        dist += geo::haversine_m(a.lat, a.lon, b.lat, b.lon);
    }
    trip.distance_m = dist;
}

TripBuildResult build_trips(const Trajectory& traj, const std::vector<Activity>& acts) {
    TripBuildResult result;
    for (const auto& a : acts) {
        if (a.cluster.members.empty()) throw std::logic_error("activity without member pings");
    }
    for (std::size_t k = 0; k + 1 < acts.size(); ++k) {
        const std::size_t from = acts[k].cluster.last_index();
        const std::size_t to = acts[k + 1].cluster.first_index();
        if (to <= from || traj.pings[to].t <= traj.pings[from].t) {
            ++result.overlapping;
            continue;
        }
        Trip trip;
        trip.device_id = traj.device_id;
        trip.trip_id = static_cast<int>(result.trips.size());
        trip.pings.assign(traj.pings.begin() + static_cast<std::ptrdiff_t>(from),
                          traj.pings.begin() + static_cast<std::ptrdiff_t>(to) + 1);
        summarize_trip(trip);
        result.trips.push_back(std::move(trip));
    }
    return result;
}

std::vector<Trip> detect_trips(const Trajectory& traj, const StopParams& p, DetectionCounts* counts) {
    auto clusters = st_dbscan(traj, p);
    const std::size_t raw = clusters.size();
    auto merged = merge_clusters(std::move(clusters), p.s_act, traj);
    auto acts = classify_activities(merged, p.t_act);
    auto built = build_trips(traj, acts);
    if (counts) {
        counts->clusters += raw;
        counts->activities += acts.size();
        counts->overlapping += built.overlapping;
    }
    return std::move(built.trips);
}

namespace {

bool entry_matches(const Trip& trip, const DiaryEntry& e, const MatchTolerance& tol) {
    return std::abs(static_cast<double>(trip.t_start - e.t_start)) <= tol.t_s &&
           std::abs(static_cast<double>(trip.t_end - e.t_end)) <= tol.t_s &&
           geo::haversine_m(trip.o_lat, trip.o_lon, e.o_lat, e.o_lon) <= tol.d_m &&
           geo::haversine_m(trip.d_lat, trip.d_lon, e.d_lat, e.d_lon) <= tol.d_m;
}

// Kuhn's augmenting-path matching over one device.
class DeviceMatcher {
public:
    DeviceMatcher(std::vector<std::vector<std::size_t>> adj, std::size_t n_trips)
        : adj_(std::move(adj)), owner_(n_trips, kFree) {}

    bool augment(std::size_t entry) {
        seen_.assign(owner_.size(), 0);
        return try_entry(entry);
    }

    std::size_t owner(std::size_t trip) const { return owner_[trip]; }
    static constexpr std::size_t kFree = static_cast<std::size_t>(-1);

private:
    bool try_entry(std::size_t entry) {
        for (std::size_t trip : adj_[entry]) {
            if (seen_[trip]) continue;
            seen_[trip] = 1;
            if (owner_[trip] == kFree || try_entry(owner_[trip])) {
                owner_[trip] = entry;
                return true;
            }
        }
        return false;
    }

    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::size_t> owner_;
    std::vector<char> seen_;
};

}  // namespace

DiaryMatch match_diary(std::span<const Trip> trips, std::span<const DiaryEntry> diary, const MatchTolerance& tol) {
    if (!(tol.t_s > 0.0) || !(tol.d_m > 0.0)) throw ValidationError("match tolerances must be positive");
    DiaryMatch out;
    out.report.reported = diary.size();
    out.report.identified = trips.size();
    out.trip_for_entry.assign(diary.size(), -1);

    std::map<std::string, std::vector<std::size_t>, std::less<>> trips_by_dev;
    std::map<std::string, std::vector<std::size_t>, std::less<>> diary_by_dev;
    for (std::size_t i = 0; i < trips.size(); ++i) trips_by_dev[trips[i].device_id].push_back(i);
    for (std::size_t i = 0; i < diary.size(); ++i) diary_by_dev[diary[i].device_id].push_back(i);

    for (auto& [device, entries] : diary_by_dev) {
        const auto it = trips_by_dev.find(device);
        if (it == trips_by_dev.end()) continue;
        auto dev_trips = it->second;
        std::stable_sort(dev_trips.begin(), dev_trips.end(),
                         [&](std::size_t a, std::size_t b) { return trips[a].t_start < trips[b].t_start; });
        std::stable_sort(entries.begin(), entries.end(),
                         [&](std::size_t a, std::size_t b) { return diary[a].t_start < diary[b].t_start; });

        std::vector<std::vector<std::size_t>> adj(entries.size());
        for (std::size_t e = 0; e < entries.size(); ++e) {
            for (std::size_t k = 0; k < dev_trips.size(); ++k) {
                if (entry_matches(trips[dev_trips[k]], diary[entries[e]], tol)) adj[e].push_back(k);
            }
        }
        DeviceMatcher matcher(std::move(adj), dev_trips.size());
        for (std::size_t e = 0; e < entries.size(); ++e) matcher.augment(e);
        for (std::size_t k = 0; k < dev_trips.size(); ++k) {
            const std::size_t e = matcher.owner(k);
            if (e == DeviceMatcher::kFree) continue;
            out.trip_for_entry[entries[e]] = static_cast<long>(dev_trips[k]);
            ++out.report.matched;
        }
    }
    if (out.report.reported > 0) {
        out.report.hit_ratio = static_cast<double>(out.report.matched) / static_cast<double>(out.report.reported);
    }
    return out;
}

RosterRow to_roster_row(const Trip& trip) {
    RosterRow r;
    r.device_id = trip.device_id;
    r.trip_id = trip.trip_id;
    r.t_start = trip.t_start;
    r.t_end = trip.t_end;
    r.o_lat = trip.o_lat;
    r.o_lon = trip.o_lon;
    r.d_lat = trip.d_lat;
    r.d_lon = trip.d_lon;
    r.distance_m = trip.distance_m;
    r.duration_s = trip.duration_s();
    r.n_pings = trip.n_pings();
    return r;
}

void write_roster(std::ostream& out, std::span<const RosterRow> rows) {
    out << "device_id,trip_id,t_start,t_end,o_lat,o_lon,d_lat,d_lon,distance_m,duration_s,n_pings,mode,is_air\n";
    for (const auto& r : rows) {
        out << r.device_id << ',' << r.trip_id << ',' << r.t_start << ',' << r.t_end << ',' << text::fmt(r.o_lat)
            << ',' << text::fmt(r.o_lon) << ',' << text::fmt(r.d_lat) << ',' << text::fmt(r.d_lon) << ','
            << text::fmt_fixed(r.distance_m, 3) << ',' << r.duration_s << ',' << r.n_pings << ',' << r.mode << ',';
        if (r.is_air) out << (*r.is_air ? '1' : '0');
        out << '\n';
    }
}

namespace {

struct Columns {
    std::vector<std::string_view> header;
    std::size_t require(std::string_view name, const char* what) const {
        const long idx = text::column_index(header, name);
        if (idx < 0) throw SchemaError(std::string(what) + " is missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(idx);
    }
};

template <typename T>
T need(std::optional<T> v, const char* what, std::size_t line) {
    if (!v) throw DataError(std::string("unparseable value in ") + what + " at line " + std::to_string(line));
    return *v;
}

}  // namespace

std::vector<RosterRow> read_roster(std::istream& in) {
    std::string header_line;
    if (!std::getline(in, header_line)) throw SchemaError("trip roster is empty");
    const Columns cols{text::split(header_line)};
    const char* what = "trip roster";
    const std::size_t c_dev = cols.require("device_id", what), c_id = cols.require("trip_id", what),
                      c_ts = cols.require("t_start", what), c_te = cols.require("t_end", what),
                      c_olat = cols.require("o_lat", what), c_olon = cols.require("o_lon", what),
                      c_dlat = cols.require("d_lat", what), c_dlon = cols.require("d_lon", what),
                      c_dist = cols.require("distance_m", what), c_dur = cols.require("duration_s", what),
                      c_np = cols.require("n_pings", what);
    const long c_mode = text::column_index(cols.header, "mode");
    const long c_air = text::column_index(cols.header, "is_air");

    std::vector<RosterRow> rows;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const auto f = text::split(line);
        if (f.size() != cols.header.size()) throw DataError("trip roster line " + std::to_string(lineno) + " has wrong field count");
        RosterRow r;
        r.device_id = std::string(text::trim(f[c_dev]));
        r.trip_id = static_cast<int>(need(text::to_int(f[c_id]), what, lineno));
        r.t_start = need(text::to_int(f[c_ts]), what, lineno);
        r.t_end = need(text::to_int(f[c_te]), what, lineno);
        r.o_lat = need(text::to_double(f[c_olat]), what, lineno);
        r.o_lon = need(text::to_double(f[c_olon]), what, lineno);
        r.d_lat = need(text::to_double(f[c_dlat]), what, lineno);
        r.d_lon = need(text::to_double(f[c_dlon]), what, lineno);
        r.distance_m = need(text::to_double(f[c_dist]), what, lineno);
        r.duration_s = need(text::to_int(f[c_dur]), what, lineno);
        r.n_pings = static_cast<std::size_t>(need(text::to_int(f[c_np]), what, lineno));
        if (c_mode >= 0) r.mode = std::string(text::trim(f[static_cast<std::size_t>(c_mode)]));
        if (c_air >= 0) {
            const auto v = text::trim(f[static_cast<std::size_t>(c_air)]);
            if (v == "1") r.is_air = true;
            else if (v == "0") r.is_air = false;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_diary(std::ostream& out, std::span<const DiaryEntry> diary) {
    out << "device_id,t_start,t_end,o_lat,o_lon,d_lat,d_lon,mode\n";
    for (const auto& e : diary) {
        out << e.device_id << ',' << e.t_start << ',' << e.t_end << ',' << text::fmt(e.o_lat) << ','
            << text::fmt(e.o_lon) << ',' << text::fmt(e.d_lat) << ',' << text::fmt(e.d_lon) << ',' << e.mode << '\n';
    }
}

std::vector<DiaryEntry> read_diary(std::istream& in) {
    std::string header_line;
    if (!std::getline(in, header_line)) throw SchemaError("diary is empty");
    const Columns cols{text::split(header_line)};
    const char* what = "diary";
    const std::size_t c_dev = cols.require("device_id", what), c_ts = cols.require("t_start", what),
                      c_te = cols.require("t_end", what), c_olat = cols.require("o_lat", what),
                      c_olon = cols.require("o_lon", what), c_dlat = cols.require("d_lat", what),
                      c_dlon = cols.require("d_lon", what);
    const long c_mode = text::column_index(cols.header, "mode");
    std::vector<DiaryEntry> out;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const auto f = text::split(line);
        if (f.size() != cols.header.size()) throw DataError("diary line " + std::to_string(lineno) + " has wrong field count");
        DiaryEntry e;
        e.device_id = std::string(text::trim(f[c_dev]));
        e.t_start = need(text::to_int(f[c_ts]), what, lineno);
        e.t_end = need(text::to_int(f[c_te]), what, lineno);
        e.o_lat = need(text::to_double(f[c_olat]), what, lineno);
        e.o_lon = need(text::to_double(f[c_olon]), what, lineno);
        e.d_lat = need(text::to_double(f[c_dlat]), what, lineno);
        e.d_lon = need(text::to_double(f[c_dlon]), what, lineno);
        if (c_mode >= 0) e.mode = std::string(text::trim(f[static_cast<std::size_t>(c_mode)]));
        if (!(e.t_start < e.t_end)) throw DataError("diary line " + std::to_string(lineno) + " has t_start >= t_end");
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace tripmode
