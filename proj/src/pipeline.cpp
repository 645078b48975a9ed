#include "tripmode/pipeline.hpp"

#include <algorithm>
#include <map>

#include "tripmode/error.hpp"
#include "tripmode/parallel.hpp"

namespace tripmode {

DetectionRun detect_all(std::span<const Trajectory> trajs, const StopParams& p, double max_accuracy_m,
                        unsigned threads) {
    std::vector<std::vector<Trip>> per_device(trajs.size());
    std::vector<DetectionCounts> counts(trajs.size());
    std::vector<std::size_t> kept(trajs.size());
    parallel_for(trajs.size(), threads, [&](std::size_t i) {
        const auto filtered = filter_by_accuracy(trajs[i], max_accuracy_m);
        kept[i] = filtered.pings.size();
        per_device[i] = detect_trips(filtered, p, &counts[i]);
    });
    DetectionRun run;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        run.pings_in += trajs[i].pings.size();
        run.pings_kept += kept[i];
        run.counts.clusters += counts[i].clusters;
        run.counts.activities += counts[i].activities;
        run.counts.overlapping += counts[i].overlapping;
        for (auto& t : per_device[i]) run.trips.push_back(std::move(t));
    }
    return run;
}

std::vector<RosterRow> to_roster(std::span<const Trip> trips) {
    std::vector<RosterRow> rows;
    rows.reserve(trips.size());
    for (const auto& t : trips) rows.push_back(to_roster_row(t));
    return rows;
}

std::vector<Trip> trips_from_roster(std::span<const RosterRow> roster, std::span<const Trajectory> trajs) {
    std::map<std::string_view, const Trajectory*> by_id;
    for (const auto& t : trajs) by_id.emplace(t.device_id, &t);
    std::vector<Trip> trips;
    trips.reserve(roster.size());
    for (const auto& r : roster) {
        Trip trip;
        trip.device_id = r.device_id;
        trip.trip_id = r.trip_id;
        trip.t_start = r.t_start;
        trip.t_end = r.t_end;
        trip.o_lat = r.o_lat;
        trip.o_lon = r.o_lon;
        trip.d_lat = r.d_lat;
        trip.d_lon = r.d_lon;
        trip.distance_m = r.distance_m;
        const auto it = by_id.find(r.device_id);
        if (it != by_id.end()) {
            const auto& pings = it->second->pings;
            const auto lo = std::lower_bound(pings.begin(), pings.end(), r.t_start,
                                             [](const Ping& p, std::int64_t t) { return p.t < t; });
            const auto hi = std::upper_bound(pings.begin(), pings.end(), r.t_end,
                                             [](std::int64_t t, const Ping& p) { return t < p.t; });
            trip.pings.assign(lo, hi);
        }
        // Geometry from the pings themselves, so distance and endpoints agree.
        if (!trip.pings.empty()) summarize_trip(trip);
        trips.push_back(std::move(trip));
    }
    return trips;
}

FeatureRun compute_features(std::span<const RosterRow> roster, std::span<const Trajectory> trajs,
                            const NetworkIndex& index, unsigned threads) {
    const auto trips = trips_from_roster(roster, trajs);
    std::vector<std::optional<TripFeatures>> values(trips.size());
    std::vector<std::string> errors(trips.size());
    parallel_for(trips.size(), threads, [&](std::size_t i) {
        try {
            if (trips[i].pings.size() < 2) throw DataError("fewer than two pings");
            values[i] = extract_features(trips[i], index);
        } catch (const DataError& e) {
            errors[i] = e.what();
        }
    });
    FeatureRun run;
    for (std::size_t i = 0; i < trips.size(); ++i) {
        if (!values[i]) {
            run.skipped.push_back(roster[i].device_id + "/" + std::to_string(roster[i].trip_id) + ": " + errors[i]);
            continue;
        }
        run.rows.push_back({roster[i].device_id, roster[i].trip_id, values[i]->values, values[i]->low_confidence,
                            roster[i].mode});
    }
    return run;
}

ImputeRun impute_modes(std::span<const RosterRow> roster, std::span<const FeatureRow> features,
                       const ForestModel& model, const AirRule& rule) {
    std::map<std::pair<std::string_view, int>, const FeatureRow*> by_key;
    for (const auto& f : features) by_key.emplace(std::pair<std::string_view, int>{f.device_id, f.trip_id}, &f);
    const auto split = flag_air_trips(roster, rule);
    ImputeRun run;
    run.roster.assign(roster.begin(), roster.end());
    for (auto& r : run.roster) {
        r.is_air = false;
        r.mode.clear();
    }
    for (std::size_t i : split.air) {
        run.roster[i].is_air = true;
        ++run.air;
    }
    const auto& classes = modes_of(model.mode_set);
    for (std::size_t i : split.ground) {
        auto& r = run.roster[i];
        const auto it = by_key.find({r.device_id, r.trip_id});
        if (it == by_key.end()) {
            ++run.missing_features;
            continue;
        }
        r.mode = std::string(mode_name(classes[static_cast<std::size_t>(predict(model, it->second->values).label)]));
        ++run.imputed;
    }
    return run;
}

ShareTable share_table_from_entries(std::span<const ShareEntry> entries, ModeSet mode_set) {
    const auto k = modes_of(mode_set).size();
    std::map<std::string, ShareRow> rows;
    for (const auto& e : entries) {
        const auto mode = parse_mode(e.mode);
        const auto cls = mode ? class_index(*mode, mode_set) : std::nullopt;
        if (!cls) throw DataError("share mode '" + e.mode + "' does not belong to the mode set");
        auto& row = rows[e.zone_id];
        if (row.share.empty()) {
            row.zone_id = e.zone_id;
            row.share.assign(k, 0.0);
            row.counts.assign(k, 0);
        }
        row.share[static_cast<std::size_t>(*cls)] += e.share;
    }
    ShareTable t;
    t.mode_set = mode_set;
    for (auto& [id, row] : rows) t.rows.push_back(std::move(row));
    return t;
}

}  // namespace tripmode
