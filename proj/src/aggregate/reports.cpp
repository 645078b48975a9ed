#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "tripmode/aggregate.hpp"
#include "tripmode/error.hpp"
#include "tripmode/text.hpp"

namespace tripmode {

void AirRule::validate() const {
    if (!(min_avg_speed_mps > 0.0) || !(min_duration_s > 0.0) || !(min_distance_m > 0.0)) {
        throw ValidationError("air rule thresholds must be positive");
    }
}

bool is_air(double distance_m, double duration_s, const AirRule& rule) {
    if (!(duration_s > rule.min_duration_s) || !(distance_m > rule.min_distance_m)) return false;
    return distance_m / duration_s > rule.min_avg_speed_mps;
}

AirSplit flag_air_trips(std::span<const RosterRow> trips, const AirRule& rule) {
    rule.validate();
    AirSplit out;
    for (std::size_t i = 0; i < trips.size(); ++i) {
        const auto& t = trips[i];
        const bool air = is_air(t.distance_m, static_cast<double>(t.duration_s), rule);
        (air ? out.air : out.ground).push_back(i);
    }
    return out;
}

std::vector<HeatCell> origin_heatmap(std::span<const RosterRow> trips, std::span<const std::size_t> which,
                                     double cell_deg) {
    if (!(cell_deg > 0.0)) throw ValidationError("heatmap cell size must be positive");
    std::map<std::pair<long long, long long>, std::size_t> cells;
    for (std::size_t i : which) {
        const auto iy = static_cast<long long>(std::floor(trips[i].o_lat / cell_deg));
        const auto ix = static_cast<long long>(std::floor(trips[i].o_lon / cell_deg));
        ++cells[{iy, ix}];
    }
    std::vector<HeatCell> out;
    for (const auto& [key, count] : cells) {
        out.push_back({(static_cast<double>(key.first) + 0.5) * cell_deg,
                       (static_cast<double>(key.second) + 0.5) * cell_deg, count});
    }
    return out;
}

void write_heatmap_csv(std::ostream& out, std::span<const HeatCell> cells) {
    out << "lat,lon,count\n";
    for (const auto& c : cells) out << text::fmt_fixed(c.lat, 6) << ',' << text::fmt_fixed(c.lon, 6) << ',' << c.count << '\n';
}

DistributionConfig DistributionConfig::defaults() {
    DistributionConfig c;
    for (int mi = 0; mi < 50; mi += 5) c.short_distance_edges_m.push_back(mi * geo::kMeterPerMile);
    for (int mi : {50, 100, 200, 300, 500, 1000}) c.long_distance_edges_m.push_back(mi * geo::kMeterPerMile);
    c.time_edges_min = {0, 5, 10, 15, 20, 30, 45, 60, 90, 120, 180};
    return c;
}

std::size_t DistributionPanel::total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

std::vector<double> DistributionPanel::proportions() const {
    const std::size_t n = total();
    std::vector<double> p(counts.size(), 0.0);
    if (n == 0) return p;
    for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    return p;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

DistributionPanel binned(std::string name, const std::vector<double>& values, const std::vector<double>& edges) {
    DistributionPanel p;
    p.name = std::move(name);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string lo = text::fmt(edges[i]);
        const std::string hi = i + 1 < edges.size() ? text::fmt(edges[i + 1]) : std::string("inf");
        p.labels.push_back("(" + lo + ";" + hi + "]");
    }
    p.counts.assign(edges.size(), 0);
    if (edges.empty()) return p;
    for (double v : values) {
        // (e_i, e_{i+1}] with values at or below the first edge in bin 0.
        const auto it = std::lower_bound(edges.begin(), edges.end(), v);
        const std::size_t bin = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
        ++p.counts[bin];
    }
    return p;
}

}  // namespace

std::int64_t local_day(std::int64_t t, std::int64_t utc_offset_s) { return floor_div(t + utc_offset_s, 86400); }

int local_weekday(std::int64_t t, std::int64_t utc_offset_s) {
    // Day 0 (1970-01-01) was a Thursday.
    const std::int64_t d = local_day(t, utc_offset_s);
    return static_cast<int>(((d + 3) % 7 + 7) % 7);
}

int local_hour(std::int64_t t, std::int64_t utc_offset_s) {
    const std::int64_t s = t + utc_offset_s - local_day(t, utc_offset_s) * 86400;
    return static_cast<int>(s / 3600);
}

std::vector<DistributionPanel> trip_distributions(std::span<const RosterRow> trips, const DistributionConfig& cfg) {
    std::vector<double> short_d;
    std::vector<double> long_d;
    std::vector<double> minutes;
    std::map<std::pair<std::string, std::int64_t>, std::size_t> per_day;
    DistributionPanel hours{"hour_of_day", {}, std::vector<std::size_t>(24, 0)};
    DistributionPanel days{"day_of_week", {"mon", "tue", "wed", "thu", "fri", "sat", "sun"},
                           std::vector<std::size_t>(7, 0)};
    for (int h = 0; h < 24; ++h) hours.labels.push_back(std::to_string(h));
    for (const auto& t : trips) {
        (t.distance_m < kShortTripLimitM ? short_d : long_d).push_back(t.distance_m);
        minutes.push_back(static_cast<double>(t.duration_s) / 60.0);
        ++per_day[{t.device_id, local_day(t.t_start, cfg.utc_offset_s)}];
        ++hours.counts[static_cast<std::size_t>(local_hour(t.t_start, cfg.utc_offset_s))];
        ++days.counts[static_cast<std::size_t>(local_weekday(t.t_start, cfg.utc_offset_s))];
    }
    std::size_t max_rate = 0;
    for (const auto& [key, n] : per_day) max_rate = std::max(max_rate, n);
    DistributionPanel rate{"trips_per_day", {}, std::vector<std::size_t>(max_rate, 0)};
    for (std::size_t r = 1; r <= max_rate; ++r) rate.labels.push_back(std::to_string(r));
    for (const auto& [key, n] : per_day) ++rate.counts[n - 1];

    std::vector<DistributionPanel> out;
    out.push_back(binned("distance_short", short_d, cfg.short_distance_edges_m));
    out.push_back(binned("distance_long", long_d, cfg.long_distance_edges_m));
    out.push_back(binned("travel_time", minutes, cfg.time_edges_min));
    out.push_back(std::move(rate));
    out.push_back(std::move(hours));
    out.push_back(std::move(days));
    return out;
}

void write_distributions_csv(std::ostream& out, std::span<const DistributionPanel> panels) {
    out << "panel,bin,count,proportion\n";
    for (const auto& p : panels) {
        const auto props = p.proportions();
        for (std::size_t i = 0; i < p.labels.size(); ++i) {
            out << p.name << ',' << p.labels[i] << ',' << p.counts[i] << ',' << text::fmt_fixed(props[i], 6) << '\n';
        }
    }
}

}  // namespace tripmode
