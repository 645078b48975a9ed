#include "tripmode/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "tripmode/error.hpp"
#include "tripmode/geo.hpp"
#include "tripmode/text.hpp"

namespace tripmode {

std::vector<double> segment_speeds(std::span<const Ping> pings) {
    if (pings.size() < 2) throw DataError("speed series needs at least two pings");
    std::vector<double> speeds;
    speeds.reserve(pings.size() - 1);
    for (std::size_t i = 1; i < pings.size(); ++i) {
        const auto dt = pings[i].t - pings[i - 1].t;
        if (dt == 0) continue;
        const double d = geo::haversine_m(pings[i - 1].lat, pings[i - 1].lon, pings[i].lat, pings[i].lon);
        speeds.push_back(d / static_cast<double>(dt));
    }
    return speeds;
}

double percentile_sorted(std::span<const double> v, double q) {
    if (v.empty()) throw DataError("percentile of an empty series");
    if (!(q >= 0.0 && q <= 100.0)) throw ValidationError("percentile rank must be within [0, 100]");
    const double rank = static_cast<double>(v.size() - 1) * q / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    if (lo + 1 >= v.size()) return v.back();
    const double frac = rank - static_cast<double>(lo);
    const double r = v[lo] + frac * (v[lo + 1] - v[lo]);
    return std::clamp(r, v[lo], v[lo + 1]);
}

double percentile(std::span<const double> values, double q) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return percentile_sorted(sorted, q);
}

TripFeatures extract_features(const Trip& trip, const NetworkIndex& index) {
    auto speeds = segment_speeds(trip.pings);
    if (speeds.empty()) throw DataError("trip has no ping pair with positive elapsed time");
    const double duration = static_cast<double>(trip.duration_s());
    if (!(duration > 0.0)) throw DataError("trip duration must be positive");
    std::sort(speeds.begin(), speeds.end());

    TripFeatures out;
    auto& f = out.values;
    const double minutes = duration / 60.0;
    f[kRecordsPerMin] = static_cast<double>(trip.n_pings()) / minutes;
    f[kTripDistance] = trip.distance_m;
    f[kOdDistance] = geo::haversine_m(trip.o_lat, trip.o_lon, trip.d_lat, trip.d_lon);
    f[kTripTimeMin] = minutes;
    f[kSpeedMax] = speeds.back();
    f[kSpeedMin] = speeds.front();
    const double mean = std::accumulate(speeds.begin(), speeds.end(), 0.0) / static_cast<double>(speeds.size());
    f[kSpeedAvg] = std::clamp(mean, speeds.front(), speeds.back());
    f[kSpeedMedian] = percentile_sorted(speeds, 50.0);
    f[kSpeedP5] = percentile_sorted(speeds, 5.0);
    f[kSpeedP25] = percentile_sorted(speeds, 25.0);
    f[kSpeedP75] = percentile_sorted(speeds, 75.0);
    f[kSpeedP95] = percentile_sorted(speeds, 95.0);

    std::size_t qualifying = 0;
    std::array<std::size_t, 4> hits{};
    constexpr std::array<Layer, 4> layers{Layer::rail, Layer::bus, Layer::drive, Layer::bus_stop};
    for (const auto& p : trip.pings) {
        if (!(p.accuracy_m < kNetworkAccuracyCutM)) continue;
        ++qualifying;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            if (within_buffer({p.lat, p.lon}, layers[l], index, kNetworkBufferM)) ++hits[l];
        }
    }
    if (qualifying == 0) {
        out.low_confidence = true;
        f[kPctRail] = f[kPctBus] = f[kPctDrive] = f[kPctBusStop] = 0.0;
    } else {
        const auto denom = static_cast<double>(qualifying);
        f[kPctRail] = static_cast<double>(hits[0]) / denom;
        f[kPctBus] = static_cast<double>(hits[1]) / denom;
        f[kPctDrive] = static_cast<double>(hits[2]) / denom;
        f[kPctBusStop] = static_cast<double>(hits[3]) / denom;
    }
    return out;
}

void write_features(std::ostream& out, std::span<const FeatureRow> rows) {
    out << "device_id,trip_id";
    for (auto name : kFeatureNames) out << ',' << name;
    out << ",low_confidence,mode\n";
    for (const auto& r : rows) {
        out << r.device_id << ',' << r.trip_id;
        for (double v : r.values) out << ',' << text::fmt(v);
        out << ',' << (r.low_confidence ? 1 : 0) << ',' << r.mode << '\n';
    }
}

std::vector<FeatureRow> read_features(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("features CSV is empty");
    const auto header = text::split(line);
    std::array<std::size_t, kFeatureCount> cols{};
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        const long idx = text::column_index(header, kFeatureNames[k]);
        if (idx < 0) throw SchemaError("features CSV is missing column '" + std::string(kFeatureNames[k]) + "'");
        cols[k] = static_cast<std::size_t>(idx);
    }
    const long c_dev = text::column_index(header, "device_id");
    const long c_id = text::column_index(header, "trip_id");
    const long c_low = text::column_index(header, "low_confidence");
    const long c_mode = text::column_index(header, "mode");

    std::vector<FeatureRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const auto f = text::split(line);
        if (f.size() != header.size()) {
            throw DataError("features CSV line " + std::to_string(lineno) + " has wrong field count");
        }
        FeatureRow r;
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            const auto v = text::to_double(f[cols[k]]);
            if (!v || !std::isfinite(*v)) {
                throw DataError("features CSV line " + std::to_string(lineno) + ": bad value for " +
                                std::string(kFeatureNames[k]));
            }
            r.values[k] = *v;
        }
        if (c_dev >= 0) r.device_id = std::string(text::trim(f[static_cast<std::size_t>(c_dev)]));
        if (c_id >= 0) r.trip_id = static_cast<int>(text::to_int(f[static_cast<std::size_t>(c_id)]).value_or(0));
        if (c_low >= 0) r.low_confidence = text::trim(f[static_cast<std::size_t>(c_low)]) == "1";
        if (c_mode >= 0) r.mode = std::string(text::trim(f[static_cast<std::size_t>(c_mode)]));
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace tripmode
