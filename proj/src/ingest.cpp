#include "tripmode/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "tripmode/error.hpp"
#include "tripmode/text.hpp"

namespace tripmode {

std::size_t IngestResult::pings() const {
    std::size_t n = 0;
    for (const auto& t : trajectories) n += t.pings.size();
    return n;
}

namespace {

std::size_t require_column(const std::vector<std::string_view>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (text::trim(header[i]) == name) return i;
    }
    throw SchemaError("ping CSV is missing required column '" + name + "'");
}

bool valid_ping(const Ping& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && std::isfinite(p.accuracy_m) && p.lat >= -90.0 &&
           p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0 && p.accuracy_m >= 0.0;
}

// Stable sort by time, then drop repeats of an identical fix within each
// equal-timestamp run.
std::size_t order_and_collapse(std::vector<Ping>& pings) {
    std::stable_sort(pings.begin(), pings.end(), [](const Ping& a, const Ping& b) { return a.t < b.t; });
    std::vector<Ping> kept;
    kept.reserve(pings.size());
    std::size_t run_start = 0;
    for (const Ping& p : pings) {
        if (!kept.empty() && kept.back().t != p.t) run_start = kept.size();
        const bool dup = std::find(kept.begin() + static_cast<std::ptrdiff_t>(run_start), kept.end(), p) != kept.end();
        if (!dup) kept.push_back(p);
    }
    const std::size_t removed = pings.size() - kept.size();
    pings = std::move(kept);
    return removed;
}

}  // namespace

IngestResult parse_pings(std::istream& in, const PingSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("ping CSV is empty (header row required)");
    const auto header = text::split(line);
    const std::size_t c_dev = require_column(header, schema.device_id);
    const std::size_t c_t = require_column(header, schema.timestamp);
    const std::size_t c_lat = require_column(header, schema.lat);
    const std::size_t c_lon = require_column(header, schema.lon);
    const std::size_t c_acc = require_column(header, schema.accuracy);
    const std::size_t width = header.size();

    IngestResult result;
    std::map<std::string, std::vector<Ping>, std::less<>> by_device;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        ++result.rows;
        const auto cols = text::split(line);
        if (cols.size() != width) {
            ++result.rejects;
            continue;
        }
        const auto device = text::trim(cols[c_dev]);
        const auto t = text::to_int(cols[c_t]);
        const auto lat = text::to_double(cols[c_lat]);
        const auto lon = text::to_double(cols[c_lon]);
        const auto acc = text::to_double(cols[c_acc]);
        if (device.empty() || !t || !lat || !lon || !acc) {
            ++result.rejects;
            continue;
        }
        const Ping p{*t, *lat, *lon, *acc};
        if (!valid_ping(p)) {
            ++result.rejects;
            continue;
        }
        auto it = by_device.find(device);
        if (it == by_device.end()) it = by_device.emplace(std::string(device), std::vector<Ping>{}).first;
        it->second.push_back(p);
    }

    result.trajectories.reserve(by_device.size());
    for (auto& [device, pings] : by_device) {
        result.duplicates += order_and_collapse(pings);
        result.trajectories.push_back({device, std::move(pings)});
    }
    return result;
}

void write_pings(std::ostream& out, std::span<const Trajectory> trajs) {
    out << "device_id,timestamp,lat,lon,accuracy\n";
    for (const auto& traj : trajs) {
        for (const auto& p : traj.pings) {
            out << traj.device_id << ',' << p.t << ',' << text::fmt(p.lat) << ',' << text::fmt(p.lon) << ','
                << text::fmt(p.accuracy_m) << '\n';
        }
    }
}

Trajectory filter_by_accuracy(const Trajectory& traj, double max_accuracy_m) {
    if (!(max_accuracy_m > 0.0)) throw ValidationError("max accuracy must be positive");
    Trajectory out{traj.device_id, {}};
    out.pings.reserve(traj.pings.size());
    std::copy_if(traj.pings.begin(), traj.pings.end(), std::back_inserter(out.pings),
                 [&](const Ping& p) { return p.accuracy_m <= max_accuracy_m; });
    return out;
}

Histogram make_histogram(std::span<const double> values, std::span<const double> edges) {
    if (edges.empty()) throw ValidationError("histogram needs at least one edge");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) throw ValidationError("histogram edges must be strictly increasing");
    }
    Histogram h;
    if (values.empty()) return h;

    h.bins.resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        h.bins[i].lo = edges[i];
        if (i + 1 < edges.size()) h.bins[i].hi = edges[i + 1];
    }
    for (double v : values) {
        // first edge strictly >= v closes the bin (lo, hi]
        const auto it = std::lower_bound(edges.begin(), edges.end(), v);
        std::size_t bin;
        if (it == edges.end()) {
            bin = edges.size() - 1;
        } else {
            const auto idx = static_cast<std::size_t>(it - edges.begin());
            bin = idx == 0 ? 0 : idx - 1;
        }
        ++h.bins[bin].count;
    }
    h.total = values.size();
    std::size_t running = 0;
    for (auto& b : h.bins) {
        running += b.count;
        b.proportion = static_cast<double>(b.count) / static_cast<double>(h.total);
        b.cumulative = static_cast<double>(running) / static_cast<double>(h.total);
    }
    return h;
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
    out << "bin_lo,bin_hi,count,proportion,cumulative\n";
    for (const auto& b : h.bins) {
        out << text::fmt(b.lo) << ',' << (std::isinf(b.hi) ? std::string("inf") : text::fmt(b.hi)) << ','
            << b.count << ',' << text::fmt_fixed(b.proportion, 6) << ',' << text::fmt_fixed(b.cumulative, 6)
            << '\n';
    }
}

std::vector<double> default_accuracy_edges() {
    return {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 200, 500};
}

std::vector<double> default_lri_edges() {
    return {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 150, 200, 250, 300, 350, 400, 500};
}

QualityHistograms quality_histograms(std::span<const Trajectory> trajs, std::span<const double> accuracy_edges,
                                     std::span<const double> lri_edges) {
    std::vector<double> acc;
    std::vector<double> gaps;
    for (const auto& traj : trajs) {
        for (std::size_t i = 0; i < traj.pings.size(); ++i) {
            acc.push_back(traj.pings[i].accuracy_m);
            if (i > 0) gaps.push_back(static_cast<double>(traj.pings[i].t - traj.pings[i - 1].t));
        }
    }
    return {make_histogram(acc, accuracy_edges), make_histogram(gaps, lri_edges)};
}

}  // namespace tripmode
