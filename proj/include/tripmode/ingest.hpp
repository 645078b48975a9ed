#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace tripmode {

/// One location fix. The owning Trajectory carries the device id.
struct Ping {
    std::int64_t t = 0;  ///< epoch seconds, UTC
    double lat = 0.0;
    double lon = 0.0;
    double accuracy_m = 0.0;

    friend bool operator==(const Ping&, const Ping&) = default;
};

/// Time-ordered pings of one device.
struct Trajectory {
    std::string device_id;
    std::vector<Ping> pings;
};

/// Header names for the five required columns.
struct PingSchema {
    std::string device_id = "device_id";
    std::string timestamp = "timestamp";
    std::string lat = "lat";
    std::string lon = "lon";
    std::string accuracy = "accuracy";
};

struct IngestResult {
    std::vector<Trajectory> trajectories;  ///< sorted by device_id
    std::size_t rows = 0;                  ///< data rows seen
    std::size_t rejects = 0;               ///< unparseable or out-of-range rows
    std::size_t duplicates = 0;            ///< exact duplicates collapsed
    std::size_t pings() const;
};

/// Parses a ping CSV. Throws SchemaError if a required column is missing.
/// Rows that fail to parse or violate coordinate/accuracy bounds are counted
/// in `rejects` and skipped. Pings are stable-sorted by time per device and
/// exact duplicates (same device, time, position, accuracy) collapse to one.
IngestResult parse_pings(std::istream& in, const PingSchema& schema = {});

/// Writes the canonical ping CSV (shortest round-trip number formatting).
void write_pings(std::ostream& out, std::span<const Trajectory> trajs);

/// Keeps pings with accuracy_m <= max_accuracy_m, preserving order.
Trajectory filter_by_accuracy(const Trajectory& traj, double max_accuracy_m = 100.0);

struct HistogramBin {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    double proportion = 0.0;
    double cumulative = 0.0;
};

/// Bins are (edge[i], edge[i+1]] plus a final open-ended (edge.back(), inf).
/// Values at or below the first edge fall into the first bin. An empty
/// input yields no bins.
struct Histogram {
    std::vector<HistogramBin> bins;
    std::size_t total = 0;
};

Histogram make_histogram(std::span<const double> values, std::span<const double> edges);

void write_histogram_csv(std::ostream& out, const Histogram& h);

/// Default accuracy histogram bins (meters).
std::vector<double> default_accuracy_edges();
/// Default location-recording-interval bins (seconds).
std::vector<double> default_lri_edges();

struct QualityHistograms {
    Histogram accuracy;
    Histogram lri;
};

/// Accuracy over every ping, and LRI over consecutive-ping gaps per device.
QualityHistograms quality_histograms(std::span<const Trajectory> trajs, std::span<const double> accuracy_edges,
                                     std::span<const double> lri_edges);

}  // namespace tripmode
