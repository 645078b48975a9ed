#pragma once

// Batch stages shared by the command-line tool and the end-to-end tests.

#include <span>
#include <string>
#include <vector>

#include "tripmode/aggregate.hpp"
#include "tripmode/classifier.hpp"
#include "tripmode/features.hpp"
#include "tripmode/ingest.hpp"
#include "tripmode/network.hpp"
#include "tripmode/stops.hpp"
#include "tripmode/trips.hpp"

namespace tripmode {

struct DetectionRun {
    std::vector<Trip> trips;
    std::size_t pings_in = 0;
    std::size_t pings_kept = 0;  ///< after the accuracy filter
    DetectionCounts counts;
};

/// Accuracy filter, stop detection and trip assembly for every device.
/// Output order follows the input device order.
DetectionRun detect_all(std::span<const Trajectory> trajs, const StopParams& p, double max_accuracy_m,
                        unsigned threads = 1);

std::vector<RosterRow> to_roster(std::span<const Trip> trips);

/// Rebuilds trips from roster rows: each takes its device's pings inside
/// [t_start, t_end] and its times, endpoints and distance are recomputed from
/// them. Rows with no pings in the window keep the roster values.
std::vector<Trip> trips_from_roster(std::span<const RosterRow> roster, std::span<const Trajectory> trajs);

struct FeatureRun {
    std::vector<FeatureRow> rows;
    std::vector<std::string> skipped;  ///< "device/trip: reason"
};

/// Features for each roster row; the roster's mode column becomes the label.
FeatureRun compute_features(std::span<const RosterRow> roster, std::span<const Trajectory> trajs,
                            const NetworkIndex& index, unsigned threads = 1);

struct ImputeRun {
    std::vector<RosterRow> roster;
    std::size_t air = 0;
    std::size_t imputed = 0;
    std::size_t missing_features = 0;  ///< ground trips left without a mode
};

/// Flags air trips first, then labels ground trips with the forest.
ImputeRun impute_modes(std::span<const RosterRow> roster, std::span<const FeatureRow> features,
                       const ForestModel& model, const AirRule& rule);

/// Share table rebuilt from long-format rows (counts are not recoverable).
ShareTable share_table_from_entries(std::span<const ShareEntry> entries, ModeSet mode_set);

}  // namespace tripmode
