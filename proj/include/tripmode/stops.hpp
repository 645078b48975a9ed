#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tripmode/ingest.hpp"

namespace tripmode {

/// Stop-detection thresholds.
struct StopParams {
    double s = 50.0;        ///< spatial neighborhood radius, m
    double t = 600.0;       ///< temporal neighborhood radius, s
    int n = 10;             ///< minimum neighbors (self included) for a core ping
    double s_act = 100.0;   ///< maximum distance between stops of one activity, m
    double t_act = 300.0;   ///< minimum activity dwell, s
    double f = 15.0;        ///< nominal location recording interval, s
    double v = 1.0;         ///< walking speed, m/s
};

enum class StopConstraint {
    temporal_covers_neighbors,  ///< t >= n * f
    dwell_covers_neighbors,     ///< t_act >= n * f
    activity_range_covers_s,    ///< s_act >= s
    neighbors_outlast_walker,   ///< n * f >= s / v
};

std::string_view describe(StopConstraint c);

/// Returns the constraints that fail; empty when the parameters are usable.
/// Throws ValidationError if any parameter is not strictly positive.
std::vector<StopConstraint> validate_params(const StopParams& p);

/// Named presets: "lri1", "lri2", "lri5", "lri15", "lbs-relaxed".
std::optional<StopParams> preset(std::string_view name);
std::vector<std::string_view> preset_names();

/// A density cluster of pings. Member indices refer to the trajectory the
/// cluster was detected on and are kept ascending.
struct StopCluster {
    std::vector<std::size_t> members;
    double lat = 0.0;  ///< centroid (member mean)
    double lon = 0.0;
    std::int64_t t_first = 0;
    std::int64_t t_last = 0;

    std::size_t first_index() const { return members.front(); }
    std::size_t last_index() const { return members.back(); }
};

/// A merged cluster that passed the dwell test; a trip end.
struct Activity {
    StopCluster cluster;
    std::int64_t dwell_s() const { return cluster.t_last - cluster.t_first; }
};

/// Spatiotemporal DBSCAN. Ping j neighbors ping i iff their great-circle
/// distance is <= s and |t_i - t_j| <= t. A ping with at least n neighbors
/// (itself included) is core; clusters are connected components of core
/// pings plus border pings, each border joining the cluster whose earliest
/// core ping comes first. Clusters are returned ordered by t_first.
std::vector<StopCluster> st_dbscan(const Trajectory& traj, const StopParams& p);

/// Merges consecutive clusters whose centroids are within s_act. Each pass
/// links runs of neighbors left to right; passes repeat until nothing
/// merges, so the output is a fixed point.
std::vector<StopCluster> merge_clusters(std::vector<StopCluster> clusters, double s_act,
                                        const Trajectory& traj);

/// Keeps clusters whose dwell (t_last - t_first) reaches t_act.
std::vector<Activity> classify_activities(const std::vector<StopCluster>& merged, double t_act);

/// Recomputes centroid and time span from the member list.
void refresh_cluster(StopCluster& c, const Trajectory& traj);

}  // namespace tripmode
