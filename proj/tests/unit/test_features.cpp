#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "tripmode/error.hpp"
#include "tripmode/features.hpp"
#include "tripmode/pipeline.hpp"

using namespace tripmode;

namespace {

Trip constant_speed(double acc) {
    Trip t;
    t.device_id = "d";
    for (int i = 0; i <= 20; ++i) t.pings.push_back(gen::ping(i * 15, i * 150.0, 0, acc));
    summarize_trip(t);
    return t;
}

}  // namespace

TEST_CASE("segment speeds") {
    const std::vector<Ping> two{gen::ping(0, 0, 0), {15, 38.9 + 150.0 / geo::kMetersPerDegree, gen::kLon0, 5}};
    const auto s = segment_speeds(two);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == doctest::Approx(10.0).epsilon(1e-9));

    const std::vector<Ping> dup{gen::ping(0, 0, 0), gen::ping(0, 10, 0), gen::ping(10, 50, 0)};
    CHECK(segment_speeds(dup).size() == 1);
    CHECK_THROWS_AS(segment_speeds(std::vector<Ping>{gen::ping(0, 0, 0)}), DataError);

    std::vector<Ping> zig;
    for (int i = 0; i < 30; ++i) zig.push_back(gen::ping(i * 7, i * 40.0, (i % 2) * 90.0));
    const auto zs = segment_speeds(zig);
    REQUIRE(zs.size() == zig.size() - 1);
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double d = geo::haversine_m(zig[i].lat, zig[i].lon, zig[i + 1].lat, zig[i + 1].lon);
        CHECK(zs[i] == d / 7.0);
    }
}

TEST_CASE("percentile interpolates between closest ranks") {
    const std::vector<double> v{4, 1, 3, 2};
    CHECK(percentile(v, 50) == 2.5);
    CHECK(percentile(v, 25) == 1.75);
    CHECK(percentile(v, 0) == 1);
    CHECK(percentile(v, 100) == 4);
    CHECK(percentile(std::vector<double>{7.5}, 37) == 7.5);
    CHECK_THROWS_AS(percentile(std::vector<double>{}, 50), DataError);
}

TEST_CASE("constant-speed straight trip") {
    Network net;
    const NetworkIndex idx(net);
    const auto f = extract_features(constant_speed(5), idx).values;
    CHECK(f[kRecordsPerMin] == doctest::Approx(21.0 / 5.0));
    CHECK(f[kTripTimeMin] == doctest::Approx(5.0));
    for (std::size_t k = kSpeedMax; k <= kSpeedP95; ++k) CHECK(f[k] == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(std::abs(f[kTripDistance] - f[kOdDistance]) < 1e-3);
}

TEST_CASE("network shares use only pings under 50 m accuracy") {
    const auto a = gen::at(-1000, 0);
    const auto b = gen::at(5000, 0);
    Network net;
    net[Layer::rail].lines.push_back({{a.lon, a.lat}, {b.lon, b.lat}});
    const NetworkIndex idx(net);

    const auto on_rail = extract_features(constant_speed(5), idx);
    CHECK(on_rail.values[kPctRail] == 1.0);
    CHECK(on_rail.values[kPctBus] == 0.0);
    CHECK_FALSE(on_rail.low_confidence);

    const auto blurry = extract_features(constant_speed(80), idx);
    CHECK(blurry.low_confidence);
    for (std::size_t k = kPctRail; k <= kPctBusStop; ++k) CHECK(blurry.values[k] == 0.0);

    // Exactly 50 m does not qualify.
    CHECK(extract_features(constant_speed(50), idx).low_confidence);
}

TEST_CASE("feature invariants on random trips") {
    Rng rng(41);
    const auto net = gen::network(rng, 6000);
    const NetworkIndex idx(net);
    std::size_t violations = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        const auto t = gen::trip(rng, 6000);
        TripFeatures tf;
        try {
            tf = extract_features(t, idx);
        } catch (const DataError&) {
            continue;
        }
        const auto& f = tf.values;
        violations += !(f[kSpeedMin] <= f[kSpeedP5] && f[kSpeedP5] <= f[kSpeedP25] && f[kSpeedP25] <= f[kSpeedMedian] &&
                        f[kSpeedMedian] <= f[kSpeedP75] && f[kSpeedP75] <= f[kSpeedP95] && f[kSpeedP95] <= f[kSpeedMax]);
        violations += !(f[kSpeedMin] <= f[kSpeedAvg] && f[kSpeedAvg] <= f[kSpeedMax]);
        violations += !(f[kTripDistance] >= f[kOdDistance] - 1e-6);
        for (std::size_t k = kPctRail; k <= kPctBusStop; ++k) violations += !(f[k] >= 0.0 && f[k] <= 1.0);
        for (double x : f) violations += !std::isfinite(x);
    }
    CHECK(violations == 0);
}

TEST_CASE("features CSV round-trips") {
    Rng rng(42);
    std::vector<FeatureRow> rows;
    for (int i = 0; i < 20; ++i) {
        FeatureRow r{"dev", i, {}, i % 3 == 0, i % 2 ? "bus" : ""};
        for (auto& v : r.values) v = rng.uniform(-1e3, 1e3);
        rows.push_back(r);
    }
    std::stringstream ss;
    write_features(ss, rows);
    const auto back = read_features(ss);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].values == rows[i].values);
        CHECK(back[i].mode == rows[i].mode);
        CHECK(back[i].low_confidence == rows[i].low_confidence);
        CHECK(back[i].trip_id == rows[i].trip_id);
    }
}

TEST_CASE("roster trips take their geometry from the window's pings") {
    Trajectory traj{"d", {gen::ping(0, 0, 0), gen::ping(10, 100, 0), gen::ping(20, 200.0004, 0), gen::ping(99, 500, 0)}};
    RosterRow row;
    row.device_id = "d";
    row.t_start = 0;
    row.t_end = 20;
    row.distance_m = 200.0;  // rounded below the chord
    const auto trips = trips_from_roster(std::span(&row, 1), std::span(&traj, 1));
    REQUIRE(trips[0].pings.size() == 3);
    CHECK(trips[0].distance_m == doctest::Approx(oracle::path_length(trips[0].pings)));
    CHECK(trips[0].d_lon == traj.pings[2].lon);
    const auto f = extract_features(trips[0], NetworkIndex(Network{})).values;
    CHECK(f[kTripDistance] >= f[kOdDistance]);

    // Without pings the roster values stand.
    const auto bare = trips_from_roster(std::span(&row, 1), {});
    CHECK(bare[0].distance_m == 200.0);
}
