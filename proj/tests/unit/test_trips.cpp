#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "tripmode/trips.hpp"

using namespace tripmode;

namespace {

Activity activity(std::vector<std::size_t> idx, const Trajectory& tr) {
    Activity a;
    a.cluster.members = std::move(idx);
    refresh_cluster(a.cluster, tr);
    return a;
}

Trip straight_trip(std::string dev, std::int64_t t0, std::int64_t t1, double x0, double x1) {
    Trip t;
    t.device_id = std::move(dev);
    t.pings = {gen::ping(t0, x0, 0), gen::ping(t1, x1, 0)};
    summarize_trip(t);
    return t;
}

DiaryEntry entry(std::string dev, std::int64_t t0, std::int64_t t1, double x0, double x1) {
    const auto o = gen::at(x0, 0);
    const auto d = gen::at(x1, 0);
    return {std::move(dev), t0, t1, o.lat, o.lon, d.lat, d.lon, "walk"};
}

}  // namespace

TEST_CASE("n activities give n - 1 trips") {
    Trajectory tr{"d", {}};
    for (int i = 0; i < 30; ++i) tr.pings.push_back(gen::ping(i * 60, i * 50.0, 0));
    const std::vector<Activity> three{activity({0, 1, 2}, tr), activity({10, 11}, tr), activity({20, 21, 22}, tr)};
    const auto r = build_trips(tr, three);
    REQUIRE(r.trips.size() == 2);
    CHECK(r.trips[0].pings.size() == 9);  // pings 2..10
    CHECK(r.trips[0].t_start == tr.pings[2].t);
    CHECK(r.trips[0].t_end == tr.pings[10].t);
    CHECK(r.trips[1].trip_id == 1);
    CHECK(build_trips(tr, {activity({0, 1}, tr)}).trips.empty());
    CHECK(build_trips(tr, {}).trips.empty());
}

TEST_CASE("11 collinear pings 100 m apart measure 1000 m") {
    Trajectory tr{"d", {}};
    for (int i = 0; i <= 10; ++i) {
        tr.pings.push_back({i * 10, 38.9 + i * 100.0 / geo::kMetersPerDegree, -77.0, 5});
    }
    Trip trip{"d", 0, tr.pings};
    summarize_trip(trip);
    CHECK(trip.distance_m == doctest::Approx(1000.0).epsilon(1e-4));
    CHECK(std::abs(trip.distance_m - oracle::path_length(trip.pings)) < 1e-9);
    CHECK(trip.duration_s() == 100);
}

TEST_CASE("trip distance dominates the OD chord") {
    Rng rng(21);
    for (int rep = 0; rep < 500; ++rep) {
        const auto t = gen::trip(rng, 5000);
        CHECK(t.distance_m >= geo::haversine_m(t.o_lat, t.o_lon, t.d_lat, t.d_lon) - 1e-6);
        CHECK(std::abs(t.distance_m - oracle::path_length(t.pings)) <= 1e-9 * (1 + t.distance_m));
    }
}

TEST_CASE("hit ratio counts entries satisfying all four conditions") {
    const std::vector<Trip> trips{straight_trip("a", 0, 1000, 0, 2000)};
    const std::vector<DiaryEntry> diary{entry("a", 100, 1100, 50, 2050), entry("a", 5000, 6000, 0, 2000)};
    const auto m = match_diary(trips, diary, {});
    CHECK(m.report.reported == 2);
    CHECK(m.report.matched == 1);
    CHECK(m.report.identified == 1);
    REQUIRE(m.report.hit_ratio);
    CHECK(*m.report.hit_ratio == doctest::Approx(0.5));
    CHECK(m.trip_for_entry[0] == 0);
    CHECK(m.trip_for_entry[1] == -1);
}

TEST_CASE("each condition is required") {
    const std::vector<Trip> trips{straight_trip("a", 0, 1000, 0, 2000)};
    CHECK(match_diary(trips, std::vector{entry("b", 0, 1000, 0, 2000)}, {}).report.matched == 0);
    CHECK(match_diary(trips, std::vector{entry("a", 301, 1000, 0, 2000)}, {}).report.matched == 0);
    CHECK(match_diary(trips, std::vector{entry("a", 0, 1301, 0, 2000)}, {}).report.matched == 0);
    CHECK(match_diary(trips, std::vector{entry("a", 0, 1000, 201, 2000)}, {}).report.matched == 0);
    CHECK(match_diary(trips, std::vector{entry("a", 0, 1000, 0, 2201)}, {}).report.matched == 0);
    CHECK(match_diary(trips, std::vector{entry("a", 300, 1300, 199, 2199)}, {}).report.matched == 1);
}

TEST_CASE("empty diary leaves the ratio undefined") {
    const std::vector<Trip> trips{straight_trip("a", 0, 1000, 0, 2000)};
    const auto m = match_diary(trips, std::vector<DiaryEntry>{}, {});
    CHECK_FALSE(m.report.hit_ratio);
    CHECK(m.report.matched == 0);
    CHECK(m.report.underreported() == 1);
}

TEST_CASE("a trip serves one entry") {
    const std::vector<Trip> trips{straight_trip("a", 0, 1000, 0, 2000)};
    const std::vector<DiaryEntry> diary{entry("a", 0, 1000, 0, 2000), entry("a", 10, 1010, 0, 2000)};
    CHECK(match_diary(trips, diary, {}).report.matched == 1);
}

TEST_CASE("matching is monotone in the tolerances") {
    Rng rng(22);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<Trip> trips;
        std::vector<DiaryEntry> diary;
        for (int i = 0; i < 8; ++i) {
            const std::int64_t t0 = rng.between(0, 20000);
            const double x0 = rng.uniform(0, 3000);
            trips.push_back(straight_trip("a", t0, t0 + 900, x0, x0 + 1500));
            const std::int64_t e0 = t0 + rng.between(-600, 600);
            diary.push_back(entry("a", e0, e0 + 900 + rng.between(-300, 300), x0 + rng.uniform(-300, 300),
                                  x0 + 1500 + rng.uniform(-300, 300)));
        }
        std::size_t prev = 0;
        for (double k : {0.25, 0.5, 1.0, 1.5, 2.0, 4.0}) {
            const auto m = match_diary(trips, diary, {300 * k, 200 * k}).report.matched;
            CHECK(m >= prev);
            prev = m;
        }
    }
}

TEST_CASE("roster and diary CSVs round-trip") {
    std::vector<RosterRow> rows(2);
    rows[0] = to_roster_row(straight_trip("a", 0, 1000, 0, 2000));
    rows[1] = rows[0];
    rows[1].trip_id = 1;
    rows[1].mode = "bus";
    rows[1].is_air = false;
    std::stringstream ss;
    write_roster(ss, rows);
    const auto back = read_roster(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].mode.empty());
    CHECK_FALSE(back[0].is_air);
    CHECK(back[1].mode == "bus");
    CHECK(back[1].is_air == std::optional<bool>(false));
    CHECK(back[0].o_lat == rows[0].o_lat);
    CHECK(std::abs(back[0].distance_m - rows[0].distance_m) <= 5e-4);  // millimeter column

    const std::vector<DiaryEntry> diary{entry("a", 1, 2, 3, 4)};
    std::stringstream ds;
    write_diary(ds, diary);
    const auto d = read_diary(ds);
    REQUIRE(d.size() == 1);
    CHECK(d[0].o_lon == diary[0].o_lon);
    CHECK(d[0].mode == "walk");
}
