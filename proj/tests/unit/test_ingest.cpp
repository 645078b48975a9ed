#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "tripmode/error.hpp"
#include "tripmode/ingest.hpp"

using namespace tripmode;

namespace {

IngestResult parse(const std::string& body) {
    std::istringstream in("device_id,timestamp,lat,lon,accuracy\n" + body);
    return parse_pings(in);
}

Trajectory with_accuracies(std::initializer_list<double> acc) {
    Trajectory t{"d", {}};
    std::int64_t ts = 0;
    for (double a : acc) t.pings.push_back({ts++, 38.9, -77.0, a});
    return t;
}

}  // namespace

TEST_CASE("shuffled rows of one device come back sorted") {
    const auto r = parse("a,30,38.9,-77,5\na,10,38.9,-77,5\na,20,38.9,-77,5\n");
    REQUIRE(r.trajectories.size() == 1);
    const auto& p = r.trajectories[0].pings;
    REQUIRE(p.size() == 3);
    CHECK(p[0].t == 10);
    CHECK(p[1].t == 20);
    CHECK(p[2].t == 30);
}

TEST_CASE("out-of-range and unparseable rows are counted, not fatal") {
    const auto r = parse("a,10,95,-77,5\na,11,38.9,-77,5\na,x,38.9,-77,5\na,12,38.9,-77,-1\n");
    CHECK(r.rejects == 3);
    CHECK(r.pings() == 1);
    CHECK(r.rows == 4);
}

TEST_CASE("byte-identical rows collapse; same time with other coordinates survives") {
    const auto r = parse("a,10,38.9,-77,5\na,10,38.9,-77,5\na,10,38.91,-77,5\n");
    CHECK(r.duplicates == 1);
    CHECK(r.pings() == 2);
}

TEST_CASE("missing column is a schema error") {
    std::istringstream in("device_id,timestamp,lat,lon\na,1,2,3\n");
    CHECK_THROWS_AS(parse_pings(in), SchemaError);
}

TEST_CASE("devices are ordered by id") {
    const auto r = parse("b,1,38.9,-77,5\na,1,38.9,-77,5\n");
    REQUIRE(r.trajectories.size() == 2);
    CHECK(r.trajectories[0].device_id == "a");
}

TEST_CASE("custom schema maps column names") {
    std::istringstream in("id,ts,y,x,acc\na,1,38.9,-77,5\n");
    PingSchema s{"id", "ts", "y", "x", "acc"};
    CHECK(parse_pings(in, s).pings() == 1);
}

TEST_CASE("accuracy filter keeps <= max, in order") {
    CHECK(filter_by_accuracy(with_accuracies({5, 70, 150}), 100).pings.size() == 2);
    CHECK(filter_by_accuracy(with_accuracies({0, 0, 0}), 100).pings.size() == 3);
    CHECK(filter_by_accuracy(with_accuracies({100}), 100).pings.size() == 1);
    const auto once = filter_by_accuracy(with_accuracies({5, 101, 99, 300, 7}), 100);
    const auto twice = filter_by_accuracy(once, 100);
    CHECK(once.pings == twice.pings);
    CHECK(once.pings[1].accuracy_m == 99);
}

TEST_CASE("LRI histogram over gaps 5, 5, 120") {
    Trajectory t{"d", {{0, 38.9, -77, 5}, {5, 38.9, -77, 5}, {10, 38.9, -77, 5}, {130, 38.9, -77, 5}}};
    const auto h = quality_histograms(std::span(&t, 1), default_accuracy_edges(), default_lri_edges());
    REQUIRE(h.lri.total == 3);
    CHECK(h.lri.bins[0].count == 2);
    CHECK(h.lri.bins[0].proportion == doctest::Approx(2.0 / 3.0));
    // (100, 150]
    CHECK(h.lri.bins[10].lo == 100);
    CHECK(h.lri.bins[10].count == 1);
    CHECK(h.lri.bins.back().cumulative == doctest::Approx(1.0));
}

TEST_CASE("single ping per device gives an empty LRI histogram") {
    Trajectory t{"d", {{0, 38.9, -77, 7}}};
    const auto h = quality_histograms(std::span(&t, 1), default_accuracy_edges(), default_lri_edges());
    CHECK(h.lri.bins.empty());
    CHECK(h.accuracy.bins[0].proportion == doctest::Approx(1.0));
}

TEST_CASE("histogram proportions sum to one and cumulative is monotone") {
    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v;
        for (int i = 0; i < 200; ++i) v.push_back(rng.uniform(0, 800));
        const auto h = make_histogram(v, default_accuracy_edges());
        double sum = 0.0, prev = 0.0;
        for (const auto& b : h.bins) {
            sum += b.proportion;
            CHECK(b.cumulative >= prev);
            prev = b.cumulative;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(prev == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("ping CSV round-trips losslessly") {
    Rng rng(9);
    std::vector<Trajectory> trajs;
    for (int d = 0; d < 5; ++d) {
        Trajectory t{"dev" + std::to_string(d), {}};
        std::int64_t ts = 1'600'000'000;
        for (int i = 0; i < 50; ++i) {
            ts += rng.between(0, 30);
            t.pings.push_back({ts, rng.uniform(-90, 90), rng.uniform(-180, 180), rng.uniform(0, 500)});
        }
        trajs.push_back(t);
    }
    std::ostringstream out;
    write_pings(out, trajs);
    std::istringstream in(out.str());
    const auto back = parse_pings(in);
    REQUIRE(back.trajectories.size() == trajs.size());
    for (std::size_t d = 0; d < trajs.size(); ++d) CHECK(back.trajectories[d].pings == trajs[d].pings);
}
