#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tripmode/error.hpp"
#include "tripmode/features.hpp"
#include "tripmode/synth.hpp"

using namespace tripmode;
using namespace tripmode::synth;

namespace {

std::string network_bytes(const World& w) {
    std::ostringstream out;
    write_network(out, w.network);
    return out.str();
}

CorpusConfig small(int devices) {
    CorpusConfig c;
    c.devices = devices;
    c.seed = 17;
    return c;
}

}  // namespace

TEST_CASE("persona and distribution validation") {
    PersonaConfig p;
    CHECK_NOTHROW(p.validate());
    for (const auto& d : {BinDistribution::accuracy_lbs(), BinDistribution::accuracy_app(), BinDistribution::lri_lbs()}) {
        double s = 0.0;
        for (double w : d.weights) s += w;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    p.speed_mps[0] = {30, 8};
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = PersonaConfig{};
    p.mode_weights = {0.5, 0.5, 0.5, 0, 0};
    CHECK_THROWS_AS(p.validate(), ValidationError);
    NetworkConfig n;
    n.extent_km = 0;
    CHECK_THROWS_AS(generate_world(1, n), ValidationError);
}

TEST_CASE("config JSON round-trips") {
    CorpusConfig c = small(3);
    c.persona.fixed_lri_s = 15;
    c.persona.noise = false;
    c.network.rail_lines = 1;
    const auto back = corpus_config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(back.persona.fixed_lri_s == std::optional<double>(15));
    CHECK_THROWS_AS(corpus_config_from_json("{\"devices\": \"many\"}"), SchemaError);
    CHECK_THROWS_AS(corpus_config_from_json("{"), SchemaError);
}

TEST_CASE("world is a pure function of the seed") {
    const NetworkConfig cfg;
    CHECK(network_bytes(generate_world(5, cfg)) == network_bytes(generate_world(5, cfg)));
    CHECK(network_bytes(generate_world(5, cfg)) != network_bytes(generate_world(6, cfg)));
    NetworkConfig no_rail;
    no_rail.rail_lines = 0;
    const auto w = generate_world(5, no_rail);
    CHECK(w.network[Layer::rail].size() == 0);
    CHECK(w.network[Layer::bus].size() > 0);
}

TEST_CASE("bus stops sit on bus routes") {
    const auto w = generate_world(8, NetworkConfig{});
    const auto& stops = w.network[Layer::bus_stop].points;
    REQUIRE(stops.size() > 20);
    for (const auto& s : stops) {
        double best = 1e18;
        for (const auto& line : w.network[Layer::bus].lines) best = std::min(best, oracle::point_polyline({s.lat, s.lon}, line));
        CHECK(best <= 1.0);
    }
}

TEST_CASE("walking days never exceed walking speed") {
    const auto w = generate_world(9, NetworkConfig{});
    PersonaConfig p;
    p.mode_weights = {0, 0, 0, 0, 1};
    p.noise = false;
    p.fixed_lri_s = 5;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto day = generate_day(s, p, w, "walker", 1'700'000'000);
        CHECK(day.trips.size() >= 2);
        for (const auto& t : day.trips) CHECK(t.mode == Mode::walk);
        for (double v : segment_speeds(day.trajectory.pings)) CHECK(v <= p.speed_mps[4].hi);
    }
}

TEST_CASE("rail pings stay near the rail layer") {
    CorpusConfig c = small(60);
    c.persona.mode_weights = {0.2, 0.6, 0.1, 0.05, 0.05};
    c.persona.accuracy = BinDistribution{{9.9}, {1.0}, 10.0};  // sigma = 5 m
    c.persona.fixed_lri_s = 15;
    const auto corpus = generate_corpus(c, 4);
    const NetworkIndex idx(corpus.world.network);
    std::size_t near = 0, total = 0;
    for (const auto& t : corpus.truth) {
        if (t.mode != Mode::rail) continue;
        const auto it = std::find_if(corpus.trajectories.begin(), corpus.trajectories.end(),
                                     [&](const Trajectory& tr) { return tr.device_id == t.device_id; });
        for (const auto& p : it->pings) {
            if (p.t < t.t_start || p.t > t.t_end) continue;
            ++total;
            near += within_buffer({p.lat, p.lon}, Layer::rail, idx, 50.0);
        }
    }
    REQUIRE(total > 1000);
    CHECK(static_cast<double>(near) >= 0.95 * static_cast<double>(total));
}

TEST_CASE("diary mirrors the truth and the corpus is deterministic") {
    const auto a = generate_corpus(small(12), 1);
    const auto b = generate_corpus(small(12), 6);
    CHECK(a.diary.size() == a.truth.size());
    REQUIRE(a.trajectories.size() == b.trajectories.size());
    for (std::size_t d = 0; d < a.trajectories.size(); ++d) CHECK(a.trajectories[d].pings == b.trajectories[d].pings);
    std::ostringstream da, db;
    write_diary(da, a.diary);
    write_diary(db, b.diary);
    CHECK(da.str() == db.str());
    CHECK(a.trajectories[0].device_id == "dev00000");
    CHECK(a.zones.size() == 9);
    for (const auto& t : a.truth) CHECK(t.t_start < t.t_end);
}

TEST_CASE("sampled accuracy and LRI match the configured shapes") {
    // Long default gaps leave few pings per day, so many device-days are needed.
    CorpusConfig c = small(400);
    c.days = 8;
    const auto corpus = generate_corpus(c, 8);
    const auto h = quality_histograms(corpus.trajectories, default_accuracy_edges(), default_lri_edges());
    REQUIRE(h.accuracy.total >= 100000);
    REQUIRE(h.lri.total >= 100000);
    const auto acc = BinDistribution::accuracy_lbs();
    const auto lri = BinDistribution::lri_lbs();
    REQUIRE(h.accuracy.bins.size() == acc.weights.size());
    REQUIRE(h.lri.bins.size() == lri.weights.size());
    for (std::size_t i = 0; i < acc.weights.size(); ++i) CHECK(std::abs(h.accuracy.bins[i].proportion - acc.weights[i]) <= 0.03);
    for (std::size_t i = 0; i < lri.weights.size(); ++i) CHECK(std::abs(h.lri.bins[i].proportion - lri.weights[i]) <= 0.03);
}

TEST_CASE("bin distribution sampling at 1e5 draws") {
    Rng rng(3);
    for (const auto& d : {BinDistribution::accuracy_lbs(), BinDistribution::accuracy_app(), BinDistribution::lri_lbs()}) {
        std::vector<double> v;
        for (int i = 0; i < 100000; ++i) v.push_back(d.sample(rng));
        const auto h = make_histogram(v, d.edges);
        REQUIRE(h.bins.size() == d.weights.size());
        for (std::size_t i = 0; i < d.weights.size(); ++i) CHECK(std::abs(h.bins[i].proportion - d.weights[i]) <= 0.03);
    }
}
