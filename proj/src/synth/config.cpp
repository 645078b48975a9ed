#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "tripmode/error.hpp"
#include "tripmode/synth.hpp"

namespace tripmode::synth {

using ojson = nlohmann::ordered_json;

namespace {

BinDistribution normalized(std::vector<double> edges, std::vector<double> percent, double cap) {
    const double total = std::accumulate(percent.begin(), percent.end(), 0.0);
    for (auto& p : percent) p /= total;
    return {std::move(edges), std::move(percent), cap};
}

std::vector<double> accuracy_edges() { return {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 200, 500}; }

void check_range(const Range& r, const std::string& what, bool allow_zero = false) {
    const bool lo_ok = allow_zero ? r.lo >= 0.0 : r.lo > 0.0;
    if (!lo_ok || !(r.hi >= r.lo) || !std::isfinite(r.hi)) {
        throw ValidationError(what + " must satisfy " + (allow_zero ? "0 <= lo <= hi" : "0 < lo <= hi"));
    }
}

}  // namespace

BinDistribution BinDistribution::accuracy_lbs() {
    return normalized(accuracy_edges(),
                      {49.91, 7.58, 6.80, 1.00, 3.47, 0.26, 18.33, 0.69, 0.66, 0.59, 4.18, 0.30, 6.23}, 1000.0);
}

BinDistribution BinDistribution::accuracy_app() {
    return normalized(accuracy_edges(),
                      {44.15, 22.50, 8.79, 4.29, 2.17, 2.01, 1.10, 0.92, 0.79, 1.19, 3.81, 2.57, 5.69}, 1000.0);
}

BinDistribution BinDistribution::lri_lbs() {
    return normalized({0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 150, 200, 250, 300, 350, 400, 500},
                      {44.81, 4.98, 1.83, 1.21, 0.86, 0.73, 0.64, 0.50, 0.45, 0.38, 6.46, 2.78, 1.11, 2.11, 1.33,
                       0.75, 1.06, 28.02},
                      3600.0);
}

void BinDistribution::validate(const char* what) const {
    const std::string name(what);
    if (edges.empty() || weights.size() != edges.size()) {
        throw ValidationError(name + " needs one weight per bin");
    }
    if (!(edges.front() >= 0.0)) throw ValidationError(name + " edges must be non-negative");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) throw ValidationError(name + " edges must increase");
    }
    if (!(cap > edges.back())) throw ValidationError(name + " cap must exceed the last edge");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ValidationError(name + " weights must be non-negative");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-6) throw ValidationError(name + " weights must sum to 1");
}

double BinDistribution::sample(Rng& rng) const {
    const double u = rng.uniform();
    std::size_t bin = weights.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) {
            bin = i;
            break;
        }
    }
    if (bin == weights.size()) {
        // Rounding left u past the cumulative sum; use the last bin with mass.
        bin = weights.size() - 1;
        while (bin > 0 && weights[bin] == 0.0) --bin;
    }
    const double lo = edges[bin];
    const double hi = bin + 1 < edges.size() ? edges[bin + 1] : cap;
    return hi - (hi - lo) * rng.uniform();  // (lo, hi]
}

void PersonaConfig::validate() const {
    for (std::size_t m = 0; m < kSynthModes.size(); ++m) {
        const std::string name(mode_name(kSynthModes[m]));
        check_range(speed_mps[m], name + " speed band");
        check_range(trip_length_m[m], name + " trip length range");
        if (!(mode_weights[m] >= 0.0)) throw ValidationError("mode weights must be non-negative");
    }
    const double w = std::accumulate(mode_weights.begin(), mode_weights.end(), 0.0);
    if (std::fabs(w - 1.0) > 1e-6) throw ValidationError("mode weights must sum to 1");
    check_range(bus_stop_wait_s, "bus stop wait", true);
    check_range(rail_stop_wait_s, "rail stop wait", true);
    check_range(light_wait_s, "traffic light wait", true);
    check_range(dwell_s, "activity dwell");
    for (double prob : {light_probability, congestion_probability, bus_stop_probability}) {
        if (!(prob >= 0.0 && prob <= 1.0)) throw ValidationError("probabilities must lie in [0, 1]");
    }
    check_range(congested_mps, "congested drive speed");
    if (congested_mps.lo < speed_mps[0].lo || congested_mps.hi > speed_mps[0].hi) {
        throw ValidationError("congested drive speed must lie inside the drive band");
    }
    if (!(arterial_cost > 0.0 && arterial_cost <= 1.0)) throw ValidationError("arterial cost must lie in (0, 1]");
    if (trips_min < 1 || trips_max < trips_min) throw ValidationError("trips per day must satisfy 1 <= min <= max");
    accuracy.validate("accuracy distribution");
    if (fixed_lri_s) {
        if (!(*fixed_lri_s >= 1.0)) throw ValidationError("fixed recording interval must be at least 1 s");
    } else {
        lri.validate("recording interval distribution");
    }
}

void NetworkConfig::validate() const {
    if (!(extent_km > 0.0)) throw ValidationError("network extent must be positive");
    if (!(spacing_km > 0.0) || spacing_km > extent_km) {
        throw ValidationError("lattice spacing must be positive and no larger than the extent");
    }
    if (rail_lines < 0 || bus_routes < 0) throw ValidationError("line counts must be non-negative");
    if (!(jitter_m >= 0.0) || jitter_m * 4.0 >= spacing_km * 1000.0) {
        throw ValidationError("jitter must be non-negative and well below the spacing");
    }
    if (!(vertex_step_m > 0.0)) throw ValidationError("vertex step must be positive");
    if (!(origin_lat > -80.0 && origin_lat < 80.0) || !(origin_lon >= -180.0 && origin_lon <= 180.0)) {
        throw ValidationError("world origin out of range");
    }
}

void CorpusConfig::validate() const {
    if (devices < 1 || days < 1) throw ValidationError("devices and days must be at least 1");
    if (zones_per_side < 1) throw ValidationError("zones per side must be at least 1");
    network.validate();
    persona.validate();
}

namespace {

ojson range_json(const Range& r) { return ojson::array({r.lo, r.hi}); }

Range range_from(const ojson& j) {
    if (!j.is_array() || j.size() != 2) throw SchemaError("range must be [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

ojson dist_json(const BinDistribution& d) {
    return {{"edges", d.edges}, {"weights", d.weights}, {"cap", d.cap}};
}

BinDistribution dist_from(const ojson& j) {
    BinDistribution d;
    d.edges = j.at("edges").get<std::vector<double>>();
    d.weights = j.at("weights").get<std::vector<double>>();
    d.cap = j.at("cap").get<double>();
    return d;
}

template <typename T>
void read_if(const ojson& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_json(const CorpusConfig& c) {
    const auto& p = c.persona;
    ojson modes = ojson::object();
    for (std::size_t m = 0; m < kSynthModes.size(); ++m) {
        modes[std::string(mode_name(kSynthModes[m]))] = {{"speed_mps", range_json(p.speed_mps[m])},
                                                         {"trip_length_m", range_json(p.trip_length_m[m])},
                                                         {"weight", p.mode_weights[m]}};
    }
    ojson persona = {
        {"modes", modes},
        {"bus_stop_wait_s", range_json(p.bus_stop_wait_s)},
        {"rail_stop_wait_s", range_json(p.rail_stop_wait_s)},
        {"light_wait_s", range_json(p.light_wait_s)},
        {"light_probability", p.light_probability},
        {"congestion_probability", p.congestion_probability},
        {"congested_mps", range_json(p.congested_mps)},
        {"bus_stop_probability", p.bus_stop_probability},
        {"arterial_cost", p.arterial_cost},
        {"dwell_s", range_json(p.dwell_s)},
        {"trips_per_day", ojson::array({p.trips_min, p.trips_max})},
        {"noise", p.noise},
        {"accuracy", dist_json(p.accuracy)},
        {"lri", dist_json(p.lri)},
        {"fixed_lri_s", p.fixed_lri_s ? ojson(*p.fixed_lri_s) : ojson(nullptr)},
    };
    const auto& n = c.network;
    ojson network = {{"extent_km", n.extent_km},   {"spacing_km", n.spacing_km},     {"rail_lines", n.rail_lines},
                     {"bus_routes", n.bus_routes}, {"jitter_m", n.jitter_m},         {"vertex_step_m", n.vertex_step_m},
                     {"origin_lat", n.origin_lat}, {"origin_lon", n.origin_lon}};
    ojson root = {{"seed", c.seed},
                  {"devices", c.devices},
                  {"days", c.days},
                  {"start_epoch", c.start_epoch},
                  {"utc_offset_s", c.utc_offset_s},
                  {"zones_per_side", c.zones_per_side},
                  {"network", network},
                  {"persona", persona}};
    return root.dump(2) + "\n";
}

CorpusConfig corpus_config_from_json(const std::string& text) {
    CorpusConfig c;
    try {
        const ojson root = ojson::parse(text);
        if (!root.is_object()) throw SchemaError("synth config must be a JSON object");
        read_if(root, "seed", c.seed);
        read_if(root, "devices", c.devices);
        read_if(root, "days", c.days);
        read_if(root, "start_epoch", c.start_epoch);
        read_if(root, "utc_offset_s", c.utc_offset_s);
        read_if(root, "zones_per_side", c.zones_per_side);
        if (root.contains("network")) {
            const auto& n = root.at("network");
            read_if(n, "extent_km", c.network.extent_km);
            read_if(n, "spacing_km", c.network.spacing_km);
            read_if(n, "rail_lines", c.network.rail_lines);
            read_if(n, "bus_routes", c.network.bus_routes);
            read_if(n, "jitter_m", c.network.jitter_m);
            read_if(n, "vertex_step_m", c.network.vertex_step_m);
            read_if(n, "origin_lat", c.network.origin_lat);
            read_if(n, "origin_lon", c.network.origin_lon);
        }
        if (root.contains("persona")) {
            const auto& pj = root.at("persona");
            auto& p = c.persona;
            if (pj.contains("modes")) {
                for (const auto& [name, mj] : pj.at("modes").items()) {
                    const auto mode = parse_mode(name);
                    const auto it = mode ? std::find(kSynthModes.begin(), kSynthModes.end(), *mode) : kSynthModes.end();
                    if (it == kSynthModes.end()) throw SchemaError("unknown synth mode '" + name + "'");
                    const auto m = static_cast<std::size_t>(it - kSynthModes.begin());
                    if (mj.contains("speed_mps")) p.speed_mps[m] = range_from(mj.at("speed_mps"));
                    if (mj.contains("trip_length_m")) p.trip_length_m[m] = range_from(mj.at("trip_length_m"));
                    read_if(mj, "weight", p.mode_weights[m]);
                }
            }
            if (pj.contains("bus_stop_wait_s")) p.bus_stop_wait_s = range_from(pj.at("bus_stop_wait_s"));
            if (pj.contains("rail_stop_wait_s")) p.rail_stop_wait_s = range_from(pj.at("rail_stop_wait_s"));
            if (pj.contains("light_wait_s")) p.light_wait_s = range_from(pj.at("light_wait_s"));
            read_if(pj, "light_probability", p.light_probability);
            read_if(pj, "congestion_probability", p.congestion_probability);
            if (pj.contains("congested_mps")) p.congested_mps = range_from(pj.at("congested_mps"));
            read_if(pj, "bus_stop_probability", p.bus_stop_probability);
            read_if(pj, "arterial_cost", p.arterial_cost);
            if (pj.contains("dwell_s")) p.dwell_s = range_from(pj.at("dwell_s"));
            if (pj.contains("trips_per_day")) {
                const auto r = range_from(pj.at("trips_per_day"));
                p.trips_min = static_cast<int>(r.lo);
                p.trips_max = static_cast<int>(r.hi);
            }
            read_if(pj, "noise", p.noise);
            if (pj.contains("accuracy")) p.accuracy = dist_from(pj.at("accuracy"));
            if (pj.contains("lri")) p.lri = dist_from(pj.at("lri"));
            if (pj.contains("fixed_lri_s")) {
                const auto& f = pj.at("fixed_lri_s");
                p.fixed_lri_s = f.is_null() ? std::nullopt : std::optional<double>(f.get<double>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed synth config: ") + e.what());
    }
    return c;
}

}  // namespace tripmode::synth
