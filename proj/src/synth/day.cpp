#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "tripmode/error.hpp"
#include "tripmode/parallel.hpp"
#include "tripmode/synth.hpp"

namespace tripmode::synth {

namespace {

double dist(Vec2 a, Vec2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

Vec2 lerp(Vec2 a, Vec2 b, double u) { return {a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u}; }

constexpr double kMinSeparationM = 250.0;

struct Knot {
    double t;
    Vec2 p;
};

// Piecewise-linear motion: the device sits still at each knot for `wait`
// seconds before heading to the next vertex.
struct Leg {
    std::vector<Vec2> path;
    std::vector<double> wait;   ///< per vertex
    std::vector<double> speed;  ///< per edge
};

struct Candidate {
    std::size_t place;
    Leg leg;
};

class DayBuilder {
public:
    DayBuilder(std::uint64_t seed, const PersonaConfig& persona, const World& world)
        : rng_(seed), persona_(persona), world_(world) {}

    std::size_t sample_mode() {
        double u = rng_.uniform();
        for (std::size_t m = 0; m < kSynthModes.size(); ++m) {
            if (u < persona_.mode_weights[m]) return m;
            u -= persona_.mode_weights[m];
        }
        std::size_t m = kSynthModes.size() - 1;
        while (m > 0 && persona_.mode_weights[m] == 0.0) --m;
        return m;
    }

    bool supports(const Place& p, std::size_t mode) const {
        switch (kSynthModes[mode]) {
            case Mode::bus: return !p.bus.empty();
            case Mode::rail: return !p.rail.empty();
            default: return true;
        }
    }

    double draw(Range r) { return r.lo + (r.hi - r.lo) * rng_.uniform(); }

    std::vector<Candidate> candidates(std::size_t from, std::size_t mode) {
        std::vector<Candidate> out;
        const Place& here = world_.places[from];
        const Range len = persona_.trip_length_m[mode];
        const Mode m = kSynthModes[mode];
        auto separated = [&](std::size_t to) { return dist(here.pos, world_.places[to].pos) >= kMinSeparationM; };

        if (m == Mode::walk || m == Mode::bike) {
            for (std::size_t to = 0; to < world_.places.size(); ++to) {
                const double d = dist(here.pos, world_.places[to].pos);
                if (d < len.lo || d > len.hi || !separated(to)) continue;
                out.push_back({to, {}});
            }
            return out;
        }
        if (m == Mode::drive) {
            shortest_paths(here.vertex);
            for (std::size_t to = 0; to < world_.places.size(); ++to) {
                const double d = length_[static_cast<std::size_t>(world_.places[to].vertex)];
                if (d < len.lo || d > len.hi || !separated(to)) continue;
                out.push_back({to, {}});
            }
            return out;
        }
        if (m == Mode::bus) {
            for (const auto& [r, s] : here.bus) {
                const auto& route = world_.bus_routes[static_cast<std::size_t>(r)];
                for (std::size_t s2 = 0; s2 < route.stops.size(); ++s2) {
                    if (static_cast<int>(s2) == s) continue;
                    auto leg = bus_leg(route, static_cast<std::size_t>(s), s2);
                    const double d = length(leg.path);
                    const std::size_t to = place_of_vertex(route.vertices[static_cast<std::size_t>(route.stops[s2])]);
                    if (d < len.lo || d > len.hi || !separated(to)) continue;
                    out.push_back({to, std::move(leg)});
                }
            }
            return out;
        }
        for (const auto& [r, s] : here.rail) {
            const auto& line = world_.rail_lines[static_cast<std::size_t>(r)];
            for (std::size_t s2 = 0; s2 < line.stations.size(); ++s2) {
                if (static_cast<int>(s2) == s) continue;
                auto leg = rail_leg(line, static_cast<std::size_t>(s), s2);
                const double d = length(leg.path);
                const std::size_t to = place_of_station(r, s2);
                if (d < len.lo || d > len.hi || !separated(to)) continue;
                out.push_back({to, std::move(leg)});
            }
        }
        return out;
    }

    // Fills in the movement for walk, bike and drive candidates.
    void complete(Candidate& c, std::size_t from, std::size_t mode) {
        const Mode m = kSynthModes[mode];
        const Range band = persona_.speed_mps[mode];
        const Vec2 a = world_.places[from].pos;
        const Vec2 b = world_.places[c.place].pos;
        if (m == Mode::walk || m == Mode::bike) {
            const double d = dist(a, b);
            const double off = rng_.uniform(-0.1, 0.1) * d;
            const Vec2 mid = lerp(a, b, rng_.uniform(0.3, 0.7));
            const Vec2 bend{mid.x - (b.y - a.y) / d * off, mid.y + (b.x - a.x) / d * off};
            const double v = draw(band);
            c.leg.path = {a, bend, b};
            c.leg.wait = {0.0, 0.0, 0.0};
            c.leg.speed = {v, v};
            return;
        }
        if (m == Mode::drive) {
            std::vector<int> vs;
            for (int v = world_.places[c.place].vertex; v >= 0; v = prev_[static_cast<std::size_t>(v)]) vs.push_back(v);
            std::reverse(vs.begin(), vs.end());
            const double cruise = rng_.uniform() < persona_.congestion_probability ? draw(persona_.congested_mps)
                                                                                    : draw(band);
            for (std::size_t k = 0; k < vs.size(); ++k) {
                c.leg.path.push_back(world_.vertices[static_cast<std::size_t>(vs[k])]);
                const bool interior = k > 0 && k + 1 < vs.size();
                double wait = 0.0;
                if (interior && world_.intersection[static_cast<std::size_t>(vs[k])] &&
                    rng_.uniform() < persona_.light_probability) {
                    wait = draw(persona_.light_wait_s);
                }
                c.leg.wait.push_back(wait);
                if (k + 1 < vs.size()) c.leg.speed.push_back(varied(cruise, band));
            }
        }
    }

    double varied(double cruise, Range band) {
        return std::clamp(cruise * rng_.uniform(0.85, 1.15), band.lo, band.hi);
    }

    DeviceDay run(const std::string& device_id, std::int64_t day_start, int first_trip_id) {
        DeviceDay day;
        day.trajectory.device_id = device_id;
        std::vector<Knot> knots;

        std::size_t here = static_cast<std::size_t>(rng_.below(world_.places.size()));
        double t = static_cast<double>(day_start + 6 * 3600 + static_cast<std::int64_t>(rng_.below(3600)));
        const double t_first = t;
        knots.push_back({t, world_.places[here].pos});
        t += std::round(draw(persona_.dwell_s));

        const int n_trips = static_cast<int>(rng_.between(persona_.trips_min, persona_.trips_max));
        std::size_t wanted = sample_mode();
        for (int k = 0; k < n_trips; ++k) {
            const std::size_t next_wanted = sample_mode();
            std::optional<Candidate> chosen;
            std::size_t mode = wanted;
            for (int attempt = 0; attempt < 16 && !chosen; ++attempt) {
                if (attempt > 0) mode = sample_mode();
                if (!supports(world_.places[here], mode)) continue;
                auto cands = candidates(here, mode);
                if (cands.empty()) continue;
                std::vector<std::size_t> preferred;
                for (std::size_t i = 0; i < cands.size(); ++i) {
                    if (supports(world_.places[cands[i].place], next_wanted)) preferred.push_back(i);
                }
                const std::size_t pick = preferred.empty()
                                             ? static_cast<std::size_t>(rng_.below(cands.size()))
                                             : preferred[static_cast<std::size_t>(rng_.below(preferred.size()))];
                chosen = std::move(cands[pick]);
                if (chosen->leg.path.empty()) complete(*chosen, here, mode);
            }
            if (!chosen) break;

            const double depart = t;
            knots.push_back({depart, world_.places[here].pos});
            const auto& leg = chosen->leg;
            double path_m = 0.0;
            for (std::size_t v = 0; v < leg.path.size(); ++v) {
                if (v > 0) {
                    const double d = dist(leg.path[v - 1], leg.path[v]);
                    path_m += d;
                    t += d / leg.speed[v - 1];
                    knots.push_back({t, leg.path[v]});
                }
                if (leg.wait[v] > 0.0) {
                    t += leg.wait[v];
                    knots.push_back({t, leg.path[v]});
                }
            }
            t = std::ceil(t);
            knots.push_back({t, world_.places[chosen->place].pos});

            TruthTrip trip;
            trip.device_id = device_id;
            trip.trip_id = first_trip_id + static_cast<int>(day.trips.size());
            trip.t_start = static_cast<std::int64_t>(depart);
            trip.t_end = static_cast<std::int64_t>(t);
            trip.origin = world_.places[here].pos;
            trip.destination = world_.places[chosen->place].pos;
            trip.mode = kSynthModes[mode];
            trip.path_m = path_m;
            day.trips.push_back(trip);

            here = chosen->place;
            wanted = next_wanted;
            t += std::round(draw(persona_.dwell_s));
        }
        knots.push_back({t, world_.places[here].pos});

        sample_pings(knots, t_first, t, day.trajectory);
        return day;
    }

private:
    static double length(const std::vector<Vec2>& path) {
        double d = 0.0;
        for (std::size_t i = 1; i < path.size(); ++i) d += dist(path[i - 1], path[i]);
        return d;
    }

    std::size_t place_of_vertex(int v) const {
        for (std::size_t i = 0; i < world_.places.size(); ++i) {
            if (world_.places[i].vertex == v) return i;
        }
        throw std::logic_error("vertex without a place");
    }

    std::size_t place_of_station(int line, std::size_t station) const {
        for (std::size_t i = 0; i < world_.places.size(); ++i) {
            for (const auto& [l, s] : world_.places[i].rail) {
                if (l == line && static_cast<std::size_t>(s) == station) return i;
            }
        }
        throw std::logic_error("station without a place");
    }

    Leg bus_leg(const World::Line& route, std::size_t s_from, std::size_t s_to) {
        Leg leg;
        const int a = route.stops[s_from];
        const int b = route.stops[s_to];
        const int step = a < b ? 1 : -1;
        const Range band = persona_.speed_mps[2];
        const double cruise = draw(band);
        for (int k = a;; k += step) {
            leg.path.push_back(world_.vertices[static_cast<std::size_t>(route.vertices[static_cast<std::size_t>(k)])]);
            const bool interior = k != a && k != b;
            const bool stop = interior && std::find(route.stops.begin(), route.stops.end(), k) != route.stops.end() &&
                              rng_.uniform() < persona_.bus_stop_probability;
            leg.wait.push_back(stop ? draw(persona_.bus_stop_wait_s) : 0.0);
            if (k == b) break;
            leg.speed.push_back(varied(cruise, band));
        }
        return leg;
    }

    Leg rail_leg(const World::RailLine& line, std::size_t s_from, std::size_t s_to) {
        Leg leg;
        const int a = line.stations[s_from];
        const int b = line.stations[s_to];
        const int step = a < b ? 1 : -1;
        const Range band = persona_.speed_mps[1];
        const double cruise = draw(band);
        for (int k = a;; k += step) {
            leg.path.push_back(line.points[static_cast<std::size_t>(k)]);
            const bool interior = k != a && k != b;
            const bool stop = interior && std::find(line.stations.begin(), line.stations.end(), k) != line.stations.end();
            leg.wait.push_back(stop ? draw(persona_.rail_stop_wait_s) : 0.0);
            if (k == b) break;
            leg.speed.push_back(varied(cruise, band));
        }
        return leg;
    }

    void shortest_paths(int source) {
        const std::size_t n = world_.vertices.size();
        dist_.assign(n, std::numeric_limits<double>::infinity());
        prev_.assign(n, -1);
        length_.assign(n, 0.0);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist_[static_cast<std::size_t>(source)] = 0.0;
        heap.push({0.0, source});
        while (!heap.empty()) {
            const auto [d, v] = heap.top();
            heap.pop();
            if (d > dist_[static_cast<std::size_t>(v)]) continue;
            for (const auto& e : world_.adjacency[static_cast<std::size_t>(v)]) {
                const int u = e.to;
                const double nd = d + e.length * (e.arterial ? persona_.arterial_cost : 1.0);
                if (nd < dist_[static_cast<std::size_t>(u)]) {
                    dist_[static_cast<std::size_t>(u)] = nd;
                    prev_[static_cast<std::size_t>(u)] = v;
                    length_[static_cast<std::size_t>(u)] = length_[static_cast<std::size_t>(v)] + e.length;
                    heap.push({nd, u});
                }
            }
        }
    }

    void sample_pings(const std::vector<Knot>& knots, double t0, double t1, Trajectory& out) {
        std::size_t seg = 0;
        for (double t = t0; t <= t1;) {
            while (seg + 1 < knots.size() && knots[seg + 1].t <= t) ++seg;
            Vec2 p = knots[seg].p;
            if (seg + 1 < knots.size() && knots[seg + 1].t > knots[seg].t) {
                p = lerp(knots[seg].p, knots[seg + 1].p, (t - knots[seg].t) / (knots[seg + 1].t - knots[seg].t));
            }
            const double acc = std::ceil(persona_.accuracy.sample(rng_) * 10.0) / 10.0;
            if (persona_.noise) {
                p.x += rng_.normal() * acc * 0.5;
                p.y += rng_.normal() * acc * 0.5;
            }
            const auto ll = world_.to_latlon(p);
            out.pings.push_back({static_cast<std::int64_t>(t), ll.lat, ll.lon, acc});
            const double gap = persona_.fixed_lri_s ? *persona_.fixed_lri_s : persona_.lri.sample(rng_);
            t += std::max(1.0, std::ceil(gap));
        }
    }

    Rng rng_;
    const PersonaConfig& persona_;
    const World& world_;
    std::vector<double> dist_;    ///< routing cost
    std::vector<double> length_;  ///< meters along the cheapest route
    std::vector<int> prev_;
};

}  // namespace

DeviceDay generate_day(std::uint64_t seed, const PersonaConfig& persona, const World& world,
                       const std::string& device_id, std::int64_t day_start, int first_trip_id) {
    persona.validate();
    if (world.places.empty()) throw DataError("synthetic world has no places");
    DayBuilder builder(seed, persona, world);
    return builder.run(device_id, day_start, first_trip_id);
}

std::string device_name(int index) {
    std::string digits = std::to_string(index);
    if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
    return "dev" + digits;
}

Corpus generate_corpus(const CorpusConfig& config, unsigned threads) {
    config.validate();
    Corpus corpus;
    corpus.world = generate_world(derive_seed(config.seed, 0), config.network);

    std::vector<DeviceDay> devices(static_cast<std::size_t>(config.devices));
    parallel_for(devices.size(), threads, [&](std::size_t d) {
        const std::string id = device_name(static_cast<int>(d));
        const std::uint64_t device_seed = derive_seed(config.seed, 1 + d);
        DeviceDay& acc = devices[d];
        acc.trajectory.device_id = id;
        for (int day = 0; day < config.days; ++day) {
            auto dd = generate_day(derive_seed(device_seed, static_cast<std::uint64_t>(day)), config.persona,
                                   corpus.world, id, config.start_epoch + day * 86400LL,
                                   static_cast<int>(acc.trips.size()));
            acc.trajectory.pings.insert(acc.trajectory.pings.end(), dd.trajectory.pings.begin(),
                                        dd.trajectory.pings.end());
            acc.trips.insert(acc.trips.end(), dd.trips.begin(), dd.trips.end());
        }
    });
    for (auto& d : devices) {
        corpus.trajectories.push_back(std::move(d.trajectory));
        for (auto& t : d.trips) corpus.truth.push_back(std::move(t));
    }
    for (const auto& t : corpus.truth) {
        const auto o = corpus.world.to_latlon(t.origin);
        const auto dd = corpus.world.to_latlon(t.destination);
        corpus.diary.push_back({t.device_id, t.t_start, t.t_end, o.lat, o.lon, dd.lat, dd.lon,
                                std::string(mode_name(t.mode))});
    }

    // Zone grid over the lattice, padded by half a block.
    const double pad = config.network.spacing_km * 500.0;
    const double lo = -pad;
    const double hi = config.network.extent_km * 1000.0 + pad;
    const double step = (hi - lo) / config.zones_per_side;
    for (int i = 0; i < config.zones_per_side; ++i) {
        for (int j = 0; j < config.zones_per_side; ++j) {
            std::vector<LonLat> ring;
            for (const auto& [x, y] : std::vector<std::pair<double, double>>{
                     {lo + j * step, lo + i * step},
                     {lo + (j + 1) * step, lo + i * step},
                     {lo + (j + 1) * step, lo + (i + 1) * step},
                     {lo + j * step, lo + (i + 1) * step}}) {
                const auto ll = corpus.world.to_latlon({x, y});
                ring.push_back({ll.lon, ll.lat});
            }
            corpus.zones.push_back(make_zone("z" + std::to_string(i) + "_" + std::to_string(j), std::move(ring)));
        }
    }
    const auto roster = truth_roster(corpus);
    const auto table = mode_share(roster, &corpus.zones, ModeSet::five);
    for (const auto& row : table.rows) {
        for (std::size_t m = 0; m < row.share.size(); ++m) {
            corpus.survey.push_back({row.zone_id, std::string(mode_name(modes_of(ModeSet::five)[m])), row.share[m]});
        }
    }
    return corpus;
}

std::vector<RosterRow> truth_roster(const Corpus& corpus) {
    std::vector<RosterRow> rows;
    std::size_t traj = 0;
    for (const auto& t : corpus.truth) {
        while (traj < corpus.trajectories.size() && corpus.trajectories[traj].device_id != t.device_id) ++traj;
        RosterRow r;
        r.device_id = t.device_id;
        r.trip_id = t.trip_id;
        r.t_start = t.t_start;
        r.t_end = t.t_end;
        const auto o = corpus.world.to_latlon(t.origin);
        const auto d = corpus.world.to_latlon(t.destination);
        r.o_lat = o.lat;
        r.o_lon = o.lon;
        r.d_lat = d.lat;
        r.d_lon = d.lon;
        r.distance_m = t.path_m;
        r.duration_s = t.t_end - t.t_start;
        if (traj < corpus.trajectories.size()) {
            for (const auto& p : corpus.trajectories[traj].pings) r.n_pings += p.t >= t.t_start && p.t <= t.t_end;
        }
        r.mode = std::string(mode_name(t.mode));
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace tripmode::synth
