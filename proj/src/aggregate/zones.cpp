#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "tripmode/aggregate.hpp"
#include "tripmode/error.hpp"
#include "tripmode/text.hpp"

namespace tripmode {

using nlohmann::json;

namespace {

// Sign of the cross product (b - a) x (p - a). The floating-point value is
// trusted when it clears the standard forward error bound; otherwise the
// sign is recomputed in exact rational arithmetic.
int orientation(LonLat a, LonLat b, LonLat p) {
    const double l = (b.lon - a.lon) * (p.lat - a.lat);
    const double r = (b.lat - a.lat) * (p.lon - a.lon);
    const double det = l - r;
    const double bound = 3.3306690738754716e-16 * (std::fabs(l) + std::fabs(r));
    if (det > bound) return 1;
    if (-det > bound) return -1;
    using boost::multiprecision::cpp_rational;
    const cpp_rational exact = (cpp_rational(b.lon) - a.lon) * (cpp_rational(p.lat) - a.lat) -
                               (cpp_rational(b.lat) - a.lat) * (cpp_rational(p.lon) - a.lon);
    return exact.sign();
}

bool in_box(LonLat a, LonLat b, LonLat p) {
    return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) && p.lat >= std::min(a.lat, b.lat) &&
           p.lat <= std::max(a.lat, b.lat);
}

bool segments_touch(LonLat a, LonLat b, LonLat c, LonLat d) {
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    return (o1 == 0 && in_box(a, b, c)) || (o2 == 0 && in_box(a, b, d)) || (o3 == 0 && in_box(c, d, a)) ||
           (o4 == 0 && in_box(c, d, b));
}

}  // namespace

Zone make_zone(std::string id, std::vector<LonLat> ring) {
    if (id.empty()) throw DataError("zone id must not be empty");
    std::vector<LonLat> clean;
    for (const auto& p : ring) {
        if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) throw DataError("zone '" + id + "' has a non-finite vertex");
        if (clean.empty() || !(clean.back() == p)) clean.push_back(p);
    }
    while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();

    std::vector<LonLat> distinct = clean;
    std::sort(distinct.begin(), distinct.end(),
              [](LonLat a, LonLat b) { return a.lon != b.lon ? a.lon < b.lon : a.lat < b.lat; });
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw DataError("zone '" + id + "' needs at least 3 distinct vertices");

    const std::size_t n = clean.size();
    for (std::size_t i = 0; i < n; ++i) {
        const LonLat a = clean[i];
        const LonLat b = clean[(i + 1) % n];
        // Adjacent edges may only share their common vertex.
        const LonLat c = clean[(i + 2) % n];
        if (orientation(a, b, c) == 0 &&
            (a.lon - b.lon) * (c.lon - b.lon) + (a.lat - b.lat) * (c.lat - b.lat) > 0.0) {
            throw DataError("zone '" + id + "' ring folds back on itself");
        }
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_touch(a, b, clean[j], clean[(j + 1) % n])) {
                throw DataError("zone '" + id + "' ring is self-intersecting");
            }
        }
    }

    Zone z;
    z.id = std::move(id);
    z.ring = std::move(clean);
    z.min_lon = z.max_lon = z.ring[0].lon;
    z.min_lat = z.max_lat = z.ring[0].lat;
    for (const auto& p : z.ring) {
        z.min_lon = std::min(z.min_lon, p.lon);
        z.max_lon = std::max(z.max_lon, p.lon);
        z.min_lat = std::min(z.min_lat, p.lat);
        z.max_lat = std::max(z.max_lat, p.lat);
    }
    return z;
}

std::vector<Zone> read_zones(std::istream& in) {
    std::vector<Zone> zones;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const std::string where = "zones line " + std::to_string(lineno);
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(where + ": " + e.what());
        }
        if (!rec.is_object() || !rec.contains("zone_id") || !rec["zone_id"].is_string() || !rec.contains("coords") ||
            !rec["coords"].is_array()) {
            throw SchemaError(where + ": expected {zone_id, kind, coords}");
        }
        if (rec.value("kind", "polygon") != "polygon") throw SchemaError(where + ": kind must be polygon");
        std::vector<LonLat> ring;
        for (const auto& v : rec["coords"]) {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
                throw SchemaError(where + ": vertex must be [lon, lat]");
            }
            ring.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        zones.push_back(make_zone(rec["zone_id"].get<std::string>(), std::move(ring)));
    }
    std::vector<std::string> ids;
    for (const auto& z : zones) ids.push_back(z.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw DataError("duplicate zone id in zones file");
    return zones;
}

std::vector<Zone> load_zones(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open zones file '" + path + "'");
    return read_zones(in);
}

void write_zones(std::ostream& out, std::span<const Zone> zones) {
    for (const auto& z : zones) {
        out << R"({"zone_id":)" << json(z.id).dump() << R"(,"kind":"polygon","coords":[)";
        for (std::size_t i = 0; i <= z.ring.size(); ++i) {
            const auto& p = z.ring[i % z.ring.size()];
            if (i) out << ',';
            out << '[' << text::fmt(p.lon) << ',' << text::fmt(p.lat) << ']';
        }
        out << "]}\n";
    }
}

Location locate(const Zone& z, double lon, double lat) {
    if (lon < z.min_lon || lon > z.max_lon || lat < z.min_lat || lat > z.max_lat) return Location::outside;
    const LonLat p{lon, lat};
    bool inside = false;
    const std::size_t n = z.ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const LonLat a = z.ring[i];
        const LonLat b = z.ring[(i + 1) % n];
        const bool up = a.lat <= lat && lat < b.lat;
        const bool down = b.lat <= lat && lat < a.lat;
        const bool touches = in_box(a, b, p);
        if (!up && !down && !touches) continue;
        const int o = orientation(a, b, p);
        if (o == 0 && touches) return Location::boundary;
        if ((up && o > 0) || (down && o < 0)) inside = !inside;
    }
    return inside ? Location::inside : Location::outside;
}

std::optional<std::size_t> assign_zone(double lat, double lon, std::span<const Zone> zones) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < zones.size(); ++i) {
        if (locate(zones[i], lon, lat) == Location::outside) continue;
        if (!best || zones[i].id < zones[*best].id) best = i;
    }
    return best;
}

ShareTable mode_share(std::span<const RosterRow> trips, const std::vector<Zone>* zones, ModeSet mode_set) {
    const auto k = modes_of(mode_set).size();
    std::map<std::string, ShareRow> by_zone;
    ShareRow none;
    none.zone_id = std::string(kNoZone);
    none.counts.assign(k, 0);
    for (const auto& t : trips) {
        if (t.is_air.value_or(false) || t.mode.empty()) continue;
        const auto mode = parse_mode(t.mode);
        const auto cls = mode ? class_index(*mode, mode_set) : std::nullopt;
        if (!cls) throw DataError("trip mode '" + t.mode + "' does not belong to the mode set");
        ShareRow* row = &none;
        std::string id(kAllZones);
        if (zones) {
            const auto z = assign_zone(t.o_lat, t.o_lon, *zones);
            id = z ? (*zones)[*z].id : std::string();
        }
        if (!id.empty()) {
            row = &by_zone[id];
            if (row->counts.empty()) {
                row->zone_id = id;
                row->counts.assign(k, 0);
            }
        }
        ++row->counts[static_cast<std::size_t>(*cls)];
        ++row->trips;
    }
    ShareTable table;
    table.mode_set = mode_set;
    for (auto& [id, row] : by_zone) table.rows.push_back(std::move(row));
    if (none.trips > 0) table.rows.push_back(std::move(none));
    for (auto& row : table.rows) {
        row.share.resize(k);
        for (std::size_t m = 0; m < k; ++m) {
            row.share[m] = static_cast<double>(row.counts[m]) / static_cast<double>(row.trips);
        }
    }
    return table;
}

void write_share_csv(std::ostream& out, const ShareTable& t) {
    const auto& modes = modes_of(t.mode_set);
    out << "zone_id,mode,count,zone_trips,share\n";
    for (const auto& row : t.rows) {
        for (std::size_t m = 0; m < modes.size(); ++m) {
            out << row.zone_id << ',' << mode_name(modes[m]) << ',' << row.counts[m] << ',' << row.trips << ','
                << text::fmt_fixed(row.share[m], 6) << '\n';
        }
    }
}

void write_choropleth_csv(std::ostream& out, const ShareTable& t, int classes) {
    const auto& modes = modes_of(t.mode_set);
    std::vector<const ShareRow*> rows;
    for (const auto& r : t.rows) {
        if (r.zone_id != kNoZone) rows.push_back(&r);
    }
    std::vector<std::optional<std::vector<double>>> breaks(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
        std::vector<double> v;
        for (const auto* r : rows) v.push_back(r->share[m]);
        std::vector<double> uniq = v;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        if (classes >= 2 && uniq.size() >= static_cast<std::size_t>(classes)) breaks[m] = jenks_breaks(v, classes);
    }
    out << "zone_id,trips";
    for (Mode m : modes) out << ',' << mode_name(m);
    for (Mode m : modes) out << ',' << mode_name(m) << "_class";
    out << '\n';
    for (const auto* r : rows) {
        out << r->zone_id << ',' << r->trips;
        for (double s : r->share) out << ',' << text::fmt_fixed(s, 6);
        for (std::size_t m = 0; m < modes.size(); ++m) {
            out << ',';
            if (breaks[m]) out << jenks_class(r->share[m], *breaks[m]);
        }
        out << '\n';
    }
}

std::vector<ShareEntry> read_share_entries(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("share table is empty");
    const auto header = text::split(line);
    const long zi = text::column_index(header, "zone_id");
    const long mi = text::column_index(header, "mode");
    const long si = text::column_index(header, "share");
    if (zi < 0 || mi < 0 || si < 0) throw SchemaError("share table needs zone_id, mode and share columns");
    const auto need = static_cast<std::size_t>(std::max({zi, mi, si}));
    std::vector<ShareEntry> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const auto f = text::split(line);
        if (f.size() <= need) throw SchemaError("share table line " + std::to_string(lineno) + ": too few fields");
        const auto share = text::to_double(f[static_cast<std::size_t>(si)]);
        if (!share || !std::isfinite(*share)) {
            throw DataError("share table line " + std::to_string(lineno) + ": bad share value");
        }
        out.push_back({std::string(text::trim(f[static_cast<std::size_t>(zi)])),
                       std::string(text::trim(f[static_cast<std::size_t>(mi)])), *share});
    }
    return out;
}

}  // namespace tripmode
