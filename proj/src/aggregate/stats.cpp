#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "tripmode/aggregate.hpp"
#include "tripmode/error.hpp"
#include "tripmode/text.hpp"

namespace tripmode {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("correlation series differ in length");
    if (x.size() < 2) throw DataError("correlation needs at least two pairs");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw DataError("correlation undefined for a series without variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

JenksResult jenks(std::span<const double> values, int k) {
    if (k < 2) throw DataError("natural breaks need at least 2 classes");
    std::vector<double> v(values.begin(), values.end());
    for (double x : v) {
        if (!std::isfinite(x)) throw DataError("natural breaks input contains a non-finite value");
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    std::size_t distinct = n > 0 ? 1 : 0;
    for (std::size_t i = 1; i < n; ++i) distinct += v[i] != v[i - 1] ? 1 : 0;
    const auto kk = static_cast<std::size_t>(k);
    if (distinct < kk) {
        throw DataError("natural breaks need at least " + std::to_string(k) + " distinct values, got " +
                        std::to_string(distinct));
    }

    // best[m][i]: least SSD splitting v[i..n) into m classes; cut[m][i] is
    // the smallest end of the first of those classes reaching it.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best(kk + 1, std::vector<double>(n + 1, inf));
    std::vector<std::vector<std::size_t>> cut(kk + 1, std::vector<std::size_t>(n + 1, n));
    best[0][n] = 0.0;
    for (std::size_t m = 1; m <= kk; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            double mean = 0.0;
            double ssd = 0.0;
            for (std::size_t j = i; j < n; ++j) {
                // Welford update over v[i..j].
                const double cnt = static_cast<double>(j - i + 1);
                const double d = v[j] - mean;
                mean += d / cnt;
                ssd += d * (v[j] - mean);
                if (j + 1 < n && v[j + 1] == v[j]) continue;
                const double rest = best[m - 1][j + 1];
                if (rest == inf) continue;
                const double total = ssd + rest;
                if (total < best[m][i]) {
                    best[m][i] = total;
                    cut[m][i] = j + 1;
                }
            }
        }
    }
    JenksResult out;
    out.ssd = best[kk][0];
    std::size_t start = 0;
    for (std::size_t m = kk; m >= 1; --m) {
        const std::size_t end = cut[m][start];
        out.class_sizes.push_back(end - start);
        if (m > 1) out.breaks.push_back(v[end - 1]);
        start = end;
    }
    return out;
}

int jenks_class(double v, std::span<const double> breaks) {
    const auto it = std::lower_bound(breaks.begin(), breaks.end(), v);
    return static_cast<int>(it - breaks.begin());
}

std::vector<CorrelationRow> compare_shares(const ShareTable& estimated, std::span<const ShareEntry> reference) {
    const auto& modes = modes_of(estimated.mode_set);
    std::map<std::string, std::vector<double>> ref;
    for (const auto& e : reference) {
        const auto mode = parse_mode(e.mode);
        const auto cls = mode ? class_index(*mode, estimated.mode_set) : std::nullopt;
        if (!cls) throw DataError("reference mode '" + e.mode + "' does not belong to the mode set");
        auto& row = ref[e.zone_id];
        row.resize(modes.size(), 0.0);
        row[static_cast<std::size_t>(*cls)] += e.share;
    }
    std::vector<const ShareRow*> est;
    for (const auto& r : estimated.rows) {
        if (ref.count(r.zone_id)) est.push_back(&r);
    }
    if (est.empty()) throw DataError("no zone is present in both share tables");

    std::vector<CorrelationRow> out;
    auto add = [&](std::string scope, std::string key, const std::vector<double>& x, const std::vector<double>& y) {
        CorrelationRow row{std::move(scope), std::move(key), x.size(), std::nullopt};
        try {
            row.r = pearson(x, y);
        } catch (const DataError&) {
        }
        out.push_back(std::move(row));
    };
    std::vector<double> x;
    std::vector<double> y;
    for (const auto* r : est) {
        const auto& rr = ref[r->zone_id];
        for (std::size_t m = 0; m < modes.size(); ++m) {
            x.push_back(r->share[m]);
            y.push_back(rr[m]);
        }
    }
    add("overall", "zone_x_mode", x, y);
    for (std::size_t m = 0; m < modes.size(); ++m) {
        x.clear();
        y.clear();
        for (const auto* r : est) {
            x.push_back(r->share[m]);
            y.push_back(ref[r->zone_id][m]);
        }
        add("mode", std::string(mode_name(modes[m])), x, y);
    }
    for (const auto* r : est) {
        add("zone", r->zone_id, r->share, ref[r->zone_id]);
    }
    return out;
}

void write_correlation_csv(std::ostream& out, std::span<const CorrelationRow> rows) {
    out << "scope,key,n,pearson\n";
    for (const auto& r : rows) {
        out << r.scope << ',' << r.key << ',' << r.n << ',';
        if (r.r) out << text::fmt_fixed(*r.r, 6);
        out << '\n';
    }
}

}  // namespace tripmode
