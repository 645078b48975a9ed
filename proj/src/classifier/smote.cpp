#include <algorithm>
#include <numeric>

#include "tripmode/classifier.hpp"
#include "tripmode/error.hpp"
#include "tripmode/kernels.hpp"
#include "tripmode/rng.hpp"

namespace tripmode {

namespace {

// Standardized rows of one class, column-major for the distance kernel.
class ClassMatrix {
public:
    ClassMatrix(const LabeledDataset& ds, std::span<const std::size_t> members, const Standardization& scale)
        : cols_(kFeatureCount, std::vector<double>(members.size())) {
        for (std::size_t r = 0; r < members.size(); ++r) {
            const auto z = scale.apply(ds.rows[members[r]]);
            for (std::size_t f = 0; f < kFeatureCount; ++f) cols_[f][r] = z[f];
        }
        for (const auto& c : cols_) ptrs_.push_back(c.data());
    }

    /// The k nearest other members of row r, by (distance, position).
    std::vector<std::size_t> nearest(std::size_t r, std::size_t k) const {
        const std::size_t n = cols_[0].size();
        std::array<double, kFeatureCount> q{};
        for (std::size_t f = 0; f < kFeatureCount; ++f) q[f] = cols_[f][r];
        std::vector<double> dist(n);
        kernels::l2sq_rows({ptrs_, n}, q.data(), dist.data());
        std::vector<std::size_t> order;
        order.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i != r) order.push_back(i);
        }
        const std::size_t take = std::min(k, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                          [&](std::size_t a, std::size_t b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; });
        order.resize(take);
        return order;
    }

private:
    std::vector<std::vector<double>> cols_;
    std::vector<const double*> ptrs_;
};

}  // namespace

SmoteResult smote_resample(const LabeledDataset& ds, int k, std::uint64_t seed, const Standardization* scale) {
    if (k < 1) throw ValidationError("SMOTE k must be at least 1");
    SmoteResult out;
    out.data = ds;
    out.scale = scale ? *scale : Standardization::fit(ds.rows);
    const auto counts = ds.class_counts();
    const std::size_t target = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());

    const auto& names = modes_of(ds.mode_set);
    Rng rng(seed);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0 || counts[c] == target) continue;
        const std::string cname(mode_name(names[c]));
        if (counts[c] < 2) throw DataError("SMOTE needs at least 2 samples of class '" + cname + "'");

        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.labels[i] == static_cast<int>(c)) members.push_back(i);
        }
        std::size_t k_eff = static_cast<std::size_t>(k);
        if (k_eff > members.size() - 1) {
            k_eff = members.size() - 1;
            out.warnings.push_back("SMOTE k clamped to " + std::to_string(k_eff) + " for class '" + cname + "'");
        }
        const ClassMatrix matrix(ds, members, out.scale);
        std::vector<std::vector<std::size_t>> neighbor_cache(members.size());

        for (std::size_t s = 0; s < target - counts[c]; ++s) {
            const std::size_t b = static_cast<std::size_t>(rng.below(members.size()));
            auto& nn = neighbor_cache[b];
            if (nn.empty()) nn = matrix.nearest(b, k_eff);
            const std::size_t pick = nn[static_cast<std::size_t>(rng.below(nn.size()))];
            const double u = rng.uniform();

            const auto& x = ds.rows[members[b]];
            const auto& y = ds.rows[members[pick]];
            FeatureVector row{};
            for (std::size_t f = 0; f < kFeatureCount; ++f) row[f] = x[f] + u * (y[f] - x[f]);
            out.data.rows.push_back(row);
            out.data.labels.push_back(static_cast<int>(c));
            out.origins.push_back({members[b], members[pick], u});
        }
    }
    return out;
}

}  // namespace tripmode
