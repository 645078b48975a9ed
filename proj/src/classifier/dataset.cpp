#include <cmath>

#include "tripmode/classifier.hpp"
#include "tripmode/error.hpp"

namespace tripmode {

std::vector<std::size_t> LabeledDataset::class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes()), 0);
    for (int y : labels) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> idx) const {
    LabeledDataset out;
    out.mode_set = mode_set;
    out.rows.reserve(idx.size());
    out.labels.reserve(idx.size());
    for (std::size_t i : idx) {
        out.rows.push_back(rows[i]);
        out.labels.push_back(labels[i]);
    }
    return out;
}

LabeledDataset make_dataset(std::span<const FeatureRow> rows, ModeSet mode_set) {
    LabeledDataset ds;
    ds.mode_set = mode_set;
    for (const auto& r : rows) {
        const auto mode = parse_mode(r.mode);
        const auto cls = mode ? class_index(*mode, mode_set) : std::nullopt;
        if (!cls) {
            throw DataError("label '" + r.mode + "' is not part of the " + std::string(mode_set_name(mode_set)) +
                            "-mode set");
        }
        for (double v : r.values) {
            if (!std::isfinite(v)) throw DataError("non-finite feature value in training data");
        }
        ds.rows.push_back(r.values);
        ds.labels.push_back(*cls);
    }
    return ds;
}

Standardization Standardization::fit(std::span<const FeatureVector> rows) {
    Standardization s;
    s.std.fill(1.0);
    if (rows.empty()) return s;
    const auto n = static_cast<double>(rows.size());
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        double sum = 0.0;
        for (const auto& r : rows) sum += r[f];
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& r : rows) ss += (r[f] - mean) * (r[f] - mean);
        const double sd = std::sqrt(ss / n);
        s.mean[f] = mean;
        s.std[f] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

FeatureVector Standardization::apply(const FeatureVector& x) const {
    FeatureVector z{};
    for (std::size_t f = 0; f < kFeatureCount; ++f) z[f] = (x[f] - mean[f]) / std[f];
    return z;
}

}  // namespace tripmode
