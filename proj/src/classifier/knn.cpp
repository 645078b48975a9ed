#include <algorithm>
#include <numeric>

#include "tripmode/classifier.hpp"
#include "tripmode/error.hpp"
#include "tripmode/kernels.hpp"

namespace tripmode {

KnnIndex::KnnIndex(const LabeledDataset& train, const Standardization& scale)
    : scale_(scale), num_classes_(train.num_classes()), labels_(train.labels),
      cols_(kFeatureCount, std::vector<double>(train.size())) {
    if (train.size() == 0) throw DataError("KNN needs at least one training row");
    for (std::size_t r = 0; r < train.size(); ++r) {
        const auto z = scale_.apply(train.rows[r]);
        for (std::size_t f = 0; f < kFeatureCount; ++f) cols_[f][r] = z[f];
    }
    for (const auto& c : cols_) col_ptrs_.push_back(c.data());
}

int KnnIndex::predict(const FeatureVector& fv, int k) const {
    if (k < 1) throw ValidationError("k must be at least 1");
    const std::size_t n = labels_.size();
    const auto q = scale_.apply(fv);
    std::vector<double> dist(n);
    kernels::l1_rows({col_ptrs_, n}, q.data(), dist.data());

    std::vector<double> votes(static_cast<std::size_t>(num_classes_), 0.0);
    bool exact = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i] == 0.0) {
            votes[static_cast<std::size_t>(labels_[i])] += 1.0;
            exact = true;
        }
    }
    if (!exact) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), n);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                          [&](std::size_t a, std::size_t b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; });
        for (std::size_t j = 0; j < take; ++j) {
            votes[static_cast<std::size_t>(labels_[order[j]])] += 1.0 / dist[order[j]];
        }
    }
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

int knn_predict(const LabeledDataset& train, const FeatureVector& fv, int k) {
    return KnnIndex(train, Standardization::fit(train.rows)).predict(fv, k);
}

}  // namespace tripmode
