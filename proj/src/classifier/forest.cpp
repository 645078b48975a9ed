#include <algorithm>
#include <array>
#include <numeric>

#include "tripmode/classifier.hpp"
#include "tripmode/error.hpp"
#include "tripmode/parallel.hpp"
#include "tripmode/rng.hpp"

namespace tripmode {

ForestParams ForestParams::five_mode() {
    return {800, 60, 2, 1, 4, false, ClassWeight::balanced_subsample};
}

ForestParams ForestParams::four_mode() { return {700, 30, 2, 1, 4, false, ClassWeight::none}; }

namespace {

struct TrainingView {
    std::array<std::vector<double>, kFeatureCount> cols;
    std::vector<int> labels;
    int num_classes = 0;
};

class TreeBuilder {
public:
    TreeBuilder(const TrainingView& data, const ForestParams& hp, std::uint64_t seed)
        : data_(data), hp_(hp), k_(static_cast<std::size_t>(data.num_classes)), rng_(seed) {}

    Tree build(FeatureVector& importance) {
        const std::size_t n = data_.labels.size();
        weights_.assign(n, 0.0);
        std::vector<double> multiplicity(n, 1.0);
        if (hp_.bootstrap) {
            std::fill(multiplicity.begin(), multiplicity.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) multiplicity[static_cast<std::size_t>(rng_.below(n))] += 1.0;
        }
        std::vector<double> class_mass(k_, 0.0);
        for (std::size_t i = 0; i < n; ++i) class_mass[static_cast<std::size_t>(data_.labels[i])] += multiplicity[i];
        std::vector<double> class_weight(k_, 1.0);
        if (hp_.class_weight == ClassWeight::balanced_subsample) {
            double total = 0.0;
            std::size_t present = 0;
            for (double m : class_mass) {
                total += m;
                present += m > 0.0 ? 1 : 0;
            }
            for (std::size_t c = 0; c < k_; ++c) {
                if (class_mass[c] > 0.0) class_weight[c] = total / (static_cast<double>(present) * class_mass[c]);
            }
        }
        idx_.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (multiplicity[i] == 0.0) continue;
            weights_[i] = multiplicity[i] * class_weight[static_cast<std::size_t>(data_.labels[i])];
            idx_.push_back(i);
        }

        Tree tree;
        importance.fill(0.0);
        if (idx_.empty()) {
            tree.nodes.push_back(TreeNode{});
            tree.nodes[0].leaf = 0;
            tree.leaf_counts.assign(k_, 0.0);
            return tree;
        }

        struct Frame {
            int node;
            std::size_t begin, end;
            int depth;
        };
        std::vector<Frame> stack;
        tree.nodes.emplace_back();
        stack.push_back({0, 0, idx_.size(), 0});
        std::vector<double> totals(k_);
        while (!stack.empty()) {
            const Frame fr = stack.back();
            stack.pop_back();
            std::fill(totals.begin(), totals.end(), 0.0);
            for (std::size_t p = fr.begin; p < fr.end; ++p) {
                totals[static_cast<std::size_t>(data_.labels[idx_[p]])] += weights_[idx_[p]];
            }
            const Split split = find_split(fr.begin, fr.end, fr.depth, totals);
            if (split.feature < 0) {
                tree.nodes[static_cast<std::size_t>(fr.node)].leaf = static_cast<int>(tree.leaf_counts.size());
                tree.leaf_counts.insert(tree.leaf_counts.end(), totals.begin(), totals.end());
                continue;
            }
            importance[static_cast<std::size_t>(split.feature)] += split.decrease;
            const auto& col = data_.cols[static_cast<std::size_t>(split.feature)];
            const auto mid = std::stable_partition(idx_.begin() + static_cast<std::ptrdiff_t>(fr.begin),
                                                   idx_.begin() + static_cast<std::ptrdiff_t>(fr.end),
                                                   [&](std::size_t i) { return col[i] <= split.threshold; });
            const std::size_t cut = static_cast<std::size_t>(mid - idx_.begin());
            const int left = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            const int right = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            TreeNode& node = tree.nodes[static_cast<std::size_t>(fr.node)];
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.left = left;
            node.right = right;
            stack.push_back({right, cut, fr.end, fr.depth + 1});
            stack.push_back({left, fr.begin, cut, fr.depth + 1});
        }
        return tree;
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double decrease = 0.0;
    };

    Split find_split(std::size_t begin, std::size_t end, int depth, const std::vector<double>& totals) {
        Split best;
        const std::size_t n = end - begin;
        const auto min_leaf = static_cast<std::size_t>(std::max(1, hp_.min_samples_leaf));
        std::size_t present = 0;
        double w_total = 0.0;
        double parent_term = 0.0;
        for (double t : totals) {
            present += t > 0.0 ? 1 : 0;
            w_total += t;
        }
        if (depth >= hp_.max_depth || n < static_cast<std::size_t>(hp_.min_samples_split) || n < 2 * min_leaf ||
            present <= 1 || !(w_total > 0.0)) {
            return best;
        }
        for (double t : totals) parent_term += t * t;
        parent_term /= w_total;

        std::array<int, kFeatureCount> order{};
        std::iota(order.begin(), order.end(), 0);
        double best_crit = 0.0;
        int visited = 0;
        std::vector<double> left(k_);
        for (std::size_t i = 0; i < kFeatureCount && visited < hp_.max_features; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_.below(kFeatureCount - i));
            std::swap(order[i], order[j]);
            const int f = order[i];
            const auto& col = data_.cols[static_cast<std::size_t>(f)];

            scratch_.clear();
            for (std::size_t p = begin; p < end; ++p) scratch_.emplace_back(col[idx_[p]], idx_[p]);
            const auto [lo, hi] = std::minmax_element(scratch_.begin(), scratch_.end(),
                                                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (!(lo->first < hi->first)) continue;  // constant here; does not count toward max_features
            ++visited;
            std::sort(scratch_.begin(), scratch_.end());

            std::fill(left.begin(), left.end(), 0.0);
            double w_left = 0.0;
            for (std::size_t p = 0; p + 1 < n; ++p) {
                const std::size_t i_row = scratch_[p].second;
                const double w = weights_[i_row];
                left[static_cast<std::size_t>(data_.labels[i_row])] += w;
                w_left += w;
                const double a = scratch_[p].first;
                const double b = scratch_[p + 1].first;
                if (!(a < b)) continue;
                const std::size_t n_left = p + 1;
                if (n_left < min_leaf || n - n_left < min_leaf) continue;
                const double w_right = w_total - w_left;
                if (!(w_left > 0.0) || !(w_right > 0.0)) continue;
                double sl = 0.0;
                double sr = 0.0;
                for (std::size_t c = 0; c < k_; ++c) {
                    const double r = totals[c] - left[c];
                    sl += left[c] * left[c];
                    sr += r * r;
                }
                const double crit = sl / w_left + sr / w_right;
                double thr = a + (b - a) * 0.5;
                if (!(thr < b)) thr = a;
                const bool better = best.feature < 0 || crit > best_crit ||
                                    (crit == best_crit && (f < best.feature || (f == best.feature && thr < best.threshold)));
                if (better) {
                    best_crit = crit;
                    best.feature = f;
                    best.threshold = thr;
                }
            }
        }
        if (best.feature < 0) return best;
        best.decrease = best_crit - parent_term;
        if (!(best.decrease > 1e-12 * w_total)) return Split{};
        return best;
    }

    const TrainingView& data_;
    const ForestParams& hp_;
    std::size_t k_;
    Rng rng_;
    std::vector<double> weights_;
    std::vector<std::size_t> idx_;
    std::vector<std::pair<double, std::size_t>> scratch_;
};

}  // namespace

ForestModel train_random_forest(const LabeledDataset& ds, const ForestParams& hp, std::uint64_t seed,
                                unsigned threads) {
    if (ds.size() == 0) throw DataError("cannot train on an empty dataset");
    if (hp.n_trees < 1 || hp.max_depth < 1 || hp.min_samples_split < 2 || hp.min_samples_leaf < 1 ||
        hp.max_features < 1 || hp.max_features > static_cast<int>(kFeatureCount)) {
        throw ValidationError("invalid random forest hyperparameters");
    }
    TrainingView view;
    view.num_classes = ds.num_classes();
    view.labels = ds.labels;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        view.cols[f].resize(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) view.cols[f][i] = ds.rows[i][f];
    }

    ForestModel model;
    model.mode_set = ds.mode_set;
    model.feature_order.assign(kFeatureNames.begin(), kFeatureNames.end());
    model.scale = Standardization::fit(ds.rows);
    model.params = hp;
    model.seed = seed;
    model.trees.resize(static_cast<std::size_t>(hp.n_trees));
    std::vector<FeatureVector> tree_importance(model.trees.size());

    parallel_for(model.trees.size(), threads, [&](std::size_t t) {
        TreeBuilder builder(view, hp, derive_seed(seed, t));
        model.trees[t] = builder.build(tree_importance[t]);
    });

    FeatureVector total{};
    for (auto& imp : tree_importance) {
        double s = 0.0;
        for (double v : imp) s += v;
        if (!(s > 0.0)) continue;
        for (std::size_t f = 0; f < kFeatureCount; ++f) total[f] += imp[f] / s;
    }
    double s = 0.0;
    for (double v : total) s += v;
    if (s > 0.0) {
        for (auto& v : total) v /= s;
    }
    model.importance = total;
    return model;
}

Prediction predict(const ForestModel& m, const FeatureVector& fv) {
    if (m.feature_order.size() != kFeatureCount ||
        !std::equal(m.feature_order.begin(), m.feature_order.end(), kFeatureNames.begin())) {
        throw ValidationError("model feature order does not match this build's feature vector");
    }
    const auto k = static_cast<std::size_t>(m.num_classes());
    Prediction out;
    out.proba.assign(k, 0.0);
    std::vector<double> share(k);
    for (const auto& tree : m.trees) {
        std::size_t node = 0;
        while (tree.nodes[node].feature >= 0) {
            const auto& nd = tree.nodes[node];
            node = static_cast<std::size_t>(fv[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                                                        : nd.right);
        }
        const double* counts = tree.leaf_counts.data() + tree.nodes[node].leaf;
        double sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) sum += counts[c];
        if (!(sum > 0.0)) continue;
        for (std::size_t c = 0; c < k; ++c) out.proba[c] += counts[c] / sum;
    }
    double total = 0.0;
    for (double p : out.proba) total += p;
    if (total > 0.0) {
        for (auto& p : out.proba) p /= total;
    }
    out.label = static_cast<int>(std::max_element(out.proba.begin(), out.proba.end()) - out.proba.begin());
    return out;
}

std::vector<std::pair<std::string, double>> feature_importance(const ForestModel& m) {
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const std::string name = f < m.feature_order.size() ? m.feature_order[f] : std::string(kFeatureNames[f]);
        out.emplace_back(name, m.importance[f]);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

}  // namespace tripmode
