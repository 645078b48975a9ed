#include <algorithm>
#include <cmath>
#include <numeric>

#include "tripmode/classifier.hpp"
#include "tripmode/error.hpp"
#include "tripmode/rng.hpp"

namespace tripmode {

TrainTestSplit split_train_test(const LabeledDataset& ds, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("train fraction must lie in (0, 1)");
    const auto k = static_cast<std::size_t>(ds.num_classes());
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < ds.size(); ++i) by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    TrainTestSplit out;
    for (std::size_t c = 0; c < k; ++c) {
        auto& rows = by_class[c];
        if (rows.empty()) continue;
        if (rows.size() < 2) {
            throw DataError("class '" + std::string(mode_name(modes_of(ds.mode_set)[c])) +
                            "' has fewer than 2 samples; cannot split");
        }
        Rng rng(derive_seed(seed, c));
        rng.shuffle(rows.begin(), rows.end());
        auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, rows.size() - 1);
        out.train.insert(out.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test.insert(out.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::vector<int> stratified_folds(std::span<const int> labels, int num_classes, int folds, std::uint64_t seed,
                                  std::vector<std::string>* warnings) {
    if (folds < 2) throw ValidationError("need at least 2 folds");
    if (labels.size() < static_cast<std::size_t>(folds)) {
        throw DataError("fewer samples (" + std::to_string(labels.size()) + ") than folds (" +
                        std::to_string(folds) + ")");
    }
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    std::vector<int> fold(labels.size(), 0);
    std::size_t deal = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& rows = by_class[c];
        if (rows.empty()) continue;
        if (rows.size() < static_cast<std::size_t>(folds) && warnings) {
            warnings->push_back("class " + std::to_string(c) + " has " + std::to_string(rows.size()) +
                                " samples, fewer than " + std::to_string(folds) + " folds");
        }
        Rng rng(derive_seed(seed, c));
        rng.shuffle(rows.begin(), rows.end());
        for (std::size_t i : rows) fold[i] = static_cast<int>(deal++ % static_cast<std::size_t>(folds));
    }
    return fold;
}

std::size_t EvalReport::samples() const {
    std::size_t n = 0;
    for (const auto& row : confusion) n = std::accumulate(row.begin(), row.end(), n);
    return n;
}

EvalReport evaluate_confusion(std::vector<std::vector<std::size_t>> confusion) {
    EvalReport r;
    r.num_classes = static_cast<int>(confusion.size());
    r.confusion = std::move(confusion);
    const auto k = r.confusion.size();
    std::size_t correct = 0;
    std::size_t total = 0;
    r.per_class.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t tp = r.confusion[c][c];
        std::size_t row = 0;
        std::size_t col = 0;
        for (std::size_t j = 0; j < k; ++j) {
            row += r.confusion[c][j];
            col += r.confusion[j][c];
        }
        correct += tp;
        total += row;
        auto& m = r.per_class[c];
        m.support = row;
        if (col > 0) {
            m.precision = static_cast<double>(tp) / static_cast<double>(col);
        } else {
            m.undefined = true;
        }
        if (row > 0) {
            m.recall = static_cast<double>(tp) / static_cast<double>(row);
        } else {
            m.undefined = true;
        }
        if (m.precision + m.recall > 0.0) {
            m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        } else {
            m.undefined = true;
        }
    }
    r.accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
    double f1 = 0.0;
    for (const auto& m : r.per_class) f1 += m.f1;
    r.macro_f1 = k > 0 ? f1 / static_cast<double>(k) : 0.0;
    return r;
}

EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth, int num_classes) {
    if (predicted.size() != truth.size()) throw ValidationError("prediction and truth lengths differ");
    const auto k = static_cast<std::size_t>(num_classes);
    std::vector<std::vector<std::size_t>> confusion(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= num_classes || predicted[i] < 0 || predicted[i] >= num_classes) {
            throw ValidationError("class index out of range");
        }
        ++confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
    }
    return evaluate_confusion(std::move(confusion));
}

EvalReport cross_validate(const LabeledDataset& ds, const ForestParams& hp, std::uint64_t seed,
                          const CvOptions& opt) {
    std::vector<std::string> warnings;
    const auto fold = stratified_folds(ds.labels, ds.num_classes(), opt.folds, derive_seed(seed, 0xf01d), &warnings);
    const auto k = static_cast<std::size_t>(ds.num_classes());
    std::vector<std::vector<std::size_t>> confusion(k, std::vector<std::size_t>(k, 0));
    std::vector<double> fold_acc;
    for (int f = 0; f < opt.folds; ++f) {
        std::vector<std::size_t> train_idx;
        std::vector<std::size_t> val_idx;
        for (std::size_t i = 0; i < ds.size(); ++i) (fold[i] == f ? val_idx : train_idx).push_back(i);
        const auto train = ds.subset(train_idx);
        const auto fseed = derive_seed(seed, 1000 + static_cast<std::uint64_t>(f));
        auto sm = smote_resample(train, opt.smote_k, derive_seed(fseed, 1));
        for (auto& w : sm.warnings) warnings.push_back("fold " + std::to_string(f) + ": " + w);
        if (opt.observer) opt.observer(f, sm.data, val_idx);
        const auto model = train_random_forest(sm.data, hp, derive_seed(fseed, 2), opt.threads);
        std::size_t correct = 0;
        for (std::size_t i : val_idx) {
            const int p = predict(model, ds.rows[i]).label;
            ++confusion[static_cast<std::size_t>(ds.labels[i])][static_cast<std::size_t>(p)];
            correct += p == ds.labels[i] ? 1 : 0;
        }
        fold_acc.push_back(val_idx.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(val_idx.size()));
    }
    auto report = evaluate_confusion(std::move(confusion));
    report.fold_accuracies = fold_acc;
    double s = 0.0;
    for (double a : fold_acc) s += a;
    report.mean_fold_accuracy = fold_acc.empty() ? 0.0 : s / static_cast<double>(fold_acc.size());
    report.warnings = std::move(warnings);
    return report;
}

}  // namespace tripmode
