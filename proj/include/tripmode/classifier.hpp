#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tripmode/features.hpp"
#include "tripmode/modes.hpp"

namespace tripmode {

struct LabeledDataset {
    ModeSet mode_set = ModeSet::five;
    std::vector<FeatureVector> rows;
    std::vector<int> labels;  ///< index into modes_of(mode_set)

    std::size_t size() const { return rows.size(); }
    int num_classes() const { return static_cast<int>(modes_of(mode_set).size()); }
    std::vector<std::size_t> class_counts() const;
    LabeledDataset subset(std::span<const std::size_t> idx) const;
};

/// Builds a dataset from labeled feature rows, collapsing modes into the set.
/// Throws DataError on an unknown or out-of-set label.
LabeledDataset make_dataset(std::span<const FeatureRow> rows, ModeSet mode_set);

/// Per-feature mean and population standard deviation (zero spread maps to 1).
struct Standardization {
    FeatureVector mean{};
    FeatureVector std{};

    static Standardization fit(std::span<const FeatureVector> rows);
    FeatureVector apply(const FeatureVector& x) const;
};

// ---------------------------------------------------------------- SMOTE

struct SmoteOrigin {
    std::size_t base = 0;      ///< row index the synthetic sample grew from
    std::size_t neighbor = 0;  ///< same-class neighbor it moved toward
    double u = 0.0;            ///< interpolation weight in [0, 1)
};

struct SmoteResult {
    LabeledDataset data;               ///< originals first, then synthetic rows
    std::vector<SmoteOrigin> origins;  ///< one per synthetic row, in order
    Standardization scale;             ///< neighbor-search space
    std::vector<std::string> warnings;
};

/// Oversamples every class up to the majority count. Synthetic rows are
/// x + u (nn - x) with nn drawn from x's k nearest same-class neighbors
/// (Euclidean over standardized features). `scale` defaults to a fit on `ds`.
SmoteResult smote_resample(const LabeledDataset& ds, int k, std::uint64_t seed,
                           const Standardization* scale = nullptr);

// --------------------------------------------------------- random forest

enum class ClassWeight { none, balanced_subsample };

struct ForestParams {
    int n_trees = 800;
    int max_depth = 60;
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    int max_features = 4;
    bool bootstrap = false;
    ClassWeight class_weight = ClassWeight::balanced_subsample;

    static ForestParams five_mode();
    static ForestParams four_mode();
    static ForestParams preset(ModeSet s) { return s == ModeSet::four ? four_mode() : five_mode(); }
};

struct TreeNode {
    int feature = -1;  ///< -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf = -1;  ///< offset into Tree::leaf_counts (num_classes values)
};

struct Tree {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root
    std::vector<double> leaf_counts;
};

struct ForestModel {
    static constexpr int kFormatVersion = 1;

    ModeSet mode_set = ModeSet::five;
    std::vector<std::string> feature_order;
    Standardization scale;
    ForestParams params;
    std::uint64_t seed = 0;
    FeatureVector importance{};
    std::vector<Tree> trees;

    int num_classes() const { return static_cast<int>(modes_of(mode_set).size()); }
};

/// Trains with weighted Gini splits. Tree i draws from a stream derived from
/// (seed, i), so the model is identical for any thread count.
ForestModel train_random_forest(const LabeledDataset& ds, const ForestParams& hp, std::uint64_t seed,
                                unsigned threads = 1);

struct Prediction {
    int label = 0;
    std::vector<double> proba;
};

/// Mean of normalized leaf counts over trees; ties go to the lower class
/// index. Throws ValidationError if the model's feature order differs from
/// the one this build produces.
Prediction predict(const ForestModel& m, const FeatureVector& fv);

/// Normalized Gini importance per feature name, descending.
std::vector<std::pair<std::string, double>> feature_importance(const ForestModel& m);

std::string serialize_model(const ForestModel& m);
/// Throws SchemaError on a bad version or malformed structure.
ForestModel deserialize_model(std::string_view bytes);

// ------------------------------------------------------------ evaluation

struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified split; per class round(fraction * count) rows go to train.
TrainTestSplit split_train_test(const LabeledDataset& ds, double fraction, std::uint64_t seed);

/// Fold id per row. Each class is shuffled and dealt round-robin, continuing
/// the deal across classes, so per-class and overall fold sizes each differ
/// by at most one.
std::vector<int> stratified_folds(std::span<const int> labels, int num_classes, int folds, std::uint64_t seed,
                                  std::vector<std::string>* warnings = nullptr);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    bool undefined = false;  ///< some metric hit a zero denominator and was set to 0
};

struct EvalReport {
    int num_classes = 0;
    std::vector<std::vector<std::size_t>> confusion;  ///< [truth][predicted]
    std::vector<ClassMetrics> per_class;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<double> fold_accuracies;
    double mean_fold_accuracy = 0.0;
    std::vector<std::string> warnings;
    std::size_t samples() const;
};

EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth, int num_classes);
/// Metrics from an existing confusion matrix.
EvalReport evaluate_confusion(std::vector<std::vector<std::size_t>> confusion);

struct CvOptions {
    int folds = 10;
    int smote_k = 5;
    unsigned threads = 1;
    /// Sees each fold's SMOTE-augmented training set and validation row ids.
    std::function<void(int fold, const LabeledDataset& train, std::span<const std::size_t> validation)> observer;
};

/// Stratified k-fold CV; SMOTE is fit on each training fold only.
EvalReport cross_validate(const LabeledDataset& ds, const ForestParams& hp, std::uint64_t seed,
                          const CvOptions& opt = {});

// ------------------------------------------------------------------- KNN

/// Distance-weighted k-nearest-neighbor baseline, Manhattan distance over
/// standardized features.
class KnnIndex {
public:
    KnnIndex(const LabeledDataset& train, const Standardization& scale);
    int predict(const FeatureVector& fv, int k) const;

private:
    Standardization scale_;
    int num_classes_;
    std::vector<int> labels_;
    std::vector<std::vector<double>> cols_;
    std::vector<const double*> col_ptrs_;
};

int knn_predict(const LabeledDataset& train, const FeatureVector& fv, int k);

}  // namespace tripmode
