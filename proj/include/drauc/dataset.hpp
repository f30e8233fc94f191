#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace drauc {

/// Feature matrix (N rows, d columns) with {+1, -1} labels.
/// Immutable by convention once built; every operation below returns a
/// fresh dataset instead of mutating its input.
struct LabeledDataset {
    Eigen::MatrixXd features;                 // N x d
    Eigen::VectorXi labels;                   // entries are +1 or -1
    std::vector<std::string> feature_names;   // empty, or exactly d names

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index cols() const { return features.cols(); }

    Eigen::Index positive_count() const;
    Eigen::Index negative_count() const;
    std::vector<Eigen::Index> positive_indices() const;
    std::vector<Eigen::Index> negative_indices() const;

    /// Rows selected by index, in the given order.
    LabeledDataset subset(const std::vector<Eigen::Index>& indices) const;

    /// Throws DataError unless every entry is finite, every label is +1 or
    /// -1, and N >= 1, d >= 1.
    void validate() const;
};

/// Per-feature affine transform x -> (x - shift) / scale with scale > 0.
struct Scaler {
    Eigen::VectorXd shift;
    Eigen::VectorXd scale;

    LabeledDataset transform(const LabeledDataset& ds) const;
    LabeledDataset inverse(const LabeledDataset& ds) const;
    Eigen::VectorXd transform_row(const Eigen::VectorXd& x) const;
};

/// Split parameters shared by the sampling and cross-validation paths.
struct SplitSpec {
    std::uint64_t seed = 0;
    int train_size = 60;
    int k_folds = 5;

    /// Checks these split parameters against a concrete dataset
    /// (train_size and k_folds must not exceed its row count, k_folds >= 2,
    /// train_size >= 1).
    void validate(const LabeledDataset& ds) const;
};

/// Reads a comma-separated file with a header row. The column named
/// label_column supplies labels (+1 where the cell equals positive_label,
/// -1 otherwise); every other column is parsed as a real feature, in
/// header order. Row order is preserved.
///
/// Throws DataError on: missing file, missing label column, a non-numeric
/// or empty feature cell (the message names the data row and the column),
/// or zero data rows.
LabeledDataset load_csv(const std::string& path,
                        const std::string& label_column,
                        const std::string& positive_label);

/// Shift = per-feature mean, scale = per-feature population standard
/// deviation (divide by N), with zero deviations replaced by 1 so constant
/// columns pass through unscaled.
Scaler fit_standardizer(const LabeledDataset& train);

LabeledDataset apply_standardizer(const Scaler& scaler, const LabeledDataset& ds);

/// Draws `train_size` points preserving class proportions: per-class
/// targets are round-half-away-from-zero of train_size * class fraction,
/// the larger class absorbs the rounding remainder, and each class keeps
/// at least one point. Selection within a class is uniform from Rng(seed)
/// (positive class drawn first). Returned index sets are sorted, disjoint,
/// and cover the dataset.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>
stratified_sample_indices(const LabeledDataset& ds, int train_size, std::uint64_t seed);

std::pair<LabeledDataset, LabeledDataset>
stratified_sample(const LabeledDataset& ds, int train_size, std::uint64_t seed);

/// Stratified k-fold partition: each class is shuffled with Rng(seed) and
/// dealt into k chunks whose sizes differ by at most one; the oversized
/// chunks rotate across folds so total fold sizes also differ by at most
/// one. Returns per-fold validation index sets (sorted).
std::vector<std::vector<Eigen::Index>>
k_fold_indices(const LabeledDataset& ds, int k, std::uint64_t seed);

/// (train, validation) datasets for each of the k folds.
std::vector<std::pair<LabeledDataset, LabeledDataset>>
k_fold_split(const LabeledDataset& ds, int k, std::uint64_t seed);

} // namespace drauc
