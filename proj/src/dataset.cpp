#include "drauc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "drauc/errors.hpp"
#include "drauc/rng.hpp"

namespace drauc {

Eigen::Index LabeledDataset::positive_count() const {
    return (labels.array() == 1).count();
}

Eigen::Index LabeledDataset::negative_count() const {
    return (labels.array() == -1).count();
}

std::vector<Eigen::Index> LabeledDataset::positive_indices() const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        if (labels[i] == 1) out.push_back(i);
    return out;
}

std::vector<Eigen::Index> LabeledDataset::negative_indices() const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        if (labels[i] == -1) out.push_back(i);
    return out;
}

LabeledDataset LabeledDataset::subset(const std::vector<Eigen::Index>& indices) const {
    LabeledDataset out;
    out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
    out.labels.resize(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t r = 0; r < indices.size(); ++r) {
        out.features.row(static_cast<Eigen::Index>(r)) = features.row(indices[r]);
        out.labels[static_cast<Eigen::Index>(r)] = labels[indices[r]];
    }
    out.feature_names = feature_names;
    return out;
}

void LabeledDataset::validate() const {
    if (rows() < 1 || cols() < 1)
        throw DataError("dataset must have at least one row and one feature");
    if (labels.size() != rows())
        throw DataError("label count does not match row count");
    if (!features.allFinite())
        throw DataError("dataset contains non-finite feature values");
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        if (labels[i] != 1 && labels[i] != -1)
            throw DataError("labels must be +1 or -1");
    if (!feature_names.empty() &&
        static_cast<Eigen::Index>(feature_names.size()) != cols())
        throw DataError("feature name count does not match feature count");
}

void SplitSpec::validate(const LabeledDataset& ds) const {
    if (train_size < 1)
        throw DataError("train_size must be positive");
    if (static_cast<Eigen::Index>(train_size) > ds.rows())
        throw DataError("train_size " + std::to_string(train_size) +
                        " exceeds the dataset size " + std::to_string(ds.rows()));
    if (k_folds < 2) throw DataError("k_folds must be at least 2");
    if (static_cast<Eigen::Index>(k_folds) > ds.rows())
        throw DataError("k_folds exceeds the dataset size");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

} // namespace

LabeledDataset load_csv(const std::string& path,
                        const std::string& label_column,
                        const std::string& positive_label) {
    std::ifstream file(path);
    if (!file) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(file, line)) throw DataError("empty file: " + path);

    const std::vector<std::string> raw_header = split_line(line);
    std::vector<std::string> header;
    header.reserve(raw_header.size());
    for (const auto& h : raw_header) header.push_back(trim(h));

    Eigen::Index label_col = -1;
    std::vector<std::string> feature_names;
    std::vector<Eigen::Index> feature_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == label_column && label_col < 0) {
            label_col = static_cast<Eigen::Index>(c);
        } else {
            feature_names.push_back(header[c]);
            feature_cols.push_back(static_cast<Eigen::Index>(c));
        }
    }
    if (label_col < 0)
        throw DataError("label column \"" + label_column + "\" not found in header of " + path);
    if (feature_cols.empty())
        throw DataError("no feature columns in " + path);

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t row_number = 0;
    while (std::getline(file, line)) {
        if (trim(line).empty()) continue;
        ++row_number;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw DataError("row " + std::to_string(row_number) + " of " + path + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        }
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            const std::string cell = trim(cells[static_cast<std::size_t>(feature_cols[k])]);
            double v = 0.0;
            if (cell.empty() || !parse_double(cell, v)) {
                throw DataError("row " + std::to_string(row_number) + ", column \"" +
                                feature_names[k] + "\": cannot parse \"" + cell +
                                "\" as a finite number");
            }
            values.push_back(v);
        }
        const std::string label_cell = trim(cells[static_cast<std::size_t>(label_col)]);
        labels.push_back(label_cell == positive_label ? 1 : -1);
    }
    if (labels.empty()) throw DataError("no data rows in " + path);

    LabeledDataset ds;
    const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
    const Eigen::Index d = static_cast<Eigen::Index>(feature_cols.size());
    ds.features.resize(n, d);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            ds.features(r, c) = values[static_cast<std::size_t>(r * d + c)];
    ds.labels = Eigen::Map<Eigen::VectorXi>(labels.data(), n);
    ds.feature_names = std::move(feature_names);
    ds.validate();
    return ds;
}

Scaler fit_standardizer(const LabeledDataset& train) {
    train.validate();
    const Eigen::Index n = train.rows();
    Scaler s;
    s.shift = train.features.colwise().mean();
    Eigen::MatrixXd centered = train.features.rowwise() - s.shift.transpose();
    s.scale = (centered.array().square().colwise().sum() / static_cast<double>(n))
                  .sqrt()
                  .matrix()
                  .transpose();
    for (Eigen::Index c = 0; c < s.scale.size(); ++c)
        if (s.scale[c] == 0.0) s.scale[c] = 1.0;
    return s;
}

LabeledDataset Scaler::transform(const LabeledDataset& ds) const {
    if (ds.cols() != shift.size())
        throw DataError("scaler dimension " + std::to_string(shift.size()) +
                        " does not match dataset dimension " + std::to_string(ds.cols()));
    LabeledDataset out = ds;
    out.features = (ds.features.rowwise() - shift.transpose()).array().rowwise() /
                   scale.transpose().array();
    return out;
}

LabeledDataset Scaler::inverse(const LabeledDataset& ds) const {
    if (ds.cols() != shift.size())
        throw DataError("scaler dimension mismatch");
    LabeledDataset out = ds;
    out.features = (ds.features.array().rowwise() * scale.transpose().array()).matrix().rowwise() +
                   shift.transpose();
    return out;
}

Eigen::VectorXd Scaler::transform_row(const Eigen::VectorXd& x) const {
    if (x.size() != shift.size()) throw DataError("scaler dimension mismatch");
    return (x - shift).cwiseQuotient(scale);
}

LabeledDataset apply_standardizer(const Scaler& scaler, const LabeledDataset& ds) {
    return scaler.transform(ds);
}

namespace {

long round_half_away(double x) {
    return static_cast<long>(x >= 0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
}

std::vector<Eigen::Index> draw_without_replacement(const std::vector<Eigen::Index>& pool,
                                                   long count, Rng& rng) {
    std::vector<Eigen::Index> shuffled = pool;
    rng.shuffle(shuffled);
    shuffled.resize(static_cast<std::size_t>(count));
    return shuffled;
}

} // namespace

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>
stratified_sample_indices(const LabeledDataset& ds, int train_size, std::uint64_t seed) {
    ds.validate();
    const Eigen::Index n = ds.rows();
    if (train_size < 1 || train_size > n)
        throw DataError("train_size " + std::to_string(train_size) +
                        " out of range for dataset of " + std::to_string(n) + " rows");
    const std::vector<Eigen::Index> pos = ds.positive_indices();
    const std::vector<Eigen::Index> neg = ds.negative_indices();
    if (pos.empty() || neg.empty())
        throw DataError("stratified sampling requires at least one point of each class");
    if (train_size < 2)
        throw DataError("train_size must be at least 2 so each class keeps a point");

    const auto n_pos = static_cast<long>(pos.size());
    const auto n_neg = static_cast<long>(neg.size());
    long take_pos = round_half_away(static_cast<double>(train_size) * n_pos / n);
    long take_neg = round_half_away(static_cast<double>(train_size) * n_neg / n);
    // Rounding both classes can miss the total by one; the larger class
    // absorbs the difference, then counts are clamped to [1, class size].
    const long excess = take_pos + take_neg - train_size;
    if (excess != 0) {
        if (n_pos >= n_neg) take_pos -= excess; else take_neg -= excess;
    }
    if (take_pos < 1) { take_pos = 1; take_neg = train_size - 1; }
    if (take_neg < 1) { take_neg = 1; take_pos = train_size - 1; }
    if (take_pos > n_pos) { take_pos = n_pos; take_neg = train_size - n_pos; }
    if (take_neg > n_neg) { take_neg = n_neg; take_pos = train_size - n_neg; }
    if (take_pos < 1 || take_neg < 1 || take_pos > n_pos || take_neg > n_neg)
        throw DataError("cannot satisfy per-class counts for train_size " +
                        std::to_string(train_size));

    Rng rng(seed);
    std::vector<Eigen::Index> train = draw_without_replacement(pos, take_pos, rng);
    const std::vector<Eigen::Index> neg_take = draw_without_replacement(neg, take_neg, rng);
    train.insert(train.end(), neg_take.begin(), neg_take.end());
    std::sort(train.begin(), train.end());

    std::vector<char> in_train(static_cast<std::size_t>(n), 0);
    for (Eigen::Index idx : train) in_train[static_cast<std::size_t>(idx)] = 1;
    std::vector<Eigen::Index> rest;
    rest.reserve(static_cast<std::size_t>(n) - train.size());
    for (Eigen::Index i = 0; i < n; ++i)
        if (!in_train[static_cast<std::size_t>(i)]) rest.push_back(i);
    return {std::move(train), std::move(rest)};
}

std::pair<LabeledDataset, LabeledDataset>
stratified_sample(const LabeledDataset& ds, int train_size, std::uint64_t seed) {
    const auto [train_idx, rest_idx] = stratified_sample_indices(ds, train_size, seed);
    return {ds.subset(train_idx), ds.subset(rest_idx)};
}

std::vector<std::vector<Eigen::Index>>
k_fold_indices(const LabeledDataset& ds, int k, std::uint64_t seed) {
    ds.validate();
    if (k < 2) throw DataError("k_folds must be at least 2");
    if (static_cast<Eigen::Index>(k) > ds.rows())
        throw DataError("k_folds exceeds dataset size");

    std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
    Rng rng(seed);
    long carry = 0;
    for (const auto& cls : {ds.positive_indices(), ds.negative_indices()}) {
        if (static_cast<int>(cls.size()) < k)
            throw DataError("a class has fewer than k_folds points");
        std::vector<Eigen::Index> shuffled = cls;
        rng.shuffle(shuffled);
        const long base = static_cast<long>(cls.size()) / k;
        const long remainder = static_cast<long>(cls.size()) % k;
        // Chunk sizes are base or base+1; the +1 chunks start at fold
        // `carry` and rotate so fold totals stay within one of each other.
        std::size_t cursor = 0;
        for (long f = 0; f < k; ++f) {
            const long rotated = (f - carry % k + k) % k;
            const long size = base + (rotated < remainder ? 1 : 0);
            for (long t = 0; t < size; ++t)
                folds[static_cast<std::size_t>(f)].push_back(shuffled[cursor++]);
        }
        carry += remainder;
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

std::vector<std::pair<LabeledDataset, LabeledDataset>>
k_fold_split(const LabeledDataset& ds, int k, std::uint64_t seed) {
    const auto folds = k_fold_indices(ds, k, seed);
    std::vector<std::pair<LabeledDataset, LabeledDataset>> out;
    out.reserve(folds.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<char> in_fold(static_cast<std::size_t>(ds.rows()), 0);
        for (Eigen::Index idx : folds[f]) in_fold[static_cast<std::size_t>(idx)] = 1;
        std::vector<Eigen::Index> train_idx;
        train_idx.reserve(static_cast<std::size_t>(ds.rows()) - folds[f].size());
        for (Eigen::Index i = 0; i < ds.rows(); ++i)
            if (!in_fold[static_cast<std::size_t>(i)]) train_idx.push_back(i);
        out.emplace_back(ds.subset(train_idx), ds.subset(folds[f]));
    }
    return out;
}

} // namespace drauc
