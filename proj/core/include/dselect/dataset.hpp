#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dselect {

// Numeric dataset after preprocessing: row-major feature matrix plus binary
// labels (1 = positive / charged-off, 0 = negative / fully paid).
class Dataset {
public:
    Dataset() = default;
    Dataset(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols, 0.0), labels_(rows, 0) {}

    std::size_t rowCount() const { return rows_; }
    std::size_t featureCount() const { return cols_; }
    std::size_t classCount() const { return 2; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols_, cols_};
    }
    std::span<double> mutableRow(std::size_t i) {
        return {values_.data() + i * cols_, cols_};
    }
    double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

    int label(std::size_t i) const { return labels_[i]; }
    int& label(std::size_t i) { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }

    const std::vector<std::string>& featureNames() const { return featureNames_; }
    void setFeatureNames(std::vector<std::string> names) { featureNames_ = std::move(names); }

    // New dataset holding the given rows, in the given order.
    Dataset select(const std::vector<std::size_t>& indices) const;

    // Class frequencies (index = label).
    std::vector<std::size_t> classCounts() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
    std::vector<int> labels_;
    std::vector<std::string> featureNames_;
};

// Per-column scaling statistics recorded by preprocessing so a dataset can be
// persisted and reloaded without losing the original value ranges. Also
// carries the dsel fraction the preparation config requested, so later
// training stages can default to it.
struct DatasetMeta {
    std::vector<std::string> featureNames;
    std::vector<double> scaleMin;  // empty when not applicable
    std::vector<double> scaleMax;
    std::string positiveLabel = "Charged Off";
    std::string negativeLabel = "Fully Paid";
    double dselFraction = 0.25;
};

// CSV with a trailing "label" column plus a JSON sidecar (path + ".meta.json")
// carrying feature names, per-column scaling ranges and the label map.
void saveDataset(const Dataset& ds, const DatasetMeta& meta, const std::string& csvPath);
Dataset loadDataset(const std::string& csvPath, DatasetMeta* metaOut = nullptr);

}  // namespace dselect
