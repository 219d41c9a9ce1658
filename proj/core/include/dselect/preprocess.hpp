#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dselect/csv.hpp"
#include "dselect/dataset.hpp"

namespace dselect {

struct PreprocessConfig {
    std::string targetColumn = "loan_status";
    std::string positiveStatus = "Charged Off";
    std::string negativeStatus = "Fully Paid";
    double missingDropThreshold = 0.5;  // drop columns with MORE than this fraction missing
    // Columns to exclude from features entirely (e.g. the date column).
    std::vector<std::string> ignoreColumns;
    // Force-categorical columns; anything else is inferred from cell contents.
    std::vector<std::string> categoricalColumns;
};

struct PreprocessWarning {
    std::string column;
    std::string message;
};

// Fitted preprocessing state: which columns survived, per-column kind,
// imputation means, min/max scaling ranges and one-hot category tables.
// Fitting on the training rows and applying to the test rows keeps scaling
// statistics free of test-set leakage.
struct PreprocessModel {
    struct ContinuousColumn {
        std::string name;
        int sourceIndex;       // column in the RawTable; -1 for derived columns
        double mean;           // imputation value
        double min;
        double max;
    };
    struct CategoricalColumn {
        std::string name;
        int sourceIndex;
        std::vector<std::string> categories;  // includes "MISSING" when observed
    };
    PreprocessConfig config;
    std::vector<ContinuousColumn> continuous;
    std::vector<CategoricalColumn> categorical;
    std::vector<std::string> droppedColumns;
    std::vector<PreprocessWarning> warnings;
    bool hasAverageFico = false;
    int ficoLowIndex = -1;
    int ficoHighIndex = -1;

    std::vector<std::string> featureNames() const;
    DatasetMeta meta() const;
};

PreprocessModel fitPreprocess(const RawTable& raw, const PreprocessConfig& config);
Dataset applyPreprocess(const PreprocessModel& model, const RawTable& raw);
// Fit-and-apply on the same table.
Dataset preprocess(const RawTable& raw, const PreprocessConfig& config,
                   PreprocessModel* modelOut = nullptr);

// Calendar date parsed from "YYYY-MM-DD" or Lending-Club style "Mon-YYYY"
// (day defaults to 1). Comparable by value.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;
    auto operator<=>(const Date&) const = default;
};
Date parseDate(const std::string& text);

// Rows dated <= boundary go to train, the rest to test. Errors when either
// side ends up empty.
std::pair<Dataset, Dataset> temporalSplit(const Dataset& ds, const std::vector<Date>& dates,
                                          const Date& boundary);

struct SplitSpec {
    double dselFraction = 0.25;
    std::uint64_t seed = 0;
    bool stratified = true;
};

// Splits train rows into (pool-train, dsel). The dsel side receives
// round(fraction * n) rows; when stratified, per-class quotas are assigned by
// largest remainder so class proportions are preserved within one sample.
std::pair<Dataset, Dataset> dselSplit(const Dataset& train, const SplitSpec& spec);

// Keeps every minority sample and uniformly subsamples the majority class to
// round(ratio * minority) without replacement. A ratio within 0.1% of the
// current majority/minority ratio keeps the majority class whole (ratios are
// quoted to finite precision); anything further above errors, since that
// would require oversampling.
Dataset undersampleToRatio(const Dataset& train, double ratio, std::uint64_t seed);

// Two spherical Gaussian clouds (class 0 then class 1) with means separated
// by `separation` along a seeded random unit direction, min-max scaled to
// [0,1] per column.
Dataset synthGenerate(std::size_t negativeCount, std::size_t positiveCount, std::size_t dims,
                      double separation, std::uint64_t seed);

// Seeded stratified row split: (kept, held-out) with the held-out side
// receiving round(fraction * n) rows. Used for the synthetic train/test split.
std::pair<Dataset, Dataset> stratifiedHoldout(const Dataset& ds, double fraction,
                                              std::uint64_t seed);

}  // namespace dselect
