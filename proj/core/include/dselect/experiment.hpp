#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dselect/dataset.hpp"
#include "dselect/learners.hpp"
#include "dselect/pool.hpp"
#include "dselect/techniques.hpp"

namespace dselect {

// Report row labels, in emission order.
const std::vector<std::string>& metricNames();

struct PoolSpec {
    std::string name;
    std::string kind;  // gnb | knn | tree | mlp | rf | hetero
    std::size_t members = 20;
    int featuresPerSplit = 0;  // rf only; <=0 means floor(sqrt(d))
    LearnerConfig learner{};
    // hetero only; empty means an equal split over gnb/knn/tree/mlp.
    std::vector<std::pair<std::string, std::size_t>> composition;
};

struct SyntheticSpec {
    std::size_t negatives = 5535;
    std::size_t positives = 955;
    std::size_t dims = 8;
    double separation = 1.5;
    double testFraction = 0.24;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::string outDir = "out";
    int threads = 1;
    std::optional<SyntheticSpec> synthetic;
    std::string preparedTrain;  // paths to prepared dataset CSVs
    std::string preparedTest;
    std::vector<PoolSpec> pools;
    std::vector<Technique> techniques = allTechniques();
    std::vector<double> ratios = {1, 2, 3, 4, 5, 5.8};
    double dselFraction = 0.25;
    DsConfig ds{};
    double hmeasureBetaA = 2.0;
    double hmeasureBetaB = 2.0;
};

ExperimentConfig loadExperimentConfig(const std::string& jsonPath);
ExperimentConfig parseExperimentConfig(const std::string& jsonText);

// Builds a pool per its spec: bagging for learner kinds, a random forest
// (features per split defaulting to floor(sqrt(d))), or a heterogeneous pool
// (equal split over the four learners unless a composition is given).
Pool fitPoolFromSpec(const PoolSpec& spec, const Dataset& train, std::uint64_t seed);

struct EvaluationReport {
    std::vector<std::string> poolNames;
    std::vector<std::string> columns;  // "pool" baseline + technique tags
    std::vector<double> ratios;
    // metrics[pool][ratio][column] -> metric name -> value; nullopt = failed cell
    std::vector<std::vector<std::vector<std::optional<std::map<std::string, double>>>>> cells;

    struct Failure {
        std::string pool;
        double ratio = 0.0;
        std::string column;  // empty when the whole (pool, ratio) job failed
        std::string message;
    };
    std::vector<Failure> failures;

    std::uint64_t masterSeed = 0;
    std::string configHash;
    std::string timestamp;
    double hmeasureBetaA = 2.0;  // severity distribution used for H_measure
    double hmeasureBetaB = 2.0;

    std::optional<double> value(const std::string& pool, const std::string& column, double ratio,
                                const std::string& metric) const;
    int poolIndex(const std::string& pool) const;
    int columnIndex(const std::string& column) const;
    int ratioIndex(double ratio) const;
};

// Runs the full (pool x technique x ratio) grid: per ratio the training set is
// under-sampled and split into pool-train/DSEL, pools are fitted, and every
// technique plus the static-pool baseline is scored on the untouched test set
// with all six metrics. Cells are independent jobs; per-cell seeds derive
// from the master seed by fixed stream ids, so any thread count produces the
// same report.
EvaluationReport runExperiment(const ExperimentConfig& config);
EvaluationReport runExperimentOn(const ExperimentConfig& config, const Dataset& train,
                                 const Dataset& test);

// Resolves the config's data source into (train, test).
std::pair<Dataset, Dataset> resolveData(const ExperimentConfig& config);

struct RankedEntry {
    std::string tag;  // "<pool>_<column>"
    double f1 = 0.0;
    int rank = 0;
};
// All (pool, column) entries at one ratio ordered by descending F1; tied
// entries share the better rank and the count continues after them.
std::vector<RankedEntry> rankByF1(const EvaluationReport& report, double ratio);

// Per metric, the mean of the 3 most favorable DS-technique values in the
// (pool, ratio) cell: max for every metric except Brier, where min.
std::map<std::string, double> top3Average(const EvaluationReport& report, const std::string& pool,
                                          double ratio);

enum class ReportFormat { Csv, Markdown };
// One table per pool (rows = ratio x metric, columns = baseline + techniques)
// plus a rankings table and a top-3 summary. Values print with 4 decimals;
// output is byte-stable for identical reports. Returns the written paths.
std::vector<std::string> emitReport(const EvaluationReport& report, ReportFormat format,
                                    const std::string& outDir);

void saveReport(const EvaluationReport& report, const std::string& path);
EvaluationReport loadReport(const std::string& path);

}  // namespace dselect
