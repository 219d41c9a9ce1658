// Command-line front end: prepare datasets, train pools, run sweeps and emit
// report tables. Exit codes: 0 success, 1 configuration/usage error, 2 sweep
// finished with recorded cell failures.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dselect/csv.hpp"
#include "dselect/dataset.hpp"
#include "dselect/errors.hpp"
#include "dselect/experiment.hpp"
#include "dselect/pool.hpp"
#include "dselect/preprocess.hpp"
#include "dselect/rng.hpp"
#include "dselect/techniques.hpp"

namespace fs = std::filesystem;
using namespace dselect;

namespace {

nlohmann::json loadJson(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    return j;
}

std::vector<std::string> splitList(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

ReportFormat parseFormat(const std::string& format) {
    if (format == "csv") return ReportFormat::Csv;
    if (format == "markdown") return ReportFormat::Markdown;
    throw SchemaError("format must be csv or markdown, got '" + format + "'");
}

struct PrepareOptions {
    std::string configPath;
    std::string outDir;
    std::uint64_t seed = 0;
    bool seedSet = false;
};

int runPrepare(const PrepareOptions& options) {
    const nlohmann::json j = loadJson(options.configPath);
    const std::string outDir =
        !options.outDir.empty() ? options.outDir : j.value("out", std::string("out/prepared"));
    const std::uint64_t seed = options.seedSet ? options.seed : j.value("seed", 0ULL);
    fs::create_directories(outDir);

    Dataset train, test;
    DatasetMeta meta;
    meta.dselFraction = j.value("dsel_fraction", 0.25);
    if (j.contains("synthetic")) {
        const auto& s = j["synthetic"];
        Dataset full = synthGenerate(s.value("negatives", 5535U), s.value("positives", 955U),
                                     s.value("dims", 8U), s.value("separation", 1.5),
                                     deriveSeed(seed, {5}));
        std::tie(train, test) =
            stratifiedHoldout(full, s.value("test_fraction", 0.24), deriveSeed(seed, {6}));
        meta.featureNames = train.featureNames();
        meta.positiveLabel = "1";
        meta.negativeLabel = "0";
    } else {
        const std::string csvPath = j.value("csv", std::string());
        if (csvPath.empty()) throw SchemaError("prepare config needs 'csv' or 'synthetic'");
        PreprocessConfig config;
        config.targetColumn = j.value("target_column", config.targetColumn);
        config.positiveStatus = j.value("positive_status", config.positiveStatus);
        config.negativeStatus = j.value("negative_status", config.negativeStatus);
        config.missingDropThreshold = j.value("missing_drop_threshold", config.missingDropThreshold);
        if (j.contains("ignore_columns")) {
            config.ignoreColumns = j["ignore_columns"].get<std::vector<std::string>>();
        }
        if (j.contains("categorical_columns")) {
            config.categoricalColumns = j["categorical_columns"].get<std::vector<std::string>>();
        }
        const std::string dateColumn = j.value("date_column", std::string("issue_d"));
        const std::string boundaryText = j.value("boundary_date", std::string("2015-12-31"));
        config.ignoreColumns.push_back(dateColumn);

        RawTable raw = loadCsv(csvPath, {config.targetColumn, dateColumn});
        if (j.contains("missing_tokens")) {
            for (const auto& token : j["missing_tokens"]) {
                raw.missingTokens.insert(token.get<std::string>());
            }
        }
        const Date boundary = parseDate(boundaryText);
        const auto dateIdx = static_cast<std::size_t>(raw.columnIndex(dateColumn));

        RawTable trainRaw, testRaw;
        trainRaw.columnNames = testRaw.columnNames = raw.columnNames;
        trainRaw.missingTokens = testRaw.missingTokens = raw.missingTokens;
        for (auto& row : raw.rows) {
            (parseDate(row[dateIdx]) <= boundary ? trainRaw : testRaw).rows.push_back(std::move(row));
        }
        if (trainRaw.rows.empty()) throw ValueError("prepare: train partition is empty");
        if (testRaw.rows.empty()) throw ValueError("prepare: test partition is empty");

        // Scaling and imputation statistics come from the training rows only.
        PreprocessModel model = fitPreprocess(trainRaw, config);
        train = applyPreprocess(model, trainRaw);
        test = applyPreprocess(model, testRaw);
        meta = model.meta();
        for (const auto& warning : model.warnings) {
            std::cerr << "warning: column " << warning.column << ": " << warning.message << '\n';
        }
    }

    const std::string trainPath = (fs::path(outDir) / "train.csv").string();
    const std::string testPath = (fs::path(outDir) / "test.csv").string();
    saveDataset(train, meta, trainPath);
    saveDataset(test, meta, testPath);
    std::cout << "train: " << trainPath << " (" << train.rowCount() << " rows, "
              << train.featureCount() << " features)\n"
              << "test:  " << testPath << " (" << test.rowCount() << " rows)\n";
    return 0;
}

struct TrainOptions {
    std::string configPath;
    std::string outDir;
    std::uint64_t seed = 0;
    bool seedSet = false;
};

int runTrain(const TrainOptions& options) {
    const nlohmann::json j = loadJson(options.configPath);
    const std::string trainPath = j.value("train", std::string());
    if (trainPath.empty()) throw SchemaError("train config needs 'train' dataset path");
    const std::string outDir =
        !options.outDir.empty() ? options.outDir : j.value("out", std::string("out/models"));
    const std::uint64_t seed = options.seedSet ? options.seed : j.value("seed", 0ULL);
    fs::create_directories(outDir);

    // Reuse the sweep config parser for the pool specifications.
    nlohmann::json sweepLike;
    sweepLike["pools"] = j.at("pools");
    sweepLike["seed"] = seed;
    if (j.contains("learners")) sweepLike["learners"] = j["learners"];
    const ExperimentConfig parsed = parseExperimentConfig(sweepLike.dump());

    DatasetMeta trainMeta;
    Dataset train = loadDataset(trainPath, &trainMeta);
    SplitSpec split;
    split.dselFraction = j.value("dsel_fraction", trainMeta.dselFraction);
    split.seed = deriveSeed(seed, {2});
    auto [poolTrain, dsel] = dselSplit(train, split);

    DatasetMeta meta;
    meta.featureNames = train.featureNames();
    saveDataset(poolTrain, meta, (fs::path(outDir) / "pool_train.csv").string());
    saveDataset(dsel, meta, (fs::path(outDir) / "dsel.csv").string());

    for (std::size_t p = 0; p < parsed.pools.size(); ++p) {
        const auto& spec = parsed.pools[p];
        const Pool pool = fitPoolFromSpec(spec, poolTrain, deriveSeed(seed, {3, p}));
        const std::string path = (fs::path(outDir) / (spec.name + ".pool.json")).string();
        savePoolFile(pool, path);
        std::cout << "pool " << spec.name << ": " << pool.size() << " members -> " << path << '\n';
    }
    return 0;
}

struct SweepOptions {
    std::string configPath;
    std::string outDir;
    std::string ratios;
    std::string techniques;
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seedSet = false;
    int threads = 0;
};

int runSweep(const SweepOptions& options) {
    ExperimentConfig config = loadExperimentConfig(options.configPath);
    if (options.seedSet) config.seed = options.seed;
    if (!options.outDir.empty()) config.outDir = options.outDir;
    if (options.threads > 0) config.threads = options.threads;
    if (!options.ratios.empty()) {
        config.ratios.clear();
        for (const auto& item : splitList(options.ratios)) config.ratios.push_back(std::stod(item));
    }
    if (!options.techniques.empty()) {
        config.techniques.clear();
        for (const auto& item : splitList(options.techniques)) {
            config.techniques.push_back(techniqueFromTag(item));
        }
    }
    const ReportFormat format = parseFormat(options.format);

    const EvaluationReport report = runExperiment(config);
    fs::create_directories(config.outDir);
    const std::string reportPath = (fs::path(config.outDir) / "report.json").string();
    saveReport(report, reportPath);
    const auto written = emitReport(report, format, config.outDir);
    std::cout << "report: " << reportPath << '\n';
    for (const auto& path : written) std::cout << "table:  " << path << '\n';
    if (!report.failures.empty()) {
        std::cerr << report.failures.size() << " cell(s) failed:\n";
        for (const auto& f : report.failures) {
            std::cerr << "  " << f.pool << " ir=" << f.ratio
                      << (f.column.empty() ? "" : " column=" + f.column) << ": " << f.message
                      << '\n';
        }
        return 2;
    }
    return 0;
}

struct ReportOptions {
    std::string reportPath;
    std::string outDir = "out/tables";
    std::string format = "csv";
};

int runReport(const ReportOptions& options) {
    const EvaluationReport report = loadReport(options.reportPath);
    const auto written = emitReport(report, parseFormat(options.format), options.outDir);
    for (const auto& path : written) std::cout << "table: " << path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic-selection credit scoring toolkit"};
    app.require_subcommand(1);

    PrepareOptions prepare;
    auto* prepareCmd = app.add_subcommand("prepare", "Ingest, preprocess and split a dataset");
    prepareCmd->add_option("--config", prepare.configPath, "Prepare config JSON")->required();
    prepareCmd->add_option("--out", prepare.outDir, "Output directory");
    prepareCmd->add_option("--seed", prepare.seed, "Seed override")
        ->each([&](const std::string&) { prepare.seedSet = true; });

    TrainOptions train;
    auto* trainCmd = app.add_subcommand("train", "Fit classifier pools on a prepared dataset");
    trainCmd->add_option("--config", train.configPath, "Train config JSON")->required();
    trainCmd->add_option("--out", train.outDir, "Output directory");
    trainCmd->add_option("--seed", train.seed, "Seed override")
        ->each([&](const std::string&) { train.seedSet = true; });

    SweepOptions sweep;
    auto* sweepCmd = app.add_subcommand("sweep", "Run the full pool x technique x ratio grid");
    sweepCmd->add_option("--config", sweep.configPath, "Experiment config JSON")->required();
    sweepCmd->add_option("--out", sweep.outDir, "Output directory");
    sweepCmd->add_option("--ratios", sweep.ratios, "Comma-separated imbalance ratios");
    sweepCmd->add_option("--techniques", sweep.techniques, "Comma-separated technique tags");
    sweepCmd->add_option("--format", sweep.format, "Table format: csv or markdown");
    sweepCmd->add_option("--threads", sweep.threads, "Worker thread count");
    sweepCmd->add_option("--seed", sweep.seed, "Seed override")
        ->each([&](const std::string&) { sweep.seedSet = true; });

    ReportOptions reportOptions;
    auto* reportCmd = app.add_subcommand("report", "Emit tables from a stored report");
    reportCmd->add_option("--report", reportOptions.reportPath, "report.json path")->required();
    reportCmd->add_option("--out", reportOptions.outDir, "Output directory");
    reportCmd->add_option("--format", reportOptions.format, "Table format: csv or markdown");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage problems are config errors
    }

    try {
        if (prepareCmd->parsed()) return runPrepare(prepare);
        if (trainCmd->parsed()) return runTrain(train);
        if (sweepCmd->parsed()) return runSweep(sweep);
        if (reportCmd->parsed()) return runReport(reportOptions);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
