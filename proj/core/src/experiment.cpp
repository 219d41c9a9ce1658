#include "dselect/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "dselect/errors.hpp"
#include "dselect/metrics.hpp"
#include "dselect/preprocess.hpp"
#include "dselect/rng.hpp"

#include <json.hpp>

namespace dselect {

const std::vector<std::string>& metricNames() {
    static const std::vector<std::string> names = {"Acc",       "AUC",        "F1",
                                                   "G-mean",    "H_measure",  "Brier score"};
    return names;
}

namespace {

LearnerConfig parseLearnerConfig(const nlohmann::json& j, LearnerConfig base = {}) {
    base.gnbVarianceFloorScale = j.value("gnb_variance_floor_scale", base.gnbVarianceFloorScale);
    base.knnNeighbors = j.value("knn_k", base.knnNeighbors);
    base.treeMaxDepth = j.value("tree_max_depth", base.treeMaxDepth);
    base.treeMinLeaf = j.value("tree_min_leaf", base.treeMinLeaf);
    base.treeFeaturesPerSplit = j.value("tree_features_per_split", base.treeFeaturesPerSplit);
    base.mlpHiddenUnits = j.value("mlp_hidden", base.mlpHiddenUnits);
    base.mlpLearningRate = j.value("mlp_learning_rate", base.mlpLearningRate);
    base.mlpEpochs = j.value("mlp_epochs", base.mlpEpochs);
    base.mlpBatchSize = j.value("mlp_batch", base.mlpBatchSize);
    return base;
}

std::string formatRatio(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", ratio);
    return buf;
}

std::string formatValue(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string canonicalConfigString(const ExperimentConfig& config) {
    std::ostringstream out;
    out << "seed=" << config.seed << ";dsel=" << config.dselFraction
        << ";k=" << config.ds.regionSize << ";gap=" << config.ds.selectionGap
        << ";zeta=" << config.ds.mcbSimilarityThreshold
        << ";clusters=" << config.ds.clusterCount << ";hc=" << config.ds.metadesConsensus
        << ";kp=" << config.ds.metadesProfileNeighbors << ";ha=" << config.hmeasureBetaA
        << ";hb=" << config.hmeasureBetaB << ";ratios=";
    for (double r : config.ratios) out << formatRatio(r) << ',';
    out << ";pools=";
    for (const auto& p : config.pools) out << p.name << ':' << p.kind << ':' << p.members << ',';
    out << ";techniques=";
    for (Technique t : config.techniques) out << techniqueTag(t) << ',';
    if (config.synthetic) {
        out << ";synth=" << config.synthetic->negatives << '/' << config.synthetic->positives
            << '/' << config.synthetic->dims << '/' << config.synthetic->separation << '/'
            << config.synthetic->testFraction;
    } else {
        out << ";prepared=" << config.preparedTrain << '|' << config.preparedTest;
    }
    return out.str();
}

std::string isoTimestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

ExperimentConfig parseExperimentConfig(const std::string& jsonText) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(jsonText);
    } catch (const std::exception& e) {
        throw ParseError(std::string("config: bad JSON: ") + e.what());
    }
    ExperimentConfig config;
    config.seed = j.value("seed", 0ULL);
    config.outDir = j.value("out", std::string("out"));
    config.threads = j.value("threads", 1);
    config.dselFraction = j.value("dsel_fraction", 0.25);
    if (j.contains("ratios")) config.ratios = j["ratios"].get<std::vector<double>>();
    for (double r : config.ratios) {
        if (r < 1.0) throw SchemaError("config: imbalance ratios must be >= 1");
    }

    if (j.contains("data")) {
        const auto& data = j["data"];
        if (data.contains("synthetic")) {
            const auto& s = data["synthetic"];
            SyntheticSpec spec;
            spec.negatives = s.value("negatives", spec.negatives);
            spec.positives = s.value("positives", spec.positives);
            spec.dims = s.value("dims", spec.dims);
            spec.separation = s.value("separation", spec.separation);
            spec.testFraction = s.value("test_fraction", spec.testFraction);
            config.synthetic = spec;
        } else if (data.contains("prepared")) {
            config.preparedTrain = data["prepared"].value("train", "");
            config.preparedTest = data["prepared"].value("test", "");
            if (config.preparedTrain.empty() || config.preparedTest.empty()) {
                throw SchemaError("config: data.prepared needs train and test paths");
            }
        } else {
            throw SchemaError("config: data must be synthetic or prepared");
        }
    } else {
        config.synthetic = SyntheticSpec{};
    }

    const LearnerConfig defaults =
        j.contains("learners") ? parseLearnerConfig(j["learners"]) : LearnerConfig{};
    if (!j.contains("pools") || j["pools"].empty()) {
        throw SchemaError("config: at least one pool is required");
    }
    for (const auto& pj : j["pools"]) {
        PoolSpec spec;
        spec.kind = pj.value("kind", std::string("gnb"));
        spec.name = pj.value("name", spec.kind);
        spec.members = pj.value("members", 20U);
        spec.featuresPerSplit = pj.value("features_per_split", 0);
        spec.learner = pj.contains("learner") ? parseLearnerConfig(pj["learner"], defaults)
                                              : defaults;
        if (pj.contains("composition")) {
            for (const auto& cj : pj["composition"]) {
                spec.composition.push_back(
                    {cj.at("kind").get<std::string>(), cj.at("members").get<std::size_t>()});
            }
        }
        config.pools.push_back(std::move(spec));
    }

    if (j.contains("techniques")) {
        config.techniques.clear();
        for (const auto& tj : j["techniques"]) {
            config.techniques.push_back(techniqueFromTag(tj.get<std::string>()));
        }
    }
    if (config.techniques.empty()) throw SchemaError("config: at least one technique is required");

    if (j.contains("ds")) {
        const auto& d = j["ds"];
        config.ds.regionSize = d.value("k", config.ds.regionSize);
        config.ds.selectionGap = d.value("gap", config.ds.selectionGap);
        config.ds.mcbSimilarityThreshold = d.value("zeta", config.ds.mcbSimilarityThreshold);
        if (d.contains("n") && !d["n"].is_null()) config.ds.accuracyKeep = d["n"].get<std::size_t>();
        if (d.contains("j") && !d["j"].is_null()) {
            config.ds.diversityKeep = d["j"].get<std::size_t>();
        }
        config.ds.clusterCount = d.value("clusters", config.ds.clusterCount);
        config.ds.metadesConsensus = d.value("hc", config.ds.metadesConsensus);
        config.ds.metadesProfileNeighbors = d.value("kp", config.ds.metadesProfileNeighbors);
        if (d.contains("meta_learner")) {
            config.ds.metadesLearner = learnerKindFromName(d["meta_learner"].get<std::string>());
        }
    }
    config.ds.metadesLearnerConfig = defaults;
    if (j.contains("hmeasure")) {
        config.hmeasureBetaA = j["hmeasure"].value("a", 2.0);
        config.hmeasureBetaB = j["hmeasure"].value("b", 2.0);
    }
    return config;
}

ExperimentConfig loadExperimentConfig(const std::string& jsonPath) {
    std::ifstream in(jsonPath);
    if (!in) throw ParseError("config: cannot open '" + jsonPath + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseExperimentConfig(buf.str());
}

std::pair<Dataset, Dataset> resolveData(const ExperimentConfig& config) {
    if (config.synthetic) {
        const auto& s = *config.synthetic;
        Dataset full = synthGenerate(s.negatives, s.positives, s.dims, s.separation,
                                     deriveSeed(config.seed, {5}));
        return stratifiedHoldout(full, s.testFraction, deriveSeed(config.seed, {6}));
    }
    return {loadDataset(config.preparedTrain), loadDataset(config.preparedTest)};
}

Pool fitPoolFromSpec(const PoolSpec& spec, const Dataset& train, std::uint64_t seed) {
    if (spec.kind == "rf") {
        int fps = spec.featuresPerSplit;
        if (fps <= 0) {
            fps = std::max(1, static_cast<int>(
                                  std::floor(std::sqrt(static_cast<double>(train.featureCount())))));
        }
        return fitRandomForest(train, spec.members, fps, seed);
    }
    if (spec.kind == "hetero") {
        std::vector<HeterogeneousSpec> parts;
        if (spec.composition.empty()) {
            const std::vector<LearnerKind> kinds = {LearnerKind::Gnb, LearnerKind::Knn,
                                                    LearnerKind::Tree, LearnerKind::Mlp};
            const std::size_t base = spec.members / kinds.size();
            std::size_t remainder = spec.members % kinds.size();
            for (LearnerKind kind : kinds) {
                std::size_t count = base + (remainder > 0 ? 1 : 0);
                if (remainder > 0) --remainder;
                if (count > 0) parts.push_back({kind, count, spec.learner});
            }
        } else {
            for (const auto& [kindName, count] : spec.composition) {
                parts.push_back({learnerKindFromName(kindName), count, spec.learner});
            }
        }
        return fitHeterogeneous(train, parts, seed);
    }
    return fitBagging(learnerKindFromName(spec.kind), spec.learner, train, spec.members, seed);
}

namespace {

std::map<std::string, double> scoreMetrics(const std::vector<int>& labels,
                                           const std::vector<int>& predictions,
                                           const std::vector<double>& scores, double betaA,
                                           double betaB) {
    const ConfusionMatrix cm = confusion(labels, predictions);
    const ScoredPredictions sp{scores, labels};
    std::map<std::string, double> out;
    out["Acc"] = accuracy(cm);
    out["AUC"] = auc(sp);
    out["F1"] = f1(cm);
    out["G-mean"] = gmean(cm);
    out["H_measure"] = hMeasure(sp, betaA, betaB);
    out["Brier score"] = brier(sp);
    return out;
}

}  // namespace

std::optional<double> EvaluationReport::value(const std::string& pool, const std::string& column,
                                              double ratio, const std::string& metric) const {
    const int p = poolIndex(pool);
    const int c = columnIndex(column);
    const int r = ratioIndex(ratio);
    if (p < 0 || c < 0 || r < 0) return std::nullopt;
    const auto& cell = cells[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)]
                            [static_cast<std::size_t>(c)];
    if (!cell) return std::nullopt;
    const auto it = cell->find(metric);
    return it == cell->end() ? std::nullopt : std::optional<double>(it->second);
}

int EvaluationReport::poolIndex(const std::string& pool) const {
    for (std::size_t i = 0; i < poolNames.size(); ++i) {
        if (poolNames[i] == pool) return static_cast<int>(i);
    }
    return -1;
}

int EvaluationReport::columnIndex(const std::string& column) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == column) return static_cast<int>(i);
    }
    return -1;
}

int EvaluationReport::ratioIndex(double ratio) const {
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (ratios[i] == ratio) return static_cast<int>(i);
    }
    return -1;
}

EvaluationReport runExperimentOn(const ExperimentConfig& config, const Dataset& train,
                                 const Dataset& test) {
    if (config.pools.empty() || config.techniques.empty()) {
        throw ValueError("experiment: need at least one pool and one technique");
    }
    EvaluationReport report;
    report.masterSeed = config.seed;
    report.configHash = std::to_string(fnv1a(canonicalConfigString(config)));
    report.timestamp = isoTimestamp();
    report.hmeasureBetaA = config.hmeasureBetaA;
    report.hmeasureBetaB = config.hmeasureBetaB;
    for (const auto& p : config.pools) report.poolNames.push_back(p.name);
    report.columns.push_back("pool");
    for (Technique t : config.techniques) report.columns.push_back(techniqueTag(t));
    report.ratios = config.ratios;
    report.cells.assign(
        config.pools.size(),
        std::vector<std::vector<std::optional<std::map<std::string, double>>>>(
            config.ratios.size(),
            std::vector<std::optional<std::map<std::string, double>>>(report.columns.size())));

    // Per-ratio training material, shared by every pool job. A ratio whose
    // preparation fails takes down its cells only.
    struct RatioData {
        Dataset poolTrain;
        Dataset dsel;
        std::string error;
    };
    std::vector<RatioData> perRatio(config.ratios.size());
    for (std::size_t r = 0; r < config.ratios.size(); ++r) {
        try {
            Dataset reduced =
                undersampleToRatio(train, config.ratios[r], deriveSeed(config.seed, {1, r}));
            SplitSpec split;
            split.dselFraction = config.dselFraction;
            split.seed = deriveSeed(config.seed, {2, r});
            auto [poolTrain, dsel] = dselSplit(reduced, split);
            perRatio[r].poolTrain = std::move(poolTrain);
            perRatio[r].dsel = std::move(dsel);
        } catch (const std::exception& e) {
            perRatio[r].error = e.what();
        }
    }

    struct Job {
        std::size_t pool;
        std::size_t ratio;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < config.pools.size(); ++p) {
        for (std::size_t r = 0; r < config.ratios.size(); ++r) jobs.push_back({p, r});
    }

    std::mutex failureMutex;
    auto recordFailure = [&](const Job& job, const std::string& column,
                             const std::string& message) {
        std::lock_guard<std::mutex> lock(failureMutex);
        report.failures.push_back(
            {config.pools[job.pool].name, config.ratios[job.ratio], column, message});
    };

    auto runJob = [&](const Job& job) {
        const auto& spec = config.pools[job.pool];
        const auto& data = perRatio[job.ratio];
        if (!data.error.empty()) {
            recordFailure(job, "", data.error);
            return;
        }
        try {
            const Pool pool = fitPoolFromSpec(spec, data.poolTrain,
                                              deriveSeed(config.seed, {3, job.pool, job.ratio}));
            std::vector<Technique> nonMeta;
            bool wantsMetades = false;
            for (Technique t : config.techniques) {
                if (t == Technique::MetaDes) {
                    wantsMetades = true;
                } else {
                    nonMeta.push_back(t);
                }
            }
            DsContext context =
                prepareContext(pool, data.dsel, nullptr, config.ds, nonMeta,
                               deriveSeed(config.seed, {4, job.pool, job.ratio}));
            bool metadesReady = false;
            if (wantsMetades) {
                try {
                    context.metades = metadesTrain(
                        pool, context.cache, data.dsel, data.poolTrain, context.config,
                        deriveSeed(config.seed, {4, job.pool, job.ratio, 0x3E7}));
                    metadesReady = true;
                } catch (const std::exception& e) {
                    recordFailure(job, "metades", e.what());
                }
            }

            const std::size_t n = test.rowCount();
            // Static pool baseline: hard majority vote labels, soft mean scores.
            {
                std::vector<int> predictions(n);
                std::vector<double> scores(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const auto x = test.row(i);
                    predictions[i] = majorityVote(pool.hardPredictions(x)).label;
                    scores[i] = pool.softAverage(x)[1];
                }
                report.cells[job.pool][job.ratio][0] =
                    scoreMetrics(test.labels(), predictions, scores, config.hmeasureBetaA,
                                 config.hmeasureBetaB);
            }
            for (std::size_t t = 0; t < config.techniques.size(); ++t) {
                const Technique technique = config.techniques[t];
                if (technique == Technique::MetaDes && !metadesReady) continue;
                try {
                    std::vector<int> predictions(n);
                    std::vector<double> scores(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        const Classification c = classify(context, technique, test.row(i));
                        predictions[i] = c.label;
                        scores[i] = c.proba[1];
                    }
                    report.cells[job.pool][job.ratio][t + 1] =
                        scoreMetrics(test.labels(), predictions, scores, config.hmeasureBetaA,
                                     config.hmeasureBetaB);
                } catch (const std::exception& e) {
                    recordFailure(job, techniqueTag(technique), e.what());
                }
            }
        } catch (const std::exception& e) {
            recordFailure(job, "", e.what());
        }
    };

    const int threadCount = std::max(1, config.threads);
    if (threadCount == 1 || jobs.size() <= 1) {
        for (const auto& job : jobs) runJob(job);
    } else {
        std::atomic<std::size_t> nextJob{0};
        std::vector<std::thread> workers;
        const int workerCount = std::min<int>(threadCount, static_cast<int>(jobs.size()));
        for (int w = 0; w < workerCount; ++w) {
            workers.emplace_back([&]() {
                while (true) {
                    const std::size_t index = nextJob.fetch_add(1);
                    if (index >= jobs.size()) break;
                    runJob(jobs[index]);
                }
            });
        }
        for (auto& worker : workers) worker.join();
    }

    // Failure records accumulate in job completion order; sort for stable output.
    std::sort(report.failures.begin(), report.failures.end(),
              [](const EvaluationReport::Failure& a, const EvaluationReport::Failure& b) {
                  return std::tie(a.pool, a.ratio, a.column, a.message) <
                         std::tie(b.pool, b.ratio, b.column, b.message);
              });
    return report;
}

EvaluationReport runExperiment(const ExperimentConfig& config) {
    const auto [train, test] = resolveData(config);
    return runExperimentOn(config, train, test);
}

std::vector<RankedEntry> rankByF1(const EvaluationReport& report, double ratio) {
    if (report.ratioIndex(ratio) < 0) {
        throw ValueError("rank: ratio " + formatRatio(ratio) + " not present in the report");
    }
    std::vector<RankedEntry> entries;
    for (const auto& pool : report.poolNames) {
        for (const auto& column : report.columns) {
            const auto v = report.value(pool, column, ratio, "F1");
            if (v) entries.push_back({pool + "_" + column, *v, 0});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.f1 != b.f1) return a.f1 > b.f1;
        return a.tag < b.tag;
    });
    for (auto& entry : entries) {
        int greater = 0;
        for (const auto& other : entries) {
            if (other.f1 > entry.f1) ++greater;
        }
        entry.rank = greater + 1;
    }
    return entries;
}

std::map<std::string, double> top3Average(const EvaluationReport& report, const std::string& pool,
                                          double ratio) {
    std::map<std::string, double> out;
    for (const auto& metric : metricNames()) {
        std::vector<double> values;
        for (const auto& column : report.columns) {
            if (column == "pool") continue;
            const auto v = report.value(pool, column, ratio, metric);
            if (v) values.push_back(*v);
        }
        if (values.size() < 3) {
            throw ValueError("top3: fewer than 3 technique values for metric " + metric);
        }
        const bool lowerIsBetter = metric == "Brier score";
        std::sort(values.begin(), values.end());
        double sum = 0.0;
        if (lowerIsBetter) {
            sum = values[0] + values[1] + values[2];
        } else {
            sum = values[values.size() - 1] + values[values.size() - 2] + values[values.size() - 3];
        }
        out[metric] = sum / 3.0;
    }
    return out;
}

namespace {

void writePoolTableCsv(std::ostream& out, const EvaluationReport& report, std::size_t p) {
    out << "imbalance_ratio,metric";
    for (const auto& column : report.columns) out << ',' << column;
    out << '\n';
    for (std::size_t r = 0; r < report.ratios.size(); ++r) {
        for (const auto& metric : metricNames()) {
            out << formatRatio(report.ratios[r]) << ',' << metric;
            for (std::size_t c = 0; c < report.columns.size(); ++c) {
                const auto& cell = report.cells[p][r][c];
                out << ',';
                if (cell && cell->count(metric)) {
                    out << formatValue(cell->at(metric));
                } else {
                    out << "NA";
                }
            }
            out << '\n';
        }
    }
}

void writePoolTableMarkdown(std::ostream& out, const EvaluationReport& report, std::size_t p) {
    out << "| Imbalance ratio | Metric |";
    for (const auto& column : report.columns) out << ' ' << column << " |";
    out << "\n|---|---|";
    for (std::size_t c = 0; c < report.columns.size(); ++c) out << "---|";
    out << '\n';
    for (std::size_t r = 0; r < report.ratios.size(); ++r) {
        for (const auto& metric : metricNames()) {
            out << "| " << formatRatio(report.ratios[r]) << " | " << metric << " |";
            for (std::size_t c = 0; c < report.columns.size(); ++c) {
                const auto& cell = report.cells[p][r][c];
                out << ' ';
                if (cell && cell->count(metric)) {
                    out << formatValue(cell->at(metric));
                } else {
                    out << "NA";
                }
                out << " |";
            }
            out << '\n';
        }
    }
}

}  // namespace

std::vector<std::string> emitReport(const EvaluationReport& report, ReportFormat format,
                                    const std::string& outDir) {
    if (report.poolNames.empty() || report.columns.size() <= 1) {
        throw ValueError("emit: report has no pools or no technique columns");
    }
    std::filesystem::create_directories(outDir);
    const std::string ext = format == ReportFormat::Csv ? ".csv" : ".md";
    std::vector<std::string> written;

    for (std::size_t p = 0; p < report.poolNames.size(); ++p) {
        const std::string path =
            (std::filesystem::path(outDir) / ("report_" + report.poolNames[p] + ext)).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ParseError("emit: cannot write '" + path + "'");
        format == ReportFormat::Csv ? writePoolTableCsv(out, report, p)
                                    : writePoolTableMarkdown(out, report, p);
        written.push_back(path);
    }

    // F1 ranking across all (pool, column) entries, one file per ratio.
    for (double ratio : report.ratios) {
        const auto entries = rankByF1(report, ratio);
        const std::string path =
            (std::filesystem::path(outDir) / ("rankings_ir" + formatRatio(ratio) + ext)).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ParseError("emit: cannot write '" + path + "'");
        if (format == ReportFormat::Csv) {
            out << "classifier,f1,rank\n";
            for (const auto& e : entries) {
                out << e.tag << ',' << formatValue(e.f1) << ',' << e.rank << '\n';
            }
        } else {
            out << "| Classifier | F1 | Rank |\n|---|---|---|\n";
            for (const auto& e : entries) {
                out << "| " << e.tag << " | " << formatValue(e.f1) << " | " << e.rank << " |\n";
            }
        }
        written.push_back(path);
    }

    // Top-3 DS averages against the static pool, per (pool, ratio).
    {
        const std::string path =
            (std::filesystem::path(outDir) / ("top3_summary" + ext)).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ParseError("emit: cannot write '" + path + "'");
        if (format == ReportFormat::Csv) {
            out << "pool,imbalance_ratio,metric,pool_value,top3_average\n";
        } else {
            out << "| Pool | Imbalance ratio | Metric | Pool value | Top-3 average |\n"
                << "|---|---|---|---|---|\n";
        }
        for (const auto& pool : report.poolNames) {
            for (double ratio : report.ratios) {
                std::map<std::string, double> top3;
                try {
                    top3 = top3Average(report, pool, ratio);
                } catch (const std::exception&) {
                    continue;  // incomplete cell
                }
                for (const auto& metric : metricNames()) {
                    const auto poolValue = report.value(pool, "pool", ratio, metric);
                    const std::string pv = poolValue ? formatValue(*poolValue) : "NA";
                    if (format == ReportFormat::Csv) {
                        out << pool << ',' << formatRatio(ratio) << ',' << metric << ',' << pv
                            << ',' << formatValue(top3.at(metric)) << '\n';
                    } else {
                        out << "| " << pool << " | " << formatRatio(ratio) << " | " << metric
                            << " | " << pv << " | " << formatValue(top3.at(metric)) << " |\n";
                    }
                }
            }
        }
        written.push_back(path);
    }
    return written;
}

void saveReport(const EvaluationReport& report, const std::string& path) {
    nlohmann::json j;
    j["format"] = "dselect-report";
    j["version"] = 1;
    j["masterSeed"] = report.masterSeed;
    j["configHash"] = report.configHash;
    j["timestamp"] = report.timestamp;
    j["hmeasureBeta"] = {report.hmeasureBetaA, report.hmeasureBetaB};
    j["poolNames"] = report.poolNames;
    j["columns"] = report.columns;
    j["ratios"] = report.ratios;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& perPool : report.cells) {
        nlohmann::json poolJson = nlohmann::json::array();
        for (const auto& perRatio : perPool) {
            nlohmann::json ratioJson = nlohmann::json::array();
            for (const auto& cell : perRatio) {
                if (cell) {
                    ratioJson.push_back(*cell);
                } else {
                    ratioJson.push_back(nullptr);
                }
            }
            poolJson.push_back(std::move(ratioJson));
        }
        cells.push_back(std::move(poolJson));
    }
    j["cells"] = std::move(cells);
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : report.failures) {
        failures.push_back(
            {{"pool", f.pool}, {"ratio", f.ratio}, {"column", f.column}, {"message", f.message}});
    }
    j["failures"] = std::move(failures);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("report: cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

EvaluationReport loadReport(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("report: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("report: bad JSON: ") + e.what());
    }
    if (j.value("format", "") != "dselect-report") {
        throw SchemaError("report: missing dselect-report format tag");
    }
    EvaluationReport report;
    report.masterSeed = j.value("masterSeed", 0ULL);
    report.configHash = j.value("configHash", "");
    report.timestamp = j.value("timestamp", "");
    if (j.contains("hmeasureBeta") && j["hmeasureBeta"].size() == 2) {
        report.hmeasureBetaA = j["hmeasureBeta"][0].get<double>();
        report.hmeasureBetaB = j["hmeasureBeta"][1].get<double>();
    }
    report.poolNames = j.at("poolNames").get<std::vector<std::string>>();
    report.columns = j.at("columns").get<std::vector<std::string>>();
    report.ratios = j.at("ratios").get<std::vector<double>>();
    for (const auto& poolJson : j.at("cells")) {
        std::vector<std::vector<std::optional<std::map<std::string, double>>>> perPool;
        for (const auto& ratioJson : poolJson) {
            std::vector<std::optional<std::map<std::string, double>>> perRatio;
            for (const auto& cell : ratioJson) {
                if (cell.is_null()) {
                    perRatio.push_back(std::nullopt);
                } else {
                    perRatio.push_back(cell.get<std::map<std::string, double>>());
                }
            }
            perPool.push_back(std::move(perRatio));
        }
        report.cells.push_back(std::move(perPool));
    }
    if (j.contains("failures")) {
        for (const auto& fj : j["failures"]) {
            report.failures.push_back({fj.value("pool", ""), fj.value("ratio", 0.0),
                                       fj.value("column", ""), fj.value("message", "")});
        }
    }
    return report;
}

}  // namespace dselect
