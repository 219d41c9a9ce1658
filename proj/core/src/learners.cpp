#include "dselect/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "dselect/errors.hpp"
#include "dselect/rng.hpp"

#include <json.hpp>

namespace dselect {

std::string learnerKindName(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::Gnb: return "gnb";
        case LearnerKind::Knn: return "knn";
        case LearnerKind::Tree: return "tree";
        case LearnerKind::Mlp: return "mlp";
    }
    return "unknown";
}

LearnerKind learnerKindFromName(const std::string& name) {
    if (name == "gnb") return LearnerKind::Gnb;
    if (name == "knn") return LearnerKind::Knn;
    if (name == "tree") return LearnerKind::Tree;
    if (name == "mlp") return LearnerKind::Mlp;
    throw SchemaError("unknown learner kind '" + name + "'");
}

int argmaxLowestTie(std::span<const double> values) {
    int best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    return best;
}

int Model::predictLabel(std::span<const double> x) const {
    const auto proba = predictProba(x);
    return argmaxLowestTie(proba);
}

namespace {

void checkDimension(const Model& model, std::span<const double> x) {
    if (x.size() != model.dimension()) {
        throw ValueError("predict: expected " + std::to_string(model.dimension()) +
                         " features, got " + std::to_string(x.size()));
    }
}

std::vector<double> softmaxFromLog(std::vector<double> logScores) {
    const double maxLog = *std::max_element(logScores.begin(), logScores.end());
    double sum = 0.0;
    for (auto& v : logScores) {
        v = std::exp(v - maxLog);
        sum += v;
    }
    for (auto& v : logScores) v /= sum;
    return logScores;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

std::unique_ptr<GnbModel> GnbModel::fit(const Dataset& train, const LearnerConfig& config) {
    const std::size_t n = train.rowCount();
    const std::size_t d = train.featureCount();
    const std::size_t L = train.classCount();
    if (n == 0) throw ValueError("gnb: empty training set");
    const auto counts = train.classCounts();
    for (std::size_t c = 0; c < L; ++c) {
        if (counts[c] == 0) {
            throw ValueError("gnb: class " + std::to_string(c) +
                             " absent from the training set");
        }
    }

    auto model = std::make_unique<GnbModel>();
    model->dims_ = d;
    model->priors_.assign(L, 0.0);
    model->means_.assign(L * d, 0.0);
    model->variances_.assign(L * d, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(train.label(i));
        const auto row = train.row(i);
        for (std::size_t j = 0; j < d; ++j) model->means_[c * d + j] += row[j];
    }
    for (std::size_t c = 0; c < L; ++c) {
        model->priors_[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) {
            model->means_[c * d + j] /= static_cast<double>(counts[c]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(train.label(i));
        const auto row = train.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = row[j] - model->means_[c * d + j];
            model->variances_[c * d + j] += dev * dev;
        }
    }
    // Global per-feature variance sets the smoothing scale.
    double maxVariance = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += train.at(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dev = train.at(i, j) - mean;
            var += dev * dev;
        }
        maxVariance = std::max(maxVariance, var / static_cast<double>(n));
    }
    const double floor = std::max(config.gnbVarianceFloorScale * maxVariance, 1e-12);
    for (std::size_t c = 0; c < L; ++c) {
        for (std::size_t j = 0; j < d; ++j) {
            double& var = model->variances_[c * d + j];
            var = std::max(var / static_cast<double>(counts[c]), floor);
        }
    }
    return model;
}

std::vector<double> GnbModel::predictProba(std::span<const double> x) const {
    checkDimension(*this, x);
    const std::size_t L = priors_.size();
    std::vector<double> logJoint(L, 0.0);
    for (std::size_t c = 0; c < L; ++c) {
        double lj = std::log(priors_[c]);
        for (std::size_t j = 0; j < dims_; ++j) {
            const double var = variances_[c * dims_ + j];
            const double dev = x[j] - means_[c * dims_ + j];
            lj += -0.5 * std::log(6.283185307179586 * var) - dev * dev / (2.0 * var);
        }
        logJoint[c] = lj;
    }
    return softmaxFromLog(std::move(logJoint));
}

// ---------------------------------------------------------------------------
// k-nearest neighbors

std::unique_ptr<KnnModel> KnnModel::fit(const Dataset& train, const LearnerConfig& config) {
    if (train.rowCount() == 0) throw ValueError("knn: empty training set");
    if (config.knnNeighbors < 1) throw ValueError("knn: k must be >= 1");
    auto model = std::make_unique<KnnModel>();
    model->dims_ = train.featureCount();
    model->classes_ = train.classCount();
    model->k_ = config.knnNeighbors;
    model->points_.resize(train.rowCount() * train.featureCount());
    model->labels_.resize(train.rowCount());
    for (std::size_t i = 0; i < train.rowCount(); ++i) {
        const auto row = train.row(i);
        std::copy(row.begin(), row.end(), model->points_.begin() + static_cast<long>(i * model->dims_));
        model->labels_[i] = train.label(i);
    }
    return model;
}

std::vector<double> KnnModel::predictProba(std::span<const double> x) const {
    checkDimension(*this, x);
    const std::size_t n = labels_.size();
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), n);
    std::vector<std::pair<double, std::size_t>> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        const double* p = points_.data() + i * dims_;
        for (std::size_t j = 0; j < dims_; ++j) {
            const double dev = x[j] - p[j];
            d2 += dev * dev;
        }
        order[i] = {d2, i};
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(k), order.end());
    std::vector<double> proba(classes_, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        proba[static_cast<std::size_t>(labels_[order[i].second])] += 1.0;
    }
    for (auto& v : proba) v /= static_cast<double>(k);
    return proba;
}

// ---------------------------------------------------------------------------
// CART decision tree (Gini)

namespace {

double gini(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double g = 1.0;
    for (double c : counts) {
        const double p = c / total;
        g -= p * p;
    }
    return g;
}

}  // namespace

std::unique_ptr<TreeModel> TreeModel::fit(const Dataset& train, const LearnerConfig& config,
                                          std::uint64_t seed) {
    const std::size_t n = train.rowCount();
    const std::size_t d = train.featureCount();
    if (n == 0) throw ValueError("tree: empty training set");
    const int minLeaf = std::max(config.treeMinLeaf, 1);
    const std::size_t featuresPerSplit =
        config.treeFeaturesPerSplit <= 0
            ? d
            : std::min<std::size_t>(static_cast<std::size_t>(config.treeFeaturesPerSplit), d);

    auto model = std::make_unique<TreeModel>();
    model->dims_ = d;
    model->classes_ = train.classCount();
    const std::size_t L = model->classes_;

    Rng rng(seed);
    std::vector<std::size_t> allFeatures(d);
    std::iota(allFeatures.begin(), allFeatures.end(), 0);

    struct Work {
        int node;
        std::vector<std::size_t> rows;
        int depth;
    };
    std::vector<Work> stack;
    model->nodes_.push_back({});
    {
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), 0);
        stack.push_back({0, std::move(rows), 0});
    }

    while (!stack.empty()) {
        Work work = std::move(stack.back());
        stack.pop_back();

        std::vector<double> counts(L, 0.0);
        for (std::size_t i : work.rows) counts[static_cast<std::size_t>(train.label(i))] += 1.0;
        const auto total = static_cast<double>(work.rows.size());
        const double parentGini = gini(counts, total);

        // nodes_ may reallocate when children are appended; always address
        // the current node by index.
        auto makeLeaf = [&]() {
            Node& node = model->nodes_[static_cast<std::size_t>(work.node)];
            node.feature = -1;
            node.proba.resize(L);
            for (std::size_t c = 0; c < L; ++c) node.proba[c] = counts[c] / total;
        };

        const bool depthLimited = config.treeMaxDepth >= 0 && work.depth >= config.treeMaxDepth;
        if (depthLimited || parentGini == 0.0 ||
            work.rows.size() < static_cast<std::size_t>(2 * minLeaf)) {
            makeLeaf();
            continue;
        }

        // Candidate features: all, or a seeded random subset for forests.
        std::vector<std::size_t> candidates;
        if (featuresPerSplit >= d) {
            candidates = allFeatures;
        } else {
            std::vector<std::size_t> pool = allFeatures;
            for (std::size_t i = 0; i < featuresPerSplit; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
                std::swap(pool[i], pool[j]);
            }
            candidates.assign(pool.begin(), pool.begin() + static_cast<long>(featuresPerSplit));
            std::sort(candidates.begin(), candidates.end());
        }

        double bestGain = 0.0;
        int bestFeature = -1;
        double bestThreshold = 0.0;
        std::vector<std::pair<double, int>> values(work.rows.size());
        std::vector<double> leftCounts(L);
        for (std::size_t f : candidates) {
            for (std::size_t r = 0; r < work.rows.size(); ++r) {
                values[r] = {train.at(work.rows[r], f), train.label(work.rows[r])};
            }
            std::sort(values.begin(), values.end());
            std::fill(leftCounts.begin(), leftCounts.end(), 0.0);
            for (std::size_t r = 0; r + 1 < values.size(); ++r) {
                leftCounts[static_cast<std::size_t>(values[r].second)] += 1.0;
                if (values[r].first == values[r + 1].first) continue;
                const auto nLeft = static_cast<double>(r + 1);
                const double nRight = total - nLeft;
                if (nLeft < minLeaf || nRight < minLeaf) continue;
                std::vector<double> rightCounts(L);
                for (std::size_t c = 0; c < L; ++c) rightCounts[c] = counts[c] - leftCounts[c];
                const double gain = parentGini - (nLeft / total) * gini(leftCounts, nLeft) -
                                    (nRight / total) * gini(rightCounts, nRight);
                if (gain > bestGain) {
                    bestGain = gain;
                    bestFeature = static_cast<int>(f);
                    bestThreshold = (values[r].first + values[r + 1].first) / 2.0;
                }
            }
        }

        if (bestFeature < 0) {
            makeLeaf();
            continue;
        }

        std::vector<std::size_t> leftRows, rightRows;
        for (std::size_t i : work.rows) {
            (train.at(i, static_cast<std::size_t>(bestFeature)) <= bestThreshold ? leftRows
                                                                                 : rightRows)
            .push_back(i);
        }
        const int leftNode = static_cast<int>(model->nodes_.size());
        model->nodes_.push_back({});
        const int rightNode = static_cast<int>(model->nodes_.size());
        model->nodes_.push_back({});
        {
            Node& node = model->nodes_[static_cast<std::size_t>(work.node)];
            node.feature = bestFeature;
            node.threshold = bestThreshold;
            node.left = leftNode;
            node.right = rightNode;
        }
        stack.push_back({rightNode, std::move(rightRows), work.depth + 1});
        stack.push_back({leftNode, std::move(leftRows), work.depth + 1});
    }
    return model;
}

std::vector<double> TreeModel::predictProba(std::span<const double> x) const {
    checkDimension(*this, x);
    const Node* node = &nodes_[0];
    while (node->feature >= 0) {
        node = x[static_cast<std::size_t>(node->feature)] <= node->threshold
                   ? &nodes_[static_cast<std::size_t>(node->left)]
                   : &nodes_[static_cast<std::size_t>(node->right)];
    }
    return node->proba;
}

// ---------------------------------------------------------------------------
// Single-hidden-layer perceptron

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::unique_ptr<MlpModel> MlpModel::fit(const Dataset& train, const LearnerConfig& config) {
    const std::size_t n = train.rowCount();
    if (n == 0) throw ValueError("mlp: empty training set");
    if (config.mlpLearningRate <= 0.0) throw ValueError("mlp: learning rate must be positive");
    if (config.mlpHiddenUnits < 1) throw ValueError("mlp: need at least one hidden unit");

    auto model = std::make_unique<MlpModel>();
    model->dims_ = train.featureCount();
    model->classes_ = train.classCount();
    model->hidden_ = static_cast<std::size_t>(config.mlpHiddenUnits);

    Rng rng(config.seed);
    auto init = [&rng](std::vector<double>& w, std::size_t count, std::size_t fanIn,
                       std::size_t fanOut) {
        const double r = std::sqrt(6.0 / static_cast<double>(fanIn + fanOut));
        w.resize(count);
        for (auto& v : w) v = (2.0 * rng.nextDouble() - 1.0) * r;
    };
    init(model->hiddenWeights_, model->hidden_ * model->dims_, model->dims_, model->hidden_);
    model->hiddenBias_.assign(model->hidden_, 0.0);
    init(model->outputWeights_, model->classes_ * model->hidden_, model->hidden_, model->classes_);
    model->outputBias_.assign(model->classes_, 0.0);

    const auto batchSize = static_cast<std::size_t>(std::max(config.mlpBatchSize, 1));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad;
    std::vector<std::size_t> batch;
    for (int epoch = 0; epoch < config.mlpEpochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += batchSize) {
            const std::size_t end = std::min(start + batchSize, n);
            batch.assign(order.begin() + static_cast<long>(start),
                         order.begin() + static_cast<long>(end));
            model->lossAndGradient(train, batch, &grad);
            auto w = model->flatWeights();
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.mlpLearningRate * grad[i];
            model->setFlatWeights(w);
        }
    }
    return model;
}

std::vector<double> MlpModel::predictProba(std::span<const double> x) const {
    checkDimension(*this, x);
    std::vector<double> hidden(hidden_);
    for (std::size_t h = 0; h < hidden_; ++h) {
        double z = hiddenBias_[h];
        const double* w = hiddenWeights_.data() + h * dims_;
        for (std::size_t j = 0; j < dims_; ++j) z += w[j] * x[j];
        hidden[h] = sigmoid(z);
    }
    std::vector<double> logits(classes_);
    for (std::size_t c = 0; c < classes_; ++c) {
        double z = outputBias_[c];
        const double* w = outputWeights_.data() + c * hidden_;
        for (std::size_t h = 0; h < hidden_; ++h) z += w[h] * hidden[h];
        logits[c] = z;
    }
    return softmaxFromLog(std::move(logits));
}

std::vector<double> MlpModel::flatWeights() const {
    std::vector<double> w;
    w.reserve(hiddenWeights_.size() + hiddenBias_.size() + outputWeights_.size() +
              outputBias_.size());
    w.insert(w.end(), hiddenWeights_.begin(), hiddenWeights_.end());
    w.insert(w.end(), hiddenBias_.begin(), hiddenBias_.end());
    w.insert(w.end(), outputWeights_.begin(), outputWeights_.end());
    w.insert(w.end(), outputBias_.begin(), outputBias_.end());
    return w;
}

void MlpModel::setFlatWeights(const std::vector<double>& w) {
    std::size_t pos = 0;
    auto take = [&](std::vector<double>& dst) {
        std::copy_n(w.begin() + static_cast<long>(pos), dst.size(), dst.begin());
        pos += dst.size();
    };
    take(hiddenWeights_);
    take(hiddenBias_);
    take(outputWeights_);
    take(outputBias_);
    if (pos != w.size()) throw ValueError("mlp: flat weight vector has wrong length");
}

double MlpModel::lossAndGradient(const Dataset& batch, const std::vector<std::size_t>& rows,
                                 std::vector<double>* gradOut) const {
    const std::size_t B = rows.size();
    std::vector<double> gW1(hiddenWeights_.size(), 0.0), gb1(hiddenBias_.size(), 0.0);
    std::vector<double> gW2(outputWeights_.size(), 0.0), gb2(outputBias_.size(), 0.0);
    double loss = 0.0;

    std::vector<double> hidden(hidden_), logits(classes_), dz2(classes_), dz1(hidden_);
    for (std::size_t i : rows) {
        const auto x = batch.row(i);
        for (std::size_t h = 0; h < hidden_; ++h) {
            double z = hiddenBias_[h];
            const double* w = hiddenWeights_.data() + h * dims_;
            for (std::size_t j = 0; j < dims_; ++j) z += w[j] * x[j];
            hidden[h] = sigmoid(z);
        }
        for (std::size_t c = 0; c < classes_; ++c) {
            double z = outputBias_[c];
            const double* w = outputWeights_.data() + c * hidden_;
            for (std::size_t h = 0; h < hidden_; ++h) z += w[h] * hidden[h];
            logits[c] = z;
        }
        const auto p = softmaxFromLog(logits);
        const auto y = static_cast<std::size_t>(batch.label(i));
        loss += -std::log(std::max(p[y], 1e-300));

        for (std::size_t c = 0; c < classes_; ++c) dz2[c] = p[c] - (c == y ? 1.0 : 0.0);
        for (std::size_t c = 0; c < classes_; ++c) {
            gb2[c] += dz2[c];
            for (std::size_t h = 0; h < hidden_; ++h) gW2[c * hidden_ + h] += dz2[c] * hidden[h];
        }
        for (std::size_t h = 0; h < hidden_; ++h) {
            double da = 0.0;
            for (std::size_t c = 0; c < classes_; ++c) da += outputWeights_[c * hidden_ + h] * dz2[c];
            dz1[h] = da * hidden[h] * (1.0 - hidden[h]);
        }
        for (std::size_t h = 0; h < hidden_; ++h) {
            gb1[h] += dz1[h];
            for (std::size_t j = 0; j < dims_; ++j) gW1[h * dims_ + j] += dz1[h] * x[j];
        }
    }

    const double scale = 1.0 / static_cast<double>(B);
    if (gradOut) {
        gradOut->clear();
        gradOut->reserve(gW1.size() + gb1.size() + gW2.size() + gb2.size());
        for (auto* g : {&gW1, &gb1, &gW2, &gb2}) {
            for (double v : *g) gradOut->push_back(v * scale);
        }
    }
    return loss * scale;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Model> fit(LearnerKind kind, const LearnerConfig& config, const Dataset& train) {
    switch (kind) {
        case LearnerKind::Gnb: return GnbModel::fit(train, config);
        case LearnerKind::Knn: return KnnModel::fit(train, config);
        case LearnerKind::Tree: return TreeModel::fit(train, config, config.seed);
        case LearnerKind::Mlp: return MlpModel::fit(train, config);
    }
    throw ValueError("fit: unknown learner kind");
}

// ---------------------------------------------------------------------------
// Serialization (versioned JSON text)

namespace {
constexpr int kModelFormatVersion = 1;
}

void GnbModel::save(std::ostream& out) const {
    nlohmann::json j;
    j["format"] = "dselect-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = "gnb";
    j["dims"] = dims_;
    j["priors"] = priors_;
    j["means"] = means_;
    j["variances"] = variances_;
    out << j.dump();
}

void KnnModel::save(std::ostream& out) const {
    nlohmann::json j;
    j["format"] = "dselect-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = "knn";
    j["dims"] = dims_;
    j["classes"] = classes_;
    j["k"] = k_;
    j["points"] = points_;
    j["labels"] = labels_;
    out << j.dump();
}

void TreeModel::save(std::ostream& out) const {
    nlohmann::json j;
    j["format"] = "dselect-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = "tree";
    j["dims"] = dims_;
    j["classes"] = classes_;
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_) {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"proba", n.proba}});
    }
    j["nodes"] = std::move(nodes);
    out << j.dump();
}

void MlpModel::save(std::ostream& out) const {
    nlohmann::json j;
    j["format"] = "dselect-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = "mlp";
    j["dims"] = dims_;
    j["classes"] = classes_;
    j["hidden"] = hidden_;
    j["hiddenWeights"] = hiddenWeights_;
    j["hiddenBias"] = hiddenBias_;
    j["outputWeights"] = outputWeights_;
    j["outputBias"] = outputBias_;
    out << j.dump();
}

void saveModel(const Model& model, std::ostream& out) { model.save(out); }

std::unique_ptr<Model> loadModel(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("model: bad JSON: ") + e.what());
    }
    if (j.value("format", "") != "dselect-model") {
        throw SchemaError("model: missing dselect-model format tag");
    }
    if (j.value("version", 0) != kModelFormatVersion) {
        throw SchemaError("model: unsupported format version");
    }
    const std::string kind = j.value("kind", "");
    if (kind == "gnb") {
        auto m = std::make_unique<GnbModel>();
        m->dims_ = j.at("dims").get<std::size_t>();
        m->priors_ = j.at("priors").get<std::vector<double>>();
        m->means_ = j.at("means").get<std::vector<double>>();
        m->variances_ = j.at("variances").get<std::vector<double>>();
        return m;
    }
    if (kind == "knn") {
        auto m = std::make_unique<KnnModel>();
        m->dims_ = j.at("dims").get<std::size_t>();
        m->classes_ = j.at("classes").get<std::size_t>();
        m->k_ = j.at("k").get<int>();
        m->points_ = j.at("points").get<std::vector<double>>();
        m->labels_ = j.at("labels").get<std::vector<int>>();
        return m;
    }
    if (kind == "tree") {
        auto m = std::make_unique<TreeModel>();
        m->dims_ = j.at("dims").get<std::size_t>();
        m->classes_ = j.at("classes").get<std::size_t>();
        for (const auto& nj : j.at("nodes")) {
            TreeModel::Node n;
            n.feature = nj.at("feature").get<int>();
            n.threshold = nj.at("threshold").get<double>();
            n.left = nj.at("left").get<int>();
            n.right = nj.at("right").get<int>();
            n.proba = nj.at("proba").get<std::vector<double>>();
            m->nodes_.push_back(std::move(n));
        }
        return m;
    }
    if (kind == "mlp") {
        auto m = std::make_unique<MlpModel>();
        m->dims_ = j.at("dims").get<std::size_t>();
        m->classes_ = j.at("classes").get<std::size_t>();
        m->hidden_ = j.at("hidden").get<std::size_t>();
        m->hiddenWeights_ = j.at("hiddenWeights").get<std::vector<double>>();
        m->hiddenBias_ = j.at("hiddenBias").get<std::vector<double>>();
        m->outputWeights_ = j.at("outputWeights").get<std::vector<double>>();
        m->outputBias_ = j.at("outputBias").get<std::vector<double>>();
        return m;
    }
    throw SchemaError("model: unknown kind '" + kind + "'");
}

}  // namespace dselect
