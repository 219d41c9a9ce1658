#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dselect/dataset.hpp"

namespace dselect {

enum class LearnerKind { Gnb, Knn, Tree, Mlp };

std::string learnerKindName(LearnerKind kind);
LearnerKind learnerKindFromName(const std::string& name);

struct LearnerConfig {
    // GNB: variances are floored at gnbVarianceFloorScale * max feature variance.
    double gnbVarianceFloorScale = 1e-9;
    // KNN
    int knnNeighbors = 5;
    // Decision tree (Gini impurity). maxDepth < 0 means unbounded;
    // featuresPerSplit <= 0 means all features.
    int treeMaxDepth = 10;
    int treeMinLeaf = 2;
    int treeFeaturesPerSplit = 0;
    // MLP: one logistic hidden layer, softmax output, cross-entropy loss.
    int mlpHiddenUnits = 32;
    double mlpLearningRate = 0.01;
    int mlpEpochs = 50;
    int mlpBatchSize = 32;
    std::uint64_t seed = 0;
};

// A fitted base classifier. Immutable after fit; predictProba returns a
// probability vector over the class list (sums to 1 within 1e-9).
class Model {
public:
    virtual ~Model() = default;
    virtual LearnerKind kind() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::size_t classCount() const = 0;
    virtual std::vector<double> predictProba(std::span<const double> x) const = 0;
    virtual void save(std::ostream& out) const = 0;
    virtual std::unique_ptr<Model> clone() const = 0;

    // argmax of predictProba; ties break toward the lower class index.
    int predictLabel(std::span<const double> x) const;
};

int argmaxLowestTie(std::span<const double> values);

std::unique_ptr<Model> fit(LearnerKind kind, const LearnerConfig& config, const Dataset& train);

// Versioned text serialization (kind tag + parameters).
void saveModel(const Model& model, std::ostream& out);
std::unique_ptr<Model> loadModel(std::istream& in);

class GnbModel final : public Model {
public:
    static std::unique_ptr<GnbModel> fit(const Dataset& train, const LearnerConfig& config);

    LearnerKind kind() const override { return LearnerKind::Gnb; }
    std::size_t dimension() const override { return dims_; }
    std::size_t classCount() const override { return priors_.size(); }
    std::vector<double> predictProba(std::span<const double> x) const override;
    void save(std::ostream& out) const override;
    std::unique_ptr<Model> clone() const override { return std::make_unique<GnbModel>(*this); }

    std::size_t dims_ = 0;
    std::vector<double> priors_;     // L
    std::vector<double> means_;      // L x d
    std::vector<double> variances_;  // L x d, floored
};

class KnnModel final : public Model {
public:
    static std::unique_ptr<KnnModel> fit(const Dataset& train, const LearnerConfig& config);

    LearnerKind kind() const override { return LearnerKind::Knn; }
    std::size_t dimension() const override { return dims_; }
    std::size_t classCount() const override { return classes_; }
    std::vector<double> predictProba(std::span<const double> x) const override;
    void save(std::ostream& out) const override;
    std::unique_ptr<Model> clone() const override { return std::make_unique<KnnModel>(*this); }

    std::size_t dims_ = 0;
    std::size_t classes_ = 2;
    int k_ = 5;
    std::vector<double> points_;  // n x d
    std::vector<int> labels_;     // n
};

class TreeModel final : public Model {
public:
    struct Node {
        int feature = -1;          // -1 for a leaf
        double threshold = 0.0;    // go left when x[feature] <= threshold
        int left = -1;
        int right = -1;
        std::vector<double> proba;  // leaf class frequencies
    };

    static std::unique_ptr<TreeModel> fit(const Dataset& train, const LearnerConfig& config,
                                          std::uint64_t seed);

    LearnerKind kind() const override { return LearnerKind::Tree; }
    std::size_t dimension() const override { return dims_; }
    std::size_t classCount() const override { return classes_; }
    std::vector<double> predictProba(std::span<const double> x) const override;
    void save(std::ostream& out) const override;
    std::unique_ptr<Model> clone() const override { return std::make_unique<TreeModel>(*this); }

    std::size_t dims_ = 0;
    std::size_t classes_ = 2;
    std::vector<Node> nodes_;  // node 0 is the root
};

class MlpModel final : public Model {
public:
    static std::unique_ptr<MlpModel> fit(const Dataset& train, const LearnerConfig& config);

    LearnerKind kind() const override { return LearnerKind::Mlp; }
    std::size_t dimension() const override { return dims_; }
    std::size_t classCount() const override { return classes_; }
    std::vector<double> predictProba(std::span<const double> x) const override;
    void save(std::ostream& out) const override;
    std::unique_ptr<Model> clone() const override { return std::make_unique<MlpModel>(*this); }

    // Flat parameter access (hidden weights, hidden bias, output weights,
    // output bias, in that order) and the mean cross-entropy loss with its
    // analytic gradient. Exposed so the gradient can be checked against
    // finite differences.
    std::vector<double> flatWeights() const;
    void setFlatWeights(const std::vector<double>& w);
    double lossAndGradient(const Dataset& batch, const std::vector<std::size_t>& rows,
                           std::vector<double>* gradOut) const;

    std::size_t dims_ = 0;
    std::size_t classes_ = 2;
    std::size_t hidden_ = 32;
    std::vector<double> hiddenWeights_;  // hidden x d
    std::vector<double> hiddenBias_;     // hidden
    std::vector<double> outputWeights_;  // L x hidden
    std::vector<double> outputBias_;     // L
};

}  // namespace dselect
