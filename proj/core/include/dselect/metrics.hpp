#pragma once

#include <cstddef>
#include <vector>

namespace dselect {

// Binary confusion counts with class 1 as the positive (charged-off) class.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fn + fp + tn; }
};

ConfusionMatrix confusion(const std::vector<int>& labels, const std::vector<int>& predictions);

// Degenerate denominators yield 0 so sweep tables stay total.
double accuracy(const ConfusionMatrix& cm);
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double specificity(const ConfusionMatrix& cm);
double f1(const ConfusionMatrix& cm);
double gmean(const ConfusionMatrix& cm);

// Scores are probabilities of class 1, aligned with the 0/1 labels.
struct ScoredPredictions {
    std::vector<double> scores;
    std::vector<int> labels;
};

// Rank-based AUC estimator (tied scores count one half), equal to the
// trapezoidal area under the ROC curve. Requires both classes.
double auc(const ScoredPredictions& sp);

// Hand's H-measure: one minus the ratio of the expected minimum
// misclassification loss (cost severity drawn from Beta(a,b), optimal
// threshold per cost, evaluated on the ROC convex hull) to the loss of the
// scoreless classifier. Requires both classes.
double hMeasure(const ScoredPredictions& sp, double betaA = 2.0, double betaB = 2.0);

// Mean squared error of the probabilistic predictions.
double brier(const ScoredPredictions& sp);

}  // namespace dselect
