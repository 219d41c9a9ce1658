#include "dselect/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "dselect/errors.hpp"

namespace dselect {

ConfusionMatrix confusion(const std::vector<int>& labels, const std::vector<int>& predictions) {
    if (labels.size() != predictions.size()) {
        throw ValueError("confusion: labels and predictions differ in length");
    }
    if (labels.empty()) throw ValueError("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) {
            predictions[i] == 1 ? ++cm.tp : ++cm.fn;
        } else {
            predictions[i] == 1 ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

namespace {
double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

double accuracy(const ConfusionMatrix& cm) { return ratio(cm.tp + cm.tn, cm.total()); }
double precision(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fp); }
double recall(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fn); }
double specificity(const ConfusionMatrix& cm) { return ratio(cm.tn, cm.tn + cm.fp); }

double f1(const ConfusionMatrix& cm) {
    const double p = precision(cm);
    const double r = recall(cm);
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

double gmean(const ConfusionMatrix& cm) { return std::sqrt(recall(cm) * specificity(cm)); }

namespace {

void checkScored(const ScoredPredictions& sp, bool requireBothClasses) {
    if (sp.scores.size() != sp.labels.size()) {
        throw ValueError("metrics: scores and labels differ in length");
    }
    if (sp.scores.empty()) throw ValueError("metrics: empty input");
    if (requireBothClasses) {
        std::size_t positives = 0;
        for (int y : sp.labels) positives += y == 1 ? 1 : 0;
        if (positives == 0 || positives == sp.labels.size()) {
            throw ValueError("metrics: both classes required");
        }
    }
}

}  // namespace

double auc(const ScoredPredictions& sp) {
    checkScored(sp, /*requireBothClasses=*/true);
    const std::size_t n = sp.scores.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sp.scores[a] < sp.scores[b]; });

    // Mid-ranks over tied scores.
    double positiveRankSum = 0.0;
    std::size_t positives = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && sp.scores[order[j]] == sp.scores[order[i]]) ++j;
        const double midRank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (sp.labels[order[k]] == 1) {
                positiveRankSum += midRank;
                ++positives;
            }
        }
        i = j;
    }
    const std::size_t negatives = n - positives;
    const double u = positiveRankSum -
                     static_cast<double>(positives) * static_cast<double>(positives + 1) / 2.0;
    return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double brier(const ScoredPredictions& sp) {
    checkScored(sp, /*requireBothClasses=*/false);
    double sum = 0.0;
    for (std::size_t i = 0; i < sp.scores.size(); ++i) {
        const double dev = sp.scores[i] - static_cast<double>(sp.labels[i]);
        sum += dev * dev;
    }
    return sum / static_cast<double>(sp.scores.size());
}

namespace {

// Lower convex hull (increasing slopes) of the cumulative score distribution
// points. x = F0 (fraction of negatives at or below a threshold), y = F1
// (fraction of positives at or below it); runs from (0,0) to (1,1).
struct HullPoint {
    double f0;
    double f1;
};

std::vector<HullPoint> scoreDistributionHull(const ScoredPredictions& sp, std::size_t negatives,
                                             std::size_t positives) {
    const std::size_t n = sp.scores.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sp.scores[a] < sp.scores[b]; });

    std::vector<HullPoint> points;
    points.push_back({0.0, 0.0});
    std::size_t cum0 = 0, cum1 = 0, i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && sp.scores[order[j]] == sp.scores[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) {
            sp.labels[order[k]] == 1 ? ++cum1 : ++cum0;
        }
        points.push_back({static_cast<double>(cum0) / static_cast<double>(negatives),
                          static_cast<double>(cum1) / static_cast<double>(positives)});
        i = j;
    }

    std::vector<HullPoint> hull;
    for (const auto& p : points) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            const double cross =
                (b.f0 - a.f0) * (p.f1 - a.f1) - (b.f1 - a.f1) * (p.f0 - a.f0);
            if (cross <= 0.0) {
                hull.pop_back();  // b is on or above segment a-p
            } else {
                break;
            }
        }
        hull.push_back(p);
    }
    return hull;
}

}  // namespace

double hMeasure(const ScoredPredictions& sp, double betaA, double betaB) {
    checkScored(sp, /*requireBothClasses=*/true);
    if (betaA <= 0.0 || betaB <= 0.0) throw ValueError("h-measure: beta parameters must be > 0");

    std::size_t positives = 0;
    for (int y : sp.labels) positives += y == 1 ? 1 : 0;
    const std::size_t negatives = sp.labels.size() - positives;
    const double pi0 = static_cast<double>(negatives) / static_cast<double>(sp.labels.size());
    const double pi1 = static_cast<double>(positives) / static_cast<double>(sp.labels.size());

    // Expected-cost pieces under Beta(a,b):
    //   int_lo^hi c u(c) dc and int_lo^hi (1-c) u(c) dc
    // via the regularized incomplete beta function.
    const double meanC = betaA / (betaA + betaB);
    auto costMass = [&](double lo, double hi) {
        return meanC * (boost::math::ibeta(betaA + 1.0, betaB, hi) -
                        boost::math::ibeta(betaA + 1.0, betaB, lo));
    };
    auto complementMass = [&](double lo, double hi) {
        return (1.0 - meanC) * (boost::math::ibeta(betaA, betaB + 1.0, hi) -
                                boost::math::ibeta(betaA, betaB + 1.0, lo));
    };

    const auto hull = scoreDistributionHull(sp, negatives, positives);

    // Cost breakpoints where the optimal hull vertex switches. Vertex i is
    // optimal for c in [cuts[i-1], cuts[i]].
    std::vector<double> cuts;
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        const double df0 = hull[e + 1].f0 - hull[e].f0;
        const double df1 = hull[e + 1].f1 - hull[e].f1;
        if (df0 <= 0.0) {
            cuts.push_back(1.0);  // vertical edge: slope infinite
        } else {
            cuts.push_back(pi1 * (df1 / df0) / (pi0 + pi1 * (df1 / df0)));
        }
    }

    double loss = 0.0;
    for (std::size_t v = 0; v < hull.size(); ++v) {
        const double lo = v == 0 ? 0.0 : cuts[v - 1];
        const double hi = v == hull.size() - 1 ? 1.0 : cuts[v];
        if (hi <= lo) continue;
        // L(c; vertex) = c*pi0*(1 - F0) + (1-c)*pi1*F1
        loss += pi0 * (1.0 - hull[v].f0) * costMass(lo, hi) +
                pi1 * hull[v].f1 * complementMass(lo, hi);
    }

    // Scoreless classifier: always-negative for c < pi1, always-positive after.
    const double lossMax = pi0 * costMass(0.0, pi1) + pi1 * complementMass(pi1, 1.0);
    if (lossMax <= 0.0) return 0.0;
    return 1.0 - loss / lossMax;
}

}  // namespace dselect
