#include "dselect/techniques.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dselect/errors.hpp"
#include "dselect/rng.hpp"

namespace dselect {

namespace {

const std::vector<std::pair<Technique, const char*>>& tagTable() {
    static const std::vector<std::pair<Technique, const char*>> table = {
        {Technique::Rank, "rank"},
        {Technique::Ola, "ola"},
        {Technique::Lca, "lca"},
        {Technique::Apriori, "apriori"},
        {Technique::Aposteriori, "aposteriori"},
        {Technique::Mcb, "mcb"},
        {Technique::Mla, "mla"},
        {Technique::DesCluster, "descluster"},
        {Technique::DesKnn, "desknn"},
        {Technique::KnoraEliminate, "knorae"},
        {Technique::KnoraUnion, "knorau"},
        {Technique::Desp, "desp"},
        {Technique::Knop, "knop"},
        {Technique::MetaDes, "metades"},
    };
    return table;
}

}  // namespace

std::string techniqueTag(Technique technique) {
    for (const auto& [t, tag] : tagTable()) {
        if (t == technique) return tag;
    }
    throw ValueError("unknown technique");
}

Technique techniqueFromTag(const std::string& tag) {
    for (const auto& [t, name] : tagTable()) {
        if (tag == name) return t;
    }
    throw SchemaError("unknown technique tag '" + tag + "'");
}

const std::vector<Technique>& allTechniques() {
    static const std::vector<Technique> all = [] {
        std::vector<Technique> v;
        for (const auto& [t, tag] : tagTable()) v.push_back(t);
        return v;
    }();
    return all;
}

std::size_t DsConfig::resolveAccuracyKeep(std::size_t poolSize) const {
    std::size_t n = accuracyKeep ? *accuracyKeep
                                 : static_cast<std::size_t>(
                                       std::ceil(0.5 * static_cast<double>(poolSize)));
    return std::clamp<std::size_t>(n, 1, poolSize);
}

std::size_t DsConfig::resolveDiversityKeep(std::size_t poolSize) const {
    std::size_t j = diversityKeep ? *diversityKeep
                                  : static_cast<std::size_t>(
                                        std::ceil(0.3 * static_cast<double>(poolSize)));
    return std::clamp<std::size_t>(j, 1, resolveAccuracyKeep(poolSize));
}

// ---------------------------------------------------------------------------
// Competence measures

CompetenceVector competenceRank(const DselCache& cache, const RegionOfCompetence& region) {
    if (region.size() == 0) throw ValueError("competence: empty region");
    CompetenceVector delta(cache.memberCount, 0.0);
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        std::size_t streak = 0;
        for (int idx : region.indices) {
            if (!cache.correctAt(m, static_cast<std::size_t>(idx))) break;
            ++streak;
        }
        delta[m] = static_cast<double>(streak);
    }
    return delta;
}

CompetenceVector competenceOla(const DselCache& cache, const RegionOfCompetence& region) {
    if (region.size() == 0) throw ValueError("competence: empty region");
    CompetenceVector delta(cache.memberCount, 0.0);
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        double correct = 0.0;
        for (int idx : region.indices) {
            if (cache.correctAt(m, static_cast<std::size_t>(idx))) correct += 1.0;
        }
        delta[m] = correct / static_cast<double>(region.size());
    }
    return delta;
}

CompetenceVector competenceLca(const DselCache& cache, const RegionOfCompetence& region,
                               const std::vector<int>& queryHard) {
    if (region.size() == 0) throw ValueError("competence: empty region");
    CompetenceVector delta(cache.memberCount, 0.0);
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        const int omega = queryHard[m];
        double matching = 0.0, predicted = 0.0;
        for (int idx : region.indices) {
            const auto k = static_cast<std::size_t>(idx);
            if (cache.hardAt(m, k) != omega) continue;
            predicted += 1.0;
            if (cache.labels[k] == omega) matching += 1.0;
        }
        delta[m] = predicted > 0.0 ? matching / predicted : 0.0;
    }
    return delta;
}

CompetenceVector competenceApriori(const DselCache& cache, const RegionOfCompetence& region) {
    if (region.size() == 0) throw ValueError("competence: empty region");
    CompetenceVector delta(cache.memberCount, 0.0);
    double weightSum = 0.0;
    for (double w : region.weights) weightSum += w;
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        double acc = 0.0;
        for (std::size_t r = 0; r < region.size(); ++r) {
            const auto k = static_cast<std::size_t>(region.indices[r]);
            const auto trueClass = static_cast<std::size_t>(cache.labels[k]);
            acc += cache.softAt(m, k, trueClass) * region.weights[r];
        }
        delta[m] = acc / weightSum;
    }
    return delta;
}

CompetenceVector competenceAposteriori(const DselCache& cache, const RegionOfCompetence& region,
                                       const std::vector<int>& queryHard) {
    if (region.size() == 0) throw ValueError("competence: empty region");
    CompetenceVector delta(cache.memberCount, 0.0);
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        const auto omega = static_cast<std::size_t>(queryHard[m]);
        double numerator = 0.0, denominator = 0.0;
        for (std::size_t r = 0; r < region.size(); ++r) {
            const auto k = static_cast<std::size_t>(region.indices[r]);
            const double mass = cache.softAt(m, k, omega) * region.weights[r];
            denominator += mass;
            if (static_cast<std::size_t>(cache.labels[k]) == omega) numerator += mass;
        }
        delta[m] = denominator > 0.0 ? numerator / denominator : 0.0;
    }
    return delta;
}

CompetenceVector competenceMla(const DselCache& cache, const RegionOfCompetence& region) {
    if (region.size() == 0) throw ValueError("competence: empty region");
    CompetenceVector delta(cache.memberCount, 0.0);
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        double acc = 0.0;
        for (std::size_t r = 0; r < region.size(); ++r) {
            const auto k = static_cast<std::size_t>(region.indices[r]);
            const auto trueClass = static_cast<std::size_t>(cache.labels[k]);
            acc += cache.softAt(m, k, trueClass) * region.weights[r];
        }
        delta[m] = acc;
    }
    return delta;
}

SingleSelection selectSingleBest(const CompetenceVector& competence, std::optional<double> gap) {
    if (competence.empty()) throw ValueError("selection: empty competence vector");
    const int best = argmaxLowestTie(competence);
    SingleSelection selection{best, true};
    if (gap && competence.size() > 1) {
        double second = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < competence.size(); ++i) {
            if (static_cast<int>(i) == best) continue;
            second = std::max(second, competence[i]);
        }
        selection.significant = competence[static_cast<std::size_t>(best)] - second > *gap;
    }
    return selection;
}

// ---------------------------------------------------------------------------
// Ensemble selection

namespace {

std::vector<int> allMembers(std::size_t count) {
    std::vector<int> all(count);
    std::iota(all.begin(), all.end(), 0);
    return all;
}

VoteResult voteAmong(const std::vector<int>& selected, const std::vector<int>& queryHard,
                     const std::vector<double>* weights, std::size_t classCount,
                     bool usedFallback) {
    std::vector<int> predictions;
    predictions.reserve(selected.size());
    for (int i : selected) predictions.push_back(queryHard[static_cast<std::size_t>(i)]);
    VoteResult result = majorityVote(predictions, weights, classCount);
    result.selectedMembers = selected;
    result.usedFallback = usedFallback;
    return result;
}

}  // namespace

VoteResult mcbSelect(const DselCache& cache, const RegionOfCompetence& region,
                     const std::vector<int>& queryHard, const DsConfig& config) {
    if (region.size() == 0) throw ValueError("mcb: empty region");
    // Keep region samples whose output profile is similar to the query's.
    RegionOfCompetence filtered;
    for (std::size_t r = 0; r < region.size(); ++r) {
        const auto k = static_cast<std::size_t>(region.indices[r]);
        std::size_t agreements = 0;
        for (std::size_t m = 0; m < cache.memberCount; ++m) {
            if (queryHard[m] == cache.hardAt(m, k)) ++agreements;
        }
        const double similarity =
            static_cast<double>(agreements) / static_cast<double>(cache.memberCount);
        if (similarity > config.mcbSimilarityThreshold) {
            filtered.indices.push_back(region.indices[r]);
            filtered.distances.push_back(region.distances[r]);
            filtered.weights.push_back(region.weights[r]);
        }
    }
    const RegionOfCompetence& effective = filtered.size() > 0 ? filtered : region;
    const auto delta = competenceOla(cache, effective);
    const auto selection = selectSingleBest(delta, config.selectionGap);
    if (selection.significant) {
        return voteAmong({selection.index}, queryHard, nullptr, cache.classCount, false);
    }
    return voteAmong(allMembers(cache.memberCount), queryHard, nullptr, cache.classCount, true);
}

VoteResult knoraEliminate(const DselCache& cache, const RegionOfCompetence& region,
                          const std::vector<int>& queryHard) {
    if (region.size() == 0) throw ValueError("knora-e: empty region");
    for (std::size_t r = region.size(); r >= 1; --r) {
        std::vector<int> selected;
        for (std::size_t m = 0; m < cache.memberCount; ++m) {
            bool allCorrect = true;
            for (std::size_t i = 0; i < r; ++i) {
                if (!cache.correctAt(m, static_cast<std::size_t>(region.indices[i]))) {
                    allCorrect = false;
                    break;
                }
            }
            if (allCorrect) selected.push_back(static_cast<int>(m));
        }
        if (!selected.empty()) {
            return voteAmong(selected, queryHard, nullptr, cache.classCount, false);
        }
    }
    return voteAmong(allMembers(cache.memberCount), queryHard, nullptr, cache.classCount, true);
}

VoteResult knoraUnion(const DselCache& cache, const RegionOfCompetence& region,
                      const std::vector<int>& queryHard) {
    if (region.size() == 0) throw ValueError("knora-u: empty region");
    std::vector<int> selected;
    std::vector<double> weights;
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        double correct = 0.0;
        for (int idx : region.indices) {
            if (cache.correctAt(m, static_cast<std::size_t>(idx))) correct += 1.0;
        }
        if (correct > 0.0) {
            selected.push_back(static_cast<int>(m));
            weights.push_back(correct);
        }
    }
    if (selected.empty()) {
        return voteAmong(allMembers(cache.memberCount), queryHard, nullptr, cache.classCount,
                         true);
    }
    return voteAmong(selected, queryHard, &weights, cache.classCount, false);
}

VoteResult despSelect(const DselCache& cache, const RegionOfCompetence& region,
                      const std::vector<int>& queryHard) {
    const auto accuracy = competenceOla(cache, region);
    const double random = 1.0 / static_cast<double>(cache.classCount);
    std::vector<int> selected;
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        if (accuracy[m] - random > 0.0) selected.push_back(static_cast<int>(m));
    }
    if (selected.empty()) {
        return voteAmong(allMembers(cache.memberCount), queryHard, nullptr, cache.classCount,
                         true);
    }
    return voteAmong(selected, queryHard, nullptr, cache.classCount, false);
}

std::vector<int> rankAccuracyDiversity(const DselCache& cache,
                                       const std::vector<int>& sampleIndices,
                                       std::size_t accuracyKeep, std::size_t diversityKeep) {
    if (sampleIndices.empty()) throw ValueError("ranking: no samples");
    const std::size_t M = cache.memberCount;
    accuracyKeep = std::clamp<std::size_t>(accuracyKeep, 1, M);
    diversityKeep = std::clamp<std::size_t>(diversityKeep, 1, accuracyKeep);
    const auto sampleCount = static_cast<double>(sampleIndices.size());

    std::vector<double> accuracy(M, 0.0);
    for (std::size_t m = 0; m < M; ++m) {
        for (int idx : sampleIndices) {
            if (cache.correctAt(m, static_cast<std::size_t>(idx))) accuracy[m] += 1.0;
        }
        accuracy[m] /= sampleCount;
    }
    std::vector<int> order = allMembers(M);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return accuracy[static_cast<std::size_t>(a)] > accuracy[static_cast<std::size_t>(b)];
    });
    std::vector<int> topAccurate(order.begin(), order.begin() + static_cast<long>(accuracyKeep));

    // Mean pairwise double-fault within the accurate set; lower = more diverse.
    std::vector<double> meanDoubleFault(topAccurate.size(), 0.0);
    if (topAccurate.size() > 1) {
        for (std::size_t a = 0; a < topAccurate.size(); ++a) {
            for (std::size_t b = a + 1; b < topAccurate.size(); ++b) {
                double bothWrong = 0.0;
                for (int idx : sampleIndices) {
                    const auto k = static_cast<std::size_t>(idx);
                    if (!cache.correctAt(static_cast<std::size_t>(topAccurate[a]), k) &&
                        !cache.correctAt(static_cast<std::size_t>(topAccurate[b]), k)) {
                        bothWrong += 1.0;
                    }
                }
                const double df = bothWrong / sampleCount;
                meanDoubleFault[a] += df;
                meanDoubleFault[b] += df;
            }
        }
        for (auto& v : meanDoubleFault) v /= static_cast<double>(topAccurate.size() - 1);
    }
    std::vector<std::size_t> diversityOrder(topAccurate.size());
    std::iota(diversityOrder.begin(), diversityOrder.end(), 0);
    std::stable_sort(diversityOrder.begin(), diversityOrder.end(), [&](std::size_t a, std::size_t b) {
        if (meanDoubleFault[a] != meanDoubleFault[b]) return meanDoubleFault[a] < meanDoubleFault[b];
        return topAccurate[a] < topAccurate[b];
    });

    std::vector<int> selected;
    for (std::size_t i = 0; i < diversityKeep; ++i) {
        selected.push_back(topAccurate[diversityOrder[i]]);
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

VoteResult desknnSelect(const DselCache& cache, const RegionOfCompetence& region,
                        const std::vector<int>& queryHard, std::size_t accuracyKeep,
                        std::size_t diversityKeep) {
    if (region.size() == 0) throw ValueError("des-knn: empty region");
    const auto selected = rankAccuracyDiversity(cache, region.indices, accuracyKeep, diversityKeep);
    return voteAmong(selected, queryHard, nullptr, cache.classCount, false);
}

VoteResult knopSelect(const DselCache& cache, const OutputProfile& queryProfile,
                      const std::vector<int>& queryHard, std::size_t k) {
    const auto region = knopRegion(cache, queryProfile, k);
    return knoraUnion(cache, region, queryHard);
}

// ---------------------------------------------------------------------------
// DES-Clustering

ClusterRanking fitClusterRanking(const DselCache& cache, const Dataset& dsel,
                                 const DsConfig& config, std::uint64_t seed) {
    ClusterRanking ranking;
    const std::size_t k = std::clamp<std::size_t>(config.clusterCount, 1, dsel.rowCount());
    ranking.clusters = fitKmeans(dsel, k, seed);

    std::vector<int> allSamples(dsel.rowCount());
    std::iota(allSamples.begin(), allSamples.end(), 0);
    const std::size_t n = config.resolveAccuracyKeep(cache.memberCount);
    const std::size_t j = config.resolveDiversityKeep(cache.memberCount);
    ranking.globalSelected = rankAccuracyDiversity(cache, allSamples, n, j);

    std::vector<std::vector<int>> samplesPerCluster(k);
    for (std::size_t i = 0; i < dsel.rowCount(); ++i) {
        samplesPerCluster[static_cast<std::size_t>(ranking.clusters.assignments[i])].push_back(
            static_cast<int>(i));
    }
    ranking.selectedPerCluster.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        ranking.selectedPerCluster[c] =
            samplesPerCluster[c].empty()
                ? ranking.globalSelected
                : rankAccuracyDiversity(cache, samplesPerCluster[c], n, j);
    }
    return ranking;
}

VoteResult desclusterSelect(const ClusterRanking& ranking, std::span<const double> x,
                            const std::vector<int>& queryHard, std::size_t classCount) {
    const auto cluster = static_cast<std::size_t>(assignCluster(ranking.clusters, x));
    const auto& selected = ranking.selectedPerCluster[cluster];
    return voteAmong(selected, queryHard, nullptr, classCount, false);
}

// ---------------------------------------------------------------------------
// META-DES

double MetaDesModel::competenceProbability(const std::vector<double>& features) const {
    if (!competenceClassifier) return constantCompetence;
    if (features.size() != featureLength()) {
        throw ValueError("metades: feature vector length " + std::to_string(features.size()) +
                         ", expected " + std::to_string(featureLength()));
    }
    return competenceClassifier->predictProba(features)[1];
}

std::vector<double> metadesFeatures(const DselCache& cache, const RegionOfCompetence& region,
                                    const RegionOfCompetence& profileRegion,
                                    const OutputProfile& queryProfile, std::size_t member) {
    std::vector<double> features;
    features.reserve(region.size() + region.size() + 1 + profileRegion.size() + 1);
    double regionAccuracy = 0.0;
    for (int idx : region.indices) {  // f1
        const double bit = cache.correctAt(member, static_cast<std::size_t>(idx)) ? 1.0 : 0.0;
        features.push_back(bit);
        regionAccuracy += bit;
    }
    for (int idx : region.indices) {  // f2
        const auto k = static_cast<std::size_t>(idx);
        features.push_back(cache.softAt(member, k, static_cast<std::size_t>(cache.labels[k])));
    }
    features.push_back(regionAccuracy / static_cast<double>(region.size()));  // f3
    for (int idx : profileRegion.indices) {  // f4
        features.push_back(cache.correctAt(member, static_cast<std::size_t>(idx)) ? 1.0 : 0.0);
    }
    double maxPosterior = 0.0;  // f5
    for (std::size_t c = 0; c < cache.classCount; ++c) {
        maxPosterior = std::max(maxPosterior, queryProfile.soft[member * cache.classCount + c]);
    }
    features.push_back(maxPosterior);
    return features;
}

namespace {

// Fraction of members agreeing with the plurality label.
double poolConsensus(const OutputProfile& profile, std::size_t classCount) {
    std::vector<double> votes(classCount, 0.0);
    for (int label : profile.hard) votes[static_cast<std::size_t>(label)] += 1.0;
    return *std::max_element(votes.begin(), votes.end()) /
           static_cast<double>(profile.hard.size());
}

}  // namespace

MetaDesModel metadesTrain(const Pool& pool, const DselCache& cache, const Dataset& dsel,
                          const Dataset& trainData, const DsConfig& config, std::uint64_t seed) {
    if (trainData.rowCount() == 0 || dsel.rowCount() == 0) {
        throw ValueError("metades: training data and DSEL must be nonempty");
    }
    MetaDesModel model;
    model.regionSize = std::min(config.regionSize, dsel.rowCount());
    model.profileNeighbors = std::min(config.metadesProfileNeighbors, dsel.rowCount());
    model.consensusThreshold = config.metadesConsensus;

    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    for (std::size_t i = 0; i < trainData.rowCount(); ++i) {
        const auto x = trainData.row(i);
        const auto profile = outputProfile(pool, x);
        if (poolConsensus(profile, cache.classCount) >= model.consensusThreshold) continue;
        const auto region = knnRegion(dsel, x, model.regionSize);
        const auto profileRegion = knopRegion(cache, profile, model.profileNeighbors);
        for (std::size_t m = 0; m < pool.size(); ++m) {
            features.push_back(metadesFeatures(cache, region, profileRegion, profile, m));
            labels.push_back(profile.hard[m] == trainData.label(i) ? 1 : 0);
        }
    }
    if (features.empty()) {
        throw ValueError(
            "metades: no training sample fell below the consensus threshold; increase h_c");
    }

    // 25% of the meta-instances are held out for validation and unused.
    std::vector<std::size_t> order(features.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(deriveSeed(seed, {0x3E7A}));
    rng.shuffle(order);
    const auto validationCount = static_cast<std::size_t>(
        std::llround(0.25 * static_cast<double>(features.size())));
    const std::size_t trainCount = features.size() - validationCount;
    model.trainInstanceCount = trainCount;
    model.validationInstanceCount = validationCount;

    Dataset metaTrain(trainCount, model.featureLength());
    bool sawCompetent = false, sawIncompetent = false;
    for (std::size_t r = 0; r < trainCount; ++r) {
        const std::size_t src = order[r];
        std::copy(features[src].begin(), features[src].end(), metaTrain.mutableRow(r).begin());
        metaTrain.label(r) = labels[src];
        (labels[src] == 1 ? sawCompetent : sawIncompetent) = true;
    }
    if (!sawCompetent || !sawIncompetent) {
        // Degenerate meta-training set: every member always (in)competent.
        model.competenceClassifier = nullptr;
        model.constantCompetence = sawCompetent ? 1.0 : 0.0;
        return model;
    }
    LearnerConfig learnerConfig = config.metadesLearnerConfig;
    learnerConfig.seed = deriveSeed(seed, {0x3E7B});
    model.competenceClassifier = fit(config.metadesLearner, learnerConfig, metaTrain);
    return model;
}

VoteResult metadesSelect(const MetaDesModel& model, const DselCache& cache, const Dataset& dsel,
                         std::span<const double> x, const OutputProfile& queryProfile) {
    const auto region = knnRegion(dsel, x, model.regionSize);
    const auto profileRegion = knopRegion(cache, queryProfile, model.profileNeighbors);
    std::vector<int> selected;
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        const auto features = metadesFeatures(cache, region, profileRegion, queryProfile, m);
        if (model.competenceProbability(features) > 0.5) {
            selected.push_back(static_cast<int>(m));
        }
    }
    if (selected.empty()) {
        return voteAmong(allMembers(cache.memberCount), queryProfile.hard, nullptr,
                         cache.classCount, true);
    }
    return voteAmong(selected, queryProfile.hard, nullptr, cache.classCount, false);
}

// ---------------------------------------------------------------------------
// Front door

DsContext prepareContext(const Pool& pool, const Dataset& dsel, const Dataset* metadesTrainData,
                         const DsConfig& config, const std::vector<Technique>& techniques,
                         std::uint64_t seed) {
    DsContext context;
    context.pool = &pool;
    context.dsel = &dsel;
    context.cache = buildDselCache(pool, dsel);
    context.config = config;
    context.config.regionSize = std::min(config.regionSize, dsel.rowCount());
    context.config.metadesProfileNeighbors =
        std::min(config.metadesProfileNeighbors, dsel.rowCount());
    context.config.clusterCount = std::clamp<std::size_t>(config.clusterCount, 1, dsel.rowCount());

    const bool wantsCluster =
        std::find(techniques.begin(), techniques.end(), Technique::DesCluster) != techniques.end();
    const bool wantsMetades =
        std::find(techniques.begin(), techniques.end(), Technique::MetaDes) != techniques.end();
    if (wantsCluster) {
        context.clusters =
            fitClusterRanking(context.cache, dsel, context.config, deriveSeed(seed, {0xC15}));
    }
    if (wantsMetades) {
        if (!metadesTrainData) {
            throw ValueError("metades: training data required to prepare the technique");
        }
        context.metades = metadesTrain(pool, context.cache, dsel, *metadesTrainData,
                                       context.config, deriveSeed(seed, {0x3E7}));
    }
    return context;
}

Classification classify(const DsContext& context, Technique technique, std::span<const double> x) {
    const auto& cache = context.cache;
    const auto profile = outputProfile(*context.pool, x);
    const auto& queryHard = profile.hard;

    auto region = [&]() {
        return knnRegion(*context.dsel, x, context.config.regionSize);
    };

    VoteResult vote;
    switch (technique) {
        case Technique::Rank:
            vote = voteAmong({selectSingleBest(competenceRank(cache, region())).index}, queryHard,
                             nullptr, cache.classCount, false);
            break;
        case Technique::Ola:
            vote = voteAmong({selectSingleBest(competenceOla(cache, region())).index}, queryHard,
                             nullptr, cache.classCount, false);
            break;
        case Technique::Lca:
            vote = voteAmong({selectSingleBest(competenceLca(cache, region(), queryHard)).index},
                             queryHard, nullptr, cache.classCount, false);
            break;
        case Technique::Mla:
            vote = voteAmong({selectSingleBest(competenceMla(cache, region())).index}, queryHard,
                             nullptr, cache.classCount, false);
            break;
        case Technique::Apriori: {
            const auto selection =
                selectSingleBest(competenceApriori(cache, region()), context.config.selectionGap);
            vote = selection.significant
                       ? voteAmong({selection.index}, queryHard, nullptr, cache.classCount, false)
                       : voteAmong(allMembers(cache.memberCount), queryHard, nullptr,
                                   cache.classCount, true);
            break;
        }
        case Technique::Aposteriori: {
            const auto selection = selectSingleBest(
                competenceAposteriori(cache, region(), queryHard), context.config.selectionGap);
            vote = selection.significant
                       ? voteAmong({selection.index}, queryHard, nullptr, cache.classCount, false)
                       : voteAmong(allMembers(cache.memberCount), queryHard, nullptr,
                                   cache.classCount, true);
            break;
        }
        case Technique::Mcb:
            vote = mcbSelect(cache, region(), queryHard, context.config);
            break;
        case Technique::DesCluster:
            if (!context.clusters) throw ValueError("descluster: context not prepared for it");
            vote = desclusterSelect(*context.clusters, x, queryHard, cache.classCount);
            break;
        case Technique::DesKnn:
            vote = desknnSelect(cache, region(), queryHard,
                                context.config.resolveAccuracyKeep(cache.memberCount),
                                context.config.resolveDiversityKeep(cache.memberCount));
            break;
        case Technique::KnoraEliminate:
            vote = knoraEliminate(cache, region(), queryHard);
            break;
        case Technique::KnoraUnion:
            vote = knoraUnion(cache, region(), queryHard);
            break;
        case Technique::Desp:
            vote = despSelect(cache, region(), queryHard);
            break;
        case Technique::Knop:
            vote = knopSelect(cache, profile, queryHard, context.config.regionSize);
            break;
        case Technique::MetaDes:
            if (!context.metades) throw ValueError("metades: context not prepared for it");
            vote = metadesSelect(*context.metades, cache, *context.dsel, x, profile);
            break;
    }

    Classification result;
    result.label = vote.label;
    result.selectedMembers = vote.selectedMembers;
    std::sort(result.selectedMembers.begin(), result.selectedMembers.end());
    double massSum = 0.0;
    for (double v : vote.voteMass) massSum += v;
    result.proba.resize(vote.voteMass.size());
    for (std::size_t c = 0; c < vote.voteMass.size(); ++c) {
        result.proba[c] = vote.voteMass[c] / massSum;
    }
    return result;
}

}  // namespace dselect
