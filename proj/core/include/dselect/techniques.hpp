#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dselect/dataset.hpp"
#include "dselect/learners.hpp"
#include "dselect/pool.hpp"
#include "dselect/region.hpp"

namespace dselect {

enum class Technique {
    Rank,
    Ola,
    Lca,
    Apriori,
    Aposteriori,
    Mcb,
    Mla,
    DesCluster,
    DesKnn,
    KnoraEliminate,
    KnoraUnion,
    Desp,
    Knop,
    MetaDes,
};

// Stable tags used in config files and report columns.
std::string techniqueTag(Technique technique);
Technique techniqueFromTag(const std::string& tag);
const std::vector<Technique>& allTechniques();

struct DsConfig {
    std::size_t regionSize = 7;  // K
    // Competence gap that counts as "significantly better" for A Priori,
    // A Posteriori and MCB single-classifier selection.
    double selectionGap = 0.1;
    double mcbSimilarityThreshold = 0.7;  // zeta
    // DES-KNN / DES-Clustering: keep N most accurate then J most diverse.
    // Unset means ceil(0.5*M) and ceil(0.3*M).
    std::optional<std::size_t> accuracyKeep;   // N
    std::optional<std::size_t> diversityKeep;  // J
    std::size_t clusterCount = 5;
    // META-DES
    double metadesConsensus = 0.7;           // h_c
    std::size_t metadesProfileNeighbors = 5;  // K_p
    LearnerKind metadesLearner = LearnerKind::Gnb;
    LearnerConfig metadesLearnerConfig{};

    std::size_t resolveAccuracyKeep(std::size_t poolSize) const;
    std::size_t resolveDiversityKeep(std::size_t poolSize) const;
};

// Per-member competence estimates (delta), member order = pool order.
using CompetenceVector = std::vector<double>;

// Length of the maximal all-correct prefix over the region, nearest first.
CompetenceVector competenceRank(const DselCache& cache, const RegionOfCompetence& region);
// Fraction of region samples classified correctly.
CompetenceVector competenceOla(const DselCache& cache, const RegionOfCompetence& region);
// Local accuracy restricted to each member's own predicted query class:
// of the region samples the member labels omega, the fraction truly omega.
CompetenceVector competenceLca(const DselCache& cache, const RegionOfCompetence& region,
                               const std::vector<int>& queryHard);
// Distance-weighted mean of the true-class posteriors over the region.
CompetenceVector competenceApriori(const DselCache& cache, const RegionOfCompetence& region);
// Distance-weighted posterior mass on samples truly of the member's predicted
// query class, normalized by its total posterior mass for that class.
CompetenceVector competenceAposteriori(const DselCache& cache, const RegionOfCompetence& region,
                                       const std::vector<int>& queryHard);
// Unnormalized distance-weighted sum of true-class posteriors.
CompetenceVector competenceMla(const DselCache& cache, const RegionOfCompetence& region);

struct SingleSelection {
    int index = 0;
    // False when no competence clears the gap and the caller must combine the
    // whole pool instead.
    bool significant = true;
};
// Plain argmax when gap is unset; otherwise the argmax only if it beats the
// second-best competence by more than the gap. Ties break to the lower index.
SingleSelection selectSingleBest(const CompetenceVector& competence,
                                 std::optional<double> gap = std::nullopt);

VoteResult mcbSelect(const DselCache& cache, const RegionOfCompetence& region,
                     const std::vector<int>& queryHard, const DsConfig& config);
VoteResult knoraEliminate(const DselCache& cache, const RegionOfCompetence& region,
                          const std::vector<int>& queryHard);
VoteResult knoraUnion(const DselCache& cache, const RegionOfCompetence& region,
                      const std::vector<int>& queryHard);
VoteResult despSelect(const DselCache& cache, const RegionOfCompetence& region,
                      const std::vector<int>& queryHard);
VoteResult desknnSelect(const DselCache& cache, const RegionOfCompetence& region,
                        const std::vector<int>& queryHard, std::size_t accuracyKeep,
                        std::size_t diversityKeep);
VoteResult knopSelect(const DselCache& cache, const OutputProfile& queryProfile,
                      const std::vector<int>& queryHard, std::size_t k);

// Accuracy-then-diversity member ranking shared by DES-KNN and
// DES-Clustering: keep the N most accurate over the given samples, then of
// those the J with the smallest mean pairwise double-fault. Returns ascending
// member indices.
std::vector<int> rankAccuracyDiversity(const DselCache& cache,
                                       const std::vector<int>& sampleIndices,
                                       std::size_t accuracyKeep, std::size_t diversityKeep);

// DES-Clustering state: k-means over DSEL plus the per-cluster member
// selection precomputed at fit time.
struct ClusterRanking {
    KMeansModel clusters;
    std::vector<std::vector<int>> selectedPerCluster;
    std::vector<int> globalSelected;  // ranking over all of DSEL, used for empty clusters
};
ClusterRanking fitClusterRanking(const DselCache& cache, const Dataset& dsel,
                                 const DsConfig& config, std::uint64_t seed);
VoteResult desclusterSelect(const ClusterRanking& ranking, std::span<const double> x,
                            const std::vector<int>& queryHard, std::size_t classCount = 2);

// META-DES: a meta-classifier over per-member competence features
// [f1 region correctness bits (K) | f2 region true-class posteriors (K) |
//  f3 region accuracy (1) | f4 profile-neighborhood correctness bits (K_p) |
//  f5 max posterior on the query (1)], trained to predict whether the member
// classifies the query correctly.
struct MetaDesModel {
    std::size_t regionSize = 7;
    std::size_t profileNeighbors = 5;
    double consensusThreshold = 0.7;
    std::unique_ptr<Model> competenceClassifier;  // null -> constant competence
    double constantCompetence = 0.5;
    std::size_t trainInstanceCount = 0;
    std::size_t validationInstanceCount = 0;  // held out, unused

    std::size_t featureLength() const { return 2 * regionSize + profileNeighbors + 2; }
    double competenceProbability(const std::vector<double>& features) const;
};

std::vector<double> metadesFeatures(const DselCache& cache, const RegionOfCompetence& region,
                                    const RegionOfCompetence& profileRegion,
                                    const OutputProfile& queryProfile, std::size_t member);

MetaDesModel metadesTrain(const Pool& pool, const DselCache& cache, const Dataset& dsel,
                          const Dataset& trainData, const DsConfig& config, std::uint64_t seed);
VoteResult metadesSelect(const MetaDesModel& model, const DselCache& cache, const Dataset& dsel,
                         std::span<const double> x, const OutputProfile& queryProfile);

// Fitted per-pool state for the uniform classify() front door.
struct DsContext {
    const Pool* pool = nullptr;
    const Dataset* dsel = nullptr;
    DselCache cache;
    DsConfig config;
    std::optional<ClusterRanking> clusters;
    std::optional<MetaDesModel> metades;
};

// Builds the cache and any per-technique state the requested techniques need.
// Region sizes are clamped to the DSEL size. META-DES training data may be
// null when the technique list does not include it.
DsContext prepareContext(const Pool& pool, const Dataset& dsel, const Dataset* metadesTrainData,
                         const DsConfig& config, const std::vector<Technique>& techniques,
                         std::uint64_t seed);

struct Classification {
    int label = 0;
    std::vector<double> proba;         // vote mass normalized to sum 1
    std::vector<int> selectedMembers;  // ascending member indices
};

Classification classify(const DsContext& context, Technique technique, std::span<const double> x);

}  // namespace dselect
