#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dselect/dataset.hpp"
#include "dselect/pool.hpp"

namespace dselect {

// Smallest distance used when inverting distances into weights, so exact
// matches keep finite weight.
inline constexpr double kDistanceEpsilon = 1e-12;

// The K DSEL samples nearest a query, ordered by ascending distance
// (ties break toward the lower DSEL index). weights[i] = 1/max(d_i, eps).
struct RegionOfCompetence {
    std::vector<int> indices;
    std::vector<double> distances;
    std::vector<double> weights;

    std::size_t size() const { return indices.size(); }
    // The same region truncated to its `count` nearest samples.
    RegionOfCompetence prefix(std::size_t count) const;
};

double euclideanDistance(std::span<const double> a, std::span<const double> b);

RegionOfCompetence knnRegion(const Dataset& dsel, std::span<const double> x, std::size_t k);

// All pool members' predictions for one sample. hard[i] is the argmax of
// member i's block of soft.
struct OutputProfile {
    std::vector<int> hard;     // M
    std::vector<double> soft;  // M x L
};

OutputProfile outputProfile(const Pool& pool, std::span<const double> x);
OutputProfile outputProfile(const DselCache& cache, std::size_t sampleIndex);

// Fraction of members whose hard predictions agree: S = (1/M) sum T.
double profileSimilarity(const OutputProfile& a, const OutputProfile& b);

// Region in decision space: the K DSEL samples whose soft output profiles are
// nearest the query profile (Euclidean over the concatenated probabilities).
RegionOfCompetence knopRegion(const DselCache& cache, const OutputProfile& query, std::size_t k);

// Lloyd's k-means over DSEL features. An empty cluster is reseeded at the
// point farthest from its nearest centroid. Iterates until the largest
// centroid shift drops below `tolerance` or `maxIterations` passes.
struct KMeansModel {
    std::size_t k = 0;
    std::size_t dims = 0;
    std::vector<double> centroids;  // k x dims
    std::vector<int> assignments;   // training assignment per DSEL sample
    std::vector<double> objectiveTrace;  // within-cluster SSE after each iteration
    int reseedCount = 0;

    std::span<const double> centroid(std::size_t c) const {
        return {centroids.data() + c * dims, dims};
    }
};

KMeansModel fitKmeans(const Dataset& dsel, std::size_t k, std::uint64_t seed,
                      double tolerance = 1e-6, int maxIterations = 300);
int assignCluster(const KMeansModel& model, std::span<const double> x);

}  // namespace dselect
