#include "dselect/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dselect/errors.hpp"
#include "dselect/rng.hpp"

namespace dselect {

RegionOfCompetence RegionOfCompetence::prefix(std::size_t count) const {
    RegionOfCompetence out;
    count = std::min(count, indices.size());
    out.indices.assign(indices.begin(), indices.begin() + static_cast<long>(count));
    out.distances.assign(distances.begin(), distances.begin() + static_cast<long>(count));
    out.weights.assign(weights.begin(), weights.begin() + static_cast<long>(count));
    return out;
}

double euclideanDistance(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double dev = a[j] - b[j];
        d2 += dev * dev;
    }
    return std::sqrt(d2);
}

namespace {

RegionOfCompetence regionFromDistances(std::vector<std::pair<double, int>>& order,
                                       std::size_t k) {
    std::sort(order.begin(), order.end());
    RegionOfCompetence region;
    region.indices.reserve(k);
    region.distances.reserve(k);
    region.weights.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double d = std::sqrt(order[i].first);
        region.indices.push_back(order[i].second);
        region.distances.push_back(d);
        region.weights.push_back(1.0 / std::max(d, kDistanceEpsilon));
    }
    return region;
}

}  // namespace

RegionOfCompetence knnRegion(const Dataset& dsel, std::span<const double> x, std::size_t k) {
    const std::size_t n = dsel.rowCount();
    if (k < 1 || k > n) {
        throw ValueError("region: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) +
                         "]");
    }
    if (x.size() != dsel.featureCount()) {
        throw ValueError("region: query dimensionality does not match DSEL");
    }
    std::vector<std::pair<double, int>> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = dsel.row(i);
        double d2 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double dev = x[j] - row[j];
            d2 += dev * dev;
        }
        order[i] = {d2, static_cast<int>(i)};
    }
    return regionFromDistances(order, k);
}

OutputProfile outputProfile(const Pool& pool, std::span<const double> x) {
    OutputProfile profile;
    profile.hard.reserve(pool.size());
    profile.soft.reserve(pool.size() * pool.classCount());
    for (const auto& member : pool.members) {
        const auto proba = member->predictProba(x);
        profile.hard.push_back(argmaxLowestTie(proba));
        profile.soft.insert(profile.soft.end(), proba.begin(), proba.end());
    }
    return profile;
}

OutputProfile outputProfile(const DselCache& cache, std::size_t sampleIndex) {
    OutputProfile profile;
    profile.hard.reserve(cache.memberCount);
    profile.soft.reserve(cache.memberCount * cache.classCount);
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        profile.hard.push_back(cache.hardAt(m, sampleIndex));
        for (std::size_t c = 0; c < cache.classCount; ++c) {
            profile.soft.push_back(cache.softAt(m, sampleIndex, c));
        }
    }
    return profile;
}

double profileSimilarity(const OutputProfile& a, const OutputProfile& b) {
    if (a.hard.size() != b.hard.size()) {
        throw ValueError("profile similarity: profiles have different member counts");
    }
    std::size_t agreements = 0;
    for (std::size_t i = 0; i < a.hard.size(); ++i) {
        if (a.hard[i] == b.hard[i]) ++agreements;
    }
    return static_cast<double>(agreements) / static_cast<double>(a.hard.size());
}

RegionOfCompetence knopRegion(const DselCache& cache, const OutputProfile& query, std::size_t k) {
    const std::size_t n = cache.sampleCount;
    if (k < 1 || k > n) {
        throw ValueError("knop region: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(n) + "]");
    }
    if (query.soft.size() != cache.memberCount * cache.classCount) {
        throw ValueError("knop region: profile length does not match the cache");
    }
    std::vector<std::pair<double, int>> order(n);
    for (std::size_t s = 0; s < n; ++s) {
        double d2 = 0.0;
        for (std::size_t m = 0; m < cache.memberCount; ++m) {
            for (std::size_t c = 0; c < cache.classCount; ++c) {
                const double dev = query.soft[m * cache.classCount + c] - cache.softAt(m, s, c);
                d2 += dev * dev;
            }
        }
        order[s] = {d2, static_cast<int>(s)};
    }
    return regionFromDistances(order, k);
}

KMeansModel fitKmeans(const Dataset& dsel, std::size_t k, std::uint64_t seed, double tolerance,
                      int maxIterations) {
    const std::size_t n = dsel.rowCount();
    const std::size_t d = dsel.featureCount();
    if (k < 1 || k > n) {
        throw ValueError("kmeans: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) +
                         "]");
    }
    KMeansModel model;
    model.k = k;
    model.dims = d;
    model.centroids.resize(k * d);
    model.assignments.assign(n, 0);

    // Seed centroids at k distinct samples.
    Rng rng(seed);
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pick[i], pick[j]);
        const auto row = dsel.row(pick[i]);
        std::copy(row.begin(), row.end(), model.centroids.begin() + static_cast<long>(i * d));
    }

    std::vector<double> nearestDistance(n);
    for (int iter = 0; iter < maxIterations; ++iter) {
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = dsel.row(i);
            double best = std::numeric_limits<double>::infinity();
            int bestC = 0;
            for (std::size_t c = 0; c < k; ++c) {
                double d2 = 0.0;
                const double* centroid = model.centroids.data() + c * d;
                for (std::size_t j = 0; j < d; ++j) {
                    const double dev = row[j] - centroid[j];
                    d2 += dev * dev;
                }
                if (d2 < best) {
                    best = d2;
                    bestC = static_cast<int>(c);
                }
            }
            model.assignments[i] = bestC;
            nearestDistance[i] = best;
            objective += best;
        }
        model.objectiveTrace.push_back(objective);

        std::vector<double> sums(k * d, 0.0);
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(model.assignments[i]);
            const auto row = dsel.row(i);
            for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += row[j];
            ++sizes[c];
        }
        double maxShift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) {
                // Reseed at the sample farthest from its nearest centroid.
                std::size_t farthest = 0;
                for (std::size_t i = 1; i < n; ++i) {
                    if (nearestDistance[i] > nearestDistance[farthest]) farthest = i;
                }
                const auto row = dsel.row(farthest);
                std::copy(row.begin(), row.end(),
                          model.centroids.begin() + static_cast<long>(c * d));
                nearestDistance[farthest] = 0.0;
                ++model.reseedCount;
                maxShift = std::numeric_limits<double>::infinity();
                continue;
            }
            double shift2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double updated = sums[c * d + j] / static_cast<double>(sizes[c]);
                const double dev = updated - model.centroids[c * d + j];
                shift2 += dev * dev;
                model.centroids[c * d + j] = updated;
            }
            maxShift = std::max(maxShift, std::sqrt(shift2));
        }
        if (maxShift < tolerance) break;
    }
    // Final assignment against the converged centroids.
    for (std::size_t i = 0; i < n; ++i) {
        model.assignments[i] = assignCluster(model, dsel.row(i));
    }
    return model;
}

int assignCluster(const KMeansModel& model, std::span<const double> x) {
    if (x.size() != model.dims) {
        throw ValueError("kmeans: query dimensionality does not match the model");
    }
    double best = std::numeric_limits<double>::infinity();
    int bestC = 0;
    for (std::size_t c = 0; c < model.k; ++c) {
        double d2 = 0.0;
        const double* centroid = model.centroids.data() + c * model.dims;
        for (std::size_t j = 0; j < model.dims; ++j) {
            const double dev = x[j] - centroid[j];
            d2 += dev * dev;
        }
        if (d2 < best) {
            best = d2;
            bestC = static_cast<int>(c);
        }
    }
    return bestC;
}

}  // namespace dselect
