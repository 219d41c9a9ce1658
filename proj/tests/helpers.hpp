#pragma once

#include <vector>

#include "dselect/dataset.hpp"
#include "dselect/pool.hpp"
#include "dselect/region.hpp"

namespace testutil {

inline dselect::Dataset makeDataset(const std::vector<std::vector<double>>& rows,
                                    const std::vector<int>& labels) {
    dselect::Dataset ds(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) ds.at(i, j) = rows[i][j];
        ds.label(i) = labels[i];
    }
    return ds;
}

// Cache from explicit per-member hard predictions; soft vectors are the
// matching one-hot unless given.
inline dselect::DselCache makeCache(const std::vector<std::vector<int>>& hard,
                                    const std::vector<int>& labels,
                                    const std::vector<std::vector<std::vector<double>>>& soft = {}) {
    dselect::DselCache cache;
    cache.memberCount = hard.size();
    cache.sampleCount = labels.size();
    cache.classCount = 2;
    cache.labels = labels;
    cache.hard.resize(cache.memberCount * cache.sampleCount);
    cache.correct.resize(cache.memberCount * cache.sampleCount);
    cache.soft.resize(cache.memberCount * cache.sampleCount * 2);
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        for (std::size_t s = 0; s < cache.sampleCount; ++s) {
            cache.hard[m * cache.sampleCount + s] = hard[m][s];
            cache.correct[m * cache.sampleCount + s] = hard[m][s] == labels[s] ? 1 : 0;
            for (std::size_t c = 0; c < 2; ++c) {
                const double p = soft.empty() ? (hard[m][s] == static_cast<int>(c) ? 1.0 : 0.0)
                                              : soft[m][s][c];
                cache.soft[(m * cache.sampleCount + s) * 2 + c] = p;
            }
        }
    }
    return cache;
}

inline dselect::RegionOfCompetence makeRegion(const std::vector<int>& indices,
                                              const std::vector<double>& distances) {
    dselect::RegionOfCompetence region;
    region.indices = indices;
    region.distances = distances;
    for (double d : distances) {
        region.weights.push_back(1.0 / std::max(d, dselect::kDistanceEpsilon));
    }
    return region;
}

}  // namespace testutil
