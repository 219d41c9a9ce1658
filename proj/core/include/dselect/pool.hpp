#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dselect/dataset.hpp"
#include "dselect/learners.hpp"

namespace dselect {

enum class PoolProvenance { Bagging, RandomForest, Heterogeneous };

struct Pool {
    std::vector<std::unique_ptr<Model>> members;
    PoolProvenance provenance = PoolProvenance::Bagging;
    std::optional<LearnerKind> baggedKind;  // set for homogeneous bagging

    std::size_t size() const { return members.size(); }
    std::size_t dimension() const { return members.empty() ? 0 : members.front()->dimension(); }
    std::size_t classCount() const { return members.empty() ? 2 : members.front()->classCount(); }

    // Unweighted mean of member probability vectors.
    std::vector<double> softAverage(std::span<const double> x) const;
    // Hard predictions of every member on x, in member order.
    std::vector<int> hardPredictions(std::span<const double> x) const;
};

// Precomputed pool predictions over the dynamic-selection set: hard labels,
// soft probabilities and correctness flags per (member, sample).
struct DselCache {
    std::size_t memberCount = 0;
    std::size_t sampleCount = 0;
    std::size_t classCount = 2;
    std::vector<int> hard;           // memberCount x sampleCount
    std::vector<double> soft;        // memberCount x sampleCount x classCount
    std::vector<std::uint8_t> correct;  // memberCount x sampleCount
    std::vector<int> labels;         // sampleCount

    int hardAt(std::size_t member, std::size_t sample) const {
        return hard[member * sampleCount + sample];
    }
    bool correctAt(std::size_t member, std::size_t sample) const {
        return correct[member * sampleCount + sample] != 0;
    }
    double softAt(std::size_t member, std::size_t sample, std::size_t cls) const {
        return soft[(member * sampleCount + sample) * classCount + cls];
    }
};

struct VoteResult {
    int label = 0;
    std::vector<double> voteMass;      // per class
    std::vector<int> selectedMembers;  // the members that actually voted
    bool usedFallback = false;         // full-pool fallback vote
};

// Weighted majority vote over per-member predicted labels. Ties break toward
// the lower class index. Throws when weights are all zero (callers implement
// their own fallback).
VoteResult majorityVote(const std::vector<int>& predictions,
                        const std::vector<double>* weights = nullptr,
                        std::size_t classCount = 2);

Pool fitBagging(LearnerKind kind, const LearnerConfig& config, const Dataset& train,
                std::size_t members, std::uint64_t seed);
Pool fitRandomForest(const Dataset& train, std::size_t trees, int featuresPerSplit,
                     std::uint64_t seed);

struct HeterogeneousSpec {
    LearnerKind kind;
    std::size_t members;
    LearnerConfig config;
};
Pool fitHeterogeneous(const Dataset& train, const std::vector<HeterogeneousSpec>& specs,
                      std::uint64_t seed);

DselCache buildDselCache(const Pool& pool, const Dataset& dsel);

void savePool(const Pool& pool, std::ostream& out);
Pool loadPool(std::istream& in);
void savePoolFile(const Pool& pool, const std::string& path);
Pool loadPoolFile(const std::string& path);

}  // namespace dselect
