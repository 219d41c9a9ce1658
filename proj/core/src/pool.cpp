#include "dselect/pool.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dselect/errors.hpp"
#include "dselect/rng.hpp"

#include <json.hpp>

namespace dselect {

std::vector<double> Pool::softAverage(std::span<const double> x) const {
    std::vector<double> mean(classCount(), 0.0);
    for (const auto& member : members) {
        const auto p = member->predictProba(x);
        for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += p[c];
    }
    for (auto& v : mean) v /= static_cast<double>(members.size());
    return mean;
}

std::vector<int> Pool::hardPredictions(std::span<const double> x) const {
    std::vector<int> preds(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) preds[i] = members[i]->predictLabel(x);
    return preds;
}

VoteResult majorityVote(const std::vector<int>& predictions, const std::vector<double>* weights,
                        std::size_t classCount) {
    if (predictions.empty()) throw ValueError("vote: no predictions");
    if (weights) {
        if (weights->size() != predictions.size()) {
            throw ValueError("vote: weight count does not match prediction count");
        }
        double sum = 0.0;
        for (double w : *weights) {
            if (w < 0.0) throw ValueError("vote: negative weight");
            sum += w;
        }
        if (sum <= 0.0) throw ValueError("vote: all weights are zero");
    }
    VoteResult result;
    result.voteMass.assign(classCount, 0.0);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto c = static_cast<std::size_t>(predictions[i]);
        if (c >= classCount) throw ValueError("vote: label out of range");
        result.voteMass[c] += weights ? (*weights)[i] : 1.0;
    }
    result.label = argmaxLowestTie(result.voteMass);
    return result;
}

namespace {

// Bootstrap resample of row indices (n draws with replacement).
std::vector<std::size_t> bootstrapRows(std::size_t n, Rng& rng) {
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    return rows;
}

bool hasBothClasses(const Dataset& ds) {
    const auto counts = ds.classCounts();
    return counts[0] > 0 && counts[1] > 0;
}

std::unique_ptr<Model> fitBootstrapMember(LearnerKind kind, const LearnerConfig& config,
                                          const Dataset& train, std::uint64_t memberSeed) {
    Rng rng(memberSeed);
    // GNB cannot fit a single-class resample; redraw a limited number of times.
    const int maxAttempts = kind == LearnerKind::Gnb ? 10 : 1;
    for (int attempt = 0; attempt < maxAttempts; ++attempt) {
        const auto rows = bootstrapRows(train.rowCount(), rng);
        Dataset resample = train.select(rows);
        if (kind == LearnerKind::Gnb && !hasBothClasses(resample)) continue;
        LearnerConfig memberConfig = config;
        memberConfig.seed = deriveSeed(memberSeed, {0x11});
        return fit(kind, memberConfig, resample);
    }
    throw ValueError("bagging: could not draw a two-class bootstrap resample in 10 attempts");
}

}  // namespace

Pool fitBagging(LearnerKind kind, const LearnerConfig& config, const Dataset& train,
                std::size_t members, std::uint64_t seed) {
    if (members == 0) throw ValueError("bagging: pool size must be >= 1");
    if (train.rowCount() == 0) throw ValueError("bagging: empty training set");
    Pool pool;
    pool.provenance = kind == LearnerKind::Tree && config.treeFeaturesPerSplit > 0
                          ? PoolProvenance::RandomForest
                          : PoolProvenance::Bagging;
    pool.baggedKind = kind;
    pool.members.reserve(members);
    for (std::size_t m = 0; m < members; ++m) {
        pool.members.push_back(
            fitBootstrapMember(kind, config, train, deriveSeed(seed, {0xB0075, m})));
    }
    return pool;
}

Pool fitRandomForest(const Dataset& train, std::size_t trees, int featuresPerSplit,
                     std::uint64_t seed) {
    if (featuresPerSplit < 1 ||
        static_cast<std::size_t>(featuresPerSplit) > train.featureCount()) {
        throw ValueError("random forest: features per split must be in [1, d]");
    }
    LearnerConfig config;
    config.treeMaxDepth = -1;
    config.treeMinLeaf = 1;
    config.treeFeaturesPerSplit = featuresPerSplit;
    Pool pool = fitBagging(LearnerKind::Tree, config, train, trees, seed);
    pool.provenance = PoolProvenance::RandomForest;
    return pool;
}

Pool fitHeterogeneous(const Dataset& train, const std::vector<HeterogeneousSpec>& specs,
                      std::uint64_t seed) {
    std::vector<LearnerKind> kinds;
    for (const auto& spec : specs) {
        if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end()) {
            kinds.push_back(spec.kind);
        }
    }
    if (kinds.size() < 2) {
        throw ValueError("heterogeneous pool: need at least two distinct learner kinds");
    }
    Pool pool;
    pool.provenance = PoolProvenance::Heterogeneous;
    std::size_t stream = 0;
    for (const auto& spec : specs) {
        for (std::size_t m = 0; m < spec.members; ++m) {
            pool.members.push_back(fitBootstrapMember(spec.kind, spec.config, train,
                                                      deriveSeed(seed, {0x4E7, stream})));
            ++stream;
        }
    }
    return pool;
}

DselCache buildDselCache(const Pool& pool, const Dataset& dsel) {
    if (pool.size() == 0) throw ValueError("cache: empty pool");
    if (dsel.featureCount() != pool.dimension()) {
        throw ValueError("cache: dsel dimensionality does not match the pool");
    }
    DselCache cache;
    cache.memberCount = pool.size();
    cache.sampleCount = dsel.rowCount();
    cache.classCount = pool.classCount();
    cache.hard.resize(cache.memberCount * cache.sampleCount);
    cache.soft.resize(cache.memberCount * cache.sampleCount * cache.classCount);
    cache.correct.resize(cache.memberCount * cache.sampleCount);
    cache.labels.assign(dsel.labels().begin(), dsel.labels().end());
    for (std::size_t m = 0; m < cache.memberCount; ++m) {
        for (std::size_t s = 0; s < cache.sampleCount; ++s) {
            const auto proba = pool.members[m]->predictProba(dsel.row(s));
            const int label = argmaxLowestTie(proba);
            cache.hard[m * cache.sampleCount + s] = label;
            cache.correct[m * cache.sampleCount + s] = label == dsel.label(s) ? 1 : 0;
            std::copy(proba.begin(), proba.end(),
                      cache.soft.begin() +
                          static_cast<long>((m * cache.sampleCount + s) * cache.classCount));
        }
    }
    return cache;
}

namespace {

std::string provenanceName(PoolProvenance p) {
    switch (p) {
        case PoolProvenance::Bagging: return "bagging";
        case PoolProvenance::RandomForest: return "random_forest";
        case PoolProvenance::Heterogeneous: return "heterogeneous";
    }
    return "unknown";
}

PoolProvenance provenanceFromName(const std::string& name) {
    if (name == "bagging") return PoolProvenance::Bagging;
    if (name == "random_forest") return PoolProvenance::RandomForest;
    if (name == "heterogeneous") return PoolProvenance::Heterogeneous;
    throw SchemaError("pool: unknown provenance '" + name + "'");
}

}  // namespace

void savePool(const Pool& pool, std::ostream& out) {
    nlohmann::json j;
    j["format"] = "dselect-pool";
    j["version"] = 1;
    j["provenance"] = provenanceName(pool.provenance);
    if (pool.baggedKind) j["baggedKind"] = learnerKindName(*pool.baggedKind);
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : pool.members) {
        std::ostringstream buf;
        m->save(buf);
        members.push_back(nlohmann::json::parse(buf.str()));
    }
    j["members"] = std::move(members);
    out << j.dump();
}

Pool loadPool(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("pool: bad JSON: ") + e.what());
    }
    if (j.value("format", "") != "dselect-pool") {
        throw SchemaError("pool: missing dselect-pool format tag");
    }
    Pool pool;
    pool.provenance = provenanceFromName(j.value("provenance", ""));
    if (j.contains("baggedKind")) {
        pool.baggedKind = learnerKindFromName(j["baggedKind"].get<std::string>());
    }
    for (const auto& mj : j.at("members")) {
        std::istringstream buf(mj.dump());
        pool.members.push_back(loadModel(buf));
    }
    if (pool.members.empty()) throw SchemaError("pool: no members");
    return pool;
}

void savePoolFile(const Pool& pool, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("pool: cannot write '" + path + "'");
    savePool(pool, out);
}

Pool loadPoolFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("pool: cannot open '" + path + "'");
    return loadPool(in);
}

}  // namespace dselect
