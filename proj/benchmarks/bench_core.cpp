#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "dselect/metrics.hpp"
#include "dselect/pool.hpp"
#include "dselect/preprocess.hpp"
#include "dselect/region.hpp"
#include "dselect/rng.hpp"
#include "dselect/techniques.hpp"

using namespace dselect;

namespace {

struct Fixture {
    Dataset train;
    Dataset dsel;
    Pool pool;
    std::unique_ptr<DsContext> context;
    std::vector<std::vector<double>> queries;

    Fixture() {
        train = synthGenerate(1200, 300, 8, 1.5, 1);
        SplitSpec split;
        split.seed = 2;
        auto [poolTrain, dselPart] = dselSplit(train, split);
        dsel = std::move(dselPart);
        pool = fitBagging(LearnerKind::Gnb, LearnerConfig{}, poolTrain, 20, 3);
        context = std::make_unique<DsContext>(
            prepareContext(pool, dsel, &poolTrain, DsConfig{}, allTechniques(), 4));
        Rng rng(5);
        for (int i = 0; i < 64; ++i) {
            std::vector<double> q(8);
            for (auto& v : q) v = rng.nextDouble();
            queries.push_back(std::move(q));
        }
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

void BM_KnnRegion(benchmark::State& state) {
    auto& f = fixture();
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(knnRegion(f.dsel, f.queries[i % f.queries.size()], 7));
        ++i;
    }
}
BENCHMARK(BM_KnnRegion);

void BM_BuildCache(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(buildDselCache(f.pool, f.dsel));
    }
}
BENCHMARK(BM_BuildCache);

void classifyBench(benchmark::State& state, Technique technique) {
    auto& f = fixture();
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(classify(*f.context, technique, f.queries[i % f.queries.size()]));
        ++i;
    }
}
void BM_ClassifyOla(benchmark::State& state) { classifyBench(state, Technique::Ola); }
void BM_ClassifyKnoraUnion(benchmark::State& state) { classifyBench(state, Technique::KnoraUnion); }
void BM_ClassifyDesKnn(benchmark::State& state) { classifyBench(state, Technique::DesKnn); }
void BM_ClassifyKnop(benchmark::State& state) { classifyBench(state, Technique::Knop); }
void BM_ClassifyMetaDes(benchmark::State& state) { classifyBench(state, Technique::MetaDes); }
BENCHMARK(BM_ClassifyOla);
BENCHMARK(BM_ClassifyKnoraUnion);
BENCHMARK(BM_ClassifyDesKnn);
BENCHMARK(BM_ClassifyKnop);
BENCHMARK(BM_ClassifyMetaDes);

void BM_Auc(benchmark::State& state) {
    Rng rng(7);
    ScoredPredictions sp;
    for (int i = 0; i < 10000; ++i) {
        sp.scores.push_back(rng.nextDouble());
        sp.labels.push_back(static_cast<int>(rng.below(2)));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(auc(sp));
    }
}
BENCHMARK(BM_Auc);

void BM_HMeasure(benchmark::State& state) {
    Rng rng(9);
    ScoredPredictions sp;
    for (int i = 0; i < 10000; ++i) {
        const int y = static_cast<int>(rng.below(2));
        sp.labels.push_back(y);
        sp.scores.push_back(std::min(1.0, std::max(0.0, 0.3 * rng.nextGaussian() + (y ? 0.6 : 0.4))));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(hMeasure(sp));
    }
}
BENCHMARK(BM_HMeasure);

}  // namespace

BENCHMARK_MAIN();
