#include "dselect/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

#include "dselect/errors.hpp"
#include "dselect/rng.hpp"

namespace dselect {

namespace {

// Percent-suffixed cells ("13.56%") parse as their numeric part; rate
// columns in credit exports carry the suffix.
bool parsesAsNumber(const std::string& cell, double* out = nullptr) {
    if (cell.empty()) return false;
    std::size_t len = cell.size();
    if (cell.back() == '%') {
        if (--len == 0) return false;
    }
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + len) return false;
    if (!std::isfinite(v)) return false;
    if (out) *out = v;
    return true;
}

std::vector<std::size_t> keptRowIndices(const RawTable& raw, const PreprocessConfig& config,
                                        int targetIndex) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < raw.rowCount(); ++i) {
        const std::string& status = raw.rows[i][static_cast<std::size_t>(targetIndex)];
        if (status == config.positiveStatus || status == config.negativeStatus) {
            kept.push_back(i);
        }
    }
    return kept;
}

}  // namespace

std::vector<std::string> PreprocessModel::featureNames() const {
    // Feature order is the original column order; one-hot blocks expand in
    // place, average_fico sits where fico_range_low was.
    std::vector<std::string> names;
    struct Entry {
        int order;
        std::vector<std::string> block;
    };
    std::vector<Entry> entries;
    for (const auto& c : continuous) {
        const int order = c.sourceIndex >= 0 ? c.sourceIndex : ficoLowIndex;
        entries.push_back({order, {c.name}});
    }
    for (const auto& c : categorical) {
        std::vector<std::string> block;
        for (const auto& cat : c.categories) block.push_back(c.name + "=" + cat);
        entries.push_back({c.sourceIndex, std::move(block)});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.order < b.order; });
    for (auto& e : entries) {
        for (auto& n : e.block) names.push_back(std::move(n));
    }
    return names;
}

DatasetMeta PreprocessModel::meta() const {
    DatasetMeta m;
    m.featureNames = featureNames();
    m.positiveLabel = config.positiveStatus;
    m.negativeLabel = config.negativeStatus;
    // Scaling ranges aligned with featureNames; one-hot columns carry [0,1].
    struct Range {
        int order;
        std::vector<std::pair<double, double>> block;
    };
    std::vector<Range> ranges;
    for (const auto& c : continuous) {
        const int order = c.sourceIndex >= 0 ? c.sourceIndex : ficoLowIndex;
        ranges.push_back({order, {{c.min, c.max}}});
    }
    for (const auto& c : categorical) {
        std::vector<std::pair<double, double>> block(c.categories.size(), {0.0, 1.0});
        ranges.push_back({c.sourceIndex, std::move(block)});
    }
    std::sort(ranges.begin(), ranges.end(),
              [](const Range& a, const Range& b) { return a.order < b.order; });
    for (const auto& r : ranges) {
        for (const auto& [lo, hi] : r.block) {
            m.scaleMin.push_back(lo);
            m.scaleMax.push_back(hi);
        }
    }
    return m;
}

PreprocessModel fitPreprocess(const RawTable& raw, const PreprocessConfig& config) {
    PreprocessModel model;
    model.config = config;

    const int targetIndex = raw.columnIndex(config.targetColumn);
    if (targetIndex < 0) {
        throw SchemaError("preprocess: target column '" + config.targetColumn + "' not present");
    }
    const auto kept = keptRowIndices(raw, config, targetIndex);
    if (kept.empty()) {
        throw ValueError("preprocess: no rows with status '" + config.positiveStatus + "' or '" +
                         config.negativeStatus + "'");
    }

    std::set<std::string> ignored(config.ignoreColumns.begin(), config.ignoreColumns.end());
    std::set<std::string> forcedCategorical(config.categoricalColumns.begin(),
                                            config.categoricalColumns.end());

    model.ficoLowIndex = raw.columnIndex("fico_range_low");
    model.ficoHighIndex = raw.columnIndex("fico_range_high");

    std::vector<bool> dropped(raw.columnCount(), false);
    for (std::size_t j = 0; j < raw.columnCount(); ++j) {
        if (static_cast<int>(j) == targetIndex || ignored.count(raw.columnNames[j])) continue;
        std::size_t missing = 0;
        for (std::size_t i : kept) {
            if (raw.isMissing(raw.rows[i][j])) ++missing;
        }
        if (static_cast<double>(missing) >
            config.missingDropThreshold * static_cast<double>(kept.size())) {
            dropped[j] = true;
            model.droppedColumns.push_back(raw.columnNames[j]);
        }
    }

    model.hasAverageFico = model.ficoLowIndex >= 0 && model.ficoHighIndex >= 0 &&
                           !dropped[static_cast<std::size_t>(model.ficoLowIndex)] &&
                           !dropped[static_cast<std::size_t>(model.ficoHighIndex)];

    auto fitContinuous = [&](const std::string& name, int sourceIndex, auto&& valueOf) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i : kept) {
            std::optional<double> v = valueOf(i);
            if (v) {
                sum += *v;
                ++count;
            }
        }
        const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
        double lo = mean, hi = mean;
        for (std::size_t i : kept) {
            const double v = valueOf(i).value_or(mean);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi <= lo) {
            model.warnings.push_back({name, "constant column, scaled to all zeros"});
        }
        model.continuous.push_back({name, sourceIndex, mean, lo, hi});
    };

    for (std::size_t j = 0; j < raw.columnCount(); ++j) {
        if (static_cast<int>(j) == targetIndex || ignored.count(raw.columnNames[j]) || dropped[j]) {
            continue;
        }
        if (model.hasAverageFico && (static_cast<int>(j) == model.ficoLowIndex ||
                                     static_cast<int>(j) == model.ficoHighIndex)) {
            continue;  // folded into average_fico below
        }
        bool continuous = !forcedCategorical.count(raw.columnNames[j]);
        if (continuous) {
            std::size_t nonMissing = 0;
            for (std::size_t i : kept) {
                const std::string& cell = raw.rows[i][j];
                if (raw.isMissing(cell)) continue;
                ++nonMissing;
                if (!parsesAsNumber(cell)) {
                    continuous = false;
                    break;
                }
            }
            if (nonMissing == 0) continuous = false;
        }
        if (continuous) {
            fitContinuous(raw.columnNames[j], static_cast<int>(j),
                          [&](std::size_t i) -> std::optional<double> {
                              const std::string& cell = raw.rows[i][j];
                              double v;
                              if (raw.isMissing(cell) || !parsesAsNumber(cell, &v)) return {};
                              return v;
                          });
        } else {
            std::set<std::string> categories;
            for (std::size_t i : kept) {
                const std::string& cell = raw.rows[i][j];
                categories.insert(raw.isMissing(cell) ? "MISSING" : cell);
            }
            model.categorical.push_back({raw.columnNames[j], static_cast<int>(j),
                                         {categories.begin(), categories.end()}});
        }
    }

    if (model.hasAverageFico) {
        const std::size_t lowJ = static_cast<std::size_t>(model.ficoLowIndex);
        const std::size_t highJ = static_cast<std::size_t>(model.ficoHighIndex);
        fitContinuous("average_fico", -1, [&](std::size_t i) -> std::optional<double> {
            double lo, hi;
            if (raw.isMissing(raw.rows[i][lowJ]) || !parsesAsNumber(raw.rows[i][lowJ], &lo)) return {};
            if (raw.isMissing(raw.rows[i][highJ]) || !parsesAsNumber(raw.rows[i][highJ], &hi)) return {};
            return (lo + hi) / 2.0;
        });
    }

    if (model.continuous.empty() && model.categorical.empty()) {
        throw SchemaError("preprocess: no feature column survived the missingness filter");
    }
    return model;
}

Dataset applyPreprocess(const PreprocessModel& model, const RawTable& raw) {
    const int targetIndex = raw.columnIndex(model.config.targetColumn);
    if (targetIndex < 0) {
        throw SchemaError("preprocess: target column '" + model.config.targetColumn +
                          "' not present");
    }
    const auto kept = keptRowIndices(raw, model.config, targetIndex);

    const auto names = model.featureNames();
    Dataset ds(kept.size(), names.size());
    ds.setFeatureNames(names);

    // Feature offsets in emitted order.
    struct Writer {
        int order;
        std::size_t offset;
        std::size_t width;
        const PreprocessModel::ContinuousColumn* cont;
        const PreprocessModel::CategoricalColumn* cat;
    };
    std::vector<Writer> writers;
    for (const auto& c : model.continuous) {
        writers.push_back({c.sourceIndex >= 0 ? c.sourceIndex : model.ficoLowIndex, 0, 1, &c, nullptr});
    }
    for (const auto& c : model.categorical) {
        writers.push_back({c.sourceIndex, 0, c.categories.size(), nullptr, &c});
    }
    std::sort(writers.begin(), writers.end(),
              [](const Writer& a, const Writer& b) { return a.order < b.order; });
    std::size_t offset = 0;
    for (auto& w : writers) {
        w.offset = offset;
        offset += w.width;
    }

    for (std::size_t r = 0; r < kept.size(); ++r) {
        const std::size_t i = kept[r];
        const std::string& status = raw.rows[i][static_cast<std::size_t>(targetIndex)];
        ds.label(r) = status == model.config.positiveStatus ? 1 : 0;
        for (const auto& w : writers) {
            if (w.cont) {
                double v;
                if (w.cont->sourceIndex >= 0) {
                    const std::string& cell = raw.rows[i][static_cast<std::size_t>(w.cont->sourceIndex)];
                    if (raw.isMissing(cell) || !parsesAsNumber(cell, &v)) v = w.cont->mean;
                } else {
                    double lo, hi;
                    const auto& lowCell = raw.rows[i][static_cast<std::size_t>(model.ficoLowIndex)];
                    const auto& highCell = raw.rows[i][static_cast<std::size_t>(model.ficoHighIndex)];
                    if (!raw.isMissing(lowCell) && parsesAsNumber(lowCell, &lo) &&
                        !raw.isMissing(highCell) && parsesAsNumber(highCell, &hi)) {
                        v = (lo + hi) / 2.0;
                    } else {
                        v = w.cont->mean;
                    }
                }
                const double range = w.cont->max - w.cont->min;
                double scaled = range > 0.0 ? (v - w.cont->min) / range : 0.0;
                ds.at(r, w.offset) = std::clamp(scaled, 0.0, 1.0);
            } else {
                const std::string& cell = raw.rows[i][static_cast<std::size_t>(w.cat->sourceIndex)];
                const std::string value = raw.isMissing(cell) ? "MISSING" : cell;
                for (std::size_t c = 0; c < w.cat->categories.size(); ++c) {
                    ds.at(r, w.offset + c) = w.cat->categories[c] == value ? 1.0 : 0.0;
                }
            }
        }
    }
    return ds;
}

Dataset preprocess(const RawTable& raw, const PreprocessConfig& config, PreprocessModel* modelOut) {
    PreprocessModel model = fitPreprocess(raw, config);
    Dataset ds = applyPreprocess(model, raw);
    if (modelOut) *modelOut = std::move(model);
    return ds;
}

Date parseDate(const std::string& text) {
    static const std::array<std::string, 12> monthNames = {
        "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    Date d;
    if (text.size() >= 8 && text[4] == '-') {  // YYYY-MM-DD
        d.year = std::atoi(text.substr(0, 4).c_str());
        d.month = std::atoi(text.substr(5, 2).c_str());
        d.day = text.size() >= 10 ? std::atoi(text.substr(8, 2).c_str()) : 1;
    } else if (text.size() >= 8 && text[3] == '-') {  // Mon-YYYY
        const std::string mon = text.substr(0, 3);
        for (std::size_t m = 0; m < monthNames.size(); ++m) {
            if (mon == monthNames[m]) d.month = static_cast<int>(m) + 1;
        }
        d.year = std::atoi(text.substr(4, 4).c_str());
        d.day = 1;
    }
    if (d.year <= 0 || d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) {
        throw ParseError("date: cannot parse '" + text + "'");
    }
    return d;
}

std::pair<Dataset, Dataset> temporalSplit(const Dataset& ds, const std::vector<Date>& dates,
                                          const Date& boundary) {
    if (dates.size() != ds.rowCount()) {
        throw ValueError("temporal split: " + std::to_string(dates.size()) + " dates for " +
                         std::to_string(ds.rowCount()) + " rows");
    }
    std::vector<std::size_t> trainIdx, testIdx;
    for (std::size_t i = 0; i < ds.rowCount(); ++i) {
        (dates[i] <= boundary ? trainIdx : testIdx).push_back(i);
    }
    if (trainIdx.empty()) throw ValueError("temporal split: train partition is empty");
    if (testIdx.empty()) throw ValueError("temporal split: test partition is empty");
    return {ds.select(trainIdx), ds.select(testIdx)};
}

namespace {

// Largest-remainder allocation of `total` across per-class counts.
std::vector<std::size_t> stratifiedQuotas(const std::vector<std::vector<std::size_t>>& byClass,
                                          double fraction, std::size_t total) {
    std::vector<std::size_t> quotas(byClass.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < byClass.size(); ++c) {
        const double exact = fraction * static_cast<double>(byClass[c].size());
        quotas[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += quotas[c];
        remainders.push_back({exact - std::floor(exact), c});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k) {
        const std::size_t c = remainders[k].second;
        if (quotas[c] < byClass[c].size()) {
            ++quotas[c];
            ++assigned;
        }
    }
    // Guard against quota overshoot from rounding.
    for (std::size_t c = 0; assigned > total && c < quotas.size(); ++c) {
        while (quotas[c] > 0 && assigned > total) {
            --quotas[c];
            --assigned;
        }
    }
    return quotas;
}

std::pair<Dataset, Dataset> stratifiedSplit(const Dataset& ds, double fraction, std::uint64_t seed,
                                            bool stratified, bool requireBothClasses) {
    if (fraction <= 0.0 || fraction >= 1.0) {
        throw ValueError("split: fraction must be in (0,1)");
    }
    const std::size_t n = ds.rowCount();
    const auto holdoutTotal =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    Rng rng(seed);
    std::vector<std::size_t> holdoutIdx, keptIdx;
    if (stratified) {
        std::vector<std::vector<std::size_t>> byClass(ds.classCount());
        for (std::size_t i = 0; i < n; ++i) {
            byClass[static_cast<std::size_t>(ds.label(i))].push_back(i);
        }
        if (requireBothClasses) {
            for (std::size_t c = 0; c < byClass.size(); ++c) {
                if (byClass[c].size() < 2) {
                    throw ValueError("split: class " + std::to_string(c) +
                                     " has fewer than 2 samples, cannot stratify");
                }
            }
        }
        const auto quotas = stratifiedQuotas(byClass, fraction, holdoutTotal);
        for (std::size_t c = 0; c < byClass.size(); ++c) {
            rng.shuffle(byClass[c]);
            for (std::size_t k = 0; k < byClass[c].size(); ++k) {
                (k < quotas[c] ? holdoutIdx : keptIdx).push_back(byClass[c][k]);
            }
        }
    } else {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        rng.shuffle(all);
        for (std::size_t k = 0; k < n; ++k) {
            (k < holdoutTotal ? holdoutIdx : keptIdx).push_back(all[k]);
        }
    }
    std::sort(holdoutIdx.begin(), holdoutIdx.end());
    std::sort(keptIdx.begin(), keptIdx.end());
    return {ds.select(keptIdx), ds.select(holdoutIdx)};
}

}  // namespace

std::pair<Dataset, Dataset> dselSplit(const Dataset& train, const SplitSpec& spec) {
    if (train.rowCount() < 4) {
        throw ValueError("dsel split: need at least 4 training samples");
    }
    return stratifiedSplit(train, spec.dselFraction, spec.seed, spec.stratified,
                           /*requireBothClasses=*/spec.stratified);
}

std::pair<Dataset, Dataset> stratifiedHoldout(const Dataset& ds, double fraction,
                                              std::uint64_t seed) {
    return stratifiedSplit(ds, fraction, seed, /*stratified=*/true, /*requireBothClasses=*/true);
}

Dataset undersampleToRatio(const Dataset& train, double ratio, std::uint64_t seed) {
    if (ratio < 1.0) throw ValueError("undersample: ratio must be >= 1");
    const auto counts = train.classCounts();
    if (counts[0] == 0 || counts[1] == 0) {
        throw ValueError("undersample: both classes must be present");
    }
    const int minorityClass = counts[1] <= counts[0] ? 1 : 0;
    const auto nMin = counts[static_cast<std::size_t>(minorityClass)];
    const auto nMaj = counts[static_cast<std::size_t>(1 - minorityClass)];
    const double currentRatio = static_cast<double>(nMaj) / static_cast<double>(nMin);

    auto target = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(nMin)));
    if (target > nMaj) {
        if (ratio <= currentRatio * 1.001) {
            target = nMaj;
        } else {
            throw ValueError("undersample: requested ratio " + std::to_string(ratio) +
                             " exceeds the current ratio " + std::to_string(currentRatio));
        }
    }

    std::vector<std::size_t> majorityIdx, keptIdx;
    for (std::size_t i = 0; i < train.rowCount(); ++i) {
        if (train.label(i) == minorityClass) {
            keptIdx.push_back(i);
        } else {
            majorityIdx.push_back(i);
        }
    }
    Rng rng(seed);
    rng.shuffle(majorityIdx);
    keptIdx.insert(keptIdx.end(), majorityIdx.begin(), majorityIdx.begin() + static_cast<long>(target));
    std::sort(keptIdx.begin(), keptIdx.end());
    return train.select(keptIdx);
}

Dataset synthGenerate(std::size_t negativeCount, std::size_t positiveCount, std::size_t dims,
                      double separation, std::uint64_t seed) {
    if (negativeCount == 0 || positiveCount == 0 || dims == 0) {
        throw ValueError("synth: class counts and dimension must be positive");
    }
    Rng rng(seed);
    std::vector<double> direction(dims);
    double norm = 0.0;
    for (auto& v : direction) {
        v = rng.nextGaussian();
        norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
        direction.assign(dims, 0.0);
        direction[0] = 1.0;
        norm = 1.0;
    }
    for (auto& v : direction) v = v / norm * separation;

    const std::size_t n = negativeCount + positiveCount;
    Dataset ds(n, dims);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < dims; ++j) names.push_back("f" + std::to_string(j));
    ds.setFeatureNames(names);
    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = i >= negativeCount;
        ds.label(i) = positive ? 1 : 0;
        for (std::size_t j = 0; j < dims; ++j) {
            ds.at(i, j) = rng.nextGaussian() + (positive ? direction[j] : 0.0);
        }
    }
    for (std::size_t j = 0; j < dims; ++j) {
        double lo = ds.at(0, j), hi = ds.at(0, j);
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, ds.at(i, j));
            hi = std::max(hi, ds.at(i, j));
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            ds.at(i, j) = range > 0.0 ? (ds.at(i, j) - lo) / range : 0.0;
        }
    }
    return ds;
}

}  // namespace dselect
